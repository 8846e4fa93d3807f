#include <gtest/gtest.h>

#include <random>

#include "positrv/arith.hpp"
#include "positrv/conformance.hpp"
#include "positrv/nonrestoring.hpp"

using namespace positrv;

namespace {

const PositConfig kP32 = PositConfig::fixed(32, 2);

PositWord w(double v, const PositConfig& cfg = kP32) { return from_double(v, cfg); }
double d(PositWord p, const PositConfig& cfg = kP32) { return to_double(p, cfg); }

}  // namespace

TEST(NonRestoring, DivideMatchesIntegerDivision) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100000; ++k) {
    const std::uint64_t divisor = (rng() >> (rng() % 40)) | 1;
    const unsigned qbits = 24;
    const unsigned __int128 dividend =
        static_cast<unsigned __int128>(rng()) % (static_cast<unsigned __int128>(divisor) << qbits);
    const auto r = nonrestoring_divide(dividend, divisor, qbits);
    ASSERT_EQ(r.quotient, dividend / divisor);
    ASSERT_EQ(r.remainder, dividend % divisor);
    ASSERT_EQ(r.iterations, qbits);
  }
}

TEST(NonRestoring, SqrtMatchesIntegerSqrt) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100000; ++k) {
    const std::uint64_t x = rng() >> (rng() % 64);
    const auto r = nonrestoring_sqrt(x, 32);
    const auto root = static_cast<std::uint64_t>(r.root);
    ASSERT_LE(static_cast<unsigned __int128>(root) * root, x);
    ASSERT_GT(static_cast<unsigned __int128>(root + 1) * (root + 1), x);
    ASSERT_EQ(r.remainder, x - static_cast<unsigned __int128>(root) * root);
  }
}

TEST(Arith, SimpleExactResults) {
  EXPECT_EQ(d(add(w(1.5), w(2.25), kP32)), 3.75);
  EXPECT_EQ(d(sub(w(1.5), w(2.25), kP32)), -0.75);
  EXPECT_EQ(d(mul(w(-1.5), w(2.25), kP32)), -3.375);
  EXPECT_EQ(d(div(w(3.375), w(1.5), kP32).word), 2.25);
  EXPECT_EQ(d(sqrt(w(6.25), kP32)), 2.5);
  EXPECT_EQ(sub(w(7.0), w(7.0), kP32), zero());
}

TEST(Arith, FusedSignConventions) {
  const PositWord a = w(2), b = w(3), c = w(1);
  EXPECT_EQ(d(fused(FusedOp::Madd, a, b, c, kP32)), 7);
  EXPECT_EQ(d(fused(FusedOp::Msub, a, b, c, kP32)), 5);
  EXPECT_EQ(d(fused(FusedOp::Nmsub, a, b, c, kP32)), -5);
  EXPECT_EQ(d(fused(FusedOp::Nmadd, a, b, c, kP32)), -7);
}

TEST(Arith, FusedRoundsOnce) {
  // (1 + 2^-20)^2 - 1 = 2^-19 + 2^-40: a separate multiply loses 2^-40.
  const PositWord a = w(1.0 + std::ldexp(1.0, -20));
  const PositWord m1 = w(-1.0);
  const double fused_result = d(fused(FusedOp::Madd, a, a, m1, kP32));
  EXPECT_EQ(fused_result, std::ldexp(1.0, -19) + std::ldexp(1.0, -40));
  const double split = d(add(mul(a, a, kP32), m1, kP32));
  EXPECT_NE(split, fused_result);
}

TEST(Arith, DivideByZeroRaisesDz) {
  const auto r = div(w(1.0), zero(), kP32);
  EXPECT_EQ(r.word, nar(kP32));
  EXPECT_NE(r.flags & fflag::DZ, 0);
  const auto ok = div(w(1.0), w(3.0), kP32);
  EXPECT_EQ(ok.flags & fflag::DZ, 0);
  EXPECT_EQ(div(nar(kP32), w(2.0), kP32).word, nar(kP32));
}

TEST(Arith, NaRPropagation) {
  const PositWord n = nar(kP32);
  const PositWord one = w(1.0);
  EXPECT_EQ(add(n, one, kP32), n);
  EXPECT_EQ(mul(one, n, kP32), n);
  EXPECT_EQ(fused(FusedOp::Madd, one, one, n, kP32), n);
  EXPECT_EQ(sqrt(n, kP32), n);
  EXPECT_EQ(sqrt(w(-4.0), kP32), n);
  EXPECT_EQ(mul(zero(), n, kP32), n);
}

TEST(Arith, NoOverflowOrUnderflow) {
  const PositWord mx = maxpos(kP32);
  EXPECT_EQ(mul(mx, mx, kP32), mx);
  EXPECT_EQ(add(mx, mx, kP32), mx);
  EXPECT_EQ(mul(minpos(), minpos(), kP32), minpos());
  EXPECT_EQ(div(minpos(), mx, kP32).word, minpos());
}

TEST(Arith, IntegerConversions) {
  const PositWord x15 = w(1.5);
  EXPECT_EQ(posit_to_int(x15, false, RoundingMode::NearestEven, kP32), 2u);
  EXPECT_EQ(posit_to_int(x15, false, RoundingMode::TowardZero, kP32), 1u);
  EXPECT_EQ(posit_to_int(w(2.5), false, RoundingMode::NearestEven, kP32), 2u);
  EXPECT_EQ(posit_to_int(w(-1.5), false, RoundingMode::NearestEven, kP32),
            static_cast<std::uint32_t>(-2));
  EXPECT_EQ(posit_to_int(w(-1.5), false, RoundingMode::TowardZero, kP32),
            static_cast<std::uint32_t>(-1));
  EXPECT_EQ(posit_to_int(w(-3.0), true, RoundingMode::NearestEven, kP32), 0u);
  EXPECT_EQ(posit_to_int(maxpos(kP32), false, RoundingMode::NearestEven, kP32), 0x7FFFFFFFu);
  EXPECT_EQ(posit_to_int(nar(kP32), false, RoundingMode::NearestEven, kP32), 0x80000000u);
  EXPECT_EQ(d(int_to_posit(static_cast<std::uint32_t>(-7), false, kP32)), -7.0);
  EXPECT_EQ(d(int_to_posit(0xFFFFFFFFu, true, kP32)), 4294967296.0);
  EXPECT_EQ(int_to_posit(0, false, kP32), zero());
}

TEST(Arith, ComparisonsOrderNaRLowest) {
  const PositWord n = nar(kP32);
  EXPECT_TRUE(compare(n, n, CompareKind::Eq, kP32));
  EXPECT_TRUE(compare(n, negate(maxpos(kP32), kP32), CompareKind::Lt, kP32));
  EXPECT_TRUE(compare(w(-1), w(1), CompareKind::Lt, kP32));
  EXPECT_TRUE(compare(w(1), w(1), CompareKind::Le, kP32));
  EXPECT_FALSE(compare(w(2), w(1), CompareKind::Le, kP32));
  EXPECT_EQ(min(w(1), w(-2), kP32), w(-2));
  EXPECT_EQ(max(w(1), w(-2), kP32), w(1));
}

TEST(Arith, SignInjectionAndClassify) {
  EXPECT_EQ(sign_inject(w(2), w(-1), SignInjection::Copy, kP32), w(-2));
  EXPECT_EQ(sign_inject(w(2), w(-1), SignInjection::Negate, kP32), w(2));
  EXPECT_EQ(sign_inject(w(-2), w(-1), SignInjection::Xor, kP32), w(2));
  EXPECT_EQ(sign_inject(zero(), w(-1), SignInjection::Copy, kP32), zero());
  EXPECT_EQ(classify(w(-3), kP32), fclass::Negative);
  EXPECT_EQ(classify(zero(), kP32), fclass::Zero);
  EXPECT_EQ(classify(w(3), kP32), fclass::Positive);
  EXPECT_EQ(classify(nar(kP32), kP32), fclass::NaR);
}

TEST(Arith, EsConversion) {
  for (double v : {1.5, -3.25, 1024.0, 1.0 / 1024}) {
    const PositWord a = w(v, PositConfig::fixed(32, 2));
    const PositWord b = fcvt_es(a, 2, 3);
    EXPECT_EQ(to_double(b, PositConfig::fixed(32, 3)), v);
    EXPECT_EQ(fcvt_es(b, 3, 2), a);
  }
  // 2^200 exists only at es=3; back at es=2 it saturates.
  const PositWord big = from_double(std::ldexp(1.0, 200), PositConfig::fixed(32, 3));
  EXPECT_EQ(fcvt_es(big, 3, 2), maxpos(kP32));
  EXPECT_EQ(fcvt_es(nar(kP32), 2, 3), nar(kP32));
  const auto rt = conformance::fcvt_es_round_trip(20000, 9);
  EXPECT_EQ(rt.failures, 0u);
  EXPECT_GT(rt.exact, 0u);
  EXPECT_LT(rt.exact, rt.checked);
}

TEST(Arith, FuzzAgainstOracle16) {
  for (unsigned es : {0u, 1u, 2u}) {
    const auto cfg = PositConfig::fixed(16, es);
    conformance::Checker checker(cfg);
    checker.special_corpus(conformance::all_op_names(16));
    checker.fuzz(conformance::all_op_names(16), 5000, 100 + es);
    for (const auto& m : checker.summary().mismatches)
      ADD_FAILURE() << m.op << " " << m.inputs[0] << " got " << m.got << " expected " << m.expected;
    EXPECT_TRUE(checker.summary().passed());
  }
}
