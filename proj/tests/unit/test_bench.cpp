#include <gtest/gtest.h>

#include <complex>

#include "positrv/bench.hpp"
#include "positrv/sim.hpp"

using namespace positrv;
using namespace positrv::bench;

TEST(Bench, Summary) {
  const auto s = summarize({1.0, 2.0, 3.0});
  EXPECT_EQ(s.samples, 3u);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  // df = 2 has a closed form: t = (2p - 1) sqrt(2 / (4p(1 - p))), sd = 1
  const double p = 0.975;
  const double t = (2 * p - 1) * std::sqrt(2 / (4 * p * (1 - p)));
  EXPECT_NEAR(t, 4.3026527297494639, 1e-13);
  EXPECT_NEAR(s.ci_high - s.mean, t / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(s.mean - s.ci_low, t / std::sqrt(3.0), 1e-12);
  const auto one = summarize({5.0});
  EXPECT_EQ(one.ci_low, 5.0);
  EXPECT_EQ(one.ci_high, 5.0);
  EXPECT_EQ(summarize({}).samples, 0u);
}

TEST(Bench, ArgumentReduction) {
  EXPECT_EQ(reduce(0, Trig::Sin).degrees, 0);
  EXPECT_EQ(reduce(135, Trig::Sin).degrees, 45);
  EXPECT_EQ(reduce(300, Trig::Sin).degrees, -60);
  EXPECT_TRUE(reduce(180, Trig::Sin).exact_zero);
  EXPECT_TRUE(reduce(270, Trig::Cos).exact_zero);
  EXPECT_FALSE(reduce(0, Trig::Cos).exact_zero);
  const Reduced c = reduce(200, Trig::Cos);
  EXPECT_EQ(c.degrees, -20);
  EXPECT_TRUE(c.negate);
  for (int d = 0; d < 360; ++d) {
    for (Trig f : {Trig::Sin, Trig::Cos}) {
      const Reduced r = reduce(d, f);
      ASSERT_LE(std::abs(r.degrees), 90);
      const double x = r.degrees * kDegToRad;
      const double v = f == Trig::Sin ? std::sin(x) : (r.negate ? -std::cos(x) : std::cos(x));
      const double want = f == Trig::Sin ? std::sin(d * kDegToRad) : std::cos(d * kDegToRad);
      ASSERT_NEAR(v, want, 1e-12) << d;
    }
  }
}

TEST(Bench, SeriesConvergeInBinary64) {
  for (int d = 0; d < 360; ++d) {
    EXPECT_NEAR(trig_series<double>(d, Trig::Sin), std::sin(d * kDegToRad), 1e-14);
    EXPECT_NEAR(trig_series<double>(d, Trig::Cos), std::cos(d * kDegToRad), 1e-14);
  }
  // Twenty terms: the truncated partial sum, not e^x.
  for (int x = 0; x <= 11; ++x) {
    long double sum = 0, fact = 1;
    for (int k = 0; k < kExpTerms; ++k) {
      if (k > 0) fact *= k;
      sum += std::pow(static_cast<long double>(x), k) / fact;
    }
    EXPECT_NEAR(exp_series<double>(x) / static_cast<double>(sum), 1.0, 1e-14);
  }
  EXPECT_NEAR(exp_series<double>(11) / std::exp(11.0), 0.99071, 1e-5);
}

TEST(Bench, FftMatchesDirectDft) {
  FftData<double> d = fft_inputs<double>();
  fft_in_place(d);
  for (int k = 0; k < kFftSize; k += 7) {
    std::complex<double> sum = 0;
    for (int n = 0; n < kFftSize; ++n)
      sum += std::polar(1.0, static_cast<double>(n)) *
             std::polar(1.0, -2.0 * std::numbers::pi * n * k / kFftSize);
    EXPECT_NEAR(d.re[k], sum.real(), 1e-9);
    EXPECT_NEAR(d.im[k], sum.imag(), 1e-9);
  }
}

TEST(Bench, SimulatorKernelsMatchHostPosit) {
  const auto sin_k = run_trig_kernel(Trig::Sin, sim::IntegrationMode::TightlyCoupled);
  const auto cos_k = run_trig_kernel(Trig::Cos, sim::IntegrationMode::TightlyCoupled);
  for (int d = 0; d < 360; ++d) {
    ASSERT_EQ(sin_k.words[d], trig_series<posit32>(d, Trig::Sin).bits()) << d;
    ASSERT_EQ(cos_k.words[d], trig_series<posit32>(d, Trig::Cos).bits()) << d;
  }
  const auto exp_k = run_exp_kernel(sim::IntegrationMode::Coprocessor);
  for (int x = 0; x <= 11; ++x) ASSERT_EQ(exp_k.words[x], exp_series<posit32>(x).bits());

  const auto fft_k = run_fft_kernel(sim::IntegrationMode::TightlyCoupled);
  FftData<posit32> d = fft_inputs<posit32>();
  fft_in_place(d);
  const auto mags = magnitudes(d);
  for (int n = 0; n < kFftSize; ++n) {
    ASSERT_EQ(fft_k.words[n], d.re[n].bits());
    ASSERT_EQ(fft_k.words[kFftSize + n], d.im[n].bits());
    ASSERT_EQ(fft_k.words[2 * kFftSize + n], mags[n].bits());
  }
}

TEST(Bench, ReportShapeAndDeterminism) {
  const auto a = run_bench("all", sim::IntegrationMode::TightlyCoupled);
  const auto b = run_bench("all", sim::IntegrationMode::Coprocessor);
  ASSERT_EQ(a.rows.size(), 5u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].posit.mean, b.rows[i].posit.mean);
    EXPECT_GE(a.rows[i].posit.mean, 0);
    EXPECT_LE(a.rows[i].posit.ci_low, a.rows[i].posit.mean);
    EXPECT_GE(a.rows[i].posit.ci_high, a.rows[i].posit.mean);
  }
  EXPECT_EQ(a.find("sin")->excluded, 2u);
  EXPECT_EQ(a.find("sin")->posit.samples, 358u);
  EXPECT_EQ(a.find("exp")->posit.samples, 12u);
  EXPECT_EQ(a.find("fft_magnitude")->posit.samples, 128u);
  EXPECT_EQ(a.format(), run_bench("all", sim::IntegrationMode::TightlyCoupled).format());
  const auto kv = sim::parse_report(a.format());
  EXPECT_EQ(kv.front().first, "sin_samples");
  EXPECT_THROW(run_bench("jpeg", sim::IntegrationMode::TightlyCoupled), std::invalid_argument);
}

TEST(Bench, CosAtZeroIsExact) {
  EXPECT_EQ(trig_series<double>(0, Trig::Cos), 1.0);
  EXPECT_EQ(trig_series<float>(0, Trig::Cos), 1.0f);
  EXPECT_EQ(trig_series<posit32>(0, Trig::Cos).to_double(), 1.0);
}
