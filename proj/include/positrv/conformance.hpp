// SPDX-License-Identifier: Apache-2.0
//
// Conformance runs: every posit operation against the exact oracle, either
// exhaustively (small posits) or on random tuples.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "positrv/arith.hpp"
#include "positrv/oracle.hpp"

namespace positrv::conformance {

enum class Arity { Unary, Binary, Ternary };

struct OpInfo {
  const char* name;
  Arity arity;
};

// clang-format off
inline constexpr OpInfo kOps[] = {
  {"add", Arity::Binary}, {"sub", Arity::Binary}, {"mul", Arity::Binary},
  {"madd", Arity::Ternary}, {"msub", Arity::Ternary}, {"nmsub", Arity::Ternary},
  {"nmadd", Arity::Ternary},
  {"div", Arity::Binary}, {"sqrt", Arity::Unary},
  {"i2p", Arity::Unary}, {"u2p", Arity::Unary},
  {"p2i", Arity::Unary}, {"p2u", Arity::Unary}, {"p2i_rtz", Arity::Unary}, {"p2u_rtz", Arity::Unary},
  {"eq", Arity::Binary}, {"lt", Arity::Binary}, {"le", Arity::Binary},
  {"min", Arity::Binary}, {"max", Arity::Binary},
  {"sgnj", Arity::Binary}, {"sgnjn", Arity::Binary}, {"sgnjx", Arity::Binary},
  {"classify", Arity::Unary}, {"negate", Arity::Unary},
  {"fcvt_es", Arity::Unary},
};
// clang-format on

inline const OpInfo* find_op(const std::string& name) {
  for (const auto& op : kOps)
    if (name == op.name) return &op;
  return nullptr;
}

inline std::vector<std::string> all_op_names(unsigned ps) {
  std::vector<std::string> names;
  for (const auto& op : kOps)
    if (std::string(op.name) != "fcvt_es" || ps == 32) names.emplace_back(op.name);
  return names;
}

/// Result of one operation on raw words. Boolean and integer results are
/// returned as plain numbers in the low bits.
using Implementation =
    std::function<std::uint32_t(const std::string&, std::span<const std::uint32_t>, const PositConfig&)>;

/// The posit-arith datapaths. fcvt_es converts from the configured es to
/// the other of {2, 3}.
inline std::uint32_t reference_impl(const std::string& op, std::span<const std::uint32_t> w,
                                    const PositConfig& cfg) {
  const PositWord a{w[0]};
  const PositWord b{w.size() > 1 ? w[1] : 0};
  const PositWord c{w.size() > 2 ? w[2] : 0};
  if (op == "add") return add(a, b, cfg).bits;
  if (op == "sub") return sub(a, b, cfg).bits;
  if (op == "mul") return mul(a, b, cfg).bits;
  if (op == "madd") return fused(FusedOp::Madd, a, b, c, cfg).bits;
  if (op == "msub") return fused(FusedOp::Msub, a, b, c, cfg).bits;
  if (op == "nmsub") return fused(FusedOp::Nmsub, a, b, c, cfg).bits;
  if (op == "nmadd") return fused(FusedOp::Nmadd, a, b, c, cfg).bits;
  if (op == "div") return div(a, b, cfg).word.bits;
  if (op == "sqrt") return sqrt(a, cfg).bits;
  if (op == "i2p") return int_to_posit(a.bits, false, cfg).bits;
  if (op == "u2p") return int_to_posit(a.bits, true, cfg).bits;
  if (op == "p2i") return posit_to_int(a, false, RoundingMode::NearestEven, cfg);
  if (op == "p2u") return posit_to_int(a, true, RoundingMode::NearestEven, cfg);
  if (op == "p2i_rtz") return posit_to_int(a, false, RoundingMode::TowardZero, cfg);
  if (op == "p2u_rtz") return posit_to_int(a, true, RoundingMode::TowardZero, cfg);
  if (op == "eq") return compare(a, b, CompareKind::Eq, cfg);
  if (op == "lt") return compare(a, b, CompareKind::Lt, cfg);
  if (op == "le") return compare(a, b, CompareKind::Le, cfg);
  if (op == "min") return min(a, b, cfg).bits;
  if (op == "max") return max(a, b, cfg).bits;
  if (op == "sgnj") return sign_inject(a, b, SignInjection::Copy, cfg).bits;
  if (op == "sgnjn") return sign_inject(a, b, SignInjection::Negate, cfg).bits;
  if (op == "sgnjx") return sign_inject(a, b, SignInjection::Xor, cfg).bits;
  if (op == "classify") return classify(a, cfg);
  if (op == "negate") return negate(a, cfg).bits;
  if (op == "fcvt_es") {
    const unsigned to = cfg.es() == 2 ? 3 : 2;
    return convert_es(a, cfg, PositConfig(cfg.ps(), cfg.is_dual() ? EsMode::dual(to) : EsMode::fixed(to))).bits;
  }
  throw std::invalid_argument("unknown op: " + op);
}

// ---------------------------------------------------------------------------
// Oracle side

namespace detail {

/// Total order used by comparisons: NaR below every real.
inline int order(const oracle::ExactRational& x, const oracle::ExactRational& y) {
  if (x.is_nar() || y.is_nar()) return (x.is_nar() ? 0 : 1) - (y.is_nar() ? 0 : 1);
  return cmp(x.value(), y.value());
}

inline bool negative_or_nar(const oracle::ExactRational& x) {
  return x.is_nar() || sgn(x.value()) < 0;
}

}  // namespace detail

/// Expected result computed from exact values only.
inline std::uint32_t oracle_expected(const std::string& op, std::span<const std::uint32_t> w,
                                     const PositConfig& cfg) {
  namespace o = oracle;
  const unsigned ps = cfg.ps();
  auto val = [&](std::size_t i) { return o::exact_value(PositWord{w[i]}, cfg); };
  auto rounded = [&](o::Op kind, std::size_t arity) {
    std::vector<o::ExactRational> xs;
    for (std::size_t i = 0; i < arity; ++i) xs.push_back(val(i));
    return o::round_to_posit(o::oracle_op(kind, xs), cfg).bits;
  };
  if (op == "add") return rounded(o::Op::Add, 2);
  if (op == "sub") return rounded(o::Op::Sub, 2);
  if (op == "mul") return rounded(o::Op::Mul, 2);
  if (op == "madd") return rounded(o::Op::Madd, 3);
  if (op == "msub") return rounded(o::Op::Msub, 3);
  if (op == "nmsub") return rounded(o::Op::Nmsub, 3);
  if (op == "nmadd") return rounded(o::Op::Nmadd, 3);
  if (op == "div") return rounded(o::Op::Div, 2);
  if (op == "sqrt") return rounded(o::Op::Sqrt, 1);
  if (op == "i2p" || op == "u2p")
    return o::round_to_posit(o::integer_value(w[0], op == "u2p", ps), cfg).bits;
  if (op == "p2i") return o::round_to_integer(val(0), false, false, ps);
  if (op == "p2u") return o::round_to_integer(val(0), true, false, ps);
  if (op == "p2i_rtz") return o::round_to_integer(val(0), false, true, ps);
  if (op == "p2u_rtz") return o::round_to_integer(val(0), true, true, ps);
  if (op == "eq") return detail::order(val(0), val(1)) == 0;
  if (op == "lt") return detail::order(val(0), val(1)) < 0;
  if (op == "le") return detail::order(val(0), val(1)) <= 0;
  if (op == "min") return detail::order(val(1), val(0)) < 0 ? w[1] : w[0];
  if (op == "max") return detail::order(val(1), val(0)) > 0 ? w[1] : w[0];
  if (op == "sgnj" || op == "sgnjn" || op == "sgnjx" || op == "negate") {
    const auto a = val(0);
    if (a.is_nar()) return w[0];
    bool neg = false;
    if (op == "negate") neg = sgn(a.value()) > 0;
    if (op == "sgnj") neg = detail::negative_or_nar(val(1));
    if (op == "sgnjn") neg = !detail::negative_or_nar(val(1));
    if (op == "sgnjx") neg = detail::negative_or_nar(a) != detail::negative_or_nar(val(1));
    const mpq_class mag = abs(a.value());
    return o::round_to_posit(o::ExactRational(neg ? mpq_class(-mag) : mag), cfg).bits;
  }
  if (op == "classify") {
    const auto a = val(0);
    if (a.is_nar()) return fclass::NaR;
    const int s = sgn(a.value());
    return s == 0 ? fclass::Zero : (s < 0 ? fclass::Negative : fclass::Positive);
  }
  if (op == "fcvt_es") {
    const unsigned to = cfg.es() == 2 ? 3 : 2;
    return o::round_to_posit(val(0), PositConfig::fixed(ps, to)).bits;
  }
  throw std::invalid_argument("unknown op: " + op);
}

// ---------------------------------------------------------------------------
// Runs

struct Mismatch {
  std::string op;
  std::vector<std::uint32_t> inputs;
  std::uint32_t got = 0;
  std::uint32_t expected = 0;
};

struct CheckSummary {
  std::map<std::string, std::uint64_t> checked;
  std::uint64_t mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // first few only
  bool passed() const { return mismatch_count == 0; }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [op, n] : checked) t += n;
    return t;
  }
};

class Checker {
 public:
  explicit Checker(PositConfig cfg, Implementation impl = reference_impl,
                   std::size_t keep_mismatches = 16)
      : cfg_(cfg), impl_(std::move(impl)), keep_(keep_mismatches) {}

  const PositConfig& config() const { return cfg_; }
  const CheckSummary& summary() const { return summary_; }

  bool check(const std::string& op, std::span<const std::uint32_t> inputs) {
    const std::uint32_t got = impl_(op, inputs, cfg_);
    const std::uint32_t expected = oracle_expected(op, inputs, cfg_);
    ++summary_.checked[op];
    if (got == expected) return true;
    ++summary_.mismatch_count;
    if (summary_.mismatches.size() < keep_)
      summary_.mismatches.push_back({op, {inputs.begin(), inputs.end()}, got, expected});
    return false;
  }

  /// All tuples over the special-value corpus: 0, NaR, +-maxpos, +-minpos, +-1.
  void special_corpus(const std::vector<std::string>& ops) {
    const std::vector<std::uint32_t> corpus = special_values(cfg_);
    for (const auto& name : ops) {
      const OpInfo* info = find_op(name);
      const unsigned n = arity_count(info->arity);
      std::vector<std::uint32_t> t(n);
      std::size_t combos = 1;
      for (unsigned i = 0; i < n; ++i) combos *= corpus.size();
      for (std::size_t k = 0; k < combos; ++k) {
        std::size_t rest = k;
        for (unsigned i = 0; i < n; ++i) {
          t[i] = corpus[rest % corpus.size()];
          rest /= corpus.size();
        }
        check(name, t);
      }
    }
  }

  /// Unary ops over every pattern, binary ops over every pair, ternary ops
  /// over `ternary_samples` random triples.
  void exhaustive(const std::vector<std::string>& ops, std::size_t ternary_samples,
                  std::uint64_t seed) {
    const std::uint64_t n = std::uint64_t{1} << cfg_.ps();
    std::mt19937_64 rng(seed);
    for (const auto& name : ops) {
      const OpInfo* info = find_op(name);
      if (info->arity == Arity::Unary) {
        for (std::uint64_t a = 0; a < n; ++a) {
          const std::array<std::uint32_t, 1> t{static_cast<std::uint32_t>(a)};
          check(name, t);
        }
      } else if (info->arity == Arity::Binary) {
        for (std::uint64_t a = 0; a < n; ++a)
          for (std::uint64_t b = 0; b < n; ++b) {
            const std::array<std::uint32_t, 2> t{static_cast<std::uint32_t>(a),
                                                 static_cast<std::uint32_t>(b)};
            check(name, t);
          }
      } else {
        for (std::size_t k = 0; k < ternary_samples; ++k) {
          const std::array<std::uint32_t, 3> t{draw(rng), draw(rng), draw(rng)};
          check(name, t);
        }
      }
    }
  }

  /// `count` random tuples per op.
  void fuzz(const std::vector<std::string>& ops, std::uint64_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (const auto& name : ops) {
      const unsigned n = arity_count(find_op(name)->arity);
      std::array<std::uint32_t, 3> t{};
      for (std::uint64_t k = 0; k < count; ++k) {
        for (unsigned i = 0; i < n; ++i) t[i] = draw(rng);
        check(name, std::span<const std::uint32_t>(t.data(), n));
      }
    }
  }

  static std::vector<std::uint32_t> special_values(const PositConfig& cfg) {
    const std::uint32_t one = 1u << (cfg.ps() - 2);
    return {0,
            nar(cfg).bits,
            maxpos(cfg).bits,
            negate(maxpos(cfg), cfg).bits,
            minpos().bits,
            negate(minpos(), cfg).bits,
            one,
            negate(PositWord{one}, cfg).bits};
  }

 private:
  static unsigned arity_count(Arity a) {
    return a == Arity::Unary ? 1 : (a == Arity::Binary ? 2 : 3);
  }
  std::uint32_t draw(std::mt19937_64& rng) const {
    return static_cast<std::uint32_t>(rng()) & cfg_.mask();
  }

  PositConfig cfg_;
  Implementation impl_;
  std::size_t keep_;
  CheckSummary summary_;
};

/// Random es=2 words through FCVT.ES 2 -> 3 -> 2. When the es=3 value is
/// exact the round trip must return the input; otherwise the es=3 word must
/// be the oracle rounding.
struct RoundTripResult {
  std::uint64_t checked = 0;
  std::uint64_t exact = 0;
  std::uint64_t failures = 0;
};

inline RoundTripResult fcvt_es_round_trip(std::uint64_t count, std::uint64_t seed) {
  RoundTripResult r;
  std::mt19937_64 rng(seed);
  const PositConfig es2 = PositConfig::fixed(32, 2);
  const PositConfig es3 = PositConfig::fixed(32, 3);
  for (std::uint64_t k = 0; k < count; ++k) {
    const PositWord p{static_cast<std::uint32_t>(rng())};
    const PositWord mid = fcvt_es(p, 2, 3);
    const PositWord back = fcvt_es(mid, 3, 2);
    const auto v = oracle::exact_value(p, es2);
    const bool exact = v == oracle::exact_value(mid, es3);
    ++r.checked;
    bool ok;
    if (exact) {
      ++r.exact;
      ok = back == p;
    } else {
      ok = mid == oracle::round_to_posit(v, es3);
    }
    if (!ok) ++r.failures;
  }
  return r;
}

}  // namespace positrv::conformance
