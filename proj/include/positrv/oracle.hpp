// SPDX-License-Identifier: Apache-2.0
//
// Exact-arithmetic reference for posit operations. Values are rational
// numbers (GMP); rounding searches the posit patterns for the nearest
// representable value and never touches the decoder/encoder datapaths.

#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "positrv/posit.hpp"

namespace positrv::oracle {

/// A rational number, or NaR. Zero is the rational 0.
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }
  ExactRational(long v) : value_(v) {}

  static ExactRational nar() {
    ExactRational r;
    r.nar_ = true;
    return r;
  }

  bool is_nar() const { return nar_; }
  bool is_zero() const { return !nar_ && sgn(value_) == 0; }
  const mpq_class& value() const { return value_; }

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    if (a.nar_ || b.nar_) return a.nar_ == b.nar_;
    return a.value_ == b.value_;
  }

  std::string str() const { return nar_ ? std::string("NaR") : value_.get_str(); }

 private:
  mpq_class value_{0};
  bool nar_ = false;
};

/// mant * 2^exp with an explicit sign.
struct Dyadic {
  bool negative = false;
  std::uint64_t mant = 0;
  long exp = 0;
};

// ---------------------------------------------------------------------------
// Valuation

/// Reads an n-bit posit pattern (n <= 63) bit by bit: sign, regime run,
/// terminator, es exponent bits (missing bits count as 0), then fraction.
/// Returns nullopt for NaR; zero comes back with mant == 0.
inline std::optional<Dyadic> pattern_value(std::uint64_t pattern, unsigned n, unsigned es) {
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  pattern &= mask;
  if (pattern == 0) return Dyadic{};
  if (pattern == (std::uint64_t{1} << (n - 1))) return std::nullopt;

  Dyadic d;
  d.negative = ((pattern >> (n - 1)) & 1) != 0;
  if (d.negative) pattern = (~pattern + 1) & mask;

  int i = static_cast<int>(n) - 2;
  auto bit = [&](int pos) { return static_cast<unsigned>((pattern >> pos) & 1); };
  const unsigned regime_bit = bit(i);
  long run = 0;
  while (i >= 0 && bit(i) == regime_bit) {
    ++run;
    --i;
  }
  if (i >= 0) --i;  // terminator
  const long k = regime_bit ? run - 1 : -run;

  long e = 0;
  for (unsigned j = 0; j < es; ++j) {
    e <<= 1;
    if (i >= 0) e |= bit(i--);
  }
  std::uint64_t frac = 0;
  long nf = 0;
  while (i >= 0) {
    frac = (frac << 1) | bit(i--);
    ++nf;
  }
  d.mant = (std::uint64_t{1} << nf) | frac;
  d.exp = k * (1L << es) + e - nf;
  return d;
}

inline ExactRational to_rational(const Dyadic& d) {
  mpz_class m(static_cast<unsigned long>(d.mant));
  mpq_class q;
  if (d.exp >= 0) {
    mpz_class num;
    mpz_mul_2exp(num.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(d.exp));
    q = mpq_class(num);
  } else {
    mpz_class den;
    mpz_class one(1);
    mpz_mul_2exp(den.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(-d.exp));
    q = mpq_class(m, den);
  }
  if (d.negative) q = -q;
  return ExactRational(q);
}

/// Exact value of a posit word; only ps and the selected es matter.
inline ExactRational exact_value(PositWord p, const PositConfig& cfg) {
  const auto d = pattern_value(p.bits, cfg.ps(), cfg.es());
  if (!d) return ExactRational::nar();
  return to_rational(*d);
}

// ---------------------------------------------------------------------------
// Rounding

namespace detail {

inline long floor_log2(const mpq_class& q) {
  // q > 0
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  long guess = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) -
               static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2));
  // 2^guess <= q  <=>  n >= d * 2^guess
  auto at_least = [&](long g) {
    mpz_class lhs = n;
    mpz_class rhs = d;
    if (g >= 0)
      mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(g));
    else
      mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-g));
    return lhs >= rhs;
  };
  if (!at_least(guess)) --guess;
  return guess;
}

inline long dyadic_floor_log2(const Dyadic& d) {
  return static_cast<long>(63 - __builtin_clzll(d.mant)) + d.exp;
}

/// Compares num/den (positive) against mant*2^exp (positive, mant*den fits
/// the multiply) exactly.
inline int compare_scaled(const mpz_class& num, const mpz_class& den, const mpz_class& mant,
                          long exp) {
  thread_local mpz_class lhs;
  thread_local mpz_class rhs;
  lhs = num;
  mpz_mul(rhs.get_mpz_t(), mant.get_mpz_t(), den.get_mpz_t());
  if (exp >= 0)
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(exp));
  else
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp));
  return cmp(lhs, rhs);
}

/// |x| for a rational x.
struct RationalMagnitude {
  explicit RationalMagnitude(const mpq_class& x) : q(abs(x)), log2(floor_log2(q)) {}

  int compare(const Dyadic& d) const {
    const long dl = dyadic_floor_log2(d);
    if (log2 != dl) return log2 < dl ? -1 : 1;
    const mpz_class m(static_cast<unsigned long>(d.mant));
    return compare_scaled(q.get_num(), q.get_den(), m, d.exp);
  }

  mpq_class q;
  long log2;
};

/// sqrt(q) for a positive rational q, compared through squares.
struct SqrtMagnitude {
  explicit SqrtMagnitude(const mpq_class& radicand)
      : q(radicand), log2(floor_div2(floor_log2(radicand))) {}

  static long floor_div2(long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

  int compare(const Dyadic& d) const {
    const long dl = dyadic_floor_log2(d);
    if (log2 != dl) return log2 < dl ? -1 : 1;
    const mpz_class m(static_cast<unsigned long>(d.mant));
    const mpz_class m2 = m * m;
    return compare_scaled(q.get_num(), q.get_den(), m2, 2 * d.exp);
  }

  mpq_class q;
  long log2;
};

/// Nearest posit to a positive magnitude: binary search over the ordered
/// positive patterns, then a tie decision against the midpoint, which is the
/// value of the (ps+1)-bit pattern sitting between the two neighbours.
template <class Magnitude>
std::uint32_t nearest_positive(const Magnitude& x, unsigned ps, unsigned es) {
  auto value = [&](std::uint64_t pattern, unsigned n) { return *pattern_value(pattern, n, es); };
  const std::uint32_t top = (1u << (ps - 1)) - 1;
  if (x.compare(value(top, ps)) >= 0) return top;
  if (x.compare(value(1, ps)) <= 0) return 1;
  std::uint32_t lo = 1;
  std::uint32_t hi = top;
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    const int c = x.compare(value(mid, ps));
    if (c == 0) return mid;
    if (c > 0)
      lo = mid;
    else
      hi = mid;
  }
  const int c = x.compare(value((std::uint64_t{lo} << 1) | 1, ps + 1));
  if (c < 0) return lo;
  if (c > 0) return hi;
  return (lo & 1u) == 0 ? lo : hi;
}

inline PositWord apply_sign(std::uint32_t body, bool negative, const PositConfig& cfg) {
  if (!negative) return {body};
  return {(~body + 1u) & cfg.mask()};
}

}  // namespace detail

/// Correctly rounded (nearest, ties to even) posit for x. Magnitudes above
/// maxpos saturate to maxpos; nonzero magnitudes below minpos go to minpos.
inline PositWord round_to_posit(const ExactRational& x, const PositConfig& cfg) {
  if (x.is_nar()) return {1u << (cfg.ps() - 1)};
  if (x.is_zero()) return {0};
  const detail::RationalMagnitude mag(x.value());
  return detail::apply_sign(detail::nearest_positive(mag, cfg.ps(), cfg.es()),
                            sgn(x.value()) < 0, cfg);
}

/// Correctly rounded posit for sqrt(x), x >= 0.
inline PositWord round_sqrt_to_posit(const ExactRational& x, const PositConfig& cfg) {
  if (x.is_nar() || sgn(x.value()) < 0) return {1u << (cfg.ps() - 1)};
  if (x.is_zero()) return {0};
  const detail::SqrtMagnitude mag(x.value());
  return {detail::nearest_positive(mag, cfg.ps(), cfg.es())};
}

/// Rounds x to a ps-bit integer pattern. Saturates at the integer range;
/// NaR gives the 1000...0 pattern.
inline std::uint32_t round_to_integer(const ExactRational& x, bool is_unsigned, bool toward_zero,
                                      unsigned ps) {
  const std::uint32_t int_min_bits = 1u << (ps - 1);
  if (x.is_nar()) return int_min_bits;
  const mpq_class& q = x.value();
  mpz_class n;
  if (toward_zero) {
    mpz_tdiv_q(n.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  } else {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    const mpq_class rest = q - mpq_class(fl);
    const int c = cmp(rest, mpq_class(1, 2));
    n = fl;
    if (c > 0 || (c == 0 && mpz_odd_p(fl.get_mpz_t()))) n += 1;
  }
  mpz_class lo;
  mpz_class hi;
  if (is_unsigned) {
    lo = 0;
    hi = (mpz_class(1) << ps) - 1;
  } else {
    lo = -(mpz_class(1) << (ps - 1));
    hi = (mpz_class(1) << (ps - 1)) - 1;
  }
  if (n < lo) n = lo;
  if (n > hi) n = hi;
  if (n < 0) n += mpz_class(1) << ps;
  return static_cast<std::uint32_t>(n.get_ui());
}

// ---------------------------------------------------------------------------
// Reference operations

enum class Op { Add, Sub, Mul, Madd, Msub, Nmsub, Nmadd, Div, Sqrt };

/// Result of a reference operation: NaR, an exact rational, or the exact
/// square root of a rational (kept symbolic; rounding compares squares).
struct OracleValue {
  enum class Kind { NaR, Rational, SqrtOf };
  Kind kind = Kind::NaR;
  mpq_class q;

  static OracleValue nar() { return {}; }
  static OracleValue rational(mpq_class v) { return {Kind::Rational, std::move(v)}; }
  static OracleValue sqrt_of(mpq_class v) { return {Kind::SqrtOf, std::move(v)}; }
};

inline OracleValue oracle_op(Op op, std::span<const ExactRational> xs) {
  for (const auto& x : xs)
    if (x.is_nar()) return OracleValue::nar();
  auto at = [&](std::size_t i) -> const mpq_class& {
    if (i >= xs.size()) throw std::invalid_argument("oracle_op: missing operand");
    return xs[i].value();
  };
  switch (op) {
    case Op::Add: return OracleValue::rational(at(0) + at(1));
    case Op::Sub: return OracleValue::rational(at(0) - at(1));
    case Op::Mul: return OracleValue::rational(at(0) * at(1));
    case Op::Madd: return OracleValue::rational(at(0) * at(1) + at(2));
    case Op::Msub: return OracleValue::rational(at(0) * at(1) - at(2));
    case Op::Nmsub: return OracleValue::rational(-(at(0) * at(1)) + at(2));
    case Op::Nmadd: return OracleValue::rational(-(at(0) * at(1)) - at(2));
    case Op::Div:
      if (sgn(at(1)) == 0) return OracleValue::nar();
      return OracleValue::rational(at(0) / at(1));
    case Op::Sqrt:
      if (sgn(at(0)) < 0) return OracleValue::nar();
      return OracleValue::sqrt_of(at(0));
  }
  return OracleValue::nar();
}

inline PositWord round_to_posit(const OracleValue& v, const PositConfig& cfg) {
  switch (v.kind) {
    case OracleValue::Kind::NaR: return {1u << (cfg.ps() - 1)};
    case OracleValue::Kind::Rational: return round_to_posit(ExactRational(v.q), cfg);
    case OracleValue::Kind::SqrtOf: return round_sqrt_to_posit(ExactRational(v.q), cfg);
  }
  return {0};
}

/// Exact rational for a ps-bit integer pattern.
inline ExactRational integer_value(std::uint32_t bits, bool is_unsigned, unsigned ps) {
  const std::uint32_t mask = ps == 32 ? 0xFFFFFFFFu : ((1u << ps) - 1);
  bits &= mask;
  if (is_unsigned || ((bits >> (ps - 1)) & 1u) == 0) return ExactRational(mpq_class(mpz_class(bits)));
  return ExactRational(mpq_class(mpz_class(bits) - (mpz_class(1) << ps)));
}

// ---------------------------------------------------------------------------
// Decimal parsing

/// Parses a decimal literal ("-1.25", "3.0e40", "15") into an exact rational.
inline std::optional<mpq_class> parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
    if (i == text.size()) return std::nullopt;
    long e = 0;
    for (; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      e = e * 10 + (text[i] - '0');
      if (e > 100000) return std::nullopt;
    }
    scale += exp_negative ? -e : e;
  }
  if (i != text.size()) return std::nullopt;

  mpz_class num(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

// ---------------------------------------------------------------------------
// Decimal formatting

/// Full decimal expansion of a value whose denominator is a power of two.
inline std::string exact_decimal(const ExactRational& x) {
  if (x.is_nar()) return "NaR";
  const mpz_class& num = x.value().get_num();
  const mpz_class& den = x.value().get_den();
  const unsigned long t = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
  if (den != mpz_class(1) << t) throw std::invalid_argument("not a dyadic rational");
  mpz_class scaled;
  mpz_ui_pow_ui(scaled.get_mpz_t(), 5, t);
  scaled *= abs(num);
  std::string digits = scaled.get_str();
  if (digits.size() <= t) digits.insert(0, t + 1 - digits.size(), '0');
  std::string out = sgn(num) < 0 ? "-" : "";
  out += digits.substr(0, digits.size() - t);
  if (t > 0) out += "." + digits.substr(digits.size() - t);
  return out;
}

/// Shortest round-trip decimal of a double in scientific notation, e.g.
/// 3.000865123284026E+40.
inline std::string shortest_decimal(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  std::string s(buf, r.ptr);
  for (char& c : s)
    if (c == 'e') c = 'E';
  return s;
}

// ---------------------------------------------------------------------------
// Batch mode: "op hexA [hexB [hexC]] es" per line, one hex result per line.

inline std::uint32_t parse_hex_word(const std::string& s) {
  std::size_t used = 0;
  const unsigned long v = std::stoul(s, &used, 16);
  if (used != s.size()) throw std::invalid_argument("bad hex word: " + s);
  return static_cast<std::uint32_t>(v);
}

/// Evaluates one test vector line at posit size ps and returns the result
/// pattern.
inline std::uint32_t evaluate_vector(const std::string& line, unsigned ps) {
  std::istringstream in(line);
  std::string op;
  std::vector<std::string> fields;
  in >> op;
  for (std::string f; in >> f;) fields.push_back(f);
  if (op.empty() || fields.size() < 2) throw std::invalid_argument("malformed vector: " + line);
  const unsigned es = static_cast<unsigned>(std::stoul(fields.back()));
  fields.pop_back();
  const PositConfig cfg = PositConfig::fixed(ps, es);
  std::vector<std::uint32_t> w;
  for (const auto& f : fields) w.push_back(parse_hex_word(f));
  auto word = [&](std::size_t i) {
    if (i >= w.size()) throw std::invalid_argument("missing operand: " + line);
    return PositWord{w[i] & cfg.mask()};
  };
  auto val = [&](std::size_t i) { return exact_value(word(i), cfg); };
  auto run = [&](Op o, std::size_t arity) {
    std::vector<ExactRational> xs;
    for (std::size_t i = 0; i < arity; ++i) xs.push_back(val(i));
    return round_to_posit(oracle_op(o, xs), cfg).bits;
  };

  if (op == "add") return run(Op::Add, 2);
  if (op == "sub") return run(Op::Sub, 2);
  if (op == "mul") return run(Op::Mul, 2);
  if (op == "madd") return run(Op::Madd, 3);
  if (op == "msub") return run(Op::Msub, 3);
  if (op == "nmsub") return run(Op::Nmsub, 3);
  if (op == "nmadd") return run(Op::Nmadd, 3);
  if (op == "div") return run(Op::Div, 2);
  if (op == "sqrt") return run(Op::Sqrt, 1);
  if (op == "i2p" || op == "u2p")
    return round_to_posit(integer_value(w.at(0), op == "u2p", ps), cfg).bits;
  if (op == "p2i" || op == "p2u" || op == "p2i_rtz" || op == "p2u_rtz")
    return round_to_integer(val(0), op[2] == 'u', op.size() > 3, ps);
  throw std::invalid_argument("unknown vector op: " + op);
}

inline void run_batch(std::istream& in, std::ostream& out, unsigned ps) {
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", evaluate_vector(line, ps));
    out << buf << '\n';
  }
}

}  // namespace positrv::oracle
