// SPDX-License-Identifier: Apache-2.0
//
// Compute operations of the posit FPU. Each rounding operation is split into
// an "unrounded" datapath producing an UnroundedResult and the common encoder.

#pragma once

#include <bit>
#include <cstdint>

#include "positrv/nonrestoring.hpp"
#include "positrv/posit.hpp"

namespace positrv {

// ---------------------------------------------------------------------------
// Normalization helpers (chkMulOF / chkAddOF / normalize)

/// Wide fraction with its hidden bit expected at bit `hidden`.
struct AlignedFraction {
  u128 bits = 0;
  unsigned hidden = 0;
  std::int32_t exp = 0;
  bool sticky = false;
};

namespace detail {
inline unsigned top_bit(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 127u - static_cast<unsigned>(std::countl_zero(hi));
  return 63u - static_cast<unsigned>(std::countl_zero(static_cast<std::uint64_t>(v)));
}

inline void shift_right_sticky(AlignedFraction& a, unsigned n) {
  if (n == 0) return;
  if (n >= 128) {
    a.sticky |= a.bits != 0;
    a.bits = 0;
    return;
  }
  a.sticky |= (a.bits & ((u128{1} << n) - 1)) != 0;
  a.bits >>= n;
}
}  // namespace detail

/// Product of two [1,2) significands lies in [1,4); a value in [2,4) moves
/// right by one with the exponent bumped.
inline void check_mul_overflow(AlignedFraction& a) {
  if ((a.bits >> (a.hidden + 1)) != 0) {
    detail::shift_right_sticky(a, 1);
    a.exp += 1;
  }
}

/// Same-sign addition carries at most one position.
inline void check_add_overflow(AlignedFraction& a) { check_mul_overflow(a); }

/// Brings the leading one to `hidden` from either side. bits must be nonzero.
inline void normalize(AlignedFraction& a) {
  const unsigned top = detail::top_bit(a.bits);
  if (top > a.hidden) {
    detail::shift_right_sticky(a, top - a.hidden);
    a.exp += static_cast<std::int32_t>(top - a.hidden);
  } else if (top < a.hidden) {
    a.bits <<= (a.hidden - top);
    a.exp -= static_cast<std::int32_t>(a.hidden - top);
  }
}

namespace detail {
inline UnroundedResult to_unrounded(bool sign, const AlignedFraction& a) {
  UnroundedResult u;
  u.sign = sign;
  u.exp = a.exp;
  u.frac = static_cast<std::uint64_t>(a.bits);
  u.frac_width = a.hidden + 1;
  u.sticky = a.sticky;
  return u;
}

inline PositWord one(const PositConfig& cfg) { return {1u << (cfg.ps() - 2)}; }
}  // namespace detail

// ---------------------------------------------------------------------------
// Fused multiply-add family

/// ng negates the product and the addend together; op flips the addend.
/// result = (-1)^ng * (a*b + (-1)^op * c)
struct FmaControl {
  bool negate = false;
  bool subtract = false;
};

enum class FusedOp { Madd, Msub, Nmsub, Nmadd };

/// FMADD: ab+c, FMSUB: ab-c, FNMSUB: -ab+c, FNMADD: -ab-c.
constexpr FmaControl fma_control(FusedOp op) {
  switch (op) {
    case FusedOp::Madd: return {false, false};
    case FusedOp::Msub: return {false, true};
    case FusedOp::Nmsub: return {true, true};
    case FusedOp::Nmadd: return {true, false};
  }
  return {};
}

/// Guard bits appended below the product so the alignment sticky never
/// lands within two places of a rounding boundary.
inline constexpr unsigned kFmaGuardBits = 4;

inline UnroundedResult unrounded_fma(const DecodedPosit& a, const DecodedPosit& b,
                                     const DecodedPosit& c, FmaControl ctl) {
  UnroundedResult u;
  if (a.nar || b.nar || c.nar) {
    u.nar = true;
    return u;
  }
  const bool product_zero = a.zero || b.zero;
  const bool addend_sign = c.sign != (ctl.subtract != ctl.negate);
  const bool product_sign = (a.sign != b.sign) != ctl.negate;

  if (product_zero && c.zero) {
    u.zero = true;
    return u;
  }
  if (product_zero) {
    u = lift(c);
    u.sign = addend_sign;
    return u;
  }

  const unsigned fs = a.frac_bits;
  AlignedFraction prod;
  prod.bits = (static_cast<u128>(a.frac) * b.frac) << kFmaGuardBits;
  prod.hidden = 2 * fs + kFmaGuardBits;
  prod.exp = a.exp + b.exp;
  check_mul_overflow(prod);

  if (c.zero) return detail::to_unrounded(product_sign, prod);

  AlignedFraction add;
  add.bits = static_cast<u128>(c.frac) << (prod.hidden - c.frac_bits);
  add.hidden = prod.hidden;
  add.exp = c.exp;

  bool big_sign = product_sign;
  bool small_sign = addend_sign;
  AlignedFraction* big = &prod;
  AlignedFraction* small = &add;
  if (add.exp > prod.exp || (add.exp == prod.exp && add.bits > prod.bits)) {
    std::swap(big, small);
    std::swap(big_sign, small_sign);
  }

  const auto ediff = static_cast<unsigned>(big->exp - small->exp);
  detail::shift_right_sticky(*small, ediff);
  if (small->sticky) small->bits |= 1;  // jam

  AlignedFraction r;
  r.hidden = big->hidden;
  r.exp = big->exp;
  if (big_sign == small_sign) {
    r.bits = big->bits + small->bits;
    check_add_overflow(r);
  } else {
    r.bits = big->bits - small->bits;
    if (r.bits == 0) {
      u.zero = true;
      return u;
    }
    normalize(r);
  }
  r.sticky |= small->sticky;
  return detail::to_unrounded(big_sign, r);
}

inline PositWord fma(PositWord a, PositWord b, PositWord c, FmaControl ctl,
                     const PositConfig& cfg) {
  return encode(unrounded_fma(decode(a, cfg), decode(b, cfg), decode(c, cfg), ctl), cfg).word;
}

inline PositWord fused(FusedOp op, PositWord a, PositWord b, PositWord c,
                       const PositConfig& cfg) {
  return fma(a, b, c, fma_control(op), cfg);
}

/// a + c through the FMA datapath with b forced to 1.0.
inline PositWord add(PositWord a, PositWord c, const PositConfig& cfg) {
  return fma(a, detail::one(cfg), c, {}, cfg);
}

inline PositWord sub(PositWord a, PositWord c, const PositConfig& cfg) {
  return fma(a, detail::one(cfg), c, {false, true}, cfg);
}

/// a * b through the FMA datapath with the addend forced to zero.
inline PositWord mul(PositWord a, PositWord b, const PositConfig& cfg) {
  return fma(a, b, zero(), {}, cfg);
}

// ---------------------------------------------------------------------------
// Division

inline UnroundedResult unrounded_div(const DecodedPosit& a, const DecodedPosit& b) {
  UnroundedResult u;
  if (b.zero) u.flags |= fflag::DZ;
  if (a.nar || b.nar || b.zero) {
    u.nar = true;
    return u;
  }
  if (a.zero) {
    u.zero = true;
    return u;
  }
  const unsigned fs = a.frac_bits;
  u.sign = a.sign != b.sign;

  // fs+3 quotient bits: fs fraction bits, a guard bit, and one more that
  // absorbs the [0.5, 1) case before normalization.
  const DivisionResult q =
      nonrestoring_divide(static_cast<u128>(a.frac) << (fs + 2), b.frac, fs + 3);
  AlignedFraction r;
  r.bits = q.quotient;
  r.hidden = fs + 2;
  r.exp = a.exp - b.exp;
  r.sticky = q.remainder != 0;
  normalize(r);
  return detail::to_unrounded(u.sign, r);
}

struct OpResult {
  PositWord word;
  std::uint8_t flags = 0;
};

inline OpResult div(PositWord a, PositWord b, const PositConfig& cfg) {
  const EncodeResult e = encode(unrounded_div(decode(a, cfg), decode(b, cfg)), cfg);
  return {e.word, e.flags};
}

// ---------------------------------------------------------------------------
// Square root

inline UnroundedResult unrounded_sqrt(const DecodedPosit& a) {
  UnroundedResult u;
  if (a.nar || (a.sign && !a.zero)) {
    u.nar = true;
    return u;
  }
  if (a.zero) {
    u.zero = true;
    return u;
  }
  const unsigned fs = a.frac_bits;
  u128 f = a.frac;
  if ((a.exp & 1) != 0) f <<= 1;  // odd exponent: fold one power into f
  u.exp = a.exp >> 1;

  // f / 2^fs lies in [1, 4); the root gets fs+2 bits below its hidden bit.
  const u128 radicand = f << (fs + 4);
  const unsigned root_bits = (detail::top_bit(radicand) + 2) / 2;
  const SqrtResult s = nonrestoring_sqrt(radicand, root_bits);
  u.frac = static_cast<std::uint64_t>(s.root);
  u.frac_width = fs + 3;
  u.sticky = s.remainder != 0;
  return u;
}

inline PositWord sqrt(PositWord a, const PositConfig& cfg) {
  return encode(unrounded_sqrt(decode(a, cfg)), cfg).word;
}

// ---------------------------------------------------------------------------
// Integer conversions

/// `value` holds a ps-bit integer in its low bits.
inline UnroundedResult unrounded_from_int(std::uint32_t value, bool is_unsigned,
                                          const PositConfig& cfg) {
  const unsigned ps = cfg.ps();
  UnroundedResult u;
  std::uint32_t i = value & cfg.mask();
  if (i == 0) {
    u.zero = true;
    return u;
  }
  u.sign = !is_unsigned && ((i >> (ps - 1)) & 1u) != 0;
  if (u.sign) i = (~i + 1u) & cfg.mask();
  // Leading zeros counted within the ps-bit field.
  const unsigned z = static_cast<unsigned>(std::countl_zero(i)) - (32 - ps);
  u.exp = static_cast<std::int32_t>(ps - 1 - z);
  u.frac = static_cast<std::uint64_t>(i) << z;
  u.frac_width = ps;
  return u;
}

inline PositWord int_to_posit(std::uint32_t value, bool is_unsigned, const PositConfig& cfg) {
  return encode(unrounded_from_int(value, is_unsigned, cfg), cfg).word;
}

enum class RoundingMode { NearestEven, TowardZero };

/// Result is a ps-bit integer pattern. Out-of-range values saturate; NaR
/// converts to the 1000...0 pattern.
inline std::uint32_t posit_to_int(PositWord p, bool is_unsigned, RoundingMode rm,
                                  const PositConfig& cfg) {
  const unsigned ps = cfg.ps();
  const DecodedPosit d = decode(p, cfg);
  const std::uint32_t int_min = 1u << (ps - 1);
  if (d.nar) return int_min;
  if (d.zero) return 0;

  const unsigned fs = d.frac_bits;
  // Magnitude bound: anything with exp >= ps saturates either way.
  u128 mag = 0;
  bool saturate = false;
  if (d.exp >= static_cast<std::int32_t>(ps)) {
    saturate = true;
  } else {
    const int shift = d.exp - static_cast<int>(fs);
    if (shift >= 0) {
      mag = static_cast<u128>(d.frac) << shift;
    } else {
      const auto s = static_cast<unsigned>(-shift);
      bool rb = false;
      bool sticky = false;
      if (s <= fs + 1) {
        mag = static_cast<u128>(d.frac) >> s;
        rb = ((d.frac >> (s - 1)) & 1u) != 0;
        sticky = (d.frac & ((std::uint64_t{1} << (s - 1)) - 1)) != 0;
      }
      if (rm == RoundingMode::NearestEven && rb && (sticky || (mag & 1) != 0)) mag += 1;
    }
  }

  if (is_unsigned) {
    if (d.sign) return 0;
    const std::uint64_t umax = (std::uint64_t{1} << ps) - 1;
    if (saturate || mag > umax) return static_cast<std::uint32_t>(umax);
    return static_cast<std::uint32_t>(mag);
  }
  if (d.sign) {
    if (saturate || mag > int_min) return int_min;
    return static_cast<std::uint32_t>(~static_cast<std::uint64_t>(mag) + 1) & cfg.mask();
  }
  if (saturate || mag > int_min - 1) return int_min - 1;
  return static_cast<std::uint32_t>(mag);
}

// ---------------------------------------------------------------------------
// Comparison, sign injection, classification

enum class CompareKind { Eq, Lt, Le };

/// Posits order exactly like their patterns read as signed integers.
inline bool compare(PositWord a, PositWord b, CompareKind kind, const PositConfig& cfg) {
  const std::int32_t x = signed_view(a, cfg);
  const std::int32_t y = signed_view(b, cfg);
  switch (kind) {
    case CompareKind::Eq: return x == y;
    case CompareKind::Lt: return x < y;
    case CompareKind::Le: return x <= y;
  }
  return false;
}

/// NaR is the most negative pattern, so min() returns it when present.
inline PositWord min(PositWord a, PositWord b, const PositConfig& cfg) {
  return signed_view(b, cfg) < signed_view(a, cfg) ? b : a;
}

inline PositWord max(PositWord a, PositWord b, const PositConfig& cfg) {
  return signed_view(b, cfg) > signed_view(a, cfg) ? b : a;
}

enum class SignInjection { Copy, Negate, Xor };

/// Magnitude of a with a sign derived from b; sign changes use two's
/// complement.
inline PositWord sign_inject(PositWord a, PositWord b, SignInjection kind,
                             const PositConfig& cfg) {
  const bool sa = is_negative(a, cfg);
  const bool sb = is_negative(b, cfg);
  bool target = sb;
  if (kind == SignInjection::Negate) target = !sb;
  if (kind == SignInjection::Xor) target = sa != sb;
  return target == sa ? a : negate(a, cfg);
}

namespace fclass {
inline constexpr std::uint32_t Negative = 1u << 1;
inline constexpr std::uint32_t Zero = 1u << 4;
inline constexpr std::uint32_t Positive = 1u << 6;
inline constexpr std::uint32_t NaR = 1u << 9;
}  // namespace fclass

inline std::uint32_t classify(PositWord p, const PositConfig& cfg) {
  if (is_zero(p)) return fclass::Zero;
  if (is_nar(p, cfg)) return fclass::NaR;
  return is_negative(p, cfg) ? fclass::Negative : fclass::Positive;
}

// ---------------------------------------------------------------------------
// es-to-es conversion (FCVT.ES)

inline PositWord convert_es(PositWord p, const PositConfig& from, const PositConfig& to) {
  return encode(lift(decode(p, from)), to).word;
}

/// 32-bit dual-mode conversion between es=2 and es=3.
inline PositWord fcvt_es(PositWord p, unsigned from_es, unsigned to_es) {
  return convert_es(p, PositConfig::dual(from_es), PositConfig::dual(to_es));
}

}  // namespace positrv
