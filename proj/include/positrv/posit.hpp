// SPDX-License-Identifier: Apache-2.0
//
// Posit (type-III unum) format: configuration, the common decoder and the
// common encoder. Every arithmetic operation funnels through decode() on the
// way in and encode() on the way out.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace positrv {

using u128 = unsigned __int128;

/// Exception flag bits, laid out like the RISC-V fflags field. Posit
/// arithmetic only ever raises DZ.
namespace fflag {
inline constexpr std::uint8_t NX = 1u << 0;
inline constexpr std::uint8_t UF = 1u << 1;
inline constexpr std::uint8_t OF = 1u << 2;
inline constexpr std::uint8_t DZ = 1u << 3;
inline constexpr std::uint8_t NV = 1u << 4;
}  // namespace fflag

/// Exponent-size selection. A fixed mode models a datapath generated for a
/// single es value; the dual mode models the 32-bit datapath that serves
/// es=2 and es=3 at run time.
class EsMode {
 public:
  static constexpr EsMode fixed(unsigned es) { return EsMode(false, es); }

  static EsMode dual(unsigned selected) {
    if (selected != 2 && selected != 3)
      throw std::invalid_argument("dual es mode accepts only es=2 or es=3, got " +
                                  std::to_string(selected));
    return EsMode(true, selected);
  }

  constexpr bool is_dual() const { return dual_; }
  constexpr unsigned es() const { return es_; }

  friend constexpr bool operator==(EsMode, EsMode) = default;

 private:
  constexpr EsMode(bool dual, unsigned es) : dual_(dual), es_(es) {}
  bool dual_;
  unsigned es_;
};

/// Posit size plus es selection. Supported sizes are 8, 16 and 32 bits.
class PositConfig {
 public:
  PositConfig(unsigned ps, EsMode mode) : ps_(ps), mode_(mode) {
    if (ps != 8 && ps != 16 && ps != 32)
      throw std::invalid_argument("posit size must be 8, 16 or 32, got " + std::to_string(ps));
    if (mode.is_dual() && ps != 32)
      throw std::invalid_argument("dual es mode requires ps=32");
    if (ps < mode.es() + 3)
      throw std::invalid_argument("es too large for posit size");
  }

  static PositConfig fixed(unsigned ps, unsigned es) { return {ps, EsMode::fixed(es)}; }
  static PositConfig dual(unsigned selected) { return {32, EsMode::dual(selected)}; }

  unsigned ps() const { return ps_; }
  unsigned es() const { return mode_.es(); }
  EsMode mode() const { return mode_; }
  bool is_dual() const { return mode_.is_dual(); }

  /// fs: widest fraction field (excluding the hidden bit). The dual datapath
  /// sizes its fraction for the smaller es.
  unsigned fraction_bits() const { return ps_ - (is_dual() ? 2u : es()) - 3; }

  /// fes: exponent register width. The dual datapath sizes it for es=3.
  unsigned exponent_bits() const {
    return static_cast<unsigned>(std::countr_zero(ps_)) + (is_dual() ? 3u : es()) + 2;
  }

  std::uint32_t mask() const { return ps_ == 32 ? 0xFFFFFFFFu : ((1u << ps_) - 1); }

  /// Largest scale (power of two) a posit of this format can carry.
  int max_scale() const { return static_cast<int>(ps_ - 2) << es(); }

  friend bool operator==(const PositConfig&, const PositConfig&) = default;

 private:
  unsigned ps_;
  EsMode mode_;
};

/// Raw ps-bit posit pattern (two's complement). Bits above ps are zero.
struct PositWord {
  std::uint32_t bits = 0;
  friend constexpr bool operator==(PositWord, PositWord) = default;
};

/// Output of the decoder. frac carries the hidden bit at position frac_bits.
struct DecodedPosit {
  bool sign = false;
  std::int32_t exp = 0;
  std::uint64_t frac = 0;
  unsigned frac_bits = 0;
  bool zero = false;
  bool nar = false;
};

/// Input of the encoder: a wide, normalized intermediate. frac has its
/// hidden bit at position frac_width - 1. sticky is the OR of every bit
/// already discarded by the producer.
struct UnroundedResult {
  bool sign = false;
  std::int32_t exp = 0;
  std::uint64_t frac = 0;
  unsigned frac_width = 1;
  bool sticky = false;
  bool zero = false;
  bool nar = false;
  std::uint8_t flags = 0;
};

struct EncodeResult {
  PositWord word;
  std::uint8_t flags = 0;
};

// ---------------------------------------------------------------------------
// Reserved patterns

inline constexpr PositWord zero() { return {0}; }
inline PositWord nar(const PositConfig& cfg) { return {1u << (cfg.ps() - 1)}; }
inline PositWord maxpos(const PositConfig& cfg) { return {(1u << (cfg.ps() - 1)) - 1}; }
inline constexpr PositWord minpos() { return {1}; }

inline bool is_zero(PositWord p) { return p.bits == 0; }
inline bool is_nar(PositWord p, const PositConfig& cfg) { return p == nar(cfg); }
inline bool is_maxpos(PositWord p, const PositConfig& cfg) { return p == maxpos(cfg); }
inline bool is_minpos(PositWord p) { return p.bits == 1; }
inline bool is_negative(PositWord p, const PositConfig& cfg) {
  return ((p.bits >> (cfg.ps() - 1)) & 1u) != 0;
}

/// Pattern viewed as a ps-bit signed integer; this is the posit total order.
inline std::int32_t signed_view(PositWord p, const PositConfig& cfg) {
  const unsigned shift = 32 - cfg.ps();
  return static_cast<std::int32_t>(p.bits << shift) >> shift;
}

/// Two's complement negation. 0 and NaR map to themselves.
inline PositWord negate(PositWord p, const PositConfig& cfg) {
  return {(~p.bits + 1u) & cfg.mask()};
}

// ---------------------------------------------------------------------------
// Decoder

inline DecodedPosit decode(PositWord p, const PositConfig& cfg) {
  const unsigned ps = cfg.ps();
  const unsigned es = cfg.es();
  const unsigned fs = cfg.fraction_bits();

  DecodedPosit d;
  d.frac_bits = fs;
  const std::uint32_t bits = p.bits & cfg.mask();
  d.zero = bits == 0;
  d.nar = bits == nar(cfg).bits;
  if (d.zero || d.nar) return d;

  d.sign = ((bits >> (ps - 1)) & 1u) != 0;
  const std::uint32_t magnitude = d.sign ? ((~bits + 1u) & cfg.mask()) : bits;

  // Left-align the body (everything after the sign) in a 64-bit register.
  std::uint64_t reg = static_cast<std::uint64_t>(magnitude) << (64 - ps + 1);
  const bool leading_one = (reg >> 63) != 0;
  unsigned rc = leading_one ? static_cast<unsigned>(std::countl_one(reg))
                            : static_cast<unsigned>(std::countl_zero(reg));
  if (rc > ps - 1) rc = ps - 1;
  const int k = leading_one ? static_cast<int>(rc) - 1 : -static_cast<int>(rc);

  // Drop the regime run and its terminator.
  reg <<= rc + 1;

  std::uint32_t e = 0;
  if (cfg.is_dual()) {
    // The datapath always extracts three exponent bits; with es=2 the
    // third one belongs to the fraction and is dropped here.
    e = static_cast<std::uint32_t>(reg >> 61);
    if (es == 2) e >>= 1;
  } else if (es > 0) {
    e = static_cast<std::uint32_t>(reg >> (64 - es));
  }
  if (es > 0) reg <<= es;

  d.exp = static_cast<std::int32_t>(k * (1 << es)) + static_cast<std::int32_t>(e);
  const std::uint64_t frac_field = fs == 0 ? 0 : (reg >> (64 - fs));
  d.frac = (std::uint64_t{1} << fs) | frac_field;
  return d;
}

/// Exact UnroundedResult equivalent of a decoded posit (sticky clear).
inline UnroundedResult lift(const DecodedPosit& d) {
  UnroundedResult u;
  u.sign = d.sign;
  u.exp = d.exp;
  u.frac = d.frac;
  u.frac_width = d.frac_bits + 1;
  u.zero = d.zero;
  u.nar = d.nar;
  return u;
}

// ---------------------------------------------------------------------------
// Encoder

namespace detail {

// Builds the unbounded body bit string (regime, exponent, fraction) left
// aligned at bit 127 and rounds it to ps-1 bits with round-to-nearest-even.
inline std::uint32_t round_body(unsigned ps, int k, u128 ef, unsigned ef_width, bool sticky) {
  const unsigned kabs = static_cast<unsigned>(k < 0 ? -k : k);
  // Regime run plus terminator; esft counts the sign bit too.
  const unsigned regime_len = k >= 0 ? kabs + 2 : kabs + 1;
  const u128 regime = k >= 0 ? ((u128{1} << (kabs + 1)) - 1) << 1 : u128{1};

  u128 str = regime << (128 - regime_len);
  // ef_width + regime_len stays below 128 for every supported format.
  str |= ef << (128 - regime_len - ef_width);

  const unsigned body_bits = ps - 1;
  std::uint32_t body = static_cast<std::uint32_t>(str >> (128 - body_bits));
  const bool guard = ((str >> (127 - body_bits)) & 1) != 0;
  const bool rest = (str << (body_bits + 1)) != 0 || sticky;

  const std::uint32_t body_max = (1u << body_bits) - 1;
  bool round_up = guard && (rest || (body & 1u));
  if (body == body_max) round_up = false;  // never round past maxpos
  body += round_up ? 1u : 0u;
  if (body == 0) body = 1;  // a nonzero value never rounds to zero
  return body;
}

}  // namespace detail

inline EncodeResult encode(const UnroundedResult& u, const PositConfig& cfg) {
  EncodeResult out;
  out.flags = u.flags;
  if (u.nar) {
    out.word = nar(cfg);
    return out;
  }
  if (u.zero || u.frac == 0) {
    out.word = zero();
    return out;
  }

  const unsigned ps = cfg.ps();
  const unsigned es = cfg.es();
  const unsigned frac_field = u.frac_width - 1;
  const u128 frac = u.frac & ((std::uint64_t{1} << frac_field) - 1);

  std::uint32_t body;
  const int max_scale = cfg.max_scale();
  if (u.exp > max_scale) {
    body = maxpos(cfg).bits;
  } else if (u.exp < -max_scale) {
    body = minpos().bits;
  } else if (cfg.is_dual()) {
    // Shared datapath: three exponent bits, k extracted at the es=2
    // position and shifted once more for es=3.
    int k = u.exp >> 2;
    if (es == 3) k >>= 1;
    u128 e_field = static_cast<unsigned>(u.exp) & 7u;
    if (es == 2) e_field &= ~u128{4};
    u128 ef = (e_field << frac_field) | frac;
    const unsigned ef_width = 3 + frac_field;
    if (es == 2) ef = (ef << 1) & ((u128{1} << ef_width) - 1);
    body = detail::round_body(ps, k, ef, ef_width, u.sticky);
  } else {
    const int k = u.exp >> es;
    const u128 e = static_cast<unsigned>(u.exp) & ((1u << es) - 1);
    const u128 ef = (e << frac_field) | frac;
    body = detail::round_body(ps, k, ef, es + frac_field, u.sticky);
  }

  out.word = u.sign ? negate(PositWord{body}, cfg) : PositWord{body};
  return out;
}

// ---------------------------------------------------------------------------
// Host conversions

/// Rounds a binary64 value to the nearest posit. Infinities and NaN map to
/// NaR. Exact because every finite double is a dyadic rational.
inline PositWord from_double(double x, const PositConfig& cfg) {
  if (std::isnan(x) || std::isinf(x)) return nar(cfg);
  if (x == 0.0) return zero();
  int exp2 = 0;
  const double m = std::frexp(std::fabs(x), &exp2);  // m in [0.5, 1)
  UnroundedResult u;
  u.sign = x < 0;
  u.frac = static_cast<std::uint64_t>(std::ldexp(m, 53));
  u.frac_width = 53;
  u.exp = exp2 - 1;
  return encode(u, cfg).word;
}

/// Exact for every supported format (at most 30 significant bits and a
/// scale well inside the binary64 range).
inline double to_double(PositWord p, const PositConfig& cfg) {
  const DecodedPosit d = decode(p, cfg);
  if (d.zero) return 0.0;
  if (d.nar) return std::nan("");
  const double mag = std::ldexp(static_cast<double>(d.frac),
                                d.exp - static_cast<int>(d.frac_bits));
  return d.sign ? -mag : mag;
}

}  // namespace positrv
