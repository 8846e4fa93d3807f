// SPDX-License-Identifier: Apache-2.0
//
// Value type over a compile-time posit format, for host code that wants
// ordinary operators instead of word-level calls.

#pragma once

#include <compare>
#include <cstdint>

#include "positrv/arith.hpp"

namespace positrv {

template <unsigned PS, unsigned ES>
class Posit {
 public:
  static_assert(PS == 8 || PS == 16 || PS == 32, "posit size must be 8, 16 or 32");
  static_assert(PS >= ES + 3, "es too large for posit size");

  static PositConfig config() { return PositConfig::fixed(PS, ES); }

  constexpr Posit() = default;
  explicit Posit(double x) : word_(from_double(x, config())) {}

  static constexpr Posit from_bits(std::uint32_t bits) {
    Posit p;
    p.word_ = PositWord{bits & (PS == 32 ? 0xFFFFFFFFu : ((1u << PS) - 1))};
    return p;
  }
  static Posit from_int(std::int32_t v) {
    return from_word(int_to_posit(static_cast<std::uint32_t>(v), false, config()));
  }
  static Posit nar() { return from_word(positrv::nar(config())); }
  static Posit maxpos() { return from_word(positrv::maxpos(config())); }
  static constexpr Posit minpos() { return from_bits(1); }

  constexpr std::uint32_t bits() const { return word_.bits; }
  constexpr PositWord word() const { return word_; }
  bool is_nar() const { return positrv::is_nar(word_, config()); }
  bool is_zero() const { return positrv::is_zero(word_); }

  double to_double() const { return positrv::to_double(word_, config()); }
  explicit operator double() const { return to_double(); }
  std::int32_t to_int(RoundingMode rm = RoundingMode::NearestEven) const {
    const std::uint32_t raw = posit_to_int(word_, false, rm, config());
    const unsigned shift = 32 - PS;
    return static_cast<std::int32_t>(raw << shift) >> shift;
  }

  friend Posit operator+(Posit a, Posit b) { return from_word(add(a.word_, b.word_, config())); }
  friend Posit operator-(Posit a, Posit b) { return from_word(sub(a.word_, b.word_, config())); }
  friend Posit operator*(Posit a, Posit b) { return from_word(mul(a.word_, b.word_, config())); }
  friend Posit operator/(Posit a, Posit b) {
    return from_word(div(a.word_, b.word_, config()).word);
  }
  Posit operator-() const { return from_word(negate(word_, config())); }

  Posit& operator+=(Posit o) { return *this = *this + o; }
  Posit& operator-=(Posit o) { return *this = *this - o; }
  Posit& operator*=(Posit o) { return *this = *this * o; }
  Posit& operator/=(Posit o) { return *this = *this / o; }

  /// a*b + c with one rounding.
  friend Posit fma(Posit a, Posit b, Posit c) {
    return from_word(positrv::fma(a.word_, b.word_, c.word_, {}, config()));
  }
  friend Posit sqrt(Posit a) { return from_word(positrv::sqrt(a.word_, config())); }
  friend Posit abs(Posit a) { return a.is_negative() ? -a : a; }

  bool is_negative() const { return positrv::is_negative(word_, config()); }

  friend bool operator==(Posit a, Posit b) = default;
  friend std::strong_ordering operator<=>(Posit a, Posit b) {
    return signed_view(a.word_, config()) <=> signed_view(b.word_, config());
  }

 private:
  static constexpr Posit from_word(PositWord w) {
    Posit p;
    p.word_ = w;
    return p;
  }
  PositWord word_{};
};

using posit8 = Posit<8, 0>;
using posit16 = Posit<16, 1>;
using posit32 = Posit<32, 2>;
using posit32e3 = Posit<32, 3>;

}  // namespace positrv
