// SPDX-License-Identifier: Apache-2.0
//
// Bit-serial non-restoring division and square root, as used by the FDIV
// and FSQRT datapaths. Both keep a signed partial remainder and never
// restore it inside the loop; a single correction step runs at the end.

#pragma once

#include <cstdint>

namespace positrv {

using i128 = __int128;

struct DivisionResult {
  unsigned __int128 quotient = 0;
  unsigned __int128 remainder = 0;
  unsigned iterations = 0;
};

/// Divides dividend by divisor producing quotient_bits quotient bits.
/// Requires divisor != 0 and dividend < divisor * 2^quotient_bits.
inline DivisionResult nonrestoring_divide(unsigned __int128 dividend, unsigned __int128 divisor,
                                          unsigned quotient_bits) {
  // Quotient digits are +1/-1; positive digits are collected in `plus`.
  const i128 shifted_divisor = static_cast<i128>(divisor) << quotient_bits;
  i128 rem = static_cast<i128>(dividend);
  unsigned __int128 plus = 0;
  for (unsigned i = quotient_bits; i-- > 0;) {
    if (rem >= 0) {
      plus |= static_cast<unsigned __int128>(1) << i;
      rem = 2 * rem - shifted_divisor;
    } else {
      rem = 2 * rem + shifted_divisor;
    }
  }
  // Q = P - N with N the complement of P over quotient_bits digits.
  const unsigned __int128 all = (static_cast<unsigned __int128>(1) << quotient_bits) - 1;
  unsigned __int128 q = plus - (all & ~plus);
  if (rem < 0) {
    q -= 1;
    rem += shifted_divisor;
  }
  DivisionResult r;
  r.quotient = q;
  r.remainder = static_cast<unsigned __int128>(rem >> quotient_bits);
  r.iterations = quotient_bits;
  return r;
}

struct SqrtResult {
  unsigned __int128 root = 0;
  unsigned __int128 remainder = 0;
  unsigned iterations = 0;
};

/// floor(sqrt(radicand)) with remainder radicand - root^2, one root bit per
/// iteration. root_bits must satisfy radicand < 4^root_bits.
inline SqrtResult nonrestoring_sqrt(unsigned __int128 radicand, unsigned root_bits) {
  i128 rem = 0;
  unsigned __int128 q = 0;
  for (unsigned i = root_bits; i-- > 0;) {
    const auto pair = static_cast<i128>((radicand >> (2 * i)) & 3u);
    if (rem >= 0)
      rem = ((rem << 2) | pair) - static_cast<i128>((q << 2) | 1u);
    else
      rem = ((rem << 2) | pair) + static_cast<i128>((q << 2) | 3u);
    q = (q << 1) | (rem >= 0 ? 1u : 0u);
  }
  if (rem < 0) rem += static_cast<i128>((q << 1) | 1u);
  SqrtResult r;
  r.root = q;
  r.remainder = static_cast<unsigned __int128>(rem);
  r.iterations = root_bits;
  return r;
}

}  // namespace positrv
