// SPDX-License-Identifier: Apache-2.0
//
// Guest programs shared by the tests, the acceptance suite and the samples.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "positrv/assembler.hpp"

namespace positrv::kernels {

using isa::Flavor;
using isa::Mnemonic;
using isa::ProgramBuilder;
namespace reg = isa::reg;

inline constexpr std::uint32_t kCodeBase = 0x00001000u;
inline constexpr std::uint32_t kResultBase = 0x00080000u;

/// One instance of every posit mnemonic except FLW/FSW, straight line,
/// followed by a bare ECALL (a7 holds the exit call at reset).
inline ProgramBuilder cycle_program(Flavor flavor = Flavor::Standard) {
  using enum Mnemonic;
  ProgramBuilder b(kCodeBase, flavor);
  b.fp(FMADD, 1, 2, 3, 4);
  b.fp(FMSUB, 1, 2, 3, 4);
  b.fp(FNMSUB, 1, 2, 3, 4);
  b.fp(FNMADD, 1, 2, 3, 4);
  b.fadd(1, 2, 3);
  b.fsub(1, 2, 3);
  b.fmul(1, 2, 3);
  b.fdiv(1, 2, 3);
  b.fsqrt(1, 2);
  b.fcvt_w_s(reg::t0, 1);
  b.fp(FCVT_WU_S, reg::t0, 1);
  b.fcvt_s_w(1, reg::t0);
  b.fp(FCVT_S_WU, 1, reg::t0);
  b.fp(FEQ, reg::t0, 1, 2);
  b.fp(FLT, reg::t0, 1, 2);
  b.fp(FLE, reg::t0, 1, 2);
  b.fp(FMIN, 1, 2, 3);
  b.fp(FMAX, 1, 2, 3);
  b.fp(FSGNJ, 1, 2, 3);
  b.fsgnjn(1, 2, 3);
  b.fp(FSGNJX, 1, 2, 3);
  b.fmv_x_w(reg::t0, 1);
  b.fmv_w_x(1, reg::t0);
  b.fp(FCLASS, reg::t0, 1);
  b.fcvt_es(1, 2, 3);
  b.ecall();
  return b;
}

/// Exercises every posit operation on pseudo-random operands under es=2,
/// switches to es=3 through the pcsr and FCVT.ES, repeats, and leaves
/// results in memory at kResultBase, in the posit registers and in x.
inline ProgramBuilder conformance_kernel(Flavor flavor, std::uint64_t seed = 1,
                                         int rounds = 64) {
  using enum Mnemonic;
  std::mt19937_64 rng(seed);
  ProgramBuilder b(kCodeBase, flavor);
  b.li(reg::s0, static_cast<std::int32_t>(kResultBase));
  auto store_x = [&](std::uint8_t r) {
    b.sw(r, 0, reg::s0);
    b.addi(reg::s0, reg::s0, 4);
  };
  auto store_p = [&](std::uint8_t p) {
    b.fsw(p, 0, reg::s0);
    b.addi(reg::s0, reg::s0, 4);
  };
  auto load_random = [&](std::uint8_t p) {
    const auto w = static_cast<std::uint32_t>(rng());
    b.li(reg::t1, static_cast<std::int32_t>(w));
    b.fmv_w_x(p, reg::t1);
  };
  auto round_body = [&]() {
    for (int k = 0; k < rounds; ++k) {
      load_random(1);
      load_random(2);
      load_random(3);
      // Special operands now and then.
      if (k % 8 == 0) b.fmv_w_x(2, reg::zero);
      if (k % 8 == 1) {
        b.li(reg::t1, static_cast<std::int32_t>(0x80000000u));
        b.fmv_w_x(3, reg::t1);
      }
      for (Mnemonic m : {FMADD, FMSUB, FNMSUB, FNMADD}) {
        b.fp(m, 4, 1, 2, 3);
        store_p(4);
      }
      for (Mnemonic m : {FADD, FSUB, FMUL, FDIV, FMIN, FMAX, FSGNJ, FSGNJN, FSGNJX}) {
        b.fp(m, 4, 1, 2);
        store_p(4);
      }
      b.fsqrt(4, 1);
      store_p(4);
      for (Mnemonic m : {FEQ, FLT, FLE}) {
        b.fp(m, reg::t2, 1, 2);
        store_x(reg::t2);
      }
      b.fp(FCLASS, reg::t2, 1);
      store_x(reg::t2);
      b.fcvt_w_s(reg::t2, 1, isa::rm::RNE);
      store_x(reg::t2);
      b.fcvt_w_s(reg::t2, 1, isa::rm::RTZ);
      store_x(reg::t2);
      b.fp(FCVT_WU_S, reg::t2, 2);
      store_x(reg::t2);
      b.li(reg::t3, static_cast<std::int32_t>(rng()));
      b.fcvt_s_w(4, reg::t3);
      store_p(4);
      b.fp(FCVT_S_WU, 4, reg::t3);
      store_p(4);
      b.fmv_x_w(reg::t2, 4);
      store_x(reg::t2);
      // Round-trip through memory.
      b.flw(5, -4, reg::s0);
      b.fadd(6, 5, 1);
      store_p(6);
    }
  };

  round_body();
  // es=3 via a pcsr write, then convert a register explicitly.
  b.li(reg::t1, 3 << 8);
  b.csr(Mnemonic::CSRRW, reg::t4, isa::csr::PCSR, reg::t1);
  store_x(reg::t4);
  b.fcvt_es(1, 2, 3);
  store_p(1);
  round_body();
  // An unsupported es-mode write leaves es=3 in place.
  b.li(reg::t1, 7 << 8);
  b.csr(Mnemonic::CSRRW, 0, isa::csr::PCSR, reg::t1);
  b.csr(Mnemonic::CSRRS, reg::t5, isa::csr::PCSR, reg::zero);
  store_x(reg::t5);
  b.fcvt_es(2, 3, 2);
  store_p(2);
  b.exit(0);
  return b;
}

/// Words written by one conformance_kernel run (upper bound).
inline std::size_t conformance_result_words(int rounds = 64) {
  return static_cast<std::size_t>(2 * rounds * 26 + 8);
}

}  // namespace positrv::kernels
