#include <gtest/gtest.h>

#include <random>

#include "positrv/assembler.hpp"
#include "positrv/isa.hpp"
#include "positrv/posit.hpp"

using namespace positrv;
using namespace positrv::isa;

namespace {

std::uint32_t r_type(std::uint32_t f7, std::uint32_t rs2, std::uint32_t rs1, std::uint32_t f3,
                     std::uint32_t rd, std::uint32_t op) {
  return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op;
}

}  // namespace

TEST(Isa, StandardEncodings) {
  // fadd.s p3, p1, p2 with rm=rne
  EXPECT_EQ(decode_instr(r_type(0x00, 2, 1, 0, 3, 0x53)).op, Mnemonic::FADD);
  EXPECT_EQ(decode_instr(r_type(0x0C, 2, 1, 7, 3, 0x53)).op, Mnemonic::FDIV);
  EXPECT_EQ(decode_instr(r_type(0x2C, 0, 1, 0, 3, 0x53)).op, Mnemonic::FSQRT);
  EXPECT_EQ(decode_instr(r_type(0x2C, 1, 1, 0, 3, 0x53)).op, Mnemonic::Illegal);
  EXPECT_EQ(decode_instr(r_type(0x60, 0, 1, 1, 3, 0x53)).op, Mnemonic::FCVT_W_S);
  EXPECT_EQ(decode_instr(r_type(0x60, 1, 1, 1, 3, 0x53)).op, Mnemonic::FCVT_WU_S);
  EXPECT_EQ(decode_instr(r_type(0x68, 0, 1, 0, 3, 0x53)).op, Mnemonic::FCVT_S_W);
  EXPECT_EQ(decode_instr(r_type(0x70, 0, 1, 0, 3, 0x53)).op, Mnemonic::FMV_X_W);
  EXPECT_EQ(decode_instr(r_type(0x70, 0, 1, 1, 3, 0x53)).op, Mnemonic::FCLASS);
  EXPECT_EQ(decode_instr(r_type(0x78, 0, 1, 0, 3, 0x53)).op, Mnemonic::FMV_W_X);
  EXPECT_EQ(decode_instr(r_type(0x50, 2, 1, 2, 3, 0x53)).op, Mnemonic::FEQ);
  EXPECT_EQ(decode_instr(r_type(0x50, 2, 1, 3, 3, 0x53)).op, Mnemonic::Illegal);
  EXPECT_EQ(decode_instr(r_type(0x14, 2, 1, 1, 3, 0x53)).op, Mnemonic::FMAX);
  EXPECT_EQ(decode_instr(r_type(0x10, 2, 1, 2, 3, 0x53)).op, Mnemonic::FSGNJX);
  // double-precision fmt is not part of the posit FPU
  EXPECT_EQ(decode_instr(r_type(0x01, 2, 1, 0, 3, 0x53)).op, Mnemonic::Illegal);
  // flw p0, 0(x1) / fsw p2, 8(x1)
  EXPECT_EQ(decode_instr(0x0000A007u).op, Mnemonic::FLW);
  const Instr st = decode_instr((2u << 20) | (1u << 15) | (2u << 12) | (8u << 7) | 0x27);
  EXPECT_EQ(st.op, Mnemonic::FSW);
  EXPECT_EQ(st.imm, 8);
  const Instr fma = decode_instr((4u << 27) | (3u << 20) | (2u << 15) | (1u << 7) | 0x43);
  EXPECT_EQ(fma.op, Mnemonic::FMADD);
  EXPECT_EQ(fma.rs3, 4);
  EXPECT_EQ(decode_instr((4u << 27) | (1u << 25) | 0x43).op, Mnemonic::Illegal);
  EXPECT_EQ(decode_instr(0).op, Mnemonic::Illegal);
  EXPECT_EQ(decode_instr(0xFFFFFFFFu).op, Mnemonic::Illegal);
}

TEST(Isa, FcvtEsEncoding) {
  const std::uint32_t word = (kFcvtEsFunct7 << 25) | (3u << 20) | (2u << 15) | (5u << 7) | 0x0B;
  const Instr in = decode_instr(word);
  EXPECT_EQ(in.op, Mnemonic::FCVT_ES);
  EXPECT_EQ(in.rd, 5);
  EXPECT_EQ(in.from_es, 2);
  EXPECT_EQ(in.to_es, 3);
  EXPECT_EQ(encode_instr(in), word);
  // The opcode is configurable.
  IsaOptions alt;
  alt.fcvt_es_opcode = 0x2B;
  EXPECT_EQ(decode_instr(word, alt).op, Mnemonic::Illegal);
  EXPECT_EQ(decode_instr((word & ~0x7Fu) | 0x2B, alt).op, Mnemonic::FCVT_ES);
  EXPECT_EQ(disassemble(word), "fcvt.es p5, 2, 3 # raw=0xF831028B");
}

TEST(Isa, CustomFlavorXBits) {
  EXPECT_EQ(custom_xbits(Mnemonic::FADD), (XBits{false, false, false}));
  EXPECT_EQ(custom_xbits(Mnemonic::FCVT_W_S), (XBits{true, false, false}));
  EXPECT_EQ(custom_xbits(Mnemonic::FCVT_S_W), (XBits{false, true, false}));
  EXPECT_EQ(custom_xbits(Mnemonic::FEQ), (XBits{true, false, false}));
  EXPECT_EQ(custom_xbits(Mnemonic::FMV_W_X), (XBits{false, true, false}));

  ProgramBuilder b(0, Flavor::Custom);
  b.fcvt_s_w(1, 10);
  b.fcvt_w_s(11, 1, rm::RTZ);
  b.fadd(3, 1, 2);
  b.flw(4, 16, 2);
  b.fsw(4, -4, 2);
  b.fp(Mnemonic::FNMADD, 5, 1, 2, 3);
  const auto w = b.words();
  EXPECT_EQ(w[0] & 0x7F, 0x2Bu);
  EXPECT_EQ((w[0] >> 12) & 7, 0b010u);  // xs1
  EXPECT_EQ((w[1] >> 12) & 7, 0b100u);  // xd
  EXPECT_EQ((w[1] >> 25) & 3, 1u);      // rtz selector
  EXPECT_EQ((w[2] >> 12) & 7, 0u);
  EXPECT_EQ(w[3] & 0x7F, 0x7Bu);
  EXPECT_EQ((w[3] >> 12) & 7, 0b011u);
  EXPECT_EQ(w[4] & 0x7F, 0x7Bu);
  EXPECT_EQ((w[4] >> 12) & 7, 0b010u);
  EXPECT_EQ(w[5] & 0x7F, 0x5Bu);
  EXPECT_EQ((w[5] >> 25) & 3, 3u);
  const Instr rtz = decode_instr(w[1]);
  EXPECT_EQ(rtz.flavor, Flavor::Custom);
  EXPECT_EQ(format_instr(rtz), "p.fcvt.w.s x11, p1, rtz");
  EXPECT_EQ(decode_instr(w[3]).imm, 16);
  EXPECT_EQ(decode_instr(w[4]).imm, -4);
  // Wrong xbits for the operation.
  EXPECT_EQ(decode_instr(w[2] | (1u << 14)).op, Mnemonic::Illegal);
  // Unknown funct7 in the custom space.
  EXPECT_EQ(decode_instr(r_type(0x7F, 0, 0, 0, 0, 0x2B)).op, Mnemonic::Illegal);
}

TEST(Isa, EveryPositOpRoundTripsInBothFlavors) {
  std::mt19937 rng(1);
  for (Flavor flavor : {Flavor::Standard, Flavor::Custom}) {
    for (Mnemonic m : kPositOps) {
      for (int k = 0; k < 50; ++k) {
        ProgramBuilder b(0, flavor);
        const auto r = [&] { return static_cast<std::uint8_t>(rng() % 32); };
        switch (m) {
          case Mnemonic::FLW: b.flw(r(), static_cast<int>(rng() % 4096) - 2048, r()); break;
          case Mnemonic::FSW: b.fsw(r(), static_cast<int>(rng() % 4096) - 2048, r()); break;
          case Mnemonic::FCVT_ES: b.fcvt_es(r(), 2 + rng() % 2, 2 + rng() % 2); break;
          case Mnemonic::FCVT_W_S: case Mnemonic::FCVT_WU_S: {
            Instr in;
            in.op = m;
            in.rd = r();
            in.rs1 = r();
            in.rm = rng() % 2 ? rm::RTZ : rm::RNE;
            b.emit(in);
            break;
          }
          default: {
            const OperandFiles f = operand_files(m);
            b.fp(m, r(), r(), f.rs2 == RegFile::None ? 0 : r(),
                 f.rs3 == RegFile::None ? 0 : r());
          }
        }
        const std::uint32_t word = b.words()[0];
        const Instr in = decode_instr(word);
        ASSERT_EQ(in.op, m) << mnemonic_name(m) << " flavor " << int(flavor);
        ASSERT_EQ(in.flavor, m == Mnemonic::FCVT_ES ? in.flavor : flavor);
        ASSERT_EQ(encode_instr(in), word) << mnemonic_name(m);
      }
    }
  }
}

TEST(Isa, LegalPositWordsReencodeExactly) {
  std::mt19937 rng(2);
  const std::uint32_t opcodes[] = {0x07, 0x27, 0x43, 0x47, 0x4B, 0x4F, 0x53, 0x0B, 0x2B, 0x5B, 0x7B};
  int legal = 0;
  for (int k = 0; k < 400000; ++k) {
    std::uint32_t w = (rng() & ~0x7Fu) | opcodes[rng() % std::size(opcodes)];
    if (rng() % 2) w &= ~(0x3u << 25);  // fmt = S more often
    const Instr in = decode_instr(w);
    if (in.op == Mnemonic::Illegal) continue;
    ++legal;
    ASSERT_EQ(encode_instr(in), w) << std::hex << w << " " << mnemonic_name(in.op);
  }
  EXPECT_GT(legal, 10000);
}

TEST(Isa, ConversionRoundingLegality) {
  Instr in;
  in.op = Mnemonic::FCVT_W_S;
  in.rm = rm::DYN;
  EXPECT_EQ(conversion_rounding(in), rm::RNE);
  in.rm = rm::RTZ;
  EXPECT_EQ(conversion_rounding(in), rm::RTZ);
  in.rm = 2;  // rdn is not implemented
  EXPECT_FALSE(conversion_rounding(in).has_value());
}

TEST(Isa, BaseRoundTrip) {
  ProgramBuilder b(0x1000);
  b.label("top");
  b.li(reg::a0, 0x12345678);
  b.addi(reg::a1, reg::a0, -5);
  b.mul(reg::a2, reg::a0, reg::a1);
  b.lw(reg::t0, -8, reg::sp);
  b.sw(reg::t0, 12, reg::sp);
  b.bne(reg::a0, reg::zero, "top");
  b.j("top");
  b.csr(Mnemonic::CSRRS, reg::t1, csr::PCSR, reg::zero);
  b.ecall();
  for (std::uint32_t w : b.words()) {
    const Instr in = decode_instr(w);
    ASSERT_NE(in.op, Mnemonic::Illegal) << std::hex << w;
    ASSERT_EQ(encode_instr(in), w);
  }
  const auto w = b.words();
  EXPECT_EQ(decode_instr(w[6]).imm, -24);
  EXPECT_EQ(format_instr(decode_instr(w[2])), "addi x11, x10, -5");
  EXPECT_EQ(format_instr(decode_instr(w[9])), "ecall");
}

TEST(Isa, PcsrFields) {
  Pcsr p;
  EXPECT_EQ(p.es_mode(), 2u);
  EXPECT_EQ(p.value(), 0x200u);
  p.raise(positrv::fflag::DZ);
  EXPECT_EQ(p.fflags(), positrv::fflag::DZ);
  p.write(0x3E0 | 0x1);  // rm bits set, es=3
  EXPECT_EQ(p.rm(), 0);
  EXPECT_EQ(p.es_mode(), 3u);
  EXPECT_EQ(p.value(), 0x301u);
  p.write(5u << 8);  // unsupported: es stays 3
  EXPECT_EQ(p.es_mode(), 3u);
  EXPECT_THROW(Pcsr(1u << 2, 3), std::invalid_argument);
}

TEST(Isa, PcsrViews) {
  Pcsr p;
  EXPECT_EQ(pcsr_access(p, csr::FFLAGS, CsrOp::Set, positrv::fflag::DZ), 0u);
  EXPECT_EQ(pcsr_access(p, csr::PCSR, CsrOp::Read, 0), 0x208u);
  EXPECT_EQ(pcsr_access(p, csr::FRM, CsrOp::Write, 7), 0u);
  EXPECT_EQ(pcsr_access(p, csr::FRM, CsrOp::Read, 0), 0u);
  EXPECT_EQ(pcsr_access(p, csr::PCSR, CsrOp::Write, 0x300), 0x208u);
  EXPECT_EQ(p.es_mode(), 3u);
  EXPECT_EQ(p.fflags(), 0);
  EXPECT_EQ(pcsr_access(p, csr::FFLAGS, CsrOp::Clear, 0x1F), 0u);
  EXPECT_FALSE(pcsr_access(p, 0x300, CsrOp::Read, 0).has_value());
}
