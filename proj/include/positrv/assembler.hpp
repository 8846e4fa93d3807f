// SPDX-License-Identifier: Apache-2.0
//
// Small in-process assembler for building test programs and benchmark
// kernels: one method per instruction, named labels, forward references.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "positrv/isa.hpp"

namespace positrv::isa {

class ProgramBuilder {
 public:
  explicit ProgramBuilder(std::uint32_t base = 0, Flavor flavor = Flavor::Standard,
                          IsaOptions opts = {})
      : base_(base), flavor_(flavor), opts_(opts) {}

  /// Encoding used for posit instructions emitted from here on.
  void set_flavor(Flavor f) { flavor_ = f; }
  Flavor flavor() const { return flavor_; }
  const IsaOptions& options() const { return opts_; }

  std::uint32_t base() const { return base_; }
  std::uint32_t here() const { return base_ + 4 * static_cast<std::uint32_t>(code_.size()); }
  std::size_t size() const { return code_.size(); }

  void label(const std::string& name) {
    if (!labels_.emplace(name, here()).second)
      throw std::invalid_argument("duplicate label: " + name);
  }

  void emit(Instr in) {
    if (is_posit_op(in.op)) in.flavor = flavor_;
    code_.push_back(Slot{in, {}});
  }

  // -- base integer ---------------------------------------------------------

  void r(Mnemonic m, std::uint8_t rd, std::uint8_t rs1, std::uint8_t rs2) {
    emit(make(m, rd, rs1, rs2, 0));
  }
  void i(Mnemonic m, std::uint8_t rd, std::uint8_t rs1, std::int32_t imm) {
    emit(make(m, rd, rs1, 0, imm));
  }

  void add(std::uint8_t rd, std::uint8_t a, std::uint8_t b) { r(Mnemonic::ADD, rd, a, b); }
  void sub(std::uint8_t rd, std::uint8_t a, std::uint8_t b) { r(Mnemonic::SUB, rd, a, b); }
  void mul(std::uint8_t rd, std::uint8_t a, std::uint8_t b) { r(Mnemonic::MUL, rd, a, b); }
  void addi(std::uint8_t rd, std::uint8_t rs1, std::int32_t imm) { i(Mnemonic::ADDI, rd, rs1, imm); }
  void slli(std::uint8_t rd, std::uint8_t rs1, std::int32_t sh) { i(Mnemonic::SLLI, rd, rs1, sh); }
  void srli(std::uint8_t rd, std::uint8_t rs1, std::int32_t sh) { i(Mnemonic::SRLI, rd, rs1, sh); }
  void mv(std::uint8_t rd, std::uint8_t rs) { addi(rd, rs, 0); }
  void nop() { addi(0, 0, 0); }

  /// Loads a 32-bit constant in one or two instructions.
  void li(std::uint8_t rd, std::int32_t value) {
    if (value >= -2048 && value < 2048) {
      addi(rd, 0, value);
      return;
    }
    const auto u = static_cast<std::uint32_t>(value);
    std::uint32_t hi = u & 0xFFFFF000u;
    auto lo = static_cast<std::int32_t>(u & 0xFFFu);
    if (lo >= 2048) {
      lo -= 4096;
      hi += 0x1000u;
    }
    emit(make(Mnemonic::LUI, rd, 0, 0, static_cast<std::int32_t>(hi)));
    if (lo != 0) addi(rd, rd, lo);
  }

  void lw(std::uint8_t rd, std::int32_t off, std::uint8_t base) { i(Mnemonic::LW, rd, base, off); }
  void sw(std::uint8_t rs2, std::int32_t off, std::uint8_t base) {
    emit(make(Mnemonic::SW, 0, base, rs2, off));
  }

  void branch(Mnemonic m, std::uint8_t rs1, std::uint8_t rs2, const std::string& target) {
    code_.push_back(Slot{make(m, 0, rs1, rs2, 0), target});
  }
  void beq(std::uint8_t a, std::uint8_t b, const std::string& t) { branch(Mnemonic::BEQ, a, b, t); }
  void bne(std::uint8_t a, std::uint8_t b, const std::string& t) { branch(Mnemonic::BNE, a, b, t); }
  void blt(std::uint8_t a, std::uint8_t b, const std::string& t) { branch(Mnemonic::BLT, a, b, t); }
  void bge(std::uint8_t a, std::uint8_t b, const std::string& t) { branch(Mnemonic::BGE, a, b, t); }
  void jal(std::uint8_t rd, const std::string& target) {
    code_.push_back(Slot{make(Mnemonic::JAL, rd, 0, 0, 0), target});
  }
  void j(const std::string& target) { jal(0, target); }

  void ecall() { emit(make(Mnemonic::ECALL, 0, 0, 0, 0)); }
  void ebreak() { emit(make(Mnemonic::EBREAK, 0, 0, 0, 0)); }

  /// Exit convention: a0 = code, a7 = 93, ecall.
  void exit(std::int32_t code) {
    li(reg::a0, code);
    li(reg::a7, 93);
    ecall();
  }

  void csr(Mnemonic m, std::uint8_t rd, std::uint16_t addr, std::uint8_t rs1_or_uimm) {
    Instr in = make(m, rd, rs1_or_uimm, 0, 0);
    in.csr = addr;
    emit(in);
  }

  // -- posit ----------------------------------------------------------------

  void fp(Mnemonic m, std::uint8_t rd, std::uint8_t rs1, std::uint8_t rs2 = 0,
          std::uint8_t rs3 = 0) {
    Instr in = make(m, rd, rs1, rs2, 0);
    in.rs3 = rs3;
    emit(in);
  }
  void flw(std::uint8_t pd, std::int32_t off, std::uint8_t base) {
    emit(make(Mnemonic::FLW, pd, base, 0, off));
  }
  void fsw(std::uint8_t ps, std::int32_t off, std::uint8_t base) {
    emit(make(Mnemonic::FSW, 0, base, ps, off));
  }
  void fadd(std::uint8_t d, std::uint8_t a, std::uint8_t b) { fp(Mnemonic::FADD, d, a, b); }
  void fsub(std::uint8_t d, std::uint8_t a, std::uint8_t b) { fp(Mnemonic::FSUB, d, a, b); }
  void fmul(std::uint8_t d, std::uint8_t a, std::uint8_t b) { fp(Mnemonic::FMUL, d, a, b); }
  void fdiv(std::uint8_t d, std::uint8_t a, std::uint8_t b) { fp(Mnemonic::FDIV, d, a, b); }
  void fsqrt(std::uint8_t d, std::uint8_t a) { fp(Mnemonic::FSQRT, d, a); }
  void fcvt_s_w(std::uint8_t pd, std::uint8_t xs) { fp(Mnemonic::FCVT_S_W, pd, xs); }
  void fcvt_w_s(std::uint8_t xd, std::uint8_t ps, std::uint8_t rounding = rm::RNE) {
    Instr in = make(Mnemonic::FCVT_W_S, xd, ps, 0, 0);
    in.rm = rounding;
    emit(in);
  }
  void fcvt_wu_s(std::uint8_t xd, std::uint8_t ps, std::uint8_t rounding = rm::RNE) {
    Instr in = make(Mnemonic::FCVT_WU_S, xd, ps, 0, 0);
    in.rm = rounding;
    emit(in);
  }
  void fmv_w_x(std::uint8_t pd, std::uint8_t xs) { fp(Mnemonic::FMV_W_X, pd, xs); }
  void fmv_x_w(std::uint8_t xd, std::uint8_t ps) { fp(Mnemonic::FMV_X_W, xd, ps); }
  void fsgnjn(std::uint8_t d, std::uint8_t a, std::uint8_t b) { fp(Mnemonic::FSGNJN, d, a, b); }
  void fcvt_es(std::uint8_t p, std::uint8_t from_es, std::uint8_t to_es) {
    Instr in = make(Mnemonic::FCVT_ES, p, p, 0, 0);
    in.from_es = from_es;
    in.to_es = to_es;
    emit(in);
  }

  /// Resolves labels and encodes every instruction.
  std::vector<std::uint32_t> words() const {
    std::vector<std::uint32_t> out;
    out.reserve(code_.size());
    for (std::size_t k = 0; k < code_.size(); ++k) {
      Instr in = code_[k].in;
      if (!code_[k].target.empty()) {
        const auto it = labels_.find(code_[k].target);
        if (it == labels_.end()) throw std::invalid_argument("undefined label: " + code_[k].target);
        const std::uint32_t pc = base_ + 4 * static_cast<std::uint32_t>(k);
        in.imm = static_cast<std::int32_t>(it->second - pc);
      }
      out.push_back(encode_instr(in, opts_));
    }
    return out;
  }

  /// Little-endian byte image of words().
  std::vector<std::uint8_t> bytes() const {
    std::vector<std::uint8_t> out;
    for (std::uint32_t w : words())
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
    return out;
  }

 private:
  struct Slot {
    Instr in;
    std::string target;
  };

  static Instr make(Mnemonic m, std::uint8_t rd, std::uint8_t rs1, std::uint8_t rs2,
                    std::int32_t imm) {
    Instr in;
    in.op = m;
    in.rd = rd;
    in.rs1 = rs1;
    in.rs2 = rs2;
    in.imm = imm;
    return in;
  }

  std::uint32_t base_;
  Flavor flavor_;
  IsaOptions opts_;
  std::vector<Slot> code_;
  std::map<std::string, std::uint32_t> labels_;
};

}  // namespace positrv::isa
