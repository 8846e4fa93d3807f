// SPDX-License-Identifier: Apache-2.0
//
// RV32IM + posit F-extension instruction encodings, the custom-opcode
// (RoCC style) mapping of the same operations, FCVT.ES, and the pcsr.

#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace positrv::isa {

// ---------------------------------------------------------------------------
// Mnemonics

// clang-format off
#define POSITRV_BASE_OPS(X) \
  X(LUI, "lui") X(AUIPC, "auipc") X(JAL, "jal") X(JALR, "jalr") \
  X(BEQ, "beq") X(BNE, "bne") X(BLT, "blt") X(BGE, "bge") X(BLTU, "bltu") X(BGEU, "bgeu") \
  X(LB, "lb") X(LH, "lh") X(LW, "lw") X(LBU, "lbu") X(LHU, "lhu") \
  X(SB, "sb") X(SH, "sh") X(SW, "sw") \
  X(ADDI, "addi") X(SLTI, "slti") X(SLTIU, "sltiu") X(XORI, "xori") X(ORI, "ori") X(ANDI, "andi") \
  X(SLLI, "slli") X(SRLI, "srli") X(SRAI, "srai") \
  X(ADD, "add") X(SUB, "sub") X(SLL, "sll") X(SLT, "slt") X(SLTU, "sltu") \
  X(XOR, "xor") X(SRL, "srl") X(SRA, "sra") X(OR, "or") X(AND, "and") \
  X(MUL, "mul") X(MULH, "mulh") X(MULHSU, "mulhsu") X(MULHU, "mulhu") \
  X(DIV, "div") X(DIVU, "divu") X(REM, "rem") X(REMU, "remu") \
  X(FENCE, "fence") X(ECALL, "ecall") X(EBREAK, "ebreak") \
  X(CSRRW, "csrrw") X(CSRRS, "csrrs") X(CSRRC, "csrrc") \
  X(CSRRWI, "csrrwi") X(CSRRSI, "csrrsi") X(CSRRCI, "csrrci")

#define POSITRV_POSIT_OPS(X) \
  X(FLW, "flw") X(FSW, "fsw") \
  X(FMADD, "fmadd.s") X(FMSUB, "fmsub.s") X(FNMSUB, "fnmsub.s") X(FNMADD, "fnmadd.s") \
  X(FADD, "fadd.s") X(FSUB, "fsub.s") X(FMUL, "fmul.s") X(FDIV, "fdiv.s") X(FSQRT, "fsqrt.s") \
  X(FSGNJ, "fsgnj.s") X(FSGNJN, "fsgnjn.s") X(FSGNJX, "fsgnjx.s") \
  X(FMIN, "fmin.s") X(FMAX, "fmax.s") \
  X(FCVT_W_S, "fcvt.w.s") X(FCVT_WU_S, "fcvt.wu.s") X(FMV_X_W, "fmv.x.w") \
  X(FEQ, "feq.s") X(FLT, "flt.s") X(FLE, "fle.s") X(FCLASS, "fclass.s") \
  X(FCVT_S_W, "fcvt.s.w") X(FCVT_S_WU, "fcvt.s.wu") X(FMV_W_X, "fmv.w.x") \
  X(FCVT_ES, "fcvt.es")
// clang-format on

enum class Mnemonic : std::uint8_t {
#define POSITRV_ENUM(id, text) id,
  POSITRV_BASE_OPS(POSITRV_ENUM) POSITRV_POSIT_OPS(POSITRV_ENUM)
#undef POSITRV_ENUM
      Illegal
};

inline const char* mnemonic_name(Mnemonic m) {
  switch (m) {
#define POSITRV_NAME(id, text) \
  case Mnemonic::id: return text;
    POSITRV_BASE_OPS(POSITRV_NAME)
    POSITRV_POSIT_OPS(POSITRV_NAME)
#undef POSITRV_NAME
    case Mnemonic::Illegal: return "illegal";
  }
  return "illegal";
}

inline constexpr Mnemonic kFirstPositOp = Mnemonic::FLW;

inline bool is_posit_op(Mnemonic m) {
  return m >= kFirstPositOp && m != Mnemonic::Illegal;
}

/// Every posit mnemonic, in table order.
inline constexpr Mnemonic kPositOps[] = {
#define POSITRV_LIST(id, text) Mnemonic::id,
    POSITRV_POSIT_OPS(POSITRV_LIST)
#undef POSITRV_LIST
};

// ---------------------------------------------------------------------------
// Operand roles

enum class RegFile : std::uint8_t { None, Int, Posit };

struct OperandFiles {
  RegFile rd = RegFile::None;
  RegFile rs1 = RegFile::None;
  RegFile rs2 = RegFile::None;
  RegFile rs3 = RegFile::None;
};

inline OperandFiles operand_files(Mnemonic m) {
  using enum Mnemonic;
  constexpr auto N = RegFile::None;
  constexpr auto X = RegFile::Int;
  constexpr auto P = RegFile::Posit;
  switch (m) {
    case FLW: return {P, X, N, N};
    case FSW: return {N, X, P, N};
    case FMADD: case FMSUB: case FNMSUB: case FNMADD: return {P, P, P, P};
    case FADD: case FSUB: case FMUL: case FDIV:
    case FSGNJ: case FSGNJN: case FSGNJX: case FMIN: case FMAX: return {P, P, P, N};
    case FSQRT: case FCVT_ES: return {P, P, N, N};
    case FCVT_W_S: case FCVT_WU_S: case FMV_X_W: case FCLASS: return {X, P, N, N};
    case FEQ: case FLT: case FLE: return {X, P, P, N};
    case FCVT_S_W: case FCVT_S_WU: case FMV_W_X: return {P, X, N, N};
    case LUI: case AUIPC: case JAL: return {X, N, N, N};
    case BEQ: case BNE: case BLT: case BGE: case BLTU: case BGEU:
    case SB: case SH: case SW: return {N, X, X, N};
    case JALR: case LB: case LH: case LW: case LBU: case LHU: case ADDI: case SLTI:
    case SLTIU: case XORI: case ORI: case ANDI: case SLLI: case SRLI: case SRAI:
    case CSRRW: case CSRRS: case CSRRC: return {X, X, N, N};
    case CSRRWI: case CSRRSI: case CSRRCI: return {X, N, N, N};
    case FENCE: case ECALL: case EBREAK: case Illegal: return {};
    default: return {X, X, X, N};
  }
}

// ---------------------------------------------------------------------------
// Opcodes

namespace opcode {
inline constexpr std::uint8_t LOAD = 0x03;
inline constexpr std::uint8_t LOAD_FP = 0x07;
inline constexpr std::uint8_t CUSTOM0 = 0x0B;
inline constexpr std::uint8_t MISC_MEM = 0x0F;
inline constexpr std::uint8_t OP_IMM = 0x13;
inline constexpr std::uint8_t AUIPC = 0x17;
inline constexpr std::uint8_t STORE = 0x23;
inline constexpr std::uint8_t STORE_FP = 0x27;
inline constexpr std::uint8_t CUSTOM1 = 0x2B;
inline constexpr std::uint8_t OP = 0x33;
inline constexpr std::uint8_t LUI = 0x37;
inline constexpr std::uint8_t MADD = 0x43;
inline constexpr std::uint8_t MSUB = 0x47;
inline constexpr std::uint8_t NMSUB = 0x4B;
inline constexpr std::uint8_t NMADD = 0x4F;
inline constexpr std::uint8_t OP_FP = 0x53;
inline constexpr std::uint8_t CUSTOM2 = 0x5B;
inline constexpr std::uint8_t BRANCH = 0x63;
inline constexpr std::uint8_t JALR = 0x67;
inline constexpr std::uint8_t JAL = 0x6F;
inline constexpr std::uint8_t SYSTEM = 0x73;
inline constexpr std::uint8_t CUSTOM3 = 0x7B;
}  // namespace opcode

inline constexpr std::uint8_t kFcvtEsFunct7 = 0b1111100;

/// ABI register names.
namespace reg {
inline constexpr std::uint8_t zero = 0, ra = 1, sp = 2, gp = 3, tp = 4;
inline constexpr std::uint8_t t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9;
inline constexpr std::uint8_t a0 = 10, a1 = 11, a2 = 12, a3 = 13, a4 = 14, a5 = 15, a6 = 16,
                              a7 = 17;
inline constexpr std::uint8_t s2 = 18, s3 = 19, s4 = 20, s5 = 21, s6 = 22, s7 = 23, s8 = 24,
                              s9 = 25, s10 = 26, s11 = 27;
inline constexpr std::uint8_t t3 = 28, t4 = 29, t5 = 30, t6 = 31;
}  // namespace reg

/// Rounding-mode field values understood by the posit FPU.
namespace rm {
inline constexpr std::uint8_t RNE = 0b000;
inline constexpr std::uint8_t RTZ = 0b001;
inline constexpr std::uint8_t DYN = 0b111;
}  // namespace rm

/// Standard: posit ops sit on the F-extension opcodes. Custom: the same ops
/// re-encoded in the custom-0..3 space with xd/xs1/xs2 bits.
enum class Flavor : std::uint8_t { Standard, Custom };

struct IsaOptions {
  std::uint8_t fcvt_es_opcode = opcode::CUSTOM0;
};

// ---------------------------------------------------------------------------
// Decoded instruction

struct Instr {
  Mnemonic op = Mnemonic::Illegal;
  Flavor flavor = Flavor::Standard;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;
  std::uint8_t rs2 = 0;
  std::uint8_t rs3 = 0;
  /// Raw funct3/rm field for standard posit ops; for custom FCVT.W[U].S the
  /// rounding selection (rm::RNE or rm::RTZ).
  std::uint8_t rm = 0;
  std::int32_t imm = 0;
  std::uint16_t csr = 0;
  std::uint8_t from_es = 0;
  std::uint8_t to_es = 0;
  /// Only meaningful for Illegal: the raw word.
  std::uint32_t raw = 0;

  friend bool operator==(const Instr&, const Instr&) = default;
};

/// RoCC register-traffic bits an R/R4-type operation needs in the custom
/// flavor. Loads and stores on custom-3 use their own fixed patterns.
struct XBits {
  bool xd = false;
  bool xs1 = false;
  bool xs2 = false;
  friend bool operator==(XBits, XBits) = default;
};

inline XBits custom_xbits(Mnemonic m) {
  const OperandFiles f = operand_files(m);
  return {f.rd == RegFile::Int, f.rs1 == RegFile::Int, f.rs2 == RegFile::Int};
}

/// Effective conversion rounding for FCVT.W[U].S. Returns nullopt when the
/// encoded rm is not one the posit FPU implements.
inline std::optional<std::uint8_t> conversion_rounding(const Instr& in) {
  if (in.rm == rm::RNE || in.rm == rm::DYN) return rm::RNE;
  if (in.rm == rm::RTZ) return rm::RTZ;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Field helpers

namespace detail {

inline std::uint32_t bits(std::uint32_t w, unsigned hi, unsigned lo) {
  return (w >> lo) & ((1u << (hi - lo + 1)) - 1);
}

inline std::int32_t sext(std::uint32_t v, unsigned width) {
  const unsigned shift = 32 - width;
  return static_cast<std::int32_t>(v << shift) >> shift;
}

inline std::int32_t imm_i(std::uint32_t w) { return sext(bits(w, 31, 20), 12); }
inline std::int32_t imm_s(std::uint32_t w) { return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
inline std::int32_t imm_b(std::uint32_t w) {
  return sext((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) |
                  (bits(w, 11, 8) << 1),
              13);
}
inline std::int32_t imm_j(std::uint32_t w) {
  return sext((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) |
                  (bits(w, 30, 21) << 1),
              21);
}

inline std::uint32_t r_type(std::uint32_t funct7, unsigned rs2, unsigned rs1, std::uint32_t funct3,
                            unsigned rd, std::uint32_t op) {
  return (funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) | (rd << 7) | op;
}

inline std::uint32_t i_type(std::int32_t imm, unsigned rs1, std::uint32_t funct3, unsigned rd,
                            std::uint32_t op) {
  return ((static_cast<std::uint32_t>(imm) & 0xFFF) << 20) | (rs1 << 15) | (funct3 << 12) |
         (rd << 7) | op;
}

inline std::uint32_t s_type(std::int32_t imm, unsigned rs2, unsigned rs1, std::uint32_t funct3,
                            std::uint32_t op) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (bits(u, 11, 5) << 25) | (rs2 << 20) | (rs1 << 15) | (funct3 << 12) |
         (bits(u, 4, 0) << 7) | op;
}

inline std::uint32_t b_type(std::int32_t imm, unsigned rs2, unsigned rs1, std::uint32_t funct3) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (bits(u, 12, 12) << 31) | (bits(u, 10, 5) << 25) | (rs2 << 20) | (rs1 << 15) |
         (funct3 << 12) | (bits(u, 4, 1) << 8) | (bits(u, 11, 11) << 7) | opcode::BRANCH;
}

inline std::uint32_t j_type(std::int32_t imm, unsigned rd) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (bits(u, 20, 20) << 31) | (bits(u, 10, 1) << 21) | (bits(u, 11, 11) << 20) |
         (bits(u, 19, 12) << 12) | (rd << 7) | opcode::JAL;
}

inline std::uint32_t xbits_field(XBits x) {
  return (x.xd ? 4u : 0u) | (x.xs1 ? 2u : 0u) | (x.xs2 ? 1u : 0u);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// OP-FP table shared by both flavors. In the custom flavor the two low
// funct7 bits (the F-extension fmt field, always 00 for single precision)
// carry what funct3 selects in the standard encoding.

struct FpSlot {
  std::uint8_t funct7;  // fmt bits cleared
  std::uint8_t sub;     // funct3 (standard) / fmt bits (custom)
  std::int8_t rs2;      // fixed rs2 value, or -1 when rs2 is an operand
};

inline std::optional<FpSlot> fp_slot(Mnemonic m) {
  using enum Mnemonic;
  switch (m) {
    case FADD: return FpSlot{0b0000000, 0, -1};
    case FSUB: return FpSlot{0b0000100, 0, -1};
    case FMUL: return FpSlot{0b0001000, 0, -1};
    case FDIV: return FpSlot{0b0001100, 0, -1};
    case FSQRT: return FpSlot{0b0101100, 0, 0};
    case FSGNJ: return FpSlot{0b0010000, 0, -1};
    case FSGNJN: return FpSlot{0b0010000, 1, -1};
    case FSGNJX: return FpSlot{0b0010000, 2, -1};
    case FMIN: return FpSlot{0b0010100, 0, -1};
    case FMAX: return FpSlot{0b0010100, 1, -1};
    case FCVT_W_S: return FpSlot{0b1100000, 0, 0};
    case FCVT_WU_S: return FpSlot{0b1100000, 0, 1};
    case FMV_X_W: return FpSlot{0b1110000, 0, 0};
    case FCLASS: return FpSlot{0b1110000, 1, 0};
    case FEQ: return FpSlot{0b1010000, 2, -1};
    case FLT: return FpSlot{0b1010000, 1, -1};
    case FLE: return FpSlot{0b1010000, 0, -1};
    case FCVT_S_W: return FpSlot{0b1101000, 0, 0};
    case FCVT_S_WU: return FpSlot{0b1101000, 0, 1};
    case FMV_W_X: return FpSlot{0b1111000, 0, 0};
    default: return std::nullopt;
  }
}

/// Ops whose standard funct3 is a rounding-mode field rather than a selector.
inline bool has_rm_field(Mnemonic m) {
  using enum Mnemonic;
  switch (m) {
    case FADD: case FSUB: case FMUL: case FDIV: case FSQRT: case FCVT_W_S: case FCVT_WU_S:
    case FCVT_S_W: case FCVT_S_WU: case FMADD: case FMSUB: case FNMSUB: case FNMADD:
      return true;
    default:
      return false;
  }
}

inline std::optional<Mnemonic> fp_lookup(std::uint32_t funct7, std::uint32_t sub,
                                         std::uint32_t rs2, bool standard) {
  for (Mnemonic m : kPositOps) {
    const auto slot = fp_slot(m);
    if (!slot || slot->funct7 != funct7) continue;
    if (slot->rs2 >= 0 && static_cast<std::uint32_t>(slot->rs2) != rs2) continue;
    // custom FCVT.W[U].S carries its rounding selection (RNE/RTZ) in sub
    const bool rounding_sub = !standard && (m == Mnemonic::FCVT_W_S || m == Mnemonic::FCVT_WU_S);
    if (rounding_sub) {
      if (sub > 1) continue;
    } else if ((!standard || !has_rm_field(m)) && slot->sub != sub) {
      continue;
    }
    return m;
  }
  return std::nullopt;
}

inline constexpr Mnemonic kFusedOps[] = {Mnemonic::FMADD, Mnemonic::FMSUB, Mnemonic::FNMSUB,
                                         Mnemonic::FNMADD};

// ---------------------------------------------------------------------------
// Decoder

inline Instr illegal(std::uint32_t w) {
  Instr in;
  in.raw = w;
  return in;
}

inline Instr decode_base(std::uint32_t w) {
  using namespace detail;
  using enum Mnemonic;
  Instr in;
  in.rd = static_cast<std::uint8_t>(bits(w, 11, 7));
  in.rs1 = static_cast<std::uint8_t>(bits(w, 19, 15));
  in.rs2 = static_cast<std::uint8_t>(bits(w, 24, 20));
  const std::uint32_t f3 = bits(w, 14, 12);
  const std::uint32_t f7 = bits(w, 31, 25);
  auto finish = [&](Mnemonic m, std::int32_t imm, bool keep_rd, bool keep_rs1, bool keep_rs2) {
    in.op = m;
    in.imm = imm;
    if (!keep_rd) in.rd = 0;
    if (!keep_rs1) in.rs1 = 0;
    if (!keep_rs2) in.rs2 = 0;
    return in;
  };

  switch (bits(w, 6, 0)) {
    case opcode::LUI:
      return finish(LUI, static_cast<std::int32_t>(w & 0xFFFFF000u), true, false, false);
    case opcode::AUIPC:
      return finish(AUIPC, static_cast<std::int32_t>(w & 0xFFFFF000u), true, false, false);
    case opcode::JAL: return finish(JAL, imm_j(w), true, false, false);
    case opcode::JALR:
      if (f3 != 0) break;
      return finish(JALR, imm_i(w), true, true, false);
    case opcode::BRANCH: {
      static constexpr Mnemonic ops[8] = {BEQ, BNE, Illegal, Illegal, BLT, BGE, BLTU, BGEU};
      if (ops[f3] == Illegal) break;
      return finish(ops[f3], imm_b(w), false, true, true);
    }
    case opcode::LOAD: {
      static constexpr Mnemonic ops[8] = {LB, LH, LW, Illegal, LBU, LHU, Illegal, Illegal};
      if (ops[f3] == Illegal) break;
      return finish(ops[f3], imm_i(w), true, true, false);
    }
    case opcode::STORE: {
      static constexpr Mnemonic ops[8] = {SB, SH, SW, Illegal, Illegal, Illegal, Illegal, Illegal};
      if (ops[f3] == Illegal) break;
      return finish(ops[f3], imm_s(w), false, true, true);
    }
    case opcode::OP_IMM: {
      if (f3 == 1 || f3 == 5) {
        const std::int32_t shamt = static_cast<std::int32_t>(bits(w, 24, 20));
        if (f3 == 1 && f7 == 0) return finish(SLLI, shamt, true, true, false);
        if (f3 == 5 && f7 == 0) return finish(SRLI, shamt, true, true, false);
        if (f3 == 5 && f7 == 0b0100000) return finish(SRAI, shamt, true, true, false);
        break;
      }
      static constexpr Mnemonic ops[8] = {ADDI, Illegal, SLTI, SLTIU, XORI, Illegal, ORI, ANDI};
      return finish(ops[f3], imm_i(w), true, true, false);
    }
    case opcode::OP: {
      static constexpr Mnemonic base[8] = {ADD, SLL, SLT, SLTU, XOR, SRL, OR, AND};
      static constexpr Mnemonic alt[8] = {SUB, Illegal, Illegal, Illegal,
                                          Illegal, SRA, Illegal, Illegal};
      static constexpr Mnemonic muldiv[8] = {MUL, MULH, MULHSU, MULHU, DIV, DIVU, REM, REMU};
      Mnemonic m = Illegal;
      if (f7 == 0) m = base[f3];
      if (f7 == 0b0100000) m = alt[f3];
      if (f7 == 0b0000001) m = muldiv[f3];
      if (m == Illegal) break;
      return finish(m, 0, true, true, true);
    }
    case opcode::MISC_MEM:
      if (f3 != 0) break;
      in = Instr{};
      in.op = FENCE;
      in.imm = imm_i(w);
      in.rd = static_cast<std::uint8_t>(bits(w, 11, 7));
      in.rs1 = static_cast<std::uint8_t>(bits(w, 19, 15));
      return in;
    case opcode::SYSTEM: {
      if (f3 == 0) {
        if (w == 0x00000073u) return finish(ECALL, 0, false, false, false);
        if (w == 0x00100073u) return finish(EBREAK, 0, false, false, false);
        break;
      }
      static constexpr Mnemonic ops[8] = {Illegal, CSRRW, CSRRS, CSRRC,
                                          Illegal, CSRRWI, CSRRSI, CSRRCI};
      if (ops[f3] == Illegal) break;
      in.op = ops[f3];
      in.csr = static_cast<std::uint16_t>(bits(w, 31, 20));
      in.rs2 = 0;
      return in;  // rs1 holds the register or the 5-bit immediate
    }
    default: break;
  }
  return illegal(w);
}

inline Instr decode_posit_standard(std::uint32_t w) {
  using namespace detail;
  Instr in;
  in.flavor = Flavor::Standard;
  in.rd = static_cast<std::uint8_t>(bits(w, 11, 7));
  in.rs1 = static_cast<std::uint8_t>(bits(w, 19, 15));
  in.rs2 = static_cast<std::uint8_t>(bits(w, 24, 20));
  const std::uint32_t f3 = bits(w, 14, 12);
  const std::uint32_t op = bits(w, 6, 0);

  if (op == opcode::LOAD_FP) {
    if (f3 != 0b010) return illegal(w);
    in.op = Mnemonic::FLW;
    in.imm = imm_i(w);
    in.rs2 = 0;
    return in;
  }
  if (op == opcode::STORE_FP) {
    if (f3 != 0b010) return illegal(w);
    in.op = Mnemonic::FSW;
    in.imm = imm_s(w);
    in.rd = 0;
    return in;
  }
  if (op == opcode::MADD || op == opcode::MSUB || op == opcode::NMSUB || op == opcode::NMADD) {
    if (bits(w, 26, 25) != 0) return illegal(w);
    in.op = kFusedOps[(op - opcode::MADD) >> 2];
    in.rs3 = static_cast<std::uint8_t>(bits(w, 31, 27));
    in.rm = static_cast<std::uint8_t>(f3);
    return in;
  }
  if (op == opcode::OP_FP) {
    const auto m = fp_lookup(bits(w, 31, 25), f3, in.rs2, true);
    if (!m) return illegal(w);
    in.op = *m;
    if (has_rm_field(*m)) in.rm = static_cast<std::uint8_t>(f3);
    if (fp_slot(*m)->rs2 >= 0) in.rs2 = 0;
    if ((in.op == Mnemonic::FCVT_W_S || in.op == Mnemonic::FCVT_WU_S) && !conversion_rounding(in))
      return illegal(w);
    return in;
  }
  return illegal(w);
}

inline Instr decode_posit_custom(std::uint32_t w) {
  using namespace detail;
  Instr in;
  in.flavor = Flavor::Custom;
  in.rd = static_cast<std::uint8_t>(bits(w, 11, 7));
  in.rs1 = static_cast<std::uint8_t>(bits(w, 19, 15));
  in.rs2 = static_cast<std::uint8_t>(bits(w, 24, 20));
  const std::uint32_t x = bits(w, 14, 12);
  const std::uint32_t op = bits(w, 6, 0);

  if (op == opcode::CUSTOM3) {
    // I-type load: xd xs1 funct1 = 0 1 1 ; S-type store: funct1 xs1 xs2 = 0 1 0
    if (x == 0b011) {
      in.op = Mnemonic::FLW;
      in.imm = imm_i(w);
      in.rs2 = 0;
      return in;
    }
    if (x == 0b010) {
      in.op = Mnemonic::FSW;
      in.imm = imm_s(w);
      in.rd = 0;
      return in;
    }
    return illegal(w);
  }
  if (op == opcode::CUSTOM2) {
    if (x != 0) return illegal(w);
    in.op = kFusedOps[bits(w, 26, 25)];
    in.rs3 = static_cast<std::uint8_t>(bits(w, 31, 27));
    return in;
  }
  if (op == opcode::CUSTOM1) {
    const std::uint32_t f7 = bits(w, 31, 25);
    const auto m = fp_lookup(f7 & ~3u, f7 & 3u, in.rs2, false);
    if (!m) return illegal(w);
    if (detail::xbits_field(custom_xbits(*m)) != x) return illegal(w);
    in.op = *m;
    if (in.op == Mnemonic::FCVT_W_S || in.op == Mnemonic::FCVT_WU_S)
      in.rm = static_cast<std::uint8_t>(f7 & 3u);
    if (fp_slot(*m)->rs2 >= 0) in.rs2 = 0;
    return in;
  }
  return illegal(w);
}

/// Decodes any supported instruction word. Illegal encodings come back with
/// op == Mnemonic::Illegal and the word in raw.
inline Instr decode_instr(std::uint32_t w, const IsaOptions& opts = {}) {
  using namespace detail;
  const std::uint32_t op = bits(w, 6, 0);
  if (op == opts.fcvt_es_opcode && bits(w, 31, 25) == kFcvtEsFunct7) {
    if (bits(w, 14, 12) != 0) return illegal(w);
    Instr in;
    in.op = Mnemonic::FCVT_ES;
    in.flavor = op == opcode::OP_FP ? Flavor::Standard : Flavor::Custom;
    in.to_es = static_cast<std::uint8_t>(bits(w, 24, 20));
    in.from_es = static_cast<std::uint8_t>(bits(w, 19, 15));
    in.rd = in.rs1 = static_cast<std::uint8_t>(bits(w, 11, 7));
    auto legal = [](unsigned es) { return es == 2 || es == 3; };
    if (!legal(in.from_es) || !legal(in.to_es)) return illegal(w);
    return in;
  }
  switch (op) {
    case opcode::LOAD_FP: case opcode::STORE_FP: case opcode::MADD: case opcode::MSUB:
    case opcode::NMSUB: case opcode::NMADD: case opcode::OP_FP:
      return decode_posit_standard(w);
    case opcode::CUSTOM1: case opcode::CUSTOM2: case opcode::CUSTOM3:
      return decode_posit_custom(w);
    case opcode::CUSTOM0:
      return illegal(w);
    default:
      return decode_base(w);
  }
}

// ---------------------------------------------------------------------------
// Encoder

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_reg(unsigned r) {
  if (r > 31) throw EncodeError("register index out of range: " + std::to_string(r));
}

inline void check_imm(std::int32_t v, unsigned width, unsigned align = 1) {
  const std::int32_t lo = -(1 << (width - 1));
  const std::int32_t hi = (1 << (width - 1)) - 1;
  if (v < lo || v > hi || v % static_cast<std::int32_t>(align) != 0)
    throw EncodeError("immediate out of range: " + std::to_string(v));
}

}  // namespace detail

inline std::uint32_t encode_base(const Instr& in) {
  using namespace detail;
  using enum Mnemonic;
  const unsigned rd = in.rd;
  const unsigned rs1 = in.rs1;
  const unsigned rs2 = in.rs2;
  auto find = [](const Mnemonic* table, Mnemonic m) -> std::uint32_t {
    for (std::uint32_t i = 0; i < 8; ++i)
      if (table[i] == m) return i;
    return 8;
  };
  static constexpr Mnemonic branches[8] = {BEQ, BNE, Illegal, Illegal, BLT, BGE, BLTU, BGEU};
  static constexpr Mnemonic loads[8] = {LB, LH, LW, Illegal, LBU, LHU, Illegal, Illegal};
  static constexpr Mnemonic stores[8] = {SB, SH, SW, Illegal, Illegal, Illegal, Illegal, Illegal};
  static constexpr Mnemonic opimm[8] = {ADDI, Illegal, SLTI, SLTIU, XORI, Illegal, ORI, ANDI};
  static constexpr Mnemonic base[8] = {ADD, SLL, SLT, SLTU, XOR, SRL, OR, AND};
  static constexpr Mnemonic muldiv[8] = {MUL, MULH, MULHSU, MULHU, DIV, DIVU, REM, REMU};
  static constexpr Mnemonic csrs[8] = {Illegal, CSRRW, CSRRS, CSRRC,
                                       Illegal, CSRRWI, CSRRSI, CSRRCI};

  switch (in.op) {
    case LUI: case AUIPC:
      if ((in.imm & 0xFFF) != 0) throw EncodeError("upper immediate has low bits set");
      return (static_cast<std::uint32_t>(in.imm) & 0xFFFFF000u) | (rd << 7) |
             (in.op == LUI ? opcode::LUI : opcode::AUIPC);
    case JAL:
      check_imm(in.imm, 21, 2);
      return j_type(in.imm, rd);
    case JALR:
      check_imm(in.imm, 12);
      return i_type(in.imm, rs1, 0, rd, opcode::JALR);
    case BEQ: case BNE: case BLT: case BGE: case BLTU: case BGEU:
      check_imm(in.imm, 13, 2);
      return b_type(in.imm, rs2, rs1, find(branches, in.op));
    case LB: case LH: case LW: case LBU: case LHU:
      check_imm(in.imm, 12);
      return i_type(in.imm, rs1, find(loads, in.op), rd, opcode::LOAD);
    case SB: case SH: case SW:
      check_imm(in.imm, 12);
      return s_type(in.imm, rs2, rs1, find(stores, in.op), opcode::STORE);
    case ADDI: case SLTI: case SLTIU: case XORI: case ORI: case ANDI:
      check_imm(in.imm, 12);
      return i_type(in.imm, rs1, find(opimm, in.op), rd, opcode::OP_IMM);
    case SLLI: case SRLI: case SRAI: {
      if (in.imm < 0 || in.imm > 31) throw EncodeError("shift amount out of range");
      const std::uint32_t f7 = in.op == SRAI ? 0b0100000 : 0;
      return r_type(f7, static_cast<unsigned>(in.imm), rs1, in.op == SLLI ? 1 : 5, rd,
                    opcode::OP_IMM);
    }
    case SUB: return r_type(0b0100000, rs2, rs1, 0, rd, opcode::OP);
    case SRA: return r_type(0b0100000, rs2, rs1, 5, rd, opcode::OP);
    case ADD: case SLL: case SLT: case SLTU: case XOR: case SRL: case OR: case AND:
      return r_type(0, rs2, rs1, find(base, in.op), rd, opcode::OP);
    case MUL: case MULH: case MULHSU: case MULHU: case DIV: case DIVU: case REM: case REMU:
      return r_type(1, rs2, rs1, find(muldiv, in.op), rd, opcode::OP);
    case FENCE: return i_type(in.imm, rs1, 0, rd, opcode::MISC_MEM);
    case ECALL: return 0x00000073u;
    case EBREAK: return 0x00100073u;
    case CSRRW: case CSRRS: case CSRRC: case CSRRWI: case CSRRSI: case CSRRCI:
      if (in.csr > 0xFFF) throw EncodeError("csr address out of range");
      return (static_cast<std::uint32_t>(in.csr) << 20) | (rs1 << 15) | (find(csrs, in.op) << 12) |
             (rd << 7) | opcode::SYSTEM;
    default: break;
  }
  throw EncodeError(std::string("not a base instruction: ") + mnemonic_name(in.op));
}

inline std::uint32_t encode_instr(const Instr& in, const IsaOptions& opts = {}) {
  using namespace detail;
  using enum Mnemonic;
  check_reg(in.rd);
  check_reg(in.rs1);
  check_reg(in.rs2);
  check_reg(in.rs3);
  if (in.op == Illegal) return in.raw;
  if (!is_posit_op(in.op)) return encode_base(in);

  const bool custom = in.flavor == Flavor::Custom;
  if (in.op == FCVT_ES) {
    if ((in.from_es != 2 && in.from_es != 3) || (in.to_es != 2 && in.to_es != 3))
      throw EncodeError("fcvt.es accepts only es values 2 and 3");
    return r_type(kFcvtEsFunct7, in.to_es, in.from_es, 0, in.rd, opts.fcvt_es_opcode);
  }
  if (in.op == FLW) {
    check_imm(in.imm, 12);
    return custom ? i_type(in.imm, in.rs1, 0b011, in.rd, opcode::CUSTOM3)
                  : i_type(in.imm, in.rs1, 0b010, in.rd, opcode::LOAD_FP);
  }
  if (in.op == FSW) {
    check_imm(in.imm, 12);
    return custom ? s_type(in.imm, in.rs2, in.rs1, 0b010, opcode::CUSTOM3)
                  : s_type(in.imm, in.rs2, in.rs1, 0b010, opcode::STORE_FP);
  }
  for (unsigned i = 0; i < 4; ++i) {
    if (kFusedOps[i] != in.op) continue;
    if (custom)
      return (static_cast<std::uint32_t>(in.rs3) << 27) | (i << 25) | (in.rs2 << 20) |
             (in.rs1 << 15) | (in.rd << 7) | opcode::CUSTOM2;
    if (in.rm > 7) throw EncodeError("rm out of range");
    return (static_cast<std::uint32_t>(in.rs3) << 27) | (in.rs2 << 20) | (in.rs1 << 15) |
           (static_cast<std::uint32_t>(in.rm) << 12) | (in.rd << 7) |
           (opcode::MADD + (i << 2));
  }
  const FpSlot slot = *fp_slot(in.op);
  const unsigned rs2 = slot.rs2 >= 0 ? static_cast<unsigned>(slot.rs2) : in.rs2;
  if (custom) {
    std::uint32_t sub = slot.sub;
    if (in.op == FCVT_W_S || in.op == FCVT_WU_S) {
      if (in.rm > 1) throw EncodeError("custom conversion accepts rne or rtz only");
      sub = in.rm;
    }
    return r_type(slot.funct7 | sub, rs2, in.rs1, xbits_field(custom_xbits(in.op)), in.rd,
                  opcode::CUSTOM1);
  }
  if (in.rm > 7) throw EncodeError("rm out of range");
  const std::uint32_t f3 = has_rm_field(in.op) ? in.rm : slot.sub;
  return r_type(slot.funct7, rs2, in.rs1, f3, in.rd, opcode::OP_FP);
}

// ---------------------------------------------------------------------------
// Disassembly: "mnemonic operands # raw=0xXXXXXXXX"

inline std::string reg_name(RegFile f, unsigned r) {
  return (f == RegFile::Posit ? "p" : "x") + std::to_string(r);
}

/// Mnemonic and operands without the raw-word suffix.
inline std::string format_instr(const Instr& in) {
  using enum Mnemonic;
  std::string text = mnemonic_name(in.op);
  if (in.flavor == Flavor::Custom && in.op != FCVT_ES) text = "p." + text;
  const OperandFiles f = operand_files(in.op);
  auto x = [](unsigned r) { return "x" + std::to_string(r); };
  std::string ops;
  switch (in.op) {
    case Illegal: break;
    case LUI: case AUIPC:
      ops = x(in.rd) + ", " + std::to_string(static_cast<std::uint32_t>(in.imm) >> 12);
      break;
    case JAL: ops = x(in.rd) + ", " + std::to_string(in.imm); break;
    case JALR: case LB: case LH: case LW: case LBU: case LHU: case FLW:
      ops = reg_name(f.rd, in.rd) + ", " + std::to_string(in.imm) + "(" + x(in.rs1) + ")";
      break;
    case SB: case SH: case SW: case FSW:
      ops = reg_name(f.rs2, in.rs2) + ", " + std::to_string(in.imm) + "(" + x(in.rs1) + ")";
      break;
    case BEQ: case BNE: case BLT: case BGE: case BLTU: case BGEU:
      ops = x(in.rs1) + ", " + x(in.rs2) + ", " + std::to_string(in.imm);
      break;
    case ADDI: case SLTI: case SLTIU: case XORI: case ORI: case ANDI: case SLLI: case SRLI:
    case SRAI:
      ops = x(in.rd) + ", " + x(in.rs1) + ", " + std::to_string(in.imm);
      break;
    case FENCE: case ECALL: case EBREAK: break;
    case CSRRW: case CSRRS: case CSRRC:
      ops = x(in.rd) + ", " + std::to_string(in.csr) + ", " + x(in.rs1);
      break;
    case CSRRWI: case CSRRSI: case CSRRCI:
      ops = x(in.rd) + ", " + std::to_string(in.csr) + ", " + std::to_string(in.rs1);
      break;
    case FCVT_ES:
      ops = reg_name(RegFile::Posit, in.rd) + ", " + std::to_string(in.from_es) + ", " +
            std::to_string(in.to_es);
      break;
    default:
      ops = reg_name(f.rd, in.rd);
      if (f.rs1 != RegFile::None) ops += ", " + reg_name(f.rs1, in.rs1);
      if (f.rs2 != RegFile::None) ops += ", " + reg_name(f.rs2, in.rs2);
      if (f.rs3 != RegFile::None) ops += ", " + reg_name(f.rs3, in.rs3);
      if ((in.op == FCVT_W_S || in.op == FCVT_WU_S) && conversion_rounding(in) == rm::RTZ)
        ops += ", rtz";
      break;
  }
  if (!ops.empty()) text += " " + ops;
  return text;
}

inline std::string disassemble(std::uint32_t word, const IsaOptions& opts = {}) {
  char raw[32];
  std::snprintf(raw, sizeof raw, " # raw=0x%08X", word);
  return format_instr(decode_instr(word, opts)) + raw;
}

// ---------------------------------------------------------------------------
// pcsr: fflags in bits 4:0, rm in 7:5 (always zero), es-mode in 12:8.

namespace csr {
inline constexpr std::uint16_t FFLAGS = 0x001;
inline constexpr std::uint16_t FRM = 0x002;
inline constexpr std::uint16_t PCSR = 0x003;
inline constexpr std::uint16_t CYCLE = 0xC00;
inline constexpr std::uint16_t INSTRET = 0xC02;
inline constexpr std::uint16_t CYCLEH = 0xC80;
inline constexpr std::uint16_t INSTRETH = 0xC82;
}  // namespace csr

enum class CsrOp { Read, Write, Set, Clear };

class Pcsr {
 public:
  /// supported_es: bitmask of es values the FPU accepts (bit n set: es=n).
  explicit Pcsr(std::uint32_t supported_es = (1u << 2) | (1u << 3), unsigned initial_es = 2)
      : supported_(supported_es), es_mode_(static_cast<std::uint8_t>(initial_es)) {
    if (!accepts(initial_es)) throw std::invalid_argument("initial es-mode not supported");
  }

  std::uint32_t value() const {
    return static_cast<std::uint32_t>(fflags_) | (static_cast<std::uint32_t>(es_mode_) << 8);
  }
  std::uint8_t fflags() const { return fflags_; }
  std::uint8_t rm() const { return 0; }
  unsigned es_mode() const { return es_mode_; }
  bool accepts(unsigned es) const { return es < 32 && ((supported_ >> es) & 1u) != 0; }

  /// Hardware-side flag accrual at write-back.
  void raise(std::uint8_t flags) { fflags_ |= flags & 0x1F; }

  /// Full-register write: rm bits are dropped, an unsupported es-mode
  /// leaves the current one in place.
  void write(std::uint32_t v) {
    fflags_ = static_cast<std::uint8_t>(v & 0x1F);
    const unsigned es = (v >> 8) & 0x1F;
    if (accepts(es)) es_mode_ = static_cast<std::uint8_t>(es);
  }

  friend bool operator==(const Pcsr&, const Pcsr&) = default;

 private:
  std::uint32_t supported_;
  std::uint8_t fflags_ = 0;
  std::uint8_t es_mode_;
};

/// CSR read-modify-write on the posit CSR views. Returns the old value of
/// the addressed view, or nullopt for an address the posit unit does not
/// own.
inline std::optional<std::uint32_t> pcsr_access(Pcsr& p, std::uint16_t addr, CsrOp op,
                                                std::uint32_t value) {
  std::uint32_t view_mask = 0;
  unsigned view_shift = 0;
  switch (addr) {
    case csr::FFLAGS: view_mask = 0x1F; break;
    case csr::FRM: view_mask = 0x7; view_shift = 5; break;
    case csr::PCSR: view_mask = 0x1FFF; break;
    default: return std::nullopt;
  }
  const std::uint32_t full = p.value();
  const std::uint32_t old = (full >> view_shift) & view_mask;
  std::uint32_t next = old;
  switch (op) {
    case CsrOp::Read: return old;
    case CsrOp::Write: next = value; break;
    case CsrOp::Set: next = old | value; break;
    case CsrOp::Clear: next = old & ~value; break;
  }
  next &= view_mask;
  p.write((full & ~(view_mask << view_shift)) | (next << view_shift));
  return old;
}

}  // namespace positrv::isa
