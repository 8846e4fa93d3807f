// SPDX-License-Identifier: Apache-2.0
//
// Functional RV32IM simulator with a posit FPU, either tightly coupled to
// the core or behind a RoCC-style offload boundary.

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "positrv/arith.hpp"
#include "positrv/image.hpp"
#include "positrv/isa.hpp"

namespace positrv::sim {

using isa::Instr;
using isa::Mnemonic;

/// Standard RISC-V exception cause codes raised by the simulator.
namespace cause {
inline constexpr std::uint32_t FetchMisaligned = 0;
inline constexpr std::uint32_t FetchFault = 1;
inline constexpr std::uint32_t IllegalInstruction = 2;
inline constexpr std::uint32_t Breakpoint = 3;
inline constexpr std::uint32_t LoadMisaligned = 4;
inline constexpr std::uint32_t LoadFault = 5;
inline constexpr std::uint32_t StoreMisaligned = 6;
inline constexpr std::uint32_t StoreFault = 7;
inline constexpr std::uint32_t EnvironmentCall = 8;
}  // namespace cause

inline constexpr std::uint32_t kPutcharAddr = 0x10000000u;
inline constexpr std::uint32_t kExitSyscall = 93;
inline constexpr std::size_t kDefaultMemory = std::size_t{64} << 20;

struct Trap {
  std::uint32_t cause = 0;
  std::uint32_t pc = 0;
  std::uint32_t tval = 0;
  friend bool operator==(const Trap&, const Trap&) = default;
};

// ---------------------------------------------------------------------------
// Memory

/// Flat little-endian memory starting at address 0, plus a putchar port.
class Memory {
 public:
  explicit Memory(std::size_t size = kDefaultMemory) : bytes_(size, 0) {}

  std::size_t size() const { return bytes_.size(); }
  const std::string& output() const { return output_; }

  bool in_range(std::uint32_t addr, unsigned n) const {
    return static_cast<std::uint64_t>(addr) + n <= bytes_.size();
  }

  std::optional<std::uint32_t> load(std::uint32_t addr, unsigned n) const {
    if (addr == kPutcharAddr) return 0u;
    if (!in_range(addr, n)) return std::nullopt;
    std::uint32_t v = 0;
    for (unsigned i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(bytes_[addr + i]) << (8 * i);
    return v;
  }

  bool store(std::uint32_t addr, unsigned n, std::uint32_t v) {
    if (addr == kPutcharAddr) {
      output_.push_back(static_cast<char>(v & 0xFF));
      return true;
    }
    if (!in_range(addr, n)) return false;
    for (unsigned i = 0; i < n; ++i) bytes_[addr + i] = static_cast<std::uint8_t>(v >> (8 * i));
    return true;
  }

  void write_bytes(std::uint32_t addr, const std::vector<std::uint8_t>& data) {
    if (!in_range(addr, static_cast<unsigned>(data.size())))
      throw std::out_of_range("image segment outside memory");
    std::copy(data.begin(), data.end(), bytes_.begin() + addr);
  }

  /// Host-side word accessors; throw on out-of-range addresses.
  std::uint32_t read_word(std::uint32_t addr) const {
    const auto v = load(addr, 4);
    if (!v) throw std::out_of_range("read outside memory");
    return *v;
  }
  void write_word(std::uint32_t addr, std::uint32_t v) {
    if (!in_range(addr, 4)) throw std::out_of_range("write outside memory");
    store(addr, 4, v);
  }

  friend bool operator==(const Memory&, const Memory&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::string output_;
};

// ---------------------------------------------------------------------------
// Cycle model

/// Per-mnemonic latency. Instructions without an entry cost one cycle.
class CycleModel {
 public:
  static CycleModel defaults() {
    using enum Mnemonic;
    CycleModel m;
    for (Mnemonic op : {FMADD, FMSUB, FNMSUB, FNMADD}) m.set(op, 8);
    for (Mnemonic op : {FADD, FSUB, FMUL}) m.set(op, 6);
    m.set(FDIV, 20);
    m.set(FSQRT, 32);
    for (Mnemonic op : {FCVT_W_S, FCVT_WU_S, FCVT_S_W, FCVT_S_WU}) m.set(op, 3);
    for (Mnemonic op : {FEQ, FLT, FLE, FMIN, FMAX, FSGNJ, FSGNJN, FSGNJX, FMV_X_W, FMV_W_X, FCLASS})
      m.set(op, 1);
    m.set(FCVT_ES, 4);
    return m;
  }

  void set(Mnemonic m, unsigned cycles) { latency_[m] = cycles; }
  unsigned latency(Mnemonic m) const {
    const auto it = latency_.find(m);
    return it == latency_.end() ? 1u : it->second;
  }

 private:
  std::map<Mnemonic, unsigned> latency_;
};

// ---------------------------------------------------------------------------
// Posit execution unit, shared by both integration modes

using PositRegs = std::array<std::uint32_t, 32>;

struct PositOutcome {
  bool int_write = false;
  std::uint32_t int_value = 0;
  bool posit_write = false;
  std::uint8_t posit_reg = 0;
  std::uint32_t posit_value = 0;
  bool mem_write = false;
  std::uint32_t mem_addr = 0;
  std::uint8_t flags = 0;
  std::optional<std::uint32_t> fault;  // cause code
  std::uint32_t tval = 0;
};

/// Executes one posit instruction against a posit register file. rs1v is
/// the integer operand the instruction consumes (if any). Register and
/// memory updates happen only when no fault is reported.
inline PositOutcome execute_posit(const Instr& in, PositRegs& p, std::uint32_t rs1v,
                                  unsigned es_mode, Memory& mem) {
  using enum Mnemonic;
  PositOutcome out;
  const PositConfig cfg = PositConfig::dual(es_mode);
  const PositWord a{p[in.rs1]};
  const PositWord b{p[in.rs2]};
  const PositWord c{p[in.rs3]};
  auto write_p = [&](PositWord w) {
    out.posit_write = true;
    out.posit_reg = in.rd;
    out.posit_value = w.bits;
  };
  auto write_x = [&](std::uint32_t v) {
    out.int_write = true;
    out.int_value = v;
  };

  switch (in.op) {
    case FLW: {
      const std::uint32_t addr = rs1v + static_cast<std::uint32_t>(in.imm);
      if ((addr & 3u) != 0) {
        out.fault = cause::LoadMisaligned;
        out.tval = addr;
        break;
      }
      const auto v = mem.load(addr, 4);
      if (!v) {
        out.fault = cause::LoadFault;
        out.tval = addr;
        break;
      }
      write_p({*v});
      break;
    }
    case FSW: {
      const std::uint32_t addr = rs1v + static_cast<std::uint32_t>(in.imm);
      if ((addr & 3u) != 0) {
        out.fault = cause::StoreMisaligned;
        out.tval = addr;
        break;
      }
      if (!mem.store(addr, 4, b.bits)) {
        out.fault = cause::StoreFault;
        out.tval = addr;
        break;
      }
      out.mem_write = true;
      out.mem_addr = addr;
      break;
    }
    case FMADD: write_p(fused(FusedOp::Madd, a, b, c, cfg)); break;
    case FMSUB: write_p(fused(FusedOp::Msub, a, b, c, cfg)); break;
    case FNMSUB: write_p(fused(FusedOp::Nmsub, a, b, c, cfg)); break;
    case FNMADD: write_p(fused(FusedOp::Nmadd, a, b, c, cfg)); break;
    case FADD: write_p(add(a, b, cfg)); break;
    case FSUB: write_p(sub(a, b, cfg)); break;
    case FMUL: write_p(mul(a, b, cfg)); break;
    case FDIV: {
      const OpResult r = div(a, b, cfg);
      out.flags = r.flags;
      write_p(r.word);
      break;
    }
    case FSQRT: write_p(sqrt(a, cfg)); break;
    case FSGNJ: write_p(sign_inject(a, b, SignInjection::Copy, cfg)); break;
    case FSGNJN: write_p(sign_inject(a, b, SignInjection::Negate, cfg)); break;
    case FSGNJX: write_p(sign_inject(a, b, SignInjection::Xor, cfg)); break;
    case FMIN: write_p(min(a, b, cfg)); break;
    case FMAX: write_p(max(a, b, cfg)); break;
    case FCVT_W_S:
    case FCVT_WU_S: {
      const auto r = isa::conversion_rounding(in);
      const RoundingMode mode =
          r == isa::rm::RTZ ? RoundingMode::TowardZero : RoundingMode::NearestEven;
      write_x(posit_to_int(a, in.op == FCVT_WU_S, mode, cfg));
      break;
    }
    case FMV_X_W: write_x(a.bits); break;
    case FEQ: write_x(compare(a, b, CompareKind::Eq, cfg) ? 1 : 0); break;
    case FLT: write_x(compare(a, b, CompareKind::Lt, cfg) ? 1 : 0); break;
    case FLE: write_x(compare(a, b, CompareKind::Le, cfg) ? 1 : 0); break;
    case FCLASS: write_x(classify(a, cfg)); break;
    case FCVT_S_W: write_p(int_to_posit(rs1v, false, cfg)); break;
    case FCVT_S_WU: write_p(int_to_posit(rs1v, true, cfg)); break;
    case FMV_W_X: write_p({rs1v}); break;
    case FCVT_ES: write_p(fcvt_es(a, in.from_es, in.to_es)); break;
    default: out.fault = cause::IllegalInstruction; break;
  }
  if (out.posit_write && !out.fault) p[out.posit_reg] = out.posit_value;
  return out;
}

// ---------------------------------------------------------------------------
// Coprocessor (offload) path

/// One request across the core/accelerator boundary. Integer operands are
/// present only when the word's xs1/xs2 bits ask for them.
struct OffloadTransaction {
  std::uint32_t word = 0;
  std::optional<std::uint32_t> rs1_value;
  std::optional<std::uint32_t> rs2_value;
  bool xd = false;
  unsigned es_mode = 2;
};

struct OffloadResponse {
  std::optional<std::uint32_t> fault;  // cause code; IllegalInstruction for unknown ops
  std::uint32_t tval = 0;
  std::optional<std::uint32_t> value;  // present iff xd
  std::uint8_t flags = 0;
  unsigned cycles = 0;
  PositOutcome detail;
};

/// Posit FPU behind a RoCC-style interface: private posit register file and
/// a memory port for custom loads/stores.
class Coprocessor {
 public:
  Coprocessor(Memory& mem, CycleModel cycles, isa::IsaOptions opts)
      : mem_(&mem), cycles_(std::move(cycles)), opts_(opts) {}

  PositRegs& regs() { return p_; }
  const PositRegs& regs() const { return p_; }

  OffloadResponse offload(const OffloadTransaction& txn) {
    OffloadResponse r;
    const Instr in = isa::decode_instr(txn.word, opts_);
    if (in.op == Mnemonic::Illegal || in.flavor != isa::Flavor::Custom) {
      r.fault = cause::IllegalInstruction;
      r.tval = txn.word;
      return r;
    }
    const isa::OperandFiles f = isa::operand_files(in.op);
    if ((f.rs1 == isa::RegFile::Int && !txn.rs1_value) ||
        (f.rs2 == isa::RegFile::Int && !txn.rs2_value)) {
      r.fault = cause::IllegalInstruction;
      r.tval = txn.word;
      return r;
    }
    r.detail = execute_posit(in, p_, txn.rs1_value.value_or(0),
                             txn.es_mode, *mem_);
    if (r.detail.fault) {
      r.fault = r.detail.fault;
      r.tval = r.detail.tval;
      return r;
    }
    r.flags = r.detail.flags;
    if (txn.xd) r.value = r.detail.int_write ? r.detail.int_value : 0u;
    r.cycles = cycles_.latency(in.op);
    return r;
  }

 private:
  Memory* mem_;
  CycleModel cycles_;
  isa::IsaOptions opts_;
  PositRegs p_{};
};

// ---------------------------------------------------------------------------
// Machine

enum class IntegrationMode { TightlyCoupled, Coprocessor };

inline const char* mode_name(IntegrationMode m) {
  return m == IntegrationMode::TightlyCoupled ? "tight" : "coproc";
}

struct SimConfig {
  IntegrationMode mode = IntegrationMode::TightlyCoupled;
  CycleModel cycles = CycleModel::defaults();
  isa::IsaOptions isa{};
  std::size_t memory_size = kDefaultMemory;
  std::uint32_t supported_es = (1u << 2) | (1u << 3);
  unsigned initial_es = 2;
  /// Extra cycles charged per offloaded instruction in coprocessor mode.
  unsigned offload_overhead = 0;
};

struct MachineState {
  std::array<std::uint32_t, 32> x{};
  PositRegs p{};  // used in tightly-coupled mode
  std::uint32_t pc = 0;
  isa::Pcsr pcsr;
  Memory memory;
  std::uint64_t cycles = 0;
  std::uint64_t retired = 0;

  MachineState(std::size_t mem_size, isa::Pcsr csr) : pcsr(csr), memory(mem_size) {}
};

enum class ExitStatus { Exited, Trapped, FuelExhausted };

inline const char* status_name(ExitStatus s) {
  switch (s) {
    case ExitStatus::Exited: return "exit";
    case ExitStatus::Trapped: return "trap";
    case ExitStatus::FuelExhausted: return "fuel";
  }
  return "?";
}

struct RunReport {
  ExitStatus status = ExitStatus::Exited;
  std::int32_t exit_code = 0;
  Trap trap;
  std::uint64_t retired = 0;
  std::uint64_t cycles = 0;
  std::uint32_t pc = 0;
  std::uint32_t pcsr = 0;
  std::array<std::uint32_t, 32> x{};
  PositRegs p{};
  std::string mode;
};

class Simulator {
 public:
  explicit Simulator(SimConfig cfg = {})
      : cfg_(std::move(cfg)),
        state_(cfg_.memory_size, isa::Pcsr(cfg_.supported_es, cfg_.initial_es)),
        coproc_(state_.memory, cfg_.cycles, cfg_.isa) {
    reset_registers();
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const SimConfig& config() const { return cfg_; }
  MachineState& state() { return state_; }
  const MachineState& state() const { return state_; }
  Coprocessor& coprocessor() { return coproc_; }

  /// The posit register file of whichever unit owns it in this mode.
  const PositRegs& posit_regs() const {
    return cfg_.mode == IntegrationMode::Coprocessor ? coproc_.regs() : state_.p;
  }
  PositRegs& posit_regs() {
    return cfg_.mode == IntegrationMode::Coprocessor ? coproc_.regs() : state_.p;
  }

  void set_trace(std::ostream* out) { trace_ = out; }

  void load(const Image& img) {
    for (const auto& s : img.segments) state_.memory.write_bytes(s.addr, s.bytes);
    state_.pc = img.entry;
  }

  /// Executes one instruction. Returns a stop reason when the program exits
  /// or traps; the trapping instruction does not retire.
  std::optional<ExitStatus> step() {
    MachineState& s = state_;
    const std::uint32_t pc = s.pc;
    if ((pc & 3u) != 0) return trap(cause::FetchMisaligned, pc, pc);
    const auto fetched = s.memory.load(pc, 4);
    if (!fetched || pc == kPutcharAddr) return trap(cause::FetchFault, pc, pc);
    const std::uint32_t word = *fetched;
    const Instr in = isa::decode_instr(word, cfg_.isa);

    Effects fx;
    std::uint32_t next_pc = pc + 4;
    std::optional<ExitStatus> stop;
    unsigned cycles = 1;

    if (in.op == Mnemonic::Illegal) return trap(cause::IllegalInstruction, pc, word);

    if (isa::is_posit_op(in.op)) {
      const auto r = execute_posit_instr(in, word, fx, cycles);
      if (r) return trap(r->cause, pc, r->tval);
    } else {
      const auto r = execute_base(in, pc, next_pc, fx, stop);
      if (r) return trap(r->cause, pc, r->tval);
    }

    s.x[0] = 0;
    s.pc = next_pc;
    s.cycles += cycles;
    s.retired += 1;
    if (trace_) write_trace(pc, word, in, fx);
    return stop;
  }

  /// Runs from entry until exit, trap, or fuel (retired instructions) runs
  /// out.
  RunReport run(std::uint32_t entry, std::uint64_t fuel) {
    state_.pc = entry;
    std::optional<ExitStatus> stop;
    while (!stop) {
      if (fuel == 0) {
        stop = ExitStatus::FuelExhausted;
        break;
      }
      --fuel;
      stop = step();
    }
    return report(*stop);
  }

  RunReport run(const Image& img, std::uint64_t fuel) {
    load(img);
    return run(img.entry, fuel);
  }

  RunReport report(ExitStatus status) const {
    RunReport r;
    r.status = status;
    r.exit_code = exit_code_;
    r.trap = last_trap_;
    r.retired = state_.retired;
    r.cycles = state_.cycles;
    r.pc = state_.pc;
    r.pcsr = state_.pcsr.value();
    r.x = state_.x;
    r.p = posit_regs();
    r.mode = mode_name(cfg_.mode);
    return r;
  }

  const std::string& output() const { return state_.memory.output(); }

 private:
  struct Fault {
    std::uint32_t cause;
    std::uint32_t tval;
  };

  struct Effects {
    std::optional<std::pair<std::uint8_t, std::uint32_t>> x_write;
    std::optional<std::pair<std::uint8_t, std::uint32_t>> p_write;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> mem_write;
    std::uint8_t flags = 0;
  };

  void reset_registers() {
    state_.x.fill(0);
    state_.x[isa::reg::sp] = static_cast<std::uint32_t>(cfg_.memory_size & ~std::size_t{15});
    state_.x[isa::reg::a7] = kExitSyscall;  // a bare ECALL exits 0
  }

  std::optional<ExitStatus> trap(std::uint32_t c, std::uint32_t pc, std::uint32_t tval) {
    last_trap_ = {c, pc, tval};
    if (trace_) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%llu 0x%08X trap cause=%u tval=0x%08X\n",
                    static_cast<unsigned long long>(state_.cycles), pc, c, tval);
      *trace_ << buf;
    }
    return ExitStatus::Trapped;
  }

  void set_x(std::uint8_t rd, std::uint32_t v, Effects& fx) {
    if (rd != 0) {
      state_.x[rd] = v;
      fx.x_write = {rd, v};
    }
  }

  std::optional<Fault> execute_posit_instr(const Instr& in, std::uint32_t word, Effects& fx,
                                           unsigned& cycles) {
    MachineState& s = state_;
    if (cfg_.mode == IntegrationMode::TightlyCoupled) {
      const PositOutcome o =
          execute_posit(in, s.p, s.x[in.rs1], s.pcsr.es_mode(), s.memory);
      if (o.fault) return Fault{*o.fault, o.tval};
      commit_posit(o, in.rd, fx);
      cycles = cfg_.cycles.latency(in.op);
      return std::nullopt;
    }

    // Coprocessor mode: only custom-space words leave the core.
    if (in.flavor != isa::Flavor::Custom) return Fault{cause::IllegalInstruction, word};
    OffloadTransaction txn;
    txn.word = word;
    const bool xd = ((word >> 14) & 1u) != 0;
    const bool xs1 = ((word >> 13) & 1u) != 0;
    const bool xs2 = ((word >> 12) & 1u) != 0;
    const auto rs1 = static_cast<std::uint8_t>((word >> 15) & 31u);
    const auto rs2 = static_cast<std::uint8_t>((word >> 20) & 31u);
    if (xs1) txn.rs1_value = s.x[rs1];
    if (xs2) txn.rs2_value = s.x[rs2];
    txn.xd = xd;
    txn.es_mode = s.pcsr.es_mode();
    const OffloadResponse r = coproc_.offload(txn);
    if (r.fault) return Fault{*r.fault, r.tval};
    PositOutcome o = r.detail;
    o.int_write = xd && r.value.has_value();
    if (o.int_write) o.int_value = *r.value;
    commit_posit(o, in.rd, fx);
    cycles = r.cycles + cfg_.offload_overhead;
    return std::nullopt;
  }

  void commit_posit(const PositOutcome& o, std::uint8_t rd, Effects& fx) {
    if (o.int_write) set_x(rd, o.int_value, fx);
    if (o.posit_write) fx.p_write = {o.posit_reg, o.posit_value};
    if (o.mem_write) fx.mem_write = {o.mem_addr, state_.memory.load(o.mem_addr, 4).value_or(0)};
    if (o.flags) {
      state_.pcsr.raise(o.flags);
      fx.flags = o.flags;
    }
  }

  std::optional<Fault> load_value(std::uint32_t addr, unsigned n, bool sign, std::uint32_t& out) {
    if ((addr & (n - 1)) != 0) return Fault{cause::LoadMisaligned, addr};
    const auto v = state_.memory.load(addr, n);
    if (!v) return Fault{cause::LoadFault, addr};
    out = *v;
    if (sign && n < 4) {
      const unsigned shift = 32 - 8 * n;
      out = static_cast<std::uint32_t>(static_cast<std::int32_t>(out << shift) >> shift);
    }
    return std::nullopt;
  }

  std::optional<Fault> store_value(std::uint32_t addr, unsigned n, std::uint32_t v, Effects& fx) {
    if ((addr & (n - 1)) != 0) return Fault{cause::StoreMisaligned, addr};
    const std::uint32_t mask = n == 4 ? 0xFFFFFFFFu : ((1u << (8 * n)) - 1);
    if (!state_.memory.store(addr, n, v)) return Fault{cause::StoreFault, addr};
    fx.mem_write = {addr, v & mask};
    return std::nullopt;
  }

  std::optional<Fault> csr_op(const Instr& in, Effects& fx) {
    using enum Mnemonic;
    MachineState& s = state_;
    const bool imm_form = in.op == CSRRWI || in.op == CSRRSI || in.op == CSRRCI;
    const std::uint32_t src = imm_form ? in.rs1 : s.x[in.rs1];
    isa::CsrOp op = isa::CsrOp::Write;
    if (in.op == CSRRS || in.op == CSRRSI) op = isa::CsrOp::Set;
    if (in.op == CSRRC || in.op == CSRRCI) op = isa::CsrOp::Clear;
    const bool writes = op == isa::CsrOp::Write || in.rs1 != 0;
    if (!writes) op = isa::CsrOp::Read;

    switch (in.csr) {
      case isa::csr::CYCLE: case isa::csr::CYCLEH: case isa::csr::INSTRET:
      case isa::csr::INSTRETH: {
        if (writes) return Fault{cause::IllegalInstruction, encode_instr(in, cfg_.isa)};
        const std::uint64_t v =
            (in.csr == isa::csr::CYCLE || in.csr == isa::csr::CYCLEH) ? s.cycles : s.retired;
        const bool high = in.csr == isa::csr::CYCLEH || in.csr == isa::csr::INSTRETH;
        set_x(in.rd, static_cast<std::uint32_t>(high ? v >> 32 : v), fx);
        return std::nullopt;
      }
      default: break;
    }
    const auto old = isa::pcsr_access(s.pcsr, in.csr, op, src);
    if (!old) return Fault{cause::IllegalInstruction, encode_instr(in, cfg_.isa)};
    set_x(in.rd, *old, fx);
    return std::nullopt;
  }

  std::optional<Fault> execute_base(const Instr& in, std::uint32_t pc, std::uint32_t& next_pc,
                                    Effects& fx, std::optional<ExitStatus>& stop) {
    using enum Mnemonic;
    MachineState& s = state_;
    const std::uint32_t a = s.x[in.rs1];
    const std::uint32_t b = s.x[in.rs2];
    const auto sa = static_cast<std::int32_t>(a);
    const auto sb = static_cast<std::int32_t>(b);
    const auto imm = static_cast<std::uint32_t>(in.imm);
    auto jump = [&](std::uint32_t target) -> std::optional<Fault> {
      if ((target & 3u) != 0) return Fault{cause::FetchMisaligned, target};
      next_pc = target;
      return std::nullopt;
    };
    auto branch = [&](bool taken) -> std::optional<Fault> {
      if (taken) return jump(pc + imm);
      return std::nullopt;
    };
    std::uint32_t v = 0;

    switch (in.op) {
      case LUI: set_x(in.rd, imm, fx); break;
      case AUIPC: set_x(in.rd, pc + imm, fx); break;
      case JAL: {
        if (auto f = jump(pc + imm)) return f;
        set_x(in.rd, pc + 4, fx);
        break;
      }
      case JALR: {
        if (auto f = jump((a + imm) & ~1u)) return f;
        set_x(in.rd, pc + 4, fx);
        break;
      }
      case BEQ: return branch(a == b);
      case BNE: return branch(a != b);
      case BLT: return branch(sa < sb);
      case BGE: return branch(sa >= sb);
      case BLTU: return branch(a < b);
      case BGEU: return branch(a >= b);
      case LB: case LH: case LW: case LBU: case LHU: {
        const unsigned n = (in.op == LB || in.op == LBU) ? 1 : (in.op == LW ? 4 : 2);
        if (auto f = load_value(a + imm, n, in.op == LB || in.op == LH, v)) return f;
        set_x(in.rd, v, fx);
        break;
      }
      case SB: return store_value(a + imm, 1, b, fx);
      case SH: return store_value(a + imm, 2, b, fx);
      case SW: return store_value(a + imm, 4, b, fx);
      case ADDI: set_x(in.rd, a + imm, fx); break;
      case SLTI: set_x(in.rd, sa < in.imm ? 1 : 0, fx); break;
      case SLTIU: set_x(in.rd, a < imm ? 1 : 0, fx); break;
      case XORI: set_x(in.rd, a ^ imm, fx); break;
      case ORI: set_x(in.rd, a | imm, fx); break;
      case ANDI: set_x(in.rd, a & imm, fx); break;
      case SLLI: set_x(in.rd, a << (imm & 31), fx); break;
      case SRLI: set_x(in.rd, a >> (imm & 31), fx); break;
      case SRAI: set_x(in.rd, static_cast<std::uint32_t>(sa >> (imm & 31)), fx); break;
      case ADD: set_x(in.rd, a + b, fx); break;
      case SUB: set_x(in.rd, a - b, fx); break;
      case SLL: set_x(in.rd, a << (b & 31), fx); break;
      case SLT: set_x(in.rd, sa < sb ? 1 : 0, fx); break;
      case SLTU: set_x(in.rd, a < b ? 1 : 0, fx); break;
      case XOR: set_x(in.rd, a ^ b, fx); break;
      case SRL: set_x(in.rd, a >> (b & 31), fx); break;
      case SRA: set_x(in.rd, static_cast<std::uint32_t>(sa >> (b & 31)), fx); break;
      case OR: set_x(in.rd, a | b, fx); break;
      case AND: set_x(in.rd, a & b, fx); break;
      case MUL: set_x(in.rd, a * b, fx); break;
      case MULH:
        set_x(in.rd, static_cast<std::uint32_t>((static_cast<std::int64_t>(sa) * sb) >> 32), fx);
        break;
      case MULHSU:
        set_x(in.rd,
              static_cast<std::uint32_t>((static_cast<std::int64_t>(sa) *
                                          static_cast<std::int64_t>(b)) >> 32),
              fx);
        break;
      case MULHU:
        set_x(in.rd, static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32), fx);
        break;
      case DIV:
        if (b == 0) v = 0xFFFFFFFFu;
        else if (sa == INT32_MIN && sb == -1) v = a;
        else v = static_cast<std::uint32_t>(sa / sb);
        set_x(in.rd, v, fx);
        break;
      case DIVU: set_x(in.rd, b == 0 ? 0xFFFFFFFFu : a / b, fx); break;
      case REM:
        if (b == 0) v = a;
        else if (sa == INT32_MIN && sb == -1) v = 0;
        else v = static_cast<std::uint32_t>(sa % sb);
        set_x(in.rd, v, fx);
        break;
      case REMU: set_x(in.rd, b == 0 ? a : a % b, fx); break;
      case FENCE: break;
      case ECALL:
        if (s.x[isa::reg::a7] != kExitSyscall) return Fault{cause::EnvironmentCall, 0};
        exit_code_ = static_cast<std::int32_t>(s.x[isa::reg::a0]);
        stop = ExitStatus::Exited;
        break;
      case EBREAK: return Fault{cause::Breakpoint, pc};
      case CSRRW: case CSRRS: case CSRRC: case CSRRWI: case CSRRSI: case CSRRCI:
        return csr_op(in, fx);
      default: return Fault{cause::IllegalInstruction, 0};
    }
    return std::nullopt;
  }

  void write_trace(std::uint32_t pc, std::uint32_t word, const Instr& in, const Effects& fx) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%llu 0x%08X 0x%08X ",
                  static_cast<unsigned long long>(state_.cycles), pc, word);
    std::string line = buf;
    line += isa::format_instr(in);
    std::string writes;
    auto add = [&](const char* fmt, unsigned k, std::uint32_t v) {
      char w[48];
      std::snprintf(w, sizeof w, fmt, k, v);
      if (!writes.empty()) writes += ' ';
      writes += w;
    };
    if (fx.x_write) add("x%u=0x%08X", fx.x_write->first, fx.x_write->second);
    if (fx.p_write) add("p%u=0x%08X", fx.p_write->first, fx.p_write->second);
    if (fx.mem_write) {
      char w[48];
      std::snprintf(w, sizeof w, "mem[0x%08X]=0x%08X", fx.mem_write->first, fx.mem_write->second);
      if (!writes.empty()) writes += ' ';
      writes += w;
    }
    if (fx.flags) {
      char w[24];
      std::snprintf(w, sizeof w, "fflags|=0x%02X", fx.flags);
      if (!writes.empty()) writes += ' ';
      writes += w;
    }
    line += " | " + (writes.empty() ? std::string("-") : writes);
    *trace_ << line << '\n';
  }

  SimConfig cfg_;
  MachineState state_;
  Coprocessor coproc_;
  std::ostream* trace_ = nullptr;
  Trap last_trap_;
  std::int32_t exit_code_ = 0;
};

// ---------------------------------------------------------------------------
// Report text: "key: value" lines in a fixed order.

inline std::string format_report(const RunReport& r) {
  std::ostringstream out;
  char buf[64];
  auto hex = [&](std::uint32_t v) {
    std::snprintf(buf, sizeof buf, "0x%08X", v);
    return std::string(buf);
  };
  out << "status: " << status_name(r.status) << '\n';
  out << "mode: " << r.mode << '\n';
  out << "exit_code: " << r.exit_code << '\n';
  out << "trap_cause: " << (r.status == ExitStatus::Trapped ? std::to_string(r.trap.cause) : "-")
      << '\n';
  out << "trap_pc: " << (r.status == ExitStatus::Trapped ? hex(r.trap.pc) : "-") << '\n';
  out << "trap_tval: " << (r.status == ExitStatus::Trapped ? hex(r.trap.tval) : "-") << '\n';
  out << "retired: " << r.retired << '\n';
  out << "cycles: " << r.cycles << '\n';
  out << "pc: " << hex(r.pc) << '\n';
  out << "pcsr: " << hex(r.pcsr) << '\n';
  out << "fflags: " << hex(r.pcsr & 0x1F) << '\n';
  out << "es_mode: " << ((r.pcsr >> 8) & 0x1F) << '\n';
  for (unsigned i = 0; i < 32; ++i) out << 'x' << i << ": " << hex(r.x[i]) << '\n';
  for (unsigned i = 0; i < 32; ++i) out << 'p' << i << ": " << hex(r.p[i]) << '\n';
  return out.str();
}

/// Parses "key: value" lines back into an ordered list of pairs.
inline std::vector<std::pair<std::string, std::string>> parse_report(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    kv.emplace_back(line.substr(0, colon), line.substr(colon + 2));
  }
  return kv;
}

}  // namespace positrv::sim
