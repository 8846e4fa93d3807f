// SPDX-License-Identifier: Apache-2.0
//
// Helpers behind the positrv command-line tool.

#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "positrv/conformance.hpp"
#include "positrv/isa.hpp"
#include "positrv/oracle.hpp"
#include "positrv/sim.hpp"

namespace positrv::cli {

namespace exit_code {
inline constexpr int Usage = 2;
inline constexpr int Mismatch = 1;
inline constexpr int FuelExhausted = 124;
inline constexpr int Trapped = 125;
}  // namespace exit_code

inline std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

inline std::optional<sim::IntegrationMode> parse_mode(const std::string& s) {
  if (s == "tight") return sim::IntegrationMode::TightlyCoupled;
  if (s == "coproc") return sim::IntegrationMode::Coprocessor;
  return std::nullopt;
}

inline bool looks_hex(const std::string& s) {
  return s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
}

enum class Direction { Auto, ToPosit, ToDecimal };

inline std::optional<Direction> parse_direction(const std::string& s) {
  if (s == "auto") return Direction::Auto;
  if (s == "to-posit") return Direction::ToPosit;
  if (s == "to-decimal") return Direction::ToDecimal;
  return std::nullopt;
}

/// Value lines for one posit word.
inline std::string describe_word(PositWord w, const PositConfig& cfg) {
  const oracle::ExactRational v = oracle::exact_value(w, cfg);
  std::ostringstream out;
  out << "word: " << hex32(w.bits) << '\n';
  if (v.is_nar()) {
    out << "value: NaR\n";
    return out.str();
  }
  out << "value: " << oracle::shortest_decimal(to_double(w, cfg)) << '\n';
  out << "exact: " << oracle::exact_decimal(v) << '\n';
  out << "rational: " << v.str() << '\n';
  return out.str();
}

/// Decimal -> posit word (oracle rounding) or word -> value. Returns
/// nullopt on a parse failure.
inline std::optional<std::string> convert(const std::string& input, const PositConfig& cfg,
                                          Direction dir = Direction::Auto) {
  if (dir == Direction::Auto) dir = looks_hex(input) ? Direction::ToDecimal : Direction::ToPosit;
  std::ostringstream out;
  out << "input: " << input << '\n' << "ps: " << cfg.ps() << '\n' << "es: " << cfg.es() << '\n';
  if (dir == Direction::ToDecimal) {
    if (!looks_hex(input)) return std::nullopt;
    std::uint32_t bits;
    try {
      bits = oracle::parse_hex_word(input.substr(2));
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if ((bits & ~cfg.mask()) != 0) return std::nullopt;
    out << describe_word(PositWord{bits}, cfg);
    return out.str();
  }
  if (input == "NaR" || input == "nar") {
    out << describe_word(nar(cfg), cfg);
    return out.str();
  }
  const auto q = oracle::parse_decimal(input);
  if (!q) return std::nullopt;
  out << describe_word(oracle::round_to_posit(oracle::ExactRational(*q), cfg), cfg);
  return out.str();
}

/// Comma-separated op list; "all" expands to every op valid for cfg.
inline std::optional<std::vector<std::string>> parse_ops(const std::string& csv,
                                                         const PositConfig& cfg) {
  std::vector<std::string> ops;
  if (csv == "all") {
    for (auto& name : conformance::all_op_names(cfg.ps()))
      if (name != "fcvt_es" || cfg.es() == 2 || cfg.es() == 3) ops.push_back(name);
    return ops;
  }
  std::istringstream in(csv);
  for (std::string name; std::getline(in, name, ',');) {
    if (!conformance::find_op(name)) return std::nullopt;
    if (name == "fcvt_es" && (cfg.ps() != 32 || (cfg.es() != 2 && cfg.es() != 3)))
      return std::nullopt;
    ops.push_back(name);
  }
  if (ops.empty()) return std::nullopt;
  return ops;
}

/// The reference datapaths with one deliberate defect: add of two equal
/// operands has its lowest bit flipped. Used to show the checker catches
/// bugs.
inline std::uint32_t faulty_impl(const std::string& op, std::span<const std::uint32_t> w,
                                 const PositConfig& cfg) {
  const std::uint32_t r = conformance::reference_impl(op, w, cfg);
  if (op == "add" && w[0] == w[1]) return r ^ 1u;
  return r;
}

inline std::string format_check(const std::string& kind, const PositConfig& cfg,
                                const std::vector<std::string>& ops,
                                const conformance::CheckSummary& s) {
  std::ostringstream out;
  out << "check: " << kind << '\n' << "ps: " << cfg.ps() << '\n' << "es: " << cfg.es() << '\n';
  out << "ops:";
  for (std::size_t i = 0; i < ops.size(); ++i) out << (i ? "," : " ") << ops[i];
  out << '\n';
  for (const auto& op : ops) {
    const auto it = s.checked.find(op);
    out << op << "_checked: " << (it == s.checked.end() ? 0 : it->second) << '\n';
  }
  out << "checked: " << s.total() << '\n';
  out << "mismatches: " << s.mismatch_count << '\n';
  for (const auto& m : s.mismatches) {
    out << "mismatch: op=" << m.op << " inputs=";
    for (std::size_t i = 0; i < m.inputs.size(); ++i) out << (i ? "," : "") << hex32(m.inputs[i]);
    out << " got=" << hex32(m.got) << " expected=" << hex32(m.expected) << '\n';
  }
  out << "result: " << (s.passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

inline int run_exit_code(const sim::RunReport& r) {
  switch (r.status) {
    case sim::ExitStatus::Exited: return r.exit_code & 0xFF;
    case sim::ExitStatus::Trapped: return exit_code::Trapped;
    case sim::ExitStatus::FuelExhausted: return exit_code::FuelExhausted;
  }
  return exit_code::Trapped;
}

/// "0xADDR: 0xWORD  text" per word.
inline std::string disassemble_words(const std::vector<std::uint32_t>& words, std::uint32_t base,
                                     const isa::IsaOptions& opts = {}) {
  std::ostringstream out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto addr = base + 4 * static_cast<std::uint32_t>(i);
    out << hex32(addr) << ": " << hex32(words[i]) << "  "
        << isa::format_instr(isa::decode_instr(words[i], opts)) << '\n';
  }
  return out.str();
}

inline std::vector<std::uint32_t> words_from_bytes(const std::vector<std::uint8_t>& b) {
  std::vector<std::uint32_t> w;
  for (std::size_t i = 0; i + 4 <= b.size(); i += 4)
    w.push_back(static_cast<std::uint32_t>(b[i]) | (static_cast<std::uint32_t>(b[i + 1]) << 8) |
                (static_cast<std::uint32_t>(b[i + 2]) << 16) |
                (static_cast<std::uint32_t>(b[i + 3]) << 24));
  return w;
}

}  // namespace positrv::cli
