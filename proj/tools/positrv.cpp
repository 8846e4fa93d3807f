// SPDX-License-Identifier: Apache-2.0
//
// positrv: posit conversion, conformance checks, the RV32 simulator and the
// accuracy benchmarks.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "positrv/bench.hpp"
#include "positrv/cli.hpp"
#include "positrv/image.hpp"

using namespace positrv;

namespace {

struct Globals {
  unsigned ps = 32;
  unsigned es = 2;
  std::string mode = "tight";
  std::uint64_t seed = 1;
  std::uint64_t count = 100000;
  bool trace = false;
  std::string out;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int usage(const std::string& msg) {
  std::cerr << "positrv: " << msg << '\n';
  return cli::exit_code::Usage;
}

std::uint32_t parse_address(const std::string& s) {
  return static_cast<std::uint32_t>(std::stoul(s, nullptr, 0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posit arithmetic, RV32 posit simulator and benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--ps", g.ps, "posit size (8, 16, 32)");
  app.add_option("--es", g.es, "exponent size");
  app.add_option("--mode", g.mode, "integration mode: tight or coproc");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--count", g.count, "random samples per op");
  app.add_flag("--trace", g.trace, "trace retired instructions to stderr");
  app.add_option("--out", g.out, "write the report to a file");

  auto* convert = app.add_subcommand("convert", "decimal <-> posit word");
  std::string value;
  std::string direction = "auto";
  convert->add_option("value", value, "decimal literal or 0x word")->required();
  convert->add_option("--direction", direction, "auto, to-posit or to-decimal");

  auto* check = app.add_subcommand("check", "compare posit-arith against the exact oracle");
  std::string check_kind = "fuzz";
  std::string ops_csv = "all";
  std::string batch;
  std::size_t ternary_samples = 4096;
  bool inject_fault = false;
  check->add_option("kind", check_kind, "exhaustive or fuzz");
  check->add_option("--ops", ops_csv, "comma-separated ops or all");
  check->add_option("--ternary-samples", ternary_samples, "random triples for FMA in exhaustive");
  check->add_option("--batch", batch, "evaluate oracle test vectors from a file (- for stdin)");
  check->add_flag("--inject-fault", inject_fault, "check a deliberately broken adder");

  auto* run = app.add_subcommand("run", "run a program image on the simulator");
  std::string image_path;
  std::string base = "0x1000";
  std::string entry;
  std::uint64_t fuel = 100'000'000;
  run->add_option("image", image_path, "ELF32 or flat binary")->required();
  run->add_option("--base", base, "load address of a flat binary");
  run->add_option("--entry", entry, "entry address (default: ELF entry or base)");
  run->add_option("--fuel", fuel, "maximum retired instructions");

  auto* bench = app.add_subcommand("bench", "accuracy benchmarks");
  std::string which = "all";
  bench->add_option("which", which, "sin, cos, exp, fft or all");

  auto* disasm = app.add_subcommand("disasm", "disassemble words or a flat binary");
  std::vector<std::string> words;
  std::string disasm_file;
  disasm->add_option("words", words, "hex instruction words");
  disasm->add_option("--file", disasm_file, "flat binary to disassemble");
  disasm->add_option("--base", base, "address of the first word");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto mode = cli::parse_mode(g.mode);
    if (!mode) return usage("unknown mode: " + g.mode);

    if (*convert) {
      const auto dir = cli::parse_direction(direction);
      if (!dir) return usage("unknown direction: " + direction);
      const auto text = cli::convert(value, PositConfig::fixed(g.ps, g.es), *dir);
      if (!text) return usage("cannot parse value: " + value);
      emit(*text, g.out);
      return 0;
    }

    if (*check) {
      if (!batch.empty()) {
        if (batch == "-") {
          oracle::run_batch(std::cin, std::cout, g.ps);
        } else {
          std::ifstream in(batch);
          if (!in) return usage("cannot open " + batch);
          std::ostringstream out;
          oracle::run_batch(in, out, g.ps);
          emit(out.str(), g.out);
        }
        return 0;
      }
      const PositConfig cfg = PositConfig::fixed(g.ps, g.es);
      const auto ops = cli::parse_ops(ops_csv, cfg);
      if (!ops) return usage("bad op list: " + ops_csv);
      conformance::Checker checker(
          cfg, inject_fault ? conformance::Implementation(cli::faulty_impl)
                            : conformance::Implementation(conformance::reference_impl));
      checker.special_corpus(*ops);
      if (check_kind == "exhaustive") {
        if (g.ps > 16) return usage("exhaustive checks need ps <= 16");
        checker.exhaustive(*ops, ternary_samples, g.seed);
      } else if (check_kind == "fuzz") {
        checker.fuzz(*ops, g.count, g.seed);
      } else {
        return usage("unknown check kind: " + check_kind);
      }
      emit(cli::format_check(check_kind, cfg, *ops, checker.summary()), g.out);
      return checker.summary().passed() ? 0 : cli::exit_code::Mismatch;
    }

    if (*run) {
      const auto bytes = sim::read_file(image_path);
      sim::Image img = sim::is_elf(bytes)
                           ? sim::elf_image(bytes)
                           : sim::flat_image(bytes, parse_address(base), parse_address(base));
      if (!entry.empty()) img.entry = parse_address(entry);
      sim::SimConfig cfg;
      cfg.mode = *mode;
      sim::Simulator s(cfg);
      if (g.trace) s.set_trace(&std::cerr);
      const sim::RunReport r = s.run(img, fuel);
      std::cout << s.output();
      emit(sim::format_report(r), g.out);
      if (r.status == sim::ExitStatus::Trapped)
        std::cerr << "positrv: trap cause " << r.trap.cause << " at " << cli::hex32(r.trap.pc)
                  << '\n';
      else if (r.status == sim::ExitStatus::FuelExhausted)
        std::cerr << "positrv: fuel exhausted\n";
      return cli::run_exit_code(r);
    }

    if (*bench) {
      emit(bench::run_bench(which, *mode).format(), g.out);
      return 0;
    }

    if (*disasm) {
      std::vector<std::uint32_t> w;
      if (!disasm_file.empty()) w = cli::words_from_bytes(sim::read_file(disasm_file));
      for (const auto& s : words) {
        const std::string digits = cli::looks_hex(s) ? s.substr(2) : s;
        w.push_back(oracle::parse_hex_word(digits));
      }
      if (w.empty()) return usage("nothing to disassemble");
      emit(cli::disassemble_words(w, parse_address(base)), g.out);
      return 0;
    }
  } catch (const std::exception& e) {
    return usage(e.what());
  }
  return 0;
}
