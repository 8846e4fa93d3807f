// Runs the one-of-each-op kernel in both integration modes and prints the
// simulator reports.

#include <iostream>

#include "positrv/kernels.hpp"
#include "positrv/sim.hpp"

using namespace positrv;

int main() {
  for (auto mode : {sim::IntegrationMode::TightlyCoupled, sim::IntegrationMode::Coprocessor}) {
    const auto flavor =
        mode == sim::IntegrationMode::Coprocessor ? isa::Flavor::Custom : isa::Flavor::Standard;
    const auto k = kernels::cycle_program(flavor);
    for (auto w : k.words()) std::cout << isa::disassemble(w) << '\n';

    sim::SimConfig cfg;
    cfg.mode = mode;
    cfg.memory_size = 1u << 20;
    sim::Simulator s(cfg);
    std::cout << sim::format_report(s.run(sim::words_image(k.words(), k.base()), 1000)) << '\n';
  }
}
