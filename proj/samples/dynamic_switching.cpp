// Switches the datapath between es=2 and es=3 at run time through the pcsr
// and converts a register with FCVT.ES.

#include <cstdio>

#include "positrv/assembler.hpp"
#include "positrv/image.hpp"
#include "positrv/sim.hpp"

using namespace positrv;
namespace reg = isa::reg;

int main() {
  isa::ProgramBuilder b(0x1000);
  b.li(reg::t0, 0x4199999A);  // 1.2 at es=2
  b.fmv_w_x(1, reg::t0);
  b.fmul(2, 1, 1);
  b.fmv_x_w(reg::s0, 2);  // 1.44 at es=2

  b.li(reg::t1, 3 << 8);
  b.csr(isa::Mnemonic::CSRRW, 0, isa::csr::PCSR, reg::t1);
  b.fcvt_es(1, 2, 3);
  b.fmul(2, 1, 1);
  b.fmv_x_w(reg::s1, 2);  // 1.44 at es=3

  b.li(reg::t1, 2 << 8);
  b.csr(isa::Mnemonic::CSRRW, 0, isa::csr::PCSR, reg::t1);
  b.fcvt_es(2, 3, 2);
  b.fmv_x_w(reg::s2, 2);  // back to es=2
  b.csr(isa::Mnemonic::CSRRS, reg::s3, isa::csr::PCSR, reg::zero);
  b.exit(0);

  sim::SimConfig cfg;
  cfg.memory_size = 1u << 20;
  sim::Simulator s(cfg);
  const auto r = s.run(sim::words_image(b.words(), b.base()), 1000);

  const auto es2 = PositConfig::fixed(32, 2);
  const auto es3 = PositConfig::fixed(32, 3);
  std::printf("es=2 product  0x%08X = %.17g\n", r.x[reg::s0], to_double(PositWord{r.x[reg::s0]}, es2));
  std::printf("es=3 product  0x%08X = %.17g\n", r.x[reg::s1], to_double(PositWord{r.x[reg::s1]}, es3));
  std::printf("3->2 convert  0x%08X = %.17g\n", r.x[reg::s2], to_double(PositWord{r.x[reg::s2]}, es2));
  std::printf("pcsr 0x%08X, cycles %llu, status %s\n", r.x[reg::s3],
              static_cast<unsigned long long>(r.cycles), sim::status_name(r.status));
  return r.status == sim::ExitStatus::Exited ? 0 : 1;
}
