// Decimal literals as 32-bit posits: word, nearest double, exact value.

#include <cstdio>

#include "positrv/oracle.hpp"
#include "positrv/posit_value.hpp"

using namespace positrv;

int main() {
  for (double v : {1.5, 1.2, 15.996093809604645, 3.0e40, 1e-30, -0.1}) {
    for (unsigned es : {2u, 3u}) {
      const auto cfg = PositConfig::fixed(32, es);
      const PositWord w = from_double(v, cfg);
      std::printf("%-22.17g es=%u  0x%08X  %-24s %s\n", v, es, w.bits,
                  oracle::shortest_decimal(to_double(w, cfg)).c_str(),
                  oracle::exact_decimal(oracle::exact_value(w, cfg)).c_str());
    }
  }

  const posit32 a(1.2);
  const posit32 b(3.0);
  std::printf("1.2 * 3 = %.17g (0x%08X)\n", (a * b).to_double(), (a * b).bits());
  std::printf("fma(1.2, 3, -3.6) = %.17g\n", fma(a, b, posit32(-3.6)).to_double());
  std::printf("maxpos = %.17g, minpos = %.17g\n", posit32::maxpos().to_double(),
              posit32::minpos().to_double());
  std::printf("1/0 is NaR: %s\n", (posit32(1.0) / posit32(0.0)).is_nar() ? "yes" : "no");
}
