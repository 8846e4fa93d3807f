// SPDX-License-Identifier: Apache-2.0
//
// Accuracy benchmarks: sin/cos/exp power series and a 128-point FFT,
// evaluated in posit (es=2) on the simulator, in binary32 and in binary64
// on the host. Errors are percentages relative to the binary64 result.

#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "positrv/assembler.hpp"
#include "positrv/posit_value.hpp"
#include "positrv/sim.hpp"

namespace positrv::bench {

using isa::Mnemonic;
using isa::ProgramBuilder;
namespace reg = isa::reg;

inline constexpr std::uint32_t kCodeBase = 0x00001000u;
inline constexpr std::uint32_t kDataBase = 0x00100000u;
inline constexpr std::uint64_t kFuel = 50'000'000;

inline constexpr int kTrigTerms = 10;
inline constexpr int kExpTerms = 20;
inline constexpr int kFftSize = 128;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

// ---------------------------------------------------------------------------
// Statistics

struct ErrorStats {
  double mean = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t samples = 0;
};

/// Mean and 95% Student-t confidence interval of the mean.
inline ErrorStats summarize(const std::vector<double>& e) {
  ErrorStats s;
  s.samples = e.size();
  if (e.empty()) return s;
  double sum = 0;
  for (double v : e) sum += v;
  s.mean = sum / static_cast<double>(e.size());
  if (e.size() < 2) {
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0;
  for (double v : e) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(e.size() - 1));
  const boost::math::students_t dist(static_cast<double>(e.size() - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double half = t * sd / std::sqrt(static_cast<double>(e.size()));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

inline double percent_error(double approx, double reference) {
  return std::fabs(approx - reference) / std::fabs(reference) * 100.0;
}

struct Row {
  std::string name;
  ErrorStats posit;
  ErrorStats binary32;
  std::size_t excluded = 0;

  double ratio() const { return posit.mean > 0 ? binary32.mean / posit.mean : INFINITY; }
};

struct BenchReport {
  std::vector<Row> rows;
  std::uint64_t sim_cycles = 0;
  std::uint64_t sim_retired = 0;

  const Row* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }

  /// "key: value" lines, rows in order, keys prefixed by the row name.
  std::string format() const {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.6e", v);
      return std::string(buf);
    };
    for (const auto& r : rows) {
      out << r.name << "_samples: " << r.posit.samples << '\n';
      out << r.name << "_excluded: " << r.excluded << '\n';
      out << r.name << "_posit_mean: " << num(r.posit.mean) << '\n';
      out << r.name << "_posit_ci_low: " << num(r.posit.ci_low) << '\n';
      out << r.name << "_posit_ci_high: " << num(r.posit.ci_high) << '\n';
      out << r.name << "_binary32_mean: " << num(r.binary32.mean) << '\n';
      out << r.name << "_binary32_ci_low: " << num(r.binary32.ci_low) << '\n';
      out << r.name << "_binary32_ci_high: " << num(r.binary32.ci_high) << '\n';
      out << r.name << "_ratio: " << num(r.ratio()) << '\n';
    }
    out << "sim_retired: " << sim_retired << '\n';
    out << "sim_cycles: " << sim_cycles << '\n';
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Host arithmetic in a generic precision

template <class T>
T from_int(int v) {
  if constexpr (std::is_floating_point_v<T>)
    return static_cast<T>(v);
  else
    return T::from_int(v);
}

template <class T>
T from_double(double v) {
  if constexpr (std::is_floating_point_v<T>)
    return static_cast<T>(v);
  else
    return T(v);
}

template <class T>
double to_double(T v) {
  return static_cast<double>(v);
}

template <class T>
T root(T v) {
  using std::sqrt;
  return sqrt(v);
}

// ---------------------------------------------------------------------------
// Trigonometric and exponential series

enum class Trig { Sin, Cos };

/// Integer-degree argument reduction into [-90, 90].
struct Reduced {
  int degrees = 0;
  bool negate = false;
  bool exact_zero = false;  // the true function value is 0
};

inline Reduced reduce(int d, Trig f) {
  d = ((d % 360) + 360) % 360;
  Reduced r;
  if (f == Trig::Sin) {
    if (d <= 90) r.degrees = d;
    else if (d <= 270) r.degrees = 180 - d;
    else r.degrees = d - 360;
    r.exact_zero = d % 180 == 0;
  } else {
    if (d <= 90) r.degrees = d;
    else if (d <= 270) {
      r.degrees = 180 - d;
      r.negate = true;
    } else {
      r.degrees = d - 360;
    }
    r.exact_zero = d % 180 == 90;
  }
  return r;
}

/// Taylor series with the term recurrence t <- -t * x^2 / den, kTrigTerms
/// terms in total.
template <class T>
T trig_series(int degrees, Trig f) {
  const Reduced r = reduce(degrees, f);
  const T x = from_int<T>(r.degrees) * from_double<T>(kDegToRad);
  const T x2 = x * x;
  T term = f == Trig::Sin ? x : from_int<T>(1);
  T sum = term;
  for (int n = 1; n < kTrigTerms; ++n) {
    const int den = f == Trig::Sin ? (2 * n) * (2 * n + 1) : (2 * n - 1) * (2 * n);
    term = term * x2;
    term = term / from_int<T>(den);
    term = -term;
    sum = sum + term;
  }
  return r.negate ? -sum : sum;
}

/// e^x for integer x, unreduced, kExpTerms terms.
template <class T>
T exp_series(int xi) {
  const T x = from_int<T>(xi);
  T term = from_int<T>(1);
  T sum = term;
  for (int k = 1; k < kExpTerms; ++k) {
    term = term * x;
    term = term / from_int<T>(k);
    sum = sum + term;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// FFT

inline unsigned bit_reverse(unsigned v, unsigned bits) {
  unsigned r = 0;
  for (unsigned i = 0; i < bits; ++i) r |= ((v >> i) & 1u) << (bits - 1 - i);
  return r;
}

template <class T>
struct FftData {
  std::vector<T> re, im, wr, wi;
};

/// Input cos(n) + i sin(n) for n = 0..N-1 (radians) in bit-reversed order,
/// and twiddles e^{-2 pi i k / N}, all rounded from binary64.
template <class T>
FftData<T> fft_inputs() {
  FftData<T> d;
  d.re.resize(kFftSize);
  d.im.resize(kFftSize);
  for (int n = 0; n < kFftSize; ++n) {
    const unsigned at = bit_reverse(static_cast<unsigned>(n), 7);
    d.re[at] = from_double<T>(std::cos(static_cast<double>(n)));
    d.im[at] = from_double<T>(std::sin(static_cast<double>(n)));
  }
  for (int k = 0; k < kFftSize / 2; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kFftSize;
    d.wr.push_back(from_double<T>(std::cos(a)));
    d.wi.push_back(from_double<T>(-std::sin(a)));
  }
  return d;
}

/// Iterative radix-2 decimation-in-time FFT on bit-reversed input.
template <class T>
void fft_in_place(FftData<T>& d) {
  const int n = kFftSize;
  int step = n / 2;
  for (int len = 2; len <= n; len <<= 1, step >>= 1) {
    const int half = len / 2;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < half; ++j) {
        const int top = i + j;
        const int bot = top + half;
        const T wr = d.wr[j * step];
        const T wi = d.wi[j * step];
        const T br = d.re[bot];
        const T bi = d.im[bot];
        T p = br * wr;
        T q = bi * wi;
        const T vr = p - q;
        p = br * wi;
        q = bi * wr;
        const T vi = p + q;
        const T ur = d.re[top];
        const T ui = d.im[top];
        d.re[top] = ur + vr;
        d.im[top] = ui + vi;
        d.re[bot] = ur - vr;
        d.im[bot] = ui - vi;
      }
    }
  }
}

template <class T>
std::vector<T> magnitudes(const FftData<T>& d) {
  std::vector<T> m;
  for (int k = 0; k < kFftSize; ++k) {
    const T a = d.re[k] * d.re[k];
    const T b = d.im[k] * d.im[k];
    m.push_back(root(a + b));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Simulator kernels

namespace layout {
inline constexpr std::uint32_t kConsts = kDataBase;           // deg->rad, one
inline constexpr std::uint32_t kInput = kDataBase + 0x1000;   // kernel inputs
inline constexpr std::uint32_t kOutput = kDataBase + 0x4000;  // kernel outputs
inline constexpr std::uint32_t kFftRe = kDataBase + 0x8000;
inline constexpr std::uint32_t kFftIm = kFftRe + 4 * kFftSize;
inline constexpr std::uint32_t kFftWr = kFftIm + 4 * kFftSize;
inline constexpr std::uint32_t kFftWi = kFftWr + 2 * kFftSize;
inline constexpr std::uint32_t kFftMag = kFftWi + 2 * kFftSize;
}  // namespace layout

inline isa::Flavor flavor_for(sim::IntegrationMode mode) {
  return mode == sim::IntegrationMode::Coprocessor ? isa::Flavor::Custom : isa::Flavor::Standard;
}

/// Input record per sample: int32 reduced degrees, int32 negate flag.
inline ProgramBuilder trig_kernel(Trig f, int count, isa::Flavor flavor) {
  ProgramBuilder b(kCodeBase, flavor);
  b.li(reg::s0, static_cast<std::int32_t>(layout::kInput));
  b.li(reg::s1, static_cast<std::int32_t>(layout::kOutput));
  b.li(reg::s2, count);
  b.li(reg::s3, static_cast<std::int32_t>(layout::kConsts));
  b.flw(10, 0, reg::s3);  // p10 = deg->rad
  b.flw(11, 4, reg::s3);  // p11 = 1
  b.label("loop");
  b.lw(reg::t0, 0, reg::s0);
  b.lw(reg::t1, 4, reg::s0);
  b.fcvt_s_w(1, reg::t0);
  b.fmul(1, 1, 10);  // x
  b.fmul(2, 1, 1);   // x^2
  if (f == Trig::Sin) {
    b.fp(Mnemonic::FSGNJ, 3, 1, 1);
  } else {
    b.fp(Mnemonic::FSGNJ, 3, 11, 11);
  }
  b.fp(Mnemonic::FSGNJ, 4, 3, 3);  // sum = term
  for (int n = 1; n < kTrigTerms; ++n) {
    const int den = f == Trig::Sin ? (2 * n) * (2 * n + 1) : (2 * n - 1) * (2 * n);
    b.li(reg::t2, den);
    b.fcvt_s_w(5, reg::t2);
    b.fmul(3, 3, 2);
    b.fdiv(3, 3, 5);
    b.fsgnjn(3, 3, 3);
    b.fadd(4, 4, 3);
  }
  b.beq(reg::t1, reg::zero, "store");
  b.fsgnjn(4, 4, 4);
  b.label("store");
  b.fsw(4, 0, reg::s1);
  b.addi(reg::s0, reg::s0, 8);
  b.addi(reg::s1, reg::s1, 4);
  b.addi(reg::s2, reg::s2, -1);
  b.bne(reg::s2, reg::zero, "loop");
  b.exit(0);
  return b;
}

/// Input record per sample: int32 x.
inline ProgramBuilder exp_kernel(int count, isa::Flavor flavor) {
  ProgramBuilder b(kCodeBase, flavor);
  b.li(reg::s0, static_cast<std::int32_t>(layout::kInput));
  b.li(reg::s1, static_cast<std::int32_t>(layout::kOutput));
  b.li(reg::s2, count);
  b.li(reg::s3, static_cast<std::int32_t>(layout::kConsts));
  b.flw(11, 4, reg::s3);  // p11 = 1
  b.label("loop");
  b.lw(reg::t0, 0, reg::s0);
  b.fcvt_s_w(1, reg::t0);             // x
  b.fp(Mnemonic::FSGNJ, 3, 11, 11);   // term = 1
  b.fp(Mnemonic::FSGNJ, 4, 11, 11);   // sum = 1
  for (int k = 1; k < kExpTerms; ++k) {
    b.li(reg::t2, k);
    b.fcvt_s_w(5, reg::t2);
    b.fmul(3, 3, 1);
    b.fdiv(3, 3, 5);
    b.fadd(4, 4, 3);
  }
  b.fsw(4, 0, reg::s1);
  b.addi(reg::s0, reg::s0, 4);
  b.addi(reg::s1, reg::s1, 4);
  b.addi(reg::s2, reg::s2, -1);
  b.bne(reg::s2, reg::zero, "loop");
  b.exit(0);
  return b;
}

/// In-place radix-2 FFT over the arrays at layout::kFft*, then magnitudes.
inline ProgramBuilder fft_kernel(isa::Flavor flavor) {
  using namespace reg;
  ProgramBuilder b(kCodeBase, flavor);
  b.li(s0, static_cast<std::int32_t>(layout::kFftRe));
  b.li(s1, static_cast<std::int32_t>(layout::kFftIm));
  b.li(s2, static_cast<std::int32_t>(layout::kFftWr));
  b.li(s3, static_cast<std::int32_t>(layout::kFftWi));
  b.li(s4, 2);               // len
  b.li(s5, kFftSize);        // n
  b.li(s7, kFftSize / 2);    // twiddle stride
  b.label("stage");
  b.srli(s6, s4, 1);         // half
  b.li(s8, 0);               // i
  b.label("group");
  b.li(s9, 0);               // j
  b.label("bfly");
  b.add(t0, s8, s9);
  b.slli(t0, t0, 2);
  b.slli(t1, s6, 2);
  b.add(t1, t0, t1);
  b.mul(t2, s9, s7);
  b.slli(t2, t2, 2);
  b.add(t3, s0, t0);
  b.add(t4, s1, t0);
  b.add(t5, s0, t1);
  b.add(t6, s1, t1);
  b.add(a0, s2, t2);
  b.add(a1, s3, t2);
  b.flw(5, 0, a0);   // wr
  b.flw(6, 0, a1);   // wi
  b.flw(3, 0, t5);   // br
  b.flw(4, 0, t6);   // bi
  b.fmul(7, 3, 5);
  b.fmul(8, 4, 6);
  b.fsub(9, 7, 8);   // vr
  b.fmul(7, 3, 6);
  b.fmul(8, 4, 5);
  b.fadd(10, 7, 8);  // vi
  b.flw(1, 0, t3);   // ur
  b.flw(2, 0, t4);   // ui
  b.fadd(11, 1, 9);
  b.fsw(11, 0, t3);
  b.fadd(11, 2, 10);
  b.fsw(11, 0, t4);
  b.fsub(11, 1, 9);
  b.fsw(11, 0, t5);
  b.fsub(11, 2, 10);
  b.fsw(11, 0, t6);
  b.addi(s9, s9, 1);
  b.blt(s9, s6, "bfly");
  b.add(s8, s8, s4);
  b.blt(s8, s5, "group");
  b.slli(s4, s4, 1);
  b.srli(s7, s7, 1);
  b.bge(s5, s4, "stage");

  b.li(a2, static_cast<std::int32_t>(layout::kFftMag));
  b.li(a3, kFftSize);
  b.label("mag");
  b.flw(1, 0, s0);
  b.flw(2, 0, s1);
  b.fmul(3, 1, 1);
  b.fmul(4, 2, 2);
  b.fadd(5, 3, 4);
  b.fsqrt(6, 5);
  b.fsw(6, 0, a2);
  b.addi(s0, s0, 4);
  b.addi(s1, s1, 4);
  b.addi(a2, a2, 4);
  b.addi(a3, a3, -1);
  b.bne(a3, reg::zero, "mag");
  b.exit(0);
  return b;
}

struct KernelResult {
  sim::RunReport report;
  std::vector<std::uint32_t> words;  // kernel outputs
};

inline std::vector<std::uint8_t> le_bytes(const std::vector<std::uint32_t>& words) {
  std::vector<std::uint8_t> out;
  for (std::uint32_t w : words)
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(w >> (8 * k)));
  return out;
}

/// Loads code plus data segments, runs to exit, and reads `out_count`
/// words from `out_addr`. Throws if the kernel does not exit cleanly.
inline KernelResult run_kernel(const ProgramBuilder& code, const std::vector<sim::Segment>& data,
                               std::uint32_t out_addr, std::size_t out_count,
                               sim::IntegrationMode mode, std::size_t memory = 4u << 20) {
  sim::SimConfig cfg;
  cfg.mode = mode;
  cfg.memory_size = memory;
  sim::Simulator s(cfg);
  sim::Image img = sim::words_image(code.words(), code.base());
  for (const auto& seg : data) img.segments.push_back(seg);
  KernelResult r;
  r.report = s.run(img, kFuel);
  if (r.report.status != sim::ExitStatus::Exited || r.report.exit_code != 0)
    throw std::runtime_error("benchmark kernel did not exit cleanly:\n" + sim::format_report(r.report));
  for (std::size_t k = 0; k < out_count; ++k)
    r.words.push_back(s.state().memory.read_word(out_addr + 4 * static_cast<std::uint32_t>(k)));
  return r;
}

inline std::vector<std::uint32_t> constant_words() {
  return {from_double<posit32>(kDegToRad).bits(), posit32::from_int(1).bits()};
}

/// Posit results of the trig kernel for degrees 0..359.
inline KernelResult run_trig_kernel(Trig f, sim::IntegrationMode mode) {
  std::vector<std::uint32_t> input;
  for (int d = 0; d < 360; ++d) {
    const Reduced r = reduce(d, f);
    input.push_back(static_cast<std::uint32_t>(r.degrees));
    input.push_back(r.negate ? 1u : 0u);
  }
  const std::vector<sim::Segment> data = {{layout::kConsts, le_bytes(constant_words())},
                                          {layout::kInput, le_bytes(input)}};
  return run_kernel(trig_kernel(f, 360, flavor_for(mode)), data, layout::kOutput, 360, mode);
}

inline KernelResult run_exp_kernel(sim::IntegrationMode mode) {
  std::vector<std::uint32_t> input;
  for (int x = 0; x <= 11; ++x) input.push_back(static_cast<std::uint32_t>(x));
  const std::vector<sim::Segment> data = {{layout::kConsts, le_bytes(constant_words())},
                                          {layout::kInput, le_bytes(input)}};
  return run_kernel(exp_kernel(12, flavor_for(mode)), data, layout::kOutput, 12, mode);
}

/// Outputs: re[0..N), im[0..N), mag[0..N).
inline KernelResult run_fft_kernel(sim::IntegrationMode mode) {
  const FftData<posit32> in = fft_inputs<posit32>();
  auto words = [](const std::vector<posit32>& v) {
    std::vector<std::uint32_t> w;
    for (auto p : v) w.push_back(p.bits());
    return w;
  };
  const std::vector<sim::Segment> data = {{layout::kFftRe, le_bytes(words(in.re))},
                                          {layout::kFftIm, le_bytes(words(in.im))},
                                          {layout::kFftWr, le_bytes(words(in.wr))},
                                          {layout::kFftWi, le_bytes(words(in.wi))}};
  KernelResult r = run_kernel(fft_kernel(flavor_for(mode)), data, layout::kFftRe, 2 * kFftSize, mode);
  KernelResult mags =
      run_kernel(fft_kernel(flavor_for(mode)), data, layout::kFftMag, kFftSize, mode);
  r.words.insert(r.words.end(), mags.words.begin(), mags.words.end());
  return r;
}

// ---------------------------------------------------------------------------
// Benchmarks

inline double posit_double(std::uint32_t bits) { return posit32::from_bits(bits).to_double(); }

inline Row trig_row(Trig f, sim::IntegrationMode mode, BenchReport& rep) {
  const KernelResult k = run_trig_kernel(f, mode);
  rep.sim_cycles += k.report.cycles;
  rep.sim_retired += k.report.retired;
  Row row;
  row.name = f == Trig::Sin ? "sin" : "cos";
  std::vector<double> ep, ef;
  for (int d = 0; d < 360; ++d) {
    if (reduce(d, f).exact_zero) {
      ++row.excluded;
      continue;
    }
    const double ref = trig_series<double>(d, f);
    ep.push_back(percent_error(posit_double(k.words[static_cast<std::size_t>(d)]), ref));
    ef.push_back(percent_error(trig_series<float>(d, f), ref));
  }
  row.posit = summarize(ep);
  row.binary32 = summarize(ef);
  return row;
}

inline Row exp_row(sim::IntegrationMode mode, BenchReport& rep) {
  const KernelResult k = run_exp_kernel(mode);
  rep.sim_cycles += k.report.cycles;
  rep.sim_retired += k.report.retired;
  Row row;
  row.name = "exp";
  std::vector<double> ep, ef;
  for (int x = 0; x <= 11; ++x) {
    const double ref = exp_series<double>(x);
    ep.push_back(percent_error(posit_double(k.words[static_cast<std::size_t>(x)]), ref));
    ef.push_back(percent_error(exp_series<float>(x), ref));
  }
  row.posit = summarize(ep);
  row.binary32 = summarize(ef);
  return row;
}

/// Two rows: fft_magnitude and fft_angle. Angles are atan2 in binary64 of
/// each precision's own transform output.
inline std::vector<Row> fft_rows(sim::IntegrationMode mode, BenchReport& rep) {
  const KernelResult k = run_fft_kernel(mode);
  rep.sim_cycles += k.report.cycles;
  rep.sim_retired += k.report.retired;

  FftData<double> dref = fft_inputs<double>();
  fft_in_place(dref);
  const std::vector<double> mref = magnitudes(dref);
  FftData<float> dflt = fft_inputs<float>();
  fft_in_place(dflt);
  const std::vector<float> mflt = magnitudes(dflt);

  Row mag{"fft_magnitude", {}, {}, 0};
  Row ang{"fft_angle", {}, {}, 0};
  std::vector<double> mp, mf, ap, af;
  for (int n = 0; n < kFftSize; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double pre = posit_double(k.words[i]);
    const double pim = posit_double(k.words[kFftSize + i]);
    const double pmag = posit_double(k.words[2 * kFftSize + i]);
    if (mref[i] == 0) {
      ++mag.excluded;
    } else {
      mp.push_back(percent_error(pmag, mref[i]));
      mf.push_back(percent_error(mflt[i], mref[i]));
    }
    const double aref = std::atan2(dref.im[i], dref.re[i]);
    if (aref == 0) {
      ++ang.excluded;
    } else {
      ap.push_back(percent_error(std::atan2(pim, pre), aref));
      af.push_back(percent_error(std::atan2(static_cast<double>(dflt.im[i]),
                                            static_cast<double>(dflt.re[i])),
                                 aref));
    }
  }
  mag.posit = summarize(mp);
  mag.binary32 = summarize(mf);
  ang.posit = summarize(ap);
  ang.binary32 = summarize(af);
  return {mag, ang};
}

/// which: sin, cos, exp, fft, or all.
inline BenchReport run_bench(const std::string& which, sim::IntegrationMode mode) {
  BenchReport rep;
  const bool all = which == "all";
  if (all || which == "sin") rep.rows.push_back(trig_row(Trig::Sin, mode, rep));
  if (all || which == "cos") rep.rows.push_back(trig_row(Trig::Cos, mode, rep));
  if (all || which == "exp") rep.rows.push_back(exp_row(mode, rep));
  if (all || which == "fft")
    for (auto& r : fft_rows(mode, rep)) rep.rows.push_back(std::move(r));
  if (rep.rows.empty()) throw std::invalid_argument("unknown benchmark: " + which);
  return rep;
}

}  // namespace positrv::bench
