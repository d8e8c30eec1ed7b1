// Benchmark: OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <random>

#include "biest/packets.hpp"
#include "biest/whitney.hpp"

using namespace biest;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

SampledFunction band_limited(const SampleGrid& g, int half_band,
                             std::mt19937_64& rng) {
  std::vector<cplx> spec(g.N, cplx(0.0, 0.0));
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (int q = -half_band; q <= half_band; ++q)
    spec[freq_to_fft_index(q, g.N)] = std::polar(mag(rng), ang(rng));
  return SampledFunction::from_spectrum(g, std::move(spec));
}

void bench_trilinear() {
  SampleGrid g{Rat(64), 2048};
  std::mt19937_64 rng(7);
  SampledFunction f1 = band_limited(g, 220, rng);
  SampledFunction f2 = band_limited(g, 220, rng);
  SampledFunction f3 = band_limited(g, 220, rng);
  QuadratureOptions opt;
  opt.max_products = std::size_t(1) << 33;

  auto t0 = clock_type::now();
  SampledFunction serial = direct_Tm_serial(
      [](double a, double b, double c) {
        return (a < b && b < c) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      },
      f1, f2, f3, opt);
  double t_serial = seconds_since(t0);

  t0 = clock_type::now();
  SampledFunction parallel = direct_T(f1, f2, f3, opt);
  double t_parallel = seconds_since(t0);

  double diff = 0.0;
  for (int i = 0; i < g.N; ++i)
    diff = std::max(diff, std::abs(serial[i] - parallel[i]));
  std::printf("trilinear quadrature  N=%d supports=441^2\n", g.N);
  std::printf("  serial   %8.3f s\n", t_serial);
  std::printf("  parallel %8.3f s   speedup %.2fx   max|diff| %.1e\n",
              t_parallel, t_serial / t_parallel, diff);
}

void bench_whitney_sweep() {
  WhitneyCoverRequest req;
  req.box.n = 3;
  for (int i = 0; i < 3; ++i)
    req.box.axis[i] = QInterval{Rat(-9, 16), Rat(9, 16)};
  req.min_scale_exp = -6;
  req.max_scale_exp = -6;
  const auto wc = WhitneyConstants::desk();
  static const Shift all3[3] = {Shift::zero, Shift::third, Shift::two_thirds};

  auto t0 = clock_type::now();
  std::vector<WhitneyCover> serial_covers;
  for (int combo = 0; combo < 27; ++combo)
    serial_covers.push_back(
        whitney_cover({all3[combo % 3], all3[(combo / 3) % 3], all3[combo / 9]},
                      req, wc, SingularLine::two_xi1_eq_xi2));
  double t_serial = seconds_since(t0);

  t0 = clock_type::now();
  std::vector<WhitneyCover> covers(27);
#pragma omp parallel for schedule(dynamic)
  for (int combo = 0; combo < 27; ++combo)
    covers[combo] =
        whitney_cover({all3[combo % 3], all3[(combo / 3) % 3], all3[combo / 9]},
                      req, wc, SingularLine::two_xi1_eq_xi2);
  double t_parallel = seconds_since(t0);

  std::size_t cubes = 0, cubes_serial = 0;
  for (const auto& c : covers) cubes += c.cubes.size();
  for (const auto& c : serial_covers) cubes_serial += c.cubes.size();
  std::printf("whitney covers        27 shifts, %zu cubes\n", cubes);
  std::printf("  serial   %8.3f s\n", t_serial);
  std::printf("  parallel %8.3f s   speedup %.2fx   cubes match: %s\n",
              t_parallel, t_serial / t_parallel,
              cubes == cubes_serial ? "yes" : "NO");
}

}  // namespace

int main() {
  bench_trilinear();
  bench_whitney_sweep();
  return 0;
}
