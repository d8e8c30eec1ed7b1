#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "test_support.hpp"

using namespace biest;
using namespace testsupport;

namespace {

const SampleGrid kGrid{Rat(64), 4096};

Tile simple_tile(int js, std::int64_t kt, std::int64_t kf) {
  return Tile{dyadic_interval(js, kt), ShiftedInterval{-js, kf, Shift::zero}, 1};
}

}  // namespace

TEST_CASE("transform round trip at 1e-12") {
  std::mt19937_64 rng(1);
  SampledFunction f = random_band_limited(kGrid, 300, rng);
  SampledFunction g = SampledFunction::from_samples(kGrid, f.samples());
  const auto& spec = g.spectrum();
  SampledFunction back = SampledFunction::from_spectrum(kGrid, spec);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kGrid.N; ++i) {
    num += std::norm(back[i] - f[i]);
    den += std::norm(f[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("packet normalization and orthogonality") {
  Tile p = simple_tile(0, 10, 3);
  WavePacket phi = make_packet(p, kGrid);
  CHECK(std::abs(inner(phi.values, phi) - cplx(1.0, 0.0)) < 1e-12);

  Tile q = simple_tile(0, 30, 11);  // disjoint frequency interval
  REQUIRE(!p.freq.interval().intersects(q.freq.interval()));
  WavePacket psi = make_packet(q, kGrid);
  CHECK(std::abs(inner(phi.values, psi)) < 1e-10);
}

TEST_CASE("packet spectrum is hard zero outside (9/10) omega") {
  Tile p = simple_tile(1, 3, 2);
  WavePacket phi = make_packet(p, kGrid);
  auto allowed = bins_strictly_inside(kGrid, p.freq.interval().dilate(Rat(9, 10)));
  std::vector<char> ok(kGrid.N, 0);
  for (int q : allowed) ok[freq_to_fft_index(q, kGrid.N)] = 1;
  const auto& spec = phi.values.spectrum();
  for (int m = 0; m < kGrid.N; ++m)
    if (!ok[m]) CHECK(spec[m] == cplx(0.0, 0.0));
}

TEST_CASE("resolution guards reject underresolved tiles") {
  CHECK_THROWS(make_packet(simple_tile(5, 0, 0), kGrid));   // too few bins
  CHECK_THROWS(make_packet(simple_tile(-5, 0, 0), kGrid));  // too few samples
}

TEST_CASE("pairing is linear with Plancherel cancellation") {
  Tile p = simple_tile(0, 10, 3);
  WavePacket phi = make_packet(p, kGrid);
  // g band-limited away from omega_P
  std::mt19937_64 rng(5);
  std::vector<cplx> spec(kGrid.N, cplx(0.0, 0.0));
  for (int q = -900; q <= -700; ++q)
    spec[freq_to_fft_index(q, kGrid.N)] = std::polar(0.7, 0.1 * q);
  SampledFunction g = SampledFunction::from_spectrum(kGrid, std::move(spec));
  SampledFunction f = phi.values.scaled(2.0).plus(g);
  CHECK(std::abs(inner(f, phi) - cplx(2.0, 0.0)) < 1e-10);
  CHECK_THROWS(inner(SampledFunction::zeros(SampleGrid{Rat(32), 1024}), phi));
}

TEST_CASE("riesz projection conventions") {
  std::vector<cplx> spec(kGrid.N, cplx(0.0, 0.0));
  spec[freq_to_fft_index(-5, kGrid.N)] = 1.0;
  SampledFunction neg = SampledFunction::from_spectrum(kGrid, std::move(spec));
  SampledFunction pneg = riesz_project(neg);
  CHECK(pneg.norm2() == 0.0);

  // real cosine keeps its positive half at half amplitude
  std::vector<cplx> c(kGrid.N, cplx(0.0, 0.0));
  c[freq_to_fft_index(7, kGrid.N)] = cplx(0.5, 0.0);
  c[freq_to_fft_index(-7, kGrid.N)] = cplx(0.5, 0.0);
  SampledFunction cosf = SampledFunction::from_spectrum(kGrid, std::move(c));
  SampledFunction once = riesz_project(cosf);
  const auto& s = once.spectrum();
  CHECK(std::abs(s[freq_to_fft_index(7, kGrid.N)] - cplx(0.5, 0.0)) < 1e-14);
  CHECK(s[freq_to_fft_index(-7, kGrid.N)] == cplx(0.0, 0.0));
  CHECK(s[freq_to_fft_index(0, kGrid.N)] == cplx(0.0, 0.0));

  SampledFunction twice = riesz_project(once);
  double diff = 0.0;
  for (int i = 0; i < kGrid.N; ++i) diff += std::norm(twice[i] - once[i]);
  CHECK(std::sqrt(diff) < 1e-13);
}

TEST_CASE("bilinear quadrature on single bins and the partition identity") {
  auto delta = [&](int q, cplx amp) {
    std::vector<cplx> spec(kGrid.N, cplx(0.0, 0.0));
    spec[freq_to_fft_index(q, kGrid.N)] = amp;
    return SampledFunction::from_spectrum(kGrid, std::move(spec));
  };
  // f1 at bin 5, f2 at bin 2: 5 < 2 fails
  CHECK(direct_B(delta(5, 1.0), delta(2, 1.0)).norm2() == 0.0);
  // f1 at bin 2, f2 at bin 5: lands on bin 7 with the product amplitude / L
  SampledFunction g = direct_B(delta(2, cplx(2.0, 0.0)), delta(5, cplx(3.0, 0.0)));
  const auto& spec = g.spectrum();
  for (int m = 0; m < kGrid.N; ++m) {
    cplx want = fft_index_to_freq(m, kGrid.N) == 7
                    ? cplx(6.0 / kGrid.length(), 0.0)
                    : cplx(0.0, 0.0);
    CHECK(std::abs(spec[m] - want) < 1e-12);
  }

  // B + swapped + diagonal = pointwise square, bin-exact
  std::mt19937_64 rng(9);
  SampledFunction f = random_band_limited(kGrid, 120, rng);
  SampledFunction lhs = direct_B(f, f)
                            .plus(direct_B_swapped(f, f))
                            .plus(direct_B_diagonal(f, f));
  SampledFunction rhs = f.pointwise_product(f);
  const auto& a = lhs.spectrum();
  const auto& b = rhs.spectrum();
  double peak = 0.0;
  for (int m = 0; m < kGrid.N; ++m) peak = std::max(peak, std::abs(b[m]));
  for (int m = 0; m < kGrid.N; ++m) CHECK(std::abs(a[m] - b[m]) <= 1e-12 * peak);
}

TEST_CASE("trilinear quadrature identities") {
  std::mt19937_64 rng(13);
  SampledFunction f1 = random_band_limited(kGrid, 80, rng);
  SampledFunction f2 = random_band_limited(kGrid, 80, rng);
  SampledFunction f3 = random_band_limited(kGrid, 80, rng);

  // unit symbol reproduces the pointwise product
  Symbol one = [](double, double, double) { return cplx(1.0, 0.0); };
  SampledFunction t1 = direct_Tm(one, f1, f2, f3);
  SampledFunction prod = f1.pointwise_product(f2).pointwise_product(f3);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < kGrid.N; ++i) {
    worst = std::max(worst, std::abs(t1[i] - prod[i]));
    scale = std::max(scale, std::abs(prod[i]));
  }
  CHECK(worst <= 1e-10 * std::max(1.0, scale));

  // everything on one bin: the strict chain is empty
  std::vector<cplx> spec(kGrid.N, cplx(0.0, 0.0));
  spec[freq_to_fft_index(4, kGrid.N)] = 1.0;
  SampledFunction atom = SampledFunction::from_spectrum(kGrid, std::move(spec));
  CHECK(direct_T(atom, atom, atom).norm2() == 0.0);

  // T(1, f2, f3) = B(P f2, P f3) bin by bin
  SampledFunction onef = SampledFunction::from_samples(
      kGrid, std::vector<cplx>(kGrid.N, cplx(1.0, 0.0)));
  SampledFunction lhs = direct_T(onef, f2, f3);
  SampledFunction rhs = direct_B(riesz_project(f2), riesz_project(f3));
  const auto& a = lhs.spectrum();
  const auto& b = rhs.spectrum();
  double peak = 0.0;
  for (int m = 0; m < kGrid.N; ++m) peak = std::max(peak, std::abs(b[m]));
  for (int m = 0; m < kGrid.N; ++m) CHECK(std::abs(a[m] - b[m]) <= 1e-11 * peak);
}

TEST_CASE("trilinearity in each slot") {
  std::mt19937_64 rng(17);
  SampleGrid small{Rat(64), 1024};
  auto f = random_band_limited(small, 60, rng);
  auto g = random_band_limited(small, 60, rng);
  auto h = random_band_limited(small, 60, rng);
  auto e = random_band_limited(small, 60, rng);
  const cplx a(0.7, -1.2), b(-0.4, 0.3);
  for (int slot = 0; slot < 3; ++slot) {
    auto mix = f.scaled(a).plus(g.scaled(b));
    SampledFunction lhs = slot == 0   ? direct_T(mix, h, e)
                          : slot == 1 ? direct_T(h, mix, e)
                                      : direct_T(h, e, mix);
    SampledFunction t_f = slot == 0   ? direct_T(f, h, e)
                          : slot == 1 ? direct_T(h, f, e)
                                      : direct_T(h, e, f);
    SampledFunction t_g = slot == 0   ? direct_T(g, h, e)
                          : slot == 1 ? direct_T(h, g, e)
                                      : direct_T(h, e, g);
    SampledFunction rhs = t_f.scaled(a).plus(t_g.scaled(b));
    double worst = 0.0;
    for (int i = 0; i < small.N; ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("parallel quadrature agrees with the serial reference bitwise") {
  std::mt19937_64 rng(23);
  SampleGrid small{Rat(64), 1024};
  auto f1 = random_band_limited(small, 90, rng);
  auto f2 = random_band_limited(small, 90, rng);
  auto f3 = random_band_limited(small, 90, rng);
  Symbol chi = [](double a, double b, double c) {
    return (a < b && b < c) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  };
  QuadratureOptions opt;
  opt.parallel = true;
  SampledFunction par = direct_Tm(chi, f1, f2, f3, opt);
  SampledFunction ser = direct_Tm_serial(chi, f1, f2, f3, opt);
  for (int i = 0; i < small.N; ++i) CHECK(par[i] == ser[i]);
}

TEST_CASE("quadrature budget guard") {
  std::mt19937_64 rng(29);
  auto f = random_band_limited(kGrid, 400, rng);
  QuadratureOptions opt;
  opt.max_products = 1000;
  CHECK_THROWS(direct_T(f, f, f, opt));
}

TEST_CASE("modulation covariance is bin exact") {
  Tile p = simple_tile(0, 12, 2);
  Tile shifted{p.time, ShiftedInterval{p.freq.j, p.freq.k + 3, p.freq.sigma}, 1};
  WavePacket phi = make_packet(p, kGrid);
  WavePacket psi = make_packet(shifted, kGrid);
  // frequency translation by 3 mesh steps = 3 * L / |I| bins
  const double df = 3.0 * p.freq.length().to_double();
  const double xc = p.time.center().to_double();
  double worst = 0.0;
  for (int m = 0; m < kGrid.N; ++m) {
    double x = m * kGrid.dx();
    cplx expect = phi.values[m] *
                  std::polar(1.0, 2.0 * std::numbers::pi * df * (x - xc));
    worst = std::max(worst, std::abs(psi.values[m] - expect));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("binary serialization round trip") {
  std::mt19937_64 rng(31);
  SampledFunction f = random_band_limited(kGrid, 50, rng);
  auto path = std::filesystem::temp_directory_path() / "biest_fn_test.bin";
  save_function(f, path.string());
  SampledFunction g = load_function(path.string());
  REQUIRE(g.grid() == f.grid());
  for (int i = 0; i < kGrid.N; ++i) CHECK(g[i] == f[i]);
  std::filesystem::remove(path);
}
