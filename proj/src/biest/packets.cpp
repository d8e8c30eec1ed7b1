#include "biest/packets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace biest {

double base_bump(double t) {
  if (std::fabs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // integral of the base bump, normalized; 2u-1 maps [0,1] to [-1,1]
  static const int kSteps = 2048;
  static const std::vector<double> table = [] {
    std::vector<double> acc(kSteps + 1, 0.0);
    double sum = 0.0;
    for (int i = 0; i < kSteps; ++i) {
      double t0 = -1.0 + 2.0 * i / kSteps;
      double t1 = -1.0 + 2.0 * (i + 1) / kSteps;
      sum += 0.5 * (base_bump(t0) + base_bump(t1)) * (t1 - t0);
      acc[i + 1] = sum;
    }
    for (auto& v : acc) v /= sum;
    return acc;
  }();
  double v = (2.0 * u - 1.0 + 1.0) / 2.0 * kSteps;  // position in [-1,1] grid
  int i = int(v);
  if (i < 0) i = 0;
  if (i >= kSteps) i = kSteps - 1;
  double frac = v - i;
  return table[i] * (1.0 - frac) + table[i + 1] * frac;
}

WavePacket make_packet(const Tile& p, const SampleGrid& g,
                       const PacketResolution& r) {
  const QInterval omega9 = p.freq.interval().dilate(Rat(9, 10));
  const std::vector<int> bins = bins_strictly_inside(g, omega9);
  if (int(bins.size()) < r.min_bins)
    throw std::domain_error("make_packet: resolution guard, (9/10)omega has " +
                            std::to_string(bins.size()) + " bins");
  const Rat samples_per_i = p.time.length() * Rat(g.N) / g.L;
  if (samples_per_i < Rat(r.min_samples))
    throw std::domain_error("make_packet: resolution guard, I_P under-sampled");
  const double l = g.length();
  const double xi_c = p.freq.center().to_double();
  const double half_width = 0.45 * p.freq.length().to_double();
  const double x_c = p.time.center().to_double();

  std::vector<cplx> spec(g.N, cplx(0.0, 0.0));
  for (int q : bins) {
    double t = (double(q) / l - xi_c) / half_width;
    double amp = base_bump(t);
    double phase = -2.0 * std::numbers::pi * double(q) * x_c / l;
    spec[freq_to_fft_index(q, g.N)] = amp * std::polar(1.0, phase);
  }
  SampledFunction f = SampledFunction::from_spectrum(g, spec);
  const double n = f.norm2();
  if (n == 0.0) throw std::domain_error("make_packet: empty profile");
  for (auto& s : spec) s /= n;
  f = SampledFunction::from_spectrum(g, std::move(spec));

  WavePacket pk;
  pk.tile = p;
  pk.values = std::move(f);
  const double len_i = p.time.length().to_double();
  const double sqrt_len = std::sqrt(len_i);
  // certificate measured out to 64 spatial lengths; past that the samples
  // sit at the arithmetic noise floor where the cutoff amplification is
  // meaningless
  const double radius = std::min(64.0 * len_i, 0.5 * l);
  for (std::size_t mi = 0; mi < WavePacket::decay_orders.size(); ++mi) {
    const int m = WavePacket::decay_orders[mi];
    double worst = 0.0;
    for (int s = 0; s < g.N; ++s) {
      double x = double(s) * l / g.N;
      double d = std::fabs(x - x_c);
      d = std::min(d, l - d);
      if (d > radius) continue;
      double t = d / len_i;
      double chi_inv_m = std::pow(1.0 + t * t, 0.5 * m);
      worst = std::max(worst, std::abs(pk.values[s]) * sqrt_len * chi_inv_m);
    }
    pk.decay_c[mi] = worst;
  }
  return pk;
}

cplx inner(const SampledFunction& f, const WavePacket& phi) {
  return inner(f, phi.values);
}

SampledFunction riesz_project(const SampledFunction& f) {
  std::vector<cplx> spec = f.spectrum();
  for (int m = 0; m < int(spec.size()); ++m)
    if (fft_index_to_freq(m, int(spec.size())) <= 0) spec[m] = cplx(0.0, 0.0);
  return SampledFunction::from_spectrum(f.grid(), std::move(spec));
}

namespace {

std::vector<int> support_bins(const std::vector<cplx>& spec, double rel_eps) {
  double peak = 0.0;
  for (const auto& v : spec) peak = std::max(peak, std::abs(v));
  std::vector<int> out;
  if (peak == 0.0) return out;
  for (int m = 0; m < int(spec.size()); ++m)
    if (std::abs(spec[m]) > rel_eps * peak) out.push_back(m);
  return out;
}

enum class PairFilter { less, greater, equal };

SampledFunction bilinear_quadrature(const SampledFunction& f1,
                                    const SampledFunction& f2, PairFilter filter,
                                    const QuadratureOptions& opt) {
  if (!(f1.grid() == f2.grid()))
    throw std::invalid_argument("direct_B: grid mismatch");
  const int n = f1.grid().N;
  const auto& s1 = f1.spectrum();
  const auto& s2 = f2.spectrum();
  const auto supp1 = support_bins(s1, opt.support_rel_eps);
  if (std::size_t(n) * supp1.size() > opt.max_products)
    throw std::runtime_error("direct_B: budget exceeded");
  std::vector<cplx> out(n, cplx(0.0, 0.0));
  const double inv_l = 1.0 / f1.grid().length();

#pragma omp parallel for schedule(static) if (opt.parallel)
  for (int m = 0; m < n; ++m) {
    cplx acc(0.0, 0.0);
    for (int i1 : supp1) {
      const int q1 = fft_index_to_freq(i1, n);
      const int i2 = ((m - i1) % n + n) % n;
      const int q2 = fft_index_to_freq(i2, n);
      bool keep = false;
      switch (filter) {
        case PairFilter::less: keep = q1 < q2; break;
        case PairFilter::greater: keep = q1 > q2; break;
        case PairFilter::equal: keep = q1 == q2; break;
      }
      if (!keep) continue;
      const cplx v2 = s2[i2];
      if (v2 == cplx(0.0, 0.0)) continue;
      acc += s1[i1] * v2;
    }
    out[m] = acc * inv_l;
  }
  return SampledFunction::from_spectrum(f1.grid(), std::move(out));
}

SampledFunction trilinear_quadrature(const Symbol& m_sym, const SampledFunction& f1,
                                     const SampledFunction& f2,
                                     const SampledFunction& f3, bool parallel,
                                     const QuadratureOptions& opt) {
  if (!(f1.grid() == f2.grid()) || !(f1.grid() == f3.grid()))
    throw std::invalid_argument("direct_Tm: grid mismatch");
  const int n = f1.grid().N;
  const auto& s1 = f1.spectrum();
  const auto& s2 = f2.spectrum();
  const auto& s3 = f3.spectrum();
  const auto supp1 = support_bins(s1, opt.support_rel_eps);
  const auto supp2 = support_bins(s2, opt.support_rel_eps);
  if (std::size_t(n) * supp1.size() * supp2.size() > opt.max_products)
    throw std::runtime_error("direct_Tm: budget exceeded");
  std::vector<cplx> out(n, cplx(0.0, 0.0));
  const double l = f1.grid().length();
  const double inv_l2 = 1.0 / (l * l);

#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < n; ++m) {
    cplx acc(0.0, 0.0);
    for (int i1 : supp1) {
      const int q1 = fft_index_to_freq(i1, n);
      const double xi1 = double(q1) / l;
      const cplx v1 = s1[i1];
      for (int i2 : supp2) {
        const int q2 = fft_index_to_freq(i2, n);
        const int i3 = ((m - i1 - i2) % n + n) % n;
        const cplx v3 = s3[i3];
        if (v3 == cplx(0.0, 0.0)) continue;
        const int q3 = fft_index_to_freq(i3, n);
        const cplx sym = m_sym(xi1, double(q2) / l, double(q3) / l);
        if (sym == cplx(0.0, 0.0)) continue;
        acc += sym * v1 * s2[i2] * v3;
      }
    }
    out[m] = acc * inv_l2;
  }
  return SampledFunction::from_spectrum(f1.grid(), std::move(out));
}

}  // namespace

SampledFunction direct_B(const SampledFunction& f1, const SampledFunction& f2,
                         const QuadratureOptions& opt) {
  return bilinear_quadrature(f1, f2, PairFilter::less, opt);
}

SampledFunction direct_B_swapped(const SampledFunction& f1, const SampledFunction& f2,
                                 const QuadratureOptions& opt) {
  return bilinear_quadrature(f1, f2, PairFilter::greater, opt);
}

SampledFunction direct_B_diagonal(const SampledFunction& f1, const SampledFunction& f2,
                                  const QuadratureOptions& opt) {
  return bilinear_quadrature(f1, f2, PairFilter::equal, opt);
}

SampledFunction direct_Tm(const Symbol& m, const SampledFunction& f1,
                          const SampledFunction& f2, const SampledFunction& f3,
                          const QuadratureOptions& opt) {
  return trilinear_quadrature(m, f1, f2, f3, opt.parallel, opt);
}

SampledFunction direct_Tm_serial(const Symbol& m, const SampledFunction& f1,
                                 const SampledFunction& f2, const SampledFunction& f3,
                                 const QuadratureOptions& opt) {
  return trilinear_quadrature(m, f1, f2, f3, false, opt);
}

SampledFunction direct_T(const SampledFunction& f1, const SampledFunction& f2,
                         const SampledFunction& f3, const QuadratureOptions& opt) {
  static const Symbol chi = [](double a, double b, double c) {
    return (a < b && b < c) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  };
  return direct_Tm(chi, f1, f2, f3, opt);
}

const WavePacket& PacketCache::get(const Tile& t) {
  Key key{t.time.j, t.time.k, int(t.time.sigma),
          t.freq.j, t.freq.k, int(t.freq.sigma)};
  auto it = cache_.find(key);
  if (it == cache_.end())
    it = cache_.emplace(key, make_packet(t, grid_, res_)).first;
  return it->second;
}

}  // namespace biest
