#include "biest/sampled.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biest {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_grid(const SampleGrid& g) {
  if (!is_pow2(g.N)) throw std::invalid_argument("SampleGrid: N must be a power of two");
  if (!(Rat(0) < g.L)) throw std::invalid_argument("SampleGrid: L must be positive");
}

void fft_core(std::vector<cplx>& a, int sign) {
  const int n = int(a.size());
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / len;
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

void fft_forward(std::vector<cplx>& a) { fft_core(a, -1); }
void fft_inverse(std::vector<cplx>& a) { fft_core(a, +1); }

SampledFunction SampledFunction::zeros(const SampleGrid& g) {
  check_grid(g);
  SampledFunction f;
  f.grid_ = g;
  f.samples_.assign(g.N, cplx(0.0, 0.0));
  return f;
}

SampledFunction SampledFunction::from_samples(const SampleGrid& g,
                                              std::vector<cplx> v) {
  check_grid(g);
  if (int(v.size()) != g.N) throw std::invalid_argument("from_samples: size mismatch");
  SampledFunction f;
  f.grid_ = g;
  f.samples_ = std::move(v);
  return f;
}

SampledFunction SampledFunction::from_spectrum(const SampleGrid& g,
                                               std::vector<cplx> spec) {
  check_grid(g);
  if (int(spec.size()) != g.N) throw std::invalid_argument("from_spectrum: size mismatch");
  std::vector<cplx> v = spec;
  fft_inverse(v);
  const double w = 1.0 / g.length();  // (1/L) sum fhat e^{+}
  for (auto& x : v) x *= w;
  SampledFunction f;
  f.grid_ = g;
  f.samples_ = std::move(v);
  f.spectrum_ = std::move(spec);
  return f;
}

const std::vector<cplx>& SampledFunction::spectrum() const {
  if (spectrum_.empty() && !samples_.empty()) {
    spectrum_ = samples_;
    fft_forward(spectrum_);
    const double w = grid_.length() / grid_.N;
    for (auto& x : spectrum_) x *= w;
  }
  return spectrum_;
}

double SampledFunction::norm2() const {
  double s = 0.0;
  for (const auto& x : samples_) s += std::norm(x);
  return std::sqrt(s * grid_.length() / grid_.N);
}

SampledFunction SampledFunction::scaled(cplx a) const {
  std::vector<cplx> v = samples_;
  for (auto& x : v) x *= a;
  return from_samples(grid_, std::move(v));
}

SampledFunction SampledFunction::plus(const SampledFunction& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("plus: grid mismatch");
  std::vector<cplx> v = samples_;
  for (int i = 0; i < int(v.size()); ++i) v[i] += o.samples_[i];
  return from_samples(grid_, std::move(v));
}

SampledFunction SampledFunction::pointwise_product(const SampledFunction& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("product: grid mismatch");
  std::vector<cplx> v = samples_;
  for (int i = 0; i < int(v.size()); ++i) v[i] *= o.samples_[i];
  return from_samples(grid_, std::move(v));
}

cplx inner(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner: grid mismatch");
  cplx s(0.0, 0.0);
  const auto& a = f.samples();
  const auto& b = g.samples();
  for (int i = 0; i < int(a.size()); ++i) s += a[i] * std::conj(b[i]);
  return s * (f.grid().length() / f.grid().N);
}

std::vector<int> bins_strictly_inside(const SampleGrid& g, const QInterval& w) {
  std::vector<int> out;
  for (int q = -g.N / 2; q < g.N / 2; ++q) {
    Rat freq = Rat(q) / g.L;
    if (w.lo < freq && freq < w.hi) out.push_back(q);
  }
  return out;
}

void save_function(const SampledFunction& f, const std::string& path,
                   bool single_precision) {
  nlohmann::json header;
  header["L"] = f.grid().L.str();
  header["N"] = f.grid().N;
  header["dtype"] = single_precision ? "complex64" : "complex128";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_function: cannot open " + path);
  out << header.dump() << "\n";
  if (single_precision) {
    for (const auto& x : f.samples()) {
      float re = float(x.real()), im = float(x.imag());
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  } else {
    for (const auto& x : f.samples()) {
      double re = x.real(), im = x.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
}

SampledFunction load_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_function: cannot open " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json header = nlohmann::json::parse(line);
  SampleGrid g;
  g.L = Rat::parse(header.at("L").get<std::string>());
  g.N = header.at("N").get<int>();
  const bool single = header.at("dtype").get<std::string>() == "complex64";
  std::vector<cplx> v(g.N);
  for (int i = 0; i < g.N; ++i) {
    if (single) {
      float re, im;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      v[i] = cplx(re, im);
    } else {
      double re, im;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      v[i] = cplx(re, im);
    }
  }
  if (!in) throw std::runtime_error("load_function: truncated payload");
  return SampledFunction::from_samples(g, std::move(v));
}

}  // namespace biest
