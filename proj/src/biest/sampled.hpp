#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "biest/rational.hpp"

namespace biest {

using cplx = std::complex<double>;

/// Periodic sampling window: x_m = m * L / N for m in [0, N), frequency grid
/// spacing 1/L, bins q in [-N/2, N/2).
struct SampleGrid {
  Rat L = Rat(64);
  int N = 4096;  // power of two

  double length() const { return L.to_double(); }
  double dx() const { return length() / N; }
  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;
};

/// FFT storage order m = 0..N-1 maps to frequency q = m (m < N/2) or m - N.
inline int fft_index_to_freq(int m, int n) { return m < n / 2 ? m : m - n; }
inline int freq_to_fft_index(int q, int n) { return q >= 0 ? q : q + n; }

/// Complex function on a periodic sampled window.  Immutable after
/// construction; the spectrum convention approximates the continuum
/// transforms: fhat(q) = (L/N) sum_m f(x_m) e^{-2 pi i q m / N}.
class SampledFunction {
 public:
  SampledFunction() = default;
  static SampledFunction zeros(const SampleGrid& g);
  static SampledFunction from_samples(const SampleGrid& g, std::vector<cplx> v);
  /// Build from spectrum values in FFT order; the spectrum is cached exactly.
  static SampledFunction from_spectrum(const SampleGrid& g, std::vector<cplx> spec);

  const SampleGrid& grid() const { return grid_; }
  int size() const { return int(samples_.size()); }
  const std::vector<cplx>& samples() const { return samples_; }
  cplx operator[](int m) const { return samples_[m]; }

  /// Spectrum in FFT order (cached when constructed spectrally).
  const std::vector<cplx>& spectrum() const;

  double norm2() const;  // sqrt((L/N) sum |f|^2)

  SampledFunction scaled(cplx a) const;
  SampledFunction plus(const SampledFunction& o) const;
  SampledFunction pointwise_product(const SampledFunction& o) const;

 private:
  SampleGrid grid_;
  std::vector<cplx> samples_;
  mutable std::vector<cplx> spectrum_;  // lazily filled
};

/// Discrete L2 pairing with conjugation on the second slot and quadrature
/// weight L/N.  Throws on grid mismatch.
cplx inner(const SampledFunction& f, const SampledFunction& g);

/// In-place radix-2 FFT building blocks (power-of-two sizes only).
void fft_forward(std::vector<cplx>& a);
void fft_inverse(std::vector<cplx>& a);  // unnormalized inverse (no 1/N)

/// Frequency bins q with q/L strictly inside (lo, hi); exact comparisons.
std::vector<int> bins_strictly_inside(const SampleGrid& g, const QInterval& w);

/// Binary serialization: one-line JSON header {"L","N","dtype"} then raw
/// little-endian complex64/complex128 samples.
void save_function(const SampledFunction& f, const std::string& path,
                   bool single_precision = false);
SampledFunction load_function(const std::string& path);

}  // namespace biest
