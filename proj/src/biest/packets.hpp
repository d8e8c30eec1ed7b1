#pragma once

#include <array>
#include <map>

#include "biest/sampled.hpp"
#include "biest/tiles.hpp"

namespace biest {

/// Base frequency bump eta(t) = exp(1 - 1/(1-t^2)) on |t| < 1, 0 outside.
double base_bump(double t);
/// Normalized smoothstep built from the base bump's integral: 0 below 0,
/// 1 above 1, C-infinity in between.
double smoothstep(double u);

/// Wave packet on a tile: unit discrete L2 norm, DFT support hard-zero
/// outside the bins of (9/10)omega_P, decay certificates against the
/// approximate cutoff recorded for M in {2,4,8}.
struct WavePacket {
  Tile tile;
  SampledFunction values;
  std::string bump_id = "bruna";
  std::array<double, 3> decay_c{};  // C_M for M = 2, 4, 8

  static constexpr std::array<int, 3> decay_orders{2, 4, 8};
};

/// Resolution guards: (9/10)omega_P must contain at least min_bins frequency
/// bins, and the spatial interval at least min_samples sample points.
struct PacketResolution {
  int min_bins = 8;
  int min_samples = 8;
};

WavePacket make_packet(const Tile& p, const SampleGrid& g,
                       const PacketResolution& r = {});

/// Pairing <f, phi> (conjugation on the packet).
cplx inner(const SampledFunction& f, const WavePacket& phi);

/// Riesz projection: zeroes every bin with frequency <= 0.
SampledFunction riesz_project(const SampledFunction& f);

struct QuadratureOptions {
  std::size_t max_products = std::size_t(1) << 31;  // budget on bin pairs scanned
  bool parallel = true;
  double support_rel_eps = 1e-13;  // spectrum bins below this (relative) are dropped
};

/// Bilinear frequency quadrature ghat(q) = (1/L) sum_{q1+q2=q, q1<q2}
/// f1hat(q1) f2hat(q2); accumulation is circular in q, strictness is exact
/// on integer bins.
SampledFunction direct_B(const SampledFunction& f1, const SampledFunction& f2,
                         const QuadratureOptions& opt = {});
/// Same with the inequality swapped (q1 > q2).
SampledFunction direct_B_swapped(const SampledFunction& f1, const SampledFunction& f2,
                                 const QuadratureOptions& opt = {});
/// Diagonal part (q1 == q2).
SampledFunction direct_B_diagonal(const SampledFunction& f1, const SampledFunction& f2,
                                  const QuadratureOptions& opt = {});

using Symbol = std::function<cplx(double, double, double)>;

/// Trilinear multiplier quadrature ghat(q) = (1/L^2) sum m(q1,q2,q3) prod
/// fihat(qi) over q1+q2+q3 = q (circular); the symbol sees true bin
/// frequencies q/L.  OpenMP-parallel over output bins with a fixed per-bin
/// summation order, so parallel and serial results agree bitwise.
SampledFunction direct_Tm(const Symbol& m, const SampledFunction& f1,
                          const SampledFunction& f2, const SampledFunction& f3,
                          const QuadratureOptions& opt = {});

/// Serial reference implementation of direct_Tm (kept for testing and the
/// kernel benchmark).
SampledFunction direct_Tm_serial(const Symbol& m, const SampledFunction& f1,
                                 const SampledFunction& f2, const SampledFunction& f3,
                                 const QuadratureOptions& opt = {});

/// direct_Tm with the biest symbol chi_{xi1 < xi2 < xi3}.
SampledFunction direct_T(const SampledFunction& f1, const SampledFunction& f2,
                         const SampledFunction& f3, const QuadratureOptions& opt = {});

/// Deterministic packet cache keyed by tile identity.
class PacketCache {
 public:
  explicit PacketCache(SampleGrid g, PacketResolution r = {}) : grid_(g), res_(r) {}
  const WavePacket& get(const Tile& t);
  const SampleGrid& grid() const { return grid_; }

 private:
  struct Key {
    int j;
    std::int64_t k;
    int sig;
    int fj;
    std::int64_t fk;
    int fsig;
    auto operator<=>(const Key&) const = default;
  };
  SampleGrid grid_;
  PacketResolution res_;
  std::map<Key, WavePacket> cache_;
};

}  // namespace biest
