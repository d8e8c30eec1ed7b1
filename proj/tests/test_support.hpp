#pragma once

#include <random>

#include "biest/decomp.hpp"
#include "biest/ensembles.hpp"
#include "biest/packets.hpp"

namespace testsupport {

using namespace biest;

// combinatorial ensembles: deep mixed-scale rank-1 families
inline GenParams combinatorial_gen(std::uint64_t seed, std::size_t count) {
  GenParams g;
  g.seed = seed;
  g.count = count;
  g.scale_ladder = {6, 1, -4, -9, -14};
  g.window_exp = 8;
  g.freq_window_exp = 17;
  g.child_bias = 0.7;
  g.sibling_bias = 0.7;
  return g;
}

// selection ensembles: one root, a dense layer of spatial siblings below it
inline GenParams selection_gen(std::uint64_t seed, std::size_t count,
                               int tree_coord) {
  GenParams g;
  g.seed = seed;
  g.count = count;
  g.scale_ladder = {5, 0};
  g.window_exp = 5;
  g.freq_window_exp = 17;
  g.child_bias = 1.0;
  g.sibling_bias = 0.95;
  g.up_bias = 0.8;
  g.tree_coord = tree_coord;
  g.root_scale_index = 0;
  g.max_tries_per_tile = 2000;
  return g;
}

// coefficients for selection instances: the mass lives on the dense layer
inline CoefficientSequence selection_sequence(const std::vector<TriTile>& u,
                                              int slot, std::mt19937_64& rng) {
  CoefficientSequence a = function_like_sequence(u, slot, rng, 0.9, 1.1);
  for (std::size_t m = 0; m < u.size(); ++m)
    if (u[m].time.j == 5) a.values[m] = 0.0;
  return a;
}

// sampled-grid compatible ensembles for the function-mode forms
inline GenParams grid_gen(std::uint64_t seed, std::size_t count) {
  GenParams g;
  g.seed = seed;
  g.count = count;
  g.scale_ladder = {2, -3};
  g.window_exp = 6;
  g.freq_window_exp = 4;
  g.child_bias = 0.35;
  return g;
}

inline SampledFunction random_band_limited(const SampleGrid& g, int half_band,
                                           std::mt19937_64& rng) {
  std::vector<cplx> spec(g.N, cplx(0.0, 0.0));
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (int q = -half_band; q <= half_band; ++q)
    spec[freq_to_fft_index(q, g.N)] = std::polar(mag(rng), ang(rng));
  return SampledFunction::from_spectrum(g, std::move(spec));
}

}  // namespace testsupport
