#pragma once

#include <random>

#include "biest/functionals.hpp"

namespace biest {

/// Uniform random coefficients, magnitudes in [lo, hi], uniform phase.
CoefficientSequence random_sequence(int slot, std::size_t n, std::mt19937_64& rng,
                                    double lo = 0.1, double hi = 2.0);

/// Coefficients scaled like |I_P|^{1/2}, the shape pairings with
/// L2-normalized functions produce; selection-style ensembles need this so
/// that tree mass is not dominated by the finest singletons.
CoefficientSequence function_like_sequence(const std::vector<TriTile>& universe,
                                           int slot, std::mt19937_64& rng,
                                           double lo = 0.3, double hi = 1.5);

/// Random tree for the single-tree estimate: a top at a random scale with
/// members below it in a random coordinate; the top is always a member.
/// No rank-1 or sparseness structure is imposed.
struct RandomTreeParams {
  std::uint64_t seed = 0;
  std::size_t max_members = 12;
  int top_scale = 3;
  int min_scale = -6;
};

struct RandomTree {
  std::vector<TriTile> universe;  // the tree's tri-tiles
  Tree tree;                      // members index the universe
};

RandomTree random_tree(const RandomTreeParams& params, const OrderConstants& c);

}  // namespace biest
