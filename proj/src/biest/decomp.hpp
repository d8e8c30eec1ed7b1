#pragma once

#include "biest/functionals.hpp"

namespace biest {

struct TreeFormResult {
  cplx value{0.0, 0.0};
  double bound = 0.0;           // |I_T| * prod_j size_j over the tree
  std::array<double, 3> sizes{};
};

/// Single-tree estimate: sum over members of |I_P|^{-1/2} a1 a2 a3 against
/// |I_T| prod size_j, with constant exactly 1.  Sizes are evaluated over the
/// tree's members with the tree top admitted as a witness top.
TreeFormResult tree_form(const std::vector<TriTile>& universe, const Tree& t,
                         const CoefficientSequence& a1,
                         const CoefficientSequence& a2,
                         const CoefficientSequence& a3,
                         const OrderConstants& c);

enum class SelectionPass { up, down };

struct SelectedPair {
  SelectionPass pass = SelectionPass::up;
  Tree tree;                    // primary tree (type i != j, one-sided members)
  std::vector<std::size_t> companion;  // j-tree under the same top
  double tree_mass = 0.0;       // sum of normalized |a|^2 over the tree
  double companion_mass = 0.0;
};

struct SelectionTrace {
  int slot = 1;
  int level_n = 0;
  double energy_norm = 1.0;
  double threshold_scale = 0.0;  // 2^{-2n-3}
  std::vector<SelectedPair> selected;
  std::vector<std::size_t> remainder;

  bool plus_left_ok = true;    // upward remainder threshold, exact
  bool plus_right_ok = true;   // downward remainder threshold, exact
  bool strongly_disjoint_ok = true;
  bool size_lower_ok = true;   // remainder size <= 2^{-n-1}, flagged not fixed
  double remainder_size = 0.0;
  double sum_tree_lengths = 0.0;  // over primaries and companions, both passes

  std::string to_json() const;
};

/// Greedy two-pass tree selection at level n on coefficients normalized by
/// energy_norm.  Precondition: size_j(universe)/energy_norm <= 2^{-n}.
SelectionTrace select_trees(const std::vector<TriTile>& universe,
                            const CoefficientSequence& seq, int n,
                            double energy_norm, const OrderConstants& c);

struct PartitionLevel {
  int n = 0;
  std::vector<std::size_t> tiles;  // universe indices landing at this level
  std::vector<Tree> cover;         // trees covering them
  double sum_tree_lengths = 0.0;
  std::array<int, 3> selected_pairs{};  // per-slot selection counts
  int flushed_trees = 0;           // size witnesses moved in to restore the
                                   // next level's entry bound
};

struct PartitionResult {
  std::array<double, 3> energies{};  // normalizing E_j (upper estimates)
  std::array<double, 3> sizes{};
  std::vector<PartitionLevel> levels;
  std::vector<std::size_t> zero_tiles;  // coefficients vanish in all slots

  std::string to_json() const;
};

/// Level-by-level decomposition driving select_trees for j = 1,2,3 per
/// level; every tri-tile lands in exactly one level.
PartitionResult partition(const std::vector<TriTile>& universe,
                          const CoefficientSequence& a1,
                          const CoefficientSequence& a2,
                          const CoefficientSequence& a3,
                          const OrderConstants& c);

struct AbstractBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double refined_rhs = 0.0;
  double refined_ratio = 0.0;
  std::array<double, 3> sizes{};
  std::array<double, 3> energies{};  // modified energies (upper in bracket mode)
};

/// Tri-linear form against prod size^theta * energy^(1-theta), plus the
/// logarithmic refinement with slots ordered by energy/size ratio.
AbstractBoundResult abstract_bound(const std::vector<TriTile>& universe,
                                   const CoefficientSequence& a1,
                                   const CoefficientSequence& a2,
                                   const CoefficientSequence& a3,
                                   const std::array<double, 3>& theta,
                                   const OrderConstants& c);

}  // namespace biest
