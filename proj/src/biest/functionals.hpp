#pragma once

#include <complex>
#include <optional>

#include "biest/tiles.hpp"

namespace biest {

using cplx = std::complex<double>;

/// Complex coefficients a^{(j)}_{P_j} attached to the tri-tiles of a
/// universe, one value per tri-tile, for one slot j.
struct CoefficientSequence {
  int slot = 1;                // j in {1,2,3}
  std::vector<cplx> values;    // parallel to the universe

  double weight(std::size_t m) const { return std::norm(values[m]); }
};

void check_sequence(const std::vector<TriTile>& universe,
                    const CoefficientSequence& seq);

struct SizeResult {
  double value = 0.0;
  Tree witness;           // maximal tree attaining the sup
  bool has_witness = false;
};

/// size_j: sup over i-trees (i != j) with tops in the universe of the
/// normalized l2 mass; the sup is attained on maximal trees.
SizeResult size(const std::vector<TriTile>& universe,
                const CoefficientSequence& seq, const OrderConstants& c);

/// Same sup with the witness tops drawn from `tops` (universe indices) plus
/// optionally one extra top tile not in the collection.
SizeResult size_over(const std::vector<TriTile>& universe,
                     const CoefficientSequence& seq, const OrderConstants& c,
                     const std::vector<std::size_t>& members,
                     const TriTile* extra_top);

struct EnergyResult {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  std::vector<std::size_t> witness;  // disjoint-tile subset attaining lower
};

/// energy_j: max-weight selection of pairwise disjoint j-tiles, exact by
/// branch and bound up to `exact_budget` tri-tiles, otherwise a
/// [greedy, l2-of-everything] bracket.
EnergyResult energy(const std::vector<TriTile>& universe,
                    const CoefficientSequence& seq, std::size_t exact_budget = 20);

struct ModifiedEnergyResult {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  int witness_n = 0;
  TreeCollection witness;  // collection attaining lower
};

struct ModifiedEnergyOptions {
  std::size_t exact_budget = 8;
  std::size_t energy_budget = 20;
};

/// Modified energy: sup over n and strongly j-disjoint tree collections
/// obeying the per-tree lower bound and the all-subtree upper bound, of
/// 2^n (sum |I_T|)^{1/2}.  Exact by enumeration within budget; otherwise the
/// lower end comes from admissible singleton collections and any
/// caller-supplied candidate collections, the upper end from the energy.
ModifiedEnergyResult modified_energy(
    const std::vector<TriTile>& universe, const CoefficientSequence& seq,
    const OrderConstants& c, const ModifiedEnergyOptions& opts = {},
    const std::vector<TreeCollection>& extra_candidates = {});

struct DualEnergyWitness {
  TreeCollection trees;
  std::vector<cplx> c_values;  // parallel to the universe, zero off the trees
  double pairing = 0.0;        // |sum_T sum_P a conj(c)|
  double modified_energy = 0.0;
  double pairing_ratio = 1.0;        // pairing / modified_energy, in [1, 4]
  double normalization_worst = 0.0;  // max over subtrees of sum|c|^2 * sum|I_T| / |I_T'|
};

/// Duality witness c_{P_j} = 2^{-n} (sum |I_T|)^{-1/2} a_{P_j} on the
/// extremizing collection; empty for the zero sequence.
std::optional<DualEnergyWitness> dual_energy_witness(
    const std::vector<TriTile>& universe, const CoefficientSequence& seq,
    const OrderConstants& c, const ModifiedEnergyOptions& opts = {});

/// Nonnegative piecewise-constant function given by disjoint pieces.
struct StepFunction {
  std::vector<std::pair<QInterval, double>> pieces;
};

/// Weak-L1 quasinorm sup_lambda lambda |{f > lambda} cap I|, exact over the
/// level set breakpoints.
double weak_l1(const StepFunction& f, const QInterval& window);

struct JnComparison {
  double lhs = 0.0;    // size_j
  double rhs = 0.0;    // sup over trees of |I_T|^{-1} || sqrt(sum ...) ||_{L^{1,inf}(I_T)}
  double ratio = 1.0;  // rhs / lhs, 1 by convention when both vanish
};

/// Both sides of the John-Nirenberg size characterization; a measured
/// comparison, not an exact assertion.
JnComparison jn_compare(const std::vector<TriTile>& universe,
                        const CoefficientSequence& seq, const OrderConstants& c);

}  // namespace biest
