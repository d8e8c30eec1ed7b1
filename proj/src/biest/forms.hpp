#pragma once

#include <random>

#include "biest/functionals.hpp"
#include "biest/packets.hpp"

namespace biest {

/// Exponent tuple alpha with sum 1, each entry < 1, at most one negative.
struct AdmissibleTuple {
  std::array<Rat, 4> alpha{Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)};

  bool valid() const;
  /// 1-based index of the negative entry, or 0 when none.
  int bad_index() const;
  double weighted_measure(const std::array<double, 4>& e_measures) const;
};

/// Extremal vertices A_1 .. A_12 of the restricted-type polytope.
std::array<Rat, 4> vertex_coordinates(int i);

struct VertexExponents {
  std::array<double, 3> theta_j{};
  double theta = 0.0;
  int pivot = 0;  // bad index used for the exceptional set
};

/// Exponent bookkeeping for tuples near a vertex; vertices whose bad index
/// is 2 or 3 reduce to the two reference cases by permuting the tuple.
/// Throws when some theta leaves (0,1).
VertexExponents exponents_for_vertex(const AdmissibleTuple& a, int vertex_id);

/// Finite union of dyadic intervals with its measure; the test sets E_j.
struct MeasurableSetSpec {
  DyadicUnion set;
  Rat measure() const { return set.measure(); }
};

struct ExceptionalSetResult {
  DyadicUnion omega;
  DyadicUnion major_subset;  // E_pivot minus omega
  Rat omega_measure;
  bool majority_ok = false;  // |omega| < |E_pivot| / 2
};

/// Union over j of the superlevel sets {M chi_{E_j} > C |E_j| / |E_pivot|},
/// and the major subset of the pivot set.
ExceptionalSetResult exceptional_set(const std::vector<MeasurableSetSpec>& e,
                                     int pivot, const Rat& c_big,
                                     int root_scale_exp);

/// Stratum index: unique k with 2^k <= 1 + dist(I_P, complement(Omega))/|I_P|
/// < 2^{k+1}, computed exactly.
int stratum_of(const TriTile& p, const DyadicUnion& omega);
std::vector<int> stratify_k(const std::vector<TriTile>& tiles,
                            const DyadicUnion& omega);

/// Model trilinear form over one rank-1 collection (function mode).
cplx lambda_bht(const std::vector<TriTile>& tiles, PacketCache& cache,
                const SampledFunction& f1, const SampledFunction& f2,
                const SampledFunction& f3);
/// Combinatorial mode: coefficients supplied directly.
cplx lambda_bht_coeffs(const std::vector<TriTile>& tiles,
                       const CoefficientSequence& a1,
                       const CoefficientSequence& a2,
                       const CoefficientSequence& a3);

/// B_{P2}(f2,f3) = sum over Q with omega_{Q3} inside omega_{P2} of
/// |I_Q|^{-1/2} <f2, phi_{Q1}> <f3, phi_{Q2}> phi_{Q3}.
SampledFunction b_p2(const Tile& p2, const std::vector<TriTile>& q_tiles,
                     PacketCache& q_cache, const SampledFunction& f2,
                     const SampledFunction& f3);

/// Rearranged coefficient a^(3)_{Q3} = sum over P with omega_{Q3} inside
/// omega_{P1} of |I_P|^{-1/2} <f3, phi_{P2}> <f4, phi_{P3}> <phi_{P1}, phi_{Q3}>.
cplx rightform_a3(const Tile& q3, const std::vector<TriTile>& p_tiles,
                  PacketCache& p_cache, PacketCache& q_cache,
                  const SampledFunction& f3, const SampledFunction& f4);

/// b^(1)_{P1} = sum over trees and Q in them with omega_{Q3} inside
/// omega_{P1} of <phi_{P1}, c_{Q3} phi_{Q3}>.
cplx rightform_b1(const Tile& p1, const TreeCollection& trees,
                  const std::vector<TriTile>& q_tiles,
                  const std::vector<cplx>& c_values, PacketCache& p_cache,
                  PacketCache& q_cache);

/// The quadrilinear model form, summed P-first; checks both collections
/// have rank 1.
cplx lambda_biest(const std::vector<TriTile>& p_tiles,
                  const std::vector<TriTile>& q_tiles, PacketCache& p_cache,
                  PacketCache& q_cache, const SampledFunction& f1,
                  const SampledFunction& f2, const SampledFunction& f3,
                  const SampledFunction& f4, const OrderConstants& c);

/// Same value summed Q-first through the rearranged coefficients; the
/// equality of the two is a pure summation-order identity.  An optional
/// subset restricts the outer Q sum (used for stratified contributions).
cplx lambda_biest_qform(const std::vector<TriTile>& p_tiles,
                        const std::vector<TriTile>& q_tiles,
                        PacketCache& p_cache, PacketCache& q_cache,
                        const SampledFunction& f1, const SampledFunction& f2,
                        const SampledFunction& f3, const SampledFunction& f4,
                        const std::vector<std::size_t>* q_subset = nullptr);

/// Uniform random unimodular values on the samples of E, zero outside:
/// a generic element of X(E).
SampledFunction sample_x_of_e(const DyadicUnion& e, const SampleGrid& grid,
                              std::mt19937_64& rng);

/// (1/|I|) * integral over E of the approximate cutoff of I raised to M,
/// by grid quadrature with the periodic distance.
double cutoff_mass_over_set(const DyadicUnion& e, const ShiftedInterval& time,
                            int m, const SampleGrid& grid);

struct ExperimentParams {
  int vertex = 2;
  AdmissibleTuple alpha;
  int instances = 30;
  std::uint64_t seed0 = 0;
  SampleGrid grid{Rat(64), 4096};
  OrderConstants constants = OrderConstants::desk();
  Rat exceptional_c = Rat(8);
  int root_scale_exp = 26;
  std::size_t p_count = 10, q_count = 10;
};

struct ExperimentInstance {
  std::uint64_t seed = 0;
  std::array<double, 4> e_measures{};
  double omega_measure = 0.0;
  bool majority_ok = true;
  double lambda_abs = 0.0;
  double ratio = 0.0;                // |Lambda| / |E|^alpha
  std::vector<double> stratum_abs;   // per-k |Lambda restricted to stratum|
};

struct ExperimentReport {
  ExperimentParams params;
  VertexExponents exponents;
  std::vector<ExperimentInstance> instances;
  double max_ratio = 0.0;
  std::vector<double> stratum_totals;  // aggregated over instances

  std::string to_json() const;
  std::string to_csv() const;
};

/// Restricted-weak-type experiment near a vertex: exceptional set, major
/// subset, random X(E') samples, form evaluation, ratio and stratum
/// bookkeeping.  Deterministic in (params, seeds).
ExperimentReport restricted_type_experiment(const ExperimentParams& params);

/// Three-linear variant near (1, 1/2, -1/2) with bad index 3.
struct BhtExperimentParams {
  std::array<Rat, 3> alpha{Rat(9, 10), Rat(1, 2), Rat(-2, 5)};
  int instances = 20;
  std::uint64_t seed0 = 0;
  SampleGrid grid{Rat(64), 4096};
  OrderConstants constants = OrderConstants::desk();
  Rat exceptional_c = Rat(8);
  int root_scale_exp = 26;
  std::size_t p_count = 12;
};

ExperimentReport bht_experiment(const BhtExperimentParams& params);

}  // namespace biest
