#pragma once

#include <functional>
#include <unordered_map>

#include "biest/grid.hpp"
#include "biest/sampled.hpp"

namespace biest {

/// Singular sets of the two cone symbols, intersected with the plane
/// xi1 + xi2 + xi3 = 0: lines through the origin.
enum class SingularLine {
  two_xi1_eq_xi2,  // {2 xi1 = xi2} cap plane, direction (1, 2, -3)
  xi1_eq_xi2,      // {xi1 = xi2} cap plane, direction (1, 1, -2)
};

std::array<Rat, 3> line_direction(SingularLine l);

struct WhitneyConstants {
  Rat c_lo = Rat(4);
  Rat c_hi = Rat(16);

  static WhitneyConstants paper() { return {Rat(1000), Rat(100000)}; }
  static WhitneyConstants desk() { return {Rat(4), Rat(16)}; }
};

/// Squared Euclidean distance from a point / closed cube to the line.
Rat dist2_point_line(const std::array<Rat, 3>& p, SingularLine l);
Rat dist2_cube_line(const ShiftedCube& q, SingularLine l);

bool cube_meets_plane(const ShiftedCube& q);

/// Some point of the closed cube on the plane (requires cube_meets_plane).
std::array<Rat, 3> plane_point_in_cube(const ShiftedCube& q);

/// Sandwich test c_lo * diam <= dist <= c_hi * diam, exact on squares.
bool sandwich_ok(const ShiftedCube& q, SingularLine l, const WhitneyConstants& c);

/// Which side of the singular plane the cube's plane slice lies on: +1 for
/// the indicator-one side (2 xi1 < xi2 resp. xi1 < xi2), -1 otherwise.
int cube_side(const ShiftedCube& q, SingularLine l);

struct WhitneyCover {
  SingularLine line = SingularLine::two_xi1_eq_xi2;
  std::array<Shift, 3> sigma{};
  WhitneyConstants constants;
  std::vector<ShiftedCube> cubes;
  std::vector<int> side;                            // parallel to cubes
  std::vector<std::vector<std::size_t>> rank1_parts;  // refinement classes
};

/// All cubes of D^3_sigma meeting the request box and the plane and obeying
/// the sandwich, split into cube-rank-1 parts.  Scale range is derived from
/// the box unless pinned; a box touching the singular line needs an explicit
/// floor (the Whitney family is infinite toward the line).
struct WhitneyCoverRequest {
  Box box;
  std::optional<int> min_scale_exp;
  std::optional<int> max_scale_exp;
};

WhitneyCover whitney_cover(const std::array<Shift, 3>& sigma,
                           const WhitneyCoverRequest& req,
                           const WhitneyConstants& c, SingularLine line);

/// Cube rank-1 predicate (pairwise clauses with configurable dilations);
/// scale-separation hypothesis read as c_scale * side(Q') < side(Q).
struct CubeRankConstants {
  std::int64_t c_order = 3;
  std::int64_t c_lesssim = 8;
  std::int64_t c_scale = 16;
};

bool cube_pair_rank1_ok(const ShiftedCube& a, const ShiftedCube& b,
                        const CubeRankConstants& c);
bool cube_collection_rank1(const std::vector<ShiftedCube>& cubes,
                           const CubeRankConstants& c);

/// Tensor partition piece profile on the unit period: a smoothstep
/// difference with step 1/3, support inside [1/10, 9/10].  Translates at
/// steps of 1/3 sum to one exactly, which is what makes the 27-shift
/// single-scale cover an exact partition of unity.  The step structure
/// kills every harmonic at a multiple of three, and the chosen transition
/// width keeps the remaining coefficient ladder strictly decreasing so
/// truncation error falls monotonically in K.
struct AxisProfile {
  double window = 0.25;  // transition width
  double anchor = 0.2;   // support starts here
  double value(double t) const;
};

struct SymbolSeries {
  SingularLine line = SingularLine::two_xi1_eq_xi2;
  int truncation = 5;  // K
  int scale_exp = -6;
  AxisProfile profile;
  std::vector<cplx> axis_coeffs;  // 1-D profile coefficients, k in [-K_store, K_store]
  int coeff_halfwidth = 0;        // K_store >= truncation

  struct Term {
    std::array<Rat, 3> lo;  // cube corner (mesh position) per axis
    std::array<std::int64_t, 3> lattice{};  // lo / (side/3), always integral
    int side = 1;
  };
  std::vector<Term> terms;
  /// lattice key -> term index, for O(1) point location
  std::unordered_map<std::uint64_t, std::size_t> lattice_index;
  static std::uint64_t lattice_key(const std::array<std::int64_t, 3>& l);

  double side_len = 0.0;          // 2^scale_exp
  double valid_dist_lo = 0.0;     // probes accepted in [lo, hi]
  double valid_dist_hi = 0.0;

  std::vector<double> ck_shell_max;  // max |c_k| per |k|_inf shell
};

struct FourierSplitOptions {
  int profile_grid = 1 << 13;  // 1-D DFT resolution for the piece profile
  int store_halfwidth = 16;    // coefficients kept beyond the truncation
};

/// Fourier-series split of the covers' partition pieces; the covers must
/// share one scale and one singular line and jointly range over all 27
/// shift vectors.
SymbolSeries fourier_split(const std::vector<WhitneyCover>& covers, int k_trunc,
                           const FourierSplitOptions& opt = {});

/// Partial-sum reconstruction of the half-plane indicator at a plane point;
/// throws if the point is outside the series' validity annulus.
double reconstruct_chi(const SymbolSeries& s, const std::array<double, 3>& xi,
                       int k_trunc /* <= s.coeff_halfwidth */);

/// Exact partition value at a plane point (untruncated pieces), used to
/// separate truncation error from coverage defects in tests.
double exact_partition_value(const SymbolSeries& s, const std::array<double, 3>& xi);

struct MPrimeEvaluator {
  const SymbolSeries* chi_cone = nullptr;   // line 2xi1=xi2, args (x1, x2+x3, x4)
  const SymbolSeries* chi_inner = nullptr;  // line xi1=xi2, args (x2, x3, x1+x4)
  int k_trunc = 5;
  double side_a = 0.0, side_b = 0.0;  // cube side lengths of the two series

  mutable long constraint_skipped = 0;  // nonzero-product pairs failing -Q'_3 in Q_2

  double eval(double x1, double x2, double x3, double x4) const;
};

/// The two-cover multiplier with the pair constraint -Q'_3 inside Q_2
/// enforced term by term.
MPrimeEvaluator build_mprime(const SymbolSeries& cone_series,
                             const SymbolSeries& inner_series, int k_trunc);

}  // namespace biest
