#pragma once

#include <array>
#include <optional>
#include <vector>

#include "biest/rational.hpp"

namespace biest {

/// Shift sigma in {0, 1/3, 2/3}, stored as the numerator over 3.
enum class Shift : int { zero = 0, third = 1, two_thirds = 2 };

inline Rat shift_value(Shift s) { return Rat(int(s), 3); }

/// Member of a shifted dyadic mesh D^1_sigma: the half-open interval
/// 2^j (k + (0,1) + (-1)^j sigma).  Exact endpoints, value identity by
/// (j, k, sigma).
struct ShiftedInterval {
  int j = 0;
  std::int64_t k = 0;
  Shift sigma = Shift::zero;

  QInterval interval() const;
  Rat lo() const { return interval().lo; }
  Rat hi() const { return interval().hi; }
  Rat length() const { return Rat::pow2(j); }
  Rat center() const { return interval().center(); }

  friend bool operator==(const ShiftedInterval& a, const ShiftedInterval& b) {
    return a.j == b.j && a.k == b.k && a.sigma == b.sigma;
  }
  friend auto operator<=>(const ShiftedInterval&, const ShiftedInterval&) = default;
};

ShiftedInterval mesh_interval(int j, std::int64_t k, Shift sigma);

/// Plain dyadic interval 2^j [k, k+1) (the sigma = 0 mesh).
inline ShiftedInterval dyadic_interval(int j, std::int64_t k) {
  return mesh_interval(j, k, Shift::zero);
}

/// The dyadic interval of scale 2^j containing x.
ShiftedInterval dyadic_interval_containing(const Rat& x, int j);

/// Shifted n-dyadic cube, n in {1,2,3}: per-axis intervals sharing one scale
/// exponent, per-axis shifts.
struct ShiftedCube {
  int n = 1;
  std::array<ShiftedInterval, 3> axis{};  // axis[0..n)

  int scale_exp() const { return axis[0].j; }
  Rat side() const { return Rat::pow2(axis[0].j); }
  QInterval axis_interval(int i) const { return axis[i].interval(); }

  friend bool operator==(const ShiftedCube& a, const ShiftedCube& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (!(a.axis[i] == b.axis[i])) return false;
    return true;
  }
};

ShiftedCube mesh_cube(int n, int j, const std::array<std::int64_t, 3>& k,
                      const std::array<Shift, 3>& sigma);

/// Axis-aligned box with rational endpoints (all axes half-open).
struct Box {
  int n = 1;
  std::array<QInterval, 3> axis{};

  Rat max_side() const;
  bool contains(const Box& o) const;
};

Box cube_box(const ShiftedCube& q);
Box dilate_box(const Box& b, const Rat& c);

/// Smallest-scale shifted dyadic cube Q' with Q inside (7/10)Q'.  Exhaustive
/// over shifts and scales with side(Q') <= 8 * max_side(Q); existence is a
/// property of the shifted meshes.
ShiftedCube enclosing_shifted_cube(const Box& q);

struct SparseSplitResult {
  std::vector<std::vector<ShiftedCube>> parts;
};

/// Greedy split of a mesh subset into sparse parts: within a part, cubes of
/// distinct size have side ratio > factor and equal-size cubes have disjoint
/// factor-dilates.
SparseSplitResult sparse_split(const std::vector<ShiftedCube>& cubes,
                               const Rat& factor);

/// Pairwise sparseness test, exactly as the mesh definition states.
bool is_sparse_pair(const ShiftedCube& a, const ShiftedCube& b, const Rat& factor);
bool is_sparse(const std::vector<ShiftedCube>& cubes, const Rat& factor);

/// Finite union of plain dyadic intervals, kept normalized (disjoint, sorted,
/// maximal dyadic pieces are NOT merged across scales; pieces are disjoint).
class DyadicUnion {
 public:
  DyadicUnion() = default;
  explicit DyadicUnion(std::vector<ShiftedInterval> pieces);

  const std::vector<ShiftedInterval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  Rat measure() const;
  bool contains_point(const Rat& x) const;

  /// |E intersect I| for a dyadic interval I, exact.
  Rat measure_within(const ShiftedInterval& I) const;

  /// Finest scale exponent appearing in the representation (0 if empty).
  int finest_scale() const;

  DyadicUnion set_minus(const DyadicUnion& other) const;
  static DyadicUnion union_of(const DyadicUnion& a, const DyadicUnion& b);

 private:
  std::vector<ShiftedInterval> pieces_;  // disjoint, sorted by lo
};

/// Dyadic Hardy-Littlewood maximal function of chi_E at x: sup over dyadic
/// intervals containing x, scales up to root_scale_exp, of |E cap I| / |I|.
Rat dyadic_maximal(const DyadicUnion& e, const Rat& x, int root_scale_exp);

/// Superlevel set {M chi_E > lambda} as a union of maximal dyadic intervals
/// with average strictly above lambda, searched below root_scale_exp.
DyadicUnion maximal_superlevel(const DyadicUnion& e, const Rat& lambda,
                               int root_scale_exp);

/// Approximate cutoff (1 + ((x-c)/w)^2)^(-1/2), raised to the power M.
struct ApproxCutoff {
  double center = 0.0;
  double width = 1.0;
};

double cutoff_value(const ApproxCutoff& c, double x, int m);

/// Same cutoff with distance measured on a circle of circumference period.
double cutoff_value_periodic(const ApproxCutoff& c, double x, int m, double period);

}  // namespace biest
