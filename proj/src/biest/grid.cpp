#include "biest/grid.hpp"

#include <algorithm>
#include <cmath>

namespace biest {

QInterval ShiftedInterval::interval() const {
  Rat step = Rat::pow2(j);
  Rat shift = (j % 2 == 0) ? shift_value(sigma) : -shift_value(sigma);
  Rat base = step * (Rat(k) + shift);
  return QInterval{base, base + step};
}

ShiftedInterval mesh_interval(int j, std::int64_t k, Shift sigma) {
  return ShiftedInterval{j, k, sigma};
}

ShiftedInterval dyadic_interval_containing(const Rat& x, int j) {
  Rat scaled = x / Rat::pow2(j);
  return dyadic_interval(j, scaled.floor());
}

ShiftedCube mesh_cube(int n, int j, const std::array<std::int64_t, 3>& k,
                      const std::array<Shift, 3>& sigma) {
  ShiftedCube q;
  q.n = n;
  for (int i = 0; i < n; ++i) q.axis[i] = mesh_interval(j, k[i], sigma[i]);
  return q;
}

Rat Box::max_side() const {
  Rat m = axis[0].length();
  for (int i = 1; i < n; ++i) m = biest::max(m, axis[i].length());
  return m;
}

bool Box::contains(const Box& o) const {
  for (int i = 0; i < n; ++i)
    if (!axis[i].contains(o.axis[i])) return false;
  return true;
}

Box cube_box(const ShiftedCube& q) {
  Box b;
  b.n = q.n;
  for (int i = 0; i < q.n; ++i) b.axis[i] = q.axis_interval(i);
  return b;
}

Box dilate_box(const Box& b, const Rat& c) {
  Box r;
  r.n = b.n;
  for (int i = 0; i < b.n; ++i) r.axis[i] = b.axis[i].dilate(c);
  return r;
}

ShiftedCube enclosing_shifted_cube(const Box& q) {
  const Rat side = q.max_side();
  const Rat limit = Rat(8) * side;
  // smallest j with 2^j >= side
  int j = 0;
  while (Rat::pow2(j) < side) ++j;
  while (Rat::pow2(j - 1) >= side) --j;
  static const Shift kShifts[3] = {Shift::zero, Shift::third, Shift::two_thirds};
  for (; Rat::pow2(j) <= limit; ++j) {
    const Rat step = Rat::pow2(j);
    // enumerate candidate shift vectors in lexicographic order
    int combos = 1;
    for (int i = 0; i < q.n; ++i) combos *= 3;
    for (int c = 0; c < combos; ++c) {
      std::array<Shift, 3> sig{Shift::zero, Shift::zero, Shift::zero};
      int cc = c;
      for (int i = 0; i < q.n; ++i) {
        sig[i] = kShifts[cc % 3];
        cc /= 3;
      }
      // per-axis candidate indices near the target; the 7/10 window is
      // narrower than the cube so at most a couple of k work per axis
      std::array<std::vector<std::int64_t>, 3> ks;
      bool axis_ok = true;
      for (int i = 0; i < q.n && axis_ok; ++i) {
        Rat sh = (j % 2 == 0) ? shift_value(sig[i]) : -shift_value(sig[i]);
        std::int64_t k0 = (q.axis[i].lo / step - sh).floor();
        for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
          ShiftedInterval cand{j, k, sig[i]};
          if (cand.interval().dilate(Rat(7, 10)).contains(q.axis[i]))
            ks[i].push_back(k);
        }
        if (ks[i].empty()) axis_ok = false;
      }
      if (!axis_ok) continue;
      std::array<std::int64_t, 3> kk{0, 0, 0};
      for (int i = 0; i < q.n; ++i) kk[i] = ks[i][0];
      return mesh_cube(q.n, j, kk, sig);
    }
  }
  throw std::runtime_error("enclosing_shifted_cube: no cube found (unexpected)");
}

bool is_sparse_pair(const ShiftedCube& a, const ShiftedCube& b, const Rat& factor) {
  const Rat sa = a.side(), sb = b.side();
  if (sa == sb) {
    if (a == b) return true;
    Box da = dilate_box(cube_box(a), factor);
    Box db = dilate_box(cube_box(b), factor);
    for (int i = 0; i < a.n; ++i)
      if (!da.axis[i].intersects(db.axis[i])) return true;
    return false;
  }
  const Rat& lo = sa < sb ? sa : sb;
  const Rat& hi = sa < sb ? sb : sa;
  return factor * lo < hi;
}

bool is_sparse(const std::vector<ShiftedCube>& cubes, const Rat& factor) {
  for (size_t i = 0; i < cubes.size(); ++i)
    for (size_t j = i + 1; j < cubes.size(); ++j)
      if (!is_sparse_pair(cubes[i], cubes[j], factor)) return false;
  return true;
}

SparseSplitResult sparse_split(const std::vector<ShiftedCube>& cubes,
                               const Rat& factor) {
  std::vector<size_t> order(cubes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (cubes[a].scale_exp() != cubes[b].scale_exp())
      return cubes[a].scale_exp() > cubes[b].scale_exp();
    for (int i = 0; i < cubes[a].n; ++i)
      if (cubes[a].axis[i].k != cubes[b].axis[i].k)
        return cubes[a].axis[i].k < cubes[b].axis[i].k;
    return a < b;
  });

  SparseSplitResult result;
  for (size_t idx : order) {
    bool placed = false;
    for (auto& part : result.parts) {
      bool ok = true;
      for (const auto& q : part)
        if (!is_sparse_pair(q, cubes[idx], factor)) {
          ok = false;
          break;
        }
      if (ok) {
        part.push_back(cubes[idx]);
        placed = true;
        break;
      }
    }
    if (!placed) result.parts.push_back({cubes[idx]});
  }
  return result;
}

namespace {

// Sorted-disjoint normalization: splits nothing, assumes inputs are dyadic
// intervals; overlapping dyadic intervals are nested, keep the larger.
std::vector<ShiftedInterval> normalize_pieces(std::vector<ShiftedInterval> v) {
  std::sort(v.begin(), v.end(), [](const ShiftedInterval& a, const ShiftedInterval& b) {
    if (a.lo() != b.lo()) return a.lo() < b.lo();
    return a.j > b.j;  // larger first so nested pieces drop out below
  });
  std::vector<ShiftedInterval> out;
  for (const auto& p : v) {
    if (!out.empty()) {
      QInterval last = out.back().interval();
      QInterval cur = p.interval();
      if (last.contains(cur)) continue;
      if (last.intersects(cur))
        throw std::invalid_argument("DyadicUnion: non-nested overlap");
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

DyadicUnion::DyadicUnion(std::vector<ShiftedInterval> pieces)
    : pieces_(normalize_pieces(std::move(pieces))) {
  for (const auto& p : pieces_)
    if (p.sigma != Shift::zero)
      throw std::invalid_argument("DyadicUnion: pieces must be plain dyadic");
}

Rat DyadicUnion::measure() const {
  Rat m(0);
  for (const auto& p : pieces_) m += p.length();
  return m;
}

bool DyadicUnion::contains_point(const Rat& x) const {
  for (const auto& p : pieces_)
    if (p.interval().contains(x)) return true;
  return false;
}

Rat DyadicUnion::measure_within(const ShiftedInterval& I) const {
  QInterval w = I.interval();
  Rat m(0);
  for (const auto& p : pieces_) {
    QInterval q = p.interval();
    Rat lo = biest::max(q.lo, w.lo), hi = biest::min(q.hi, w.hi);
    if (lo < hi) m += hi - lo;
  }
  return m;
}

int DyadicUnion::finest_scale() const {
  int f = 0;
  for (const auto& p : pieces_) f = std::min(f, p.j);
  return f;
}

DyadicUnion DyadicUnion::set_minus(const DyadicUnion& other) const {
  // refine each piece to the finer of the two granularities, then drop
  // covered cells
  int g = std::min(finest_scale(), other.finest_scale());
  std::vector<ShiftedInterval> out;
  for (const auto& p : pieces_) {
    std::int64_t cells = std::int64_t(1) << (p.j - g);
    std::int64_t base = p.k * cells;
    for (std::int64_t c = 0; c < cells; ++c) {
      ShiftedInterval cell = dyadic_interval(g, base + c);
      if (!other.contains_point(cell.center())) out.push_back(cell);
    }
  }
  return DyadicUnion(out);
}

DyadicUnion DyadicUnion::union_of(const DyadicUnion& a, const DyadicUnion& b) {
  std::vector<ShiftedInterval> v = a.pieces_;
  for (const auto& p : b.pieces_) {
    bool covered = false;
    for (const auto& q : a.pieces_)
      if (q.interval().contains(p.interval())) {
        covered = true;
        break;
      }
    if (!covered) v.push_back(p);
  }
  // drop a-pieces nested inside b-pieces, then normalize
  std::vector<ShiftedInterval> w;
  for (const auto& p : v) {
    bool strictly_inside = false;
    for (const auto& q : v)
      if (q.j > p.j && q.interval().contains(p.interval())) {
        strictly_inside = true;
        break;
      }
    if (!strictly_inside) w.push_back(p);
  }
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return DyadicUnion(w);
}

Rat dyadic_maximal(const DyadicUnion& e, const Rat& x, int root_scale_exp) {
  if (e.empty()) return Rat(0);
  Rat best(0);
  for (int j = e.finest_scale(); j <= root_scale_exp; ++j) {
    ShiftedInterval I = dyadic_interval_containing(x, j);
    Rat avg = e.measure_within(I) / I.length();
    best = biest::max(best, avg);
  }
  return best;
}

namespace {

void superlevel_descend(const DyadicUnion& e, const Rat& lambda,
                        const ShiftedInterval& I, int floor_scale,
                        std::vector<ShiftedInterval>& out) {
  Rat mass = e.measure_within(I);
  if (mass.is_zero()) return;
  if (mass > lambda * I.length()) {
    out.push_back(I);
    return;
  }
  if (I.j <= floor_scale) return;
  superlevel_descend(e, lambda, dyadic_interval(I.j - 1, 2 * I.k), floor_scale, out);
  superlevel_descend(e, lambda, dyadic_interval(I.j - 1, 2 * I.k + 1), floor_scale, out);
}

}  // namespace

DyadicUnion maximal_superlevel(const DyadicUnion& e, const Rat& lambda,
                               int root_scale_exp) {
  if (e.empty() || lambda.is_negative()) return e.empty() ? DyadicUnion{} : e;
  std::vector<ShiftedInterval> out;
  // all mass lives under finitely many root-scale cells
  Rat lo = e.pieces().front().lo();
  Rat hi = e.pieces().back().hi();
  std::int64_t k0 = (lo / Rat::pow2(root_scale_exp)).floor();
  std::int64_t k1 = ((hi / Rat::pow2(root_scale_exp))).floor();
  for (std::int64_t k = k0; k <= k1; ++k)
    superlevel_descend(e, lambda, dyadic_interval(root_scale_exp, k),
                       e.finest_scale(), out);
  return DyadicUnion(out);
}

double cutoff_value(const ApproxCutoff& c, double x, int m) {
  double t = (x - c.center) / c.width;
  return std::pow(1.0 + t * t, -0.5 * m);
}

double cutoff_value_periodic(const ApproxCutoff& c, double x, int m, double period) {
  double d = std::fabs(x - c.center);
  d = std::min(d, period - d);
  double t = d / c.width;
  return std::pow(1.0 + t * t, -0.5 * m);
}

}  // namespace biest
