#include "biest/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "biest/packets.hpp"

namespace biest {

std::array<Rat, 3> line_direction(SingularLine l) {
  if (l == SingularLine::two_xi1_eq_xi2) return {Rat(1), Rat(2), Rat(-3)};
  return {Rat(1), Rat(1), Rat(-2)};
}

Rat dist2_point_line(const std::array<Rat, 3>& p, SingularLine l) {
  auto v = line_direction(l);
  Rat pp(0), pv(0), vv(0);
  for (int i = 0; i < 3; ++i) {
    pp += p[i] * p[i];
    pv += p[i] * v[i];
    vv += v[i] * v[i];
  }
  return pp - pv * pv / vv;
}

namespace {

struct AxisRange {
  Rat lo, hi;
};

bool line_meets_box(const std::array<AxisRange, 3>& b, const std::array<Rat, 3>& v) {
  // t v_i in [lo_i, hi_i] for all i; all our directions have nonzero entries
  Rat t_lo = b[0].lo / v[0], t_hi = b[0].hi / v[0];
  if (t_hi < t_lo) std::swap(t_lo, t_hi);
  for (int i = 1; i < 3; ++i) {
    Rat a = b[i].lo / v[i], c = b[i].hi / v[i];
    if (c < a) std::swap(a, c);
    t_lo = max(t_lo, a);
    t_hi = min(t_hi, c);
  }
  return !(t_hi < t_lo);
}

Rat dist2_box_line(const std::array<AxisRange, 3>& b, SingularLine l) {
  auto v = line_direction(l);
  if (line_meets_box(b, v)) return Rat(0);
  Rat vv(0);
  for (int i = 0; i < 3; ++i) vv += v[i] * v[i];

  std::optional<Rat> best;
  // each axis: 0 = free (p_i = t v_i), 1 = at lo, 2 = at hi
  for (int mask = 1; mask < 27; ++mask) {
    int code = mask;
    std::array<int, 3> mode{};
    for (int i = 0; i < 3; ++i) {
      mode[i] = code % 3;
      code /= 3;
    }
    Rat num(0), den(0);
    for (int i = 0; i < 3; ++i) {
      if (mode[i] == 0) continue;
      Rat pi = mode[i] == 1 ? b[i].lo : b[i].hi;
      num += v[i] * pi;
      den += v[i] * v[i];
    }
    if (den.is_zero()) continue;  // all free handled by the intersection test
    Rat t = num / den;
    bool feasible = true;
    std::array<Rat, 3> p{};
    for (int i = 0; i < 3; ++i) {
      if (mode[i] == 0) {
        p[i] = t * v[i];
        if (p[i] < b[i].lo || b[i].hi < p[i]) {
          feasible = false;
          break;
        }
      } else {
        p[i] = mode[i] == 1 ? b[i].lo : b[i].hi;
      }
    }
    if (!feasible) continue;
    Rat d2(0);
    for (int i = 0; i < 3; ++i) {
      Rat diff = p[i] - t * v[i];
      d2 += diff * diff;
    }
    if (!best || d2 < *best) best = d2;
  }
  if (!best) throw std::logic_error("dist2_box_line: no feasible KKT case");
  return *best;
}

std::array<AxisRange, 3> cube_ranges(const ShiftedCube& q) {
  std::array<AxisRange, 3> b;
  for (int i = 0; i < 3; ++i) {
    QInterval iv = q.axis_interval(i);
    b[i] = AxisRange{iv.lo, iv.hi};
  }
  return b;
}

// All-integer box-to-line squared distance for boxes whose corners are
// integers (coordinates in units of side/3).  Returns (num, den) with
// dist^2 = num / den; den > 0.  Exact, no gcd anywhere.
struct IntFrac {
  __int128 num;
  __int128 den;
};

IntFrac dist2_box_line_int(const std::array<std::int64_t, 3>& lo,
                           const std::array<std::int64_t, 3>& hi,
                           const std::array<int, 3>& v) {
  // line-box intersection, exact: t*v_i in [lo_i, hi_i]; v_i nonzero.
  // t-bounds kept as fractions num/den with den = |v_i| > 0
  {
    __int128 lo_num = 0, hi_num = 0;
    std::int64_t lo_den = 1, hi_den = 1;
    bool first = true;
    bool empty = false;
    for (int i = 0; i < 3; ++i) {
      std::int64_t av = std::llabs(std::int64_t(v[i]));
      __int128 a = v[i] > 0 ? lo[i] : -hi[i];
      __int128 b = v[i] > 0 ? hi[i] : -lo[i];
      if (first) {
        lo_num = a;
        hi_num = b;
        lo_den = hi_den = av;
        first = false;
        continue;
      }
      if (a * lo_den > lo_num * av) {
        lo_num = a;
        lo_den = av;
      }
      if (b * hi_den < hi_num * av) {
        hi_num = b;
        hi_den = av;
      }
    }
    if (lo_num * hi_den > hi_num * lo_den) empty = true;
    if (!empty) return {0, 1};
  }
  bool have = false;
  IntFrac best{0, 1};
  auto less_than = [](const IntFrac& a, const IntFrac& b) {
    return a.num * b.den < b.num * a.den;
  };
  for (int mask = 1; mask < 27; ++mask) {
    int code = mask;
    std::array<int, 3> mode{};
    for (int i = 0; i < 3; ++i) {
      mode[i] = code % 3;
      code /= 3;
    }
    __int128 num = 0, den = 0;
    for (int i = 0; i < 3; ++i) {
      if (mode[i] == 0) continue;
      __int128 pi = mode[i] == 1 ? lo[i] : hi[i];
      num += __int128(v[i]) * pi;
      den += __int128(v[i]) * v[i];
    }
    if (den == 0) continue;
    // free coords p_i = t v_i with t = num/den; feasibility in [lo, hi]
    bool feasible = true;
    __int128 d2num = 0;
    for (int i = 0; i < 3; ++i) {
      if (mode[i] == 0) {
        __int128 p_scaled = num * v[i];  // p_i * den
        if (p_scaled < __int128(lo[i]) * den || p_scaled > __int128(hi[i]) * den) {
          feasible = false;
          break;
        }
      } else {
        __int128 pi = mode[i] == 1 ? lo[i] : hi[i];
        __int128 diff = pi * den - num * v[i];  // (p_i - t v_i) * den
        d2num += diff * diff;
      }
    }
    if (!feasible) continue;
    IntFrac cand{d2num, den * den};
    if (!have || less_than(cand, best)) {
      best = cand;
      have = true;
    }
  }
  return best;
}

}  // namespace

Rat dist2_cube_line(const ShiftedCube& q, SingularLine l) {
  return dist2_box_line(cube_ranges(q), l);
}

bool cube_meets_plane(const ShiftedCube& q) {
  Rat lo(0), hi(0);
  for (int i = 0; i < 3; ++i) {
    QInterval iv = q.axis_interval(i);
    lo += iv.lo;
    hi += iv.hi;
  }
  return !(Rat(0) < lo) && !(hi < Rat(0));
}

std::array<Rat, 3> plane_point_in_cube(const ShiftedCube& q) {
  std::array<Rat, 3> p;
  Rat budget(0);
  for (int i = 0; i < 3; ++i) {
    p[i] = q.axis_interval(i).lo;
    budget -= p[i];
  }
  // raise coordinates until the sum reaches zero
  for (int i = 0; i < 3; ++i) {
    Rat room = q.axis_interval(i).length();
    Rat step = min(room, budget);
    if (step.is_negative()) step = Rat(0);
    p[i] += step;
    budget -= step;
  }
  if (!budget.is_zero())
    throw std::invalid_argument("plane_point_in_cube: cube misses the plane");
  return p;
}

bool sandwich_ok(const ShiftedCube& q, SingularLine l, const WhitneyConstants& c) {
  Rat d2 = dist2_cube_line(q, l);
  Rat diam2 = Rat(3) * q.side() * q.side();
  return !(d2 < c.c_lo * c.c_lo * diam2) && !(c.c_hi * c.c_hi * diam2 < d2);
}

int cube_side(const ShiftedCube& q, SingularLine l) {
  auto p = plane_point_in_cube(q);
  Rat s = (l == SingularLine::two_xi1_eq_xi2) ? Rat(2) * p[0] - p[1] : p[0] - p[1];
  if (s.is_zero())
    throw std::logic_error("cube_side: slice touches the singular line");
  return s.is_negative() ? +1 : -1;
}

bool cube_pair_rank1_ok(const ShiftedCube& a, const ShiftedCube& b,
                        const CubeRankConstants& c) {
  if (a == b) return true;
  // clause 1: disjoint
  bool disjoint = false;
  for (int i = 0; i < 3; ++i)
    if (!a.axis_interval(i).intersects(b.axis_interval(i))) disjoint = true;
  if (!disjoint) return false;
  // clause 2: no shared axis interval
  for (int i = 0; i < 3; ++i)
    if (a.axis[i] == b.axis[i]) return false;
  // clauses 3 and 4, both orientations
  for (int dir = 0; dir < 2; ++dir) {
    const ShiftedCube& qp = dir == 0 ? a : b;  // Q'
    const ShiftedCube& qq = dir == 0 ? b : a;  // Q
    int j_nested = 0;
    for (int i = 0; i < 3; ++i) {
      QInterval three_p = qp.axis_interval(i).dilate(Rat(c.c_order));
      QInterval three_q = qq.axis_interval(i).dilate(Rat(c.c_order));
      if (three_q.contains(three_p) && !(three_p == three_q)) {
        j_nested = i + 1;
        break;
      }
    }
    if (j_nested == 0) continue;
    for (int i = 0; i < 3; ++i) {
      QInterval lp = qp.axis_interval(i).dilate(Rat(c.c_lesssim));
      QInterval lq = qq.axis_interval(i).dilate(Rat(c.c_lesssim));
      if (!lq.contains(lp)) return false;
    }
    if (Rat(c.c_scale) * qp.side() < qq.side()) {
      for (int i = 0; i < 3; ++i) {
        if (i + 1 == j_nested) continue;
        QInterval tp = qp.axis_interval(i).dilate(Rat(c.c_order));
        QInterval tq = qq.axis_interval(i).dilate(Rat(c.c_order));
        if (tp.intersects(tq)) return false;
      }
    }
  }
  return true;
}

bool cube_collection_rank1(const std::vector<ShiftedCube>& cubes,
                           const CubeRankConstants& c) {
  for (std::size_t i = 0; i < cubes.size(); ++i)
    for (std::size_t j = i + 1; j < cubes.size(); ++j)
      if (!cube_pair_rank1_ok(cubes[i], cubes[j], c)) return false;
  return true;
}

WhitneyCover whitney_cover(const std::array<Shift, 3>& sigma,
                           const WhitneyCoverRequest& req,
                           const WhitneyConstants& c, SingularLine line) {
  WhitneyCover cover;
  cover.line = line;
  cover.sigma = sigma;
  cover.constants = c;

  std::array<AxisRange, 3> box;
  for (int i = 0; i < 3; ++i) box[i] = AxisRange{req.box.axis[i].lo, req.box.axis[i].hi};
  const double sqrt3 = std::sqrt(3.0);
  const double c_lo = c.c_lo.to_double(), c_hi = c.c_hi.to_double();

  int j_min;
  if (req.min_scale_exp) {
    j_min = *req.min_scale_exp;
  } else {
    Rat d2 = dist2_box_line(box, line);
    if (d2.is_zero())
      throw std::invalid_argument(
          "whitney_cover: box touches the singular line; pin min_scale_exp");
    double d = std::sqrt(d2.to_double());
    j_min = int(std::floor(std::log2(d / (sqrt3 * (c_hi + 1.0))))) - 1;
  }
  int j_max;
  {
    double dmax = 0.0;
    for (int m = 0; m < 8; ++m) {
      std::array<Rat, 3> corner;
      for (int i = 0; i < 3; ++i)
        corner[i] = (m >> i) & 1 ? box[i].hi : box[i].lo;
      dmax = std::max(dmax, std::sqrt(dist2_point_line(corner, line).to_double()));
    }
    if (c_lo <= 1.0)
      throw std::invalid_argument("whitney_cover: c_lo must exceed 1");
    j_max = int(std::ceil(std::log2(dmax / (sqrt3 * (c_lo - 1.0))))) + 1;
    if (req.max_scale_exp) j_max = std::min(j_max, *req.max_scale_exp);
  }

  auto v = line_direction(line);

  for (int j = j_min; j <= j_max; ++j) {
    const Rat s = Rat::pow2(j);
    std::array<std::int64_t, 3> k_lo{}, k_hi{};
    std::array<std::int64_t, 3> shift3{};  // 3 * shift, an integer in [-2, 2]
    for (int i = 0; i < 3; ++i) {
      Rat shift = (j % 2 == 0) ? shift_value(sigma[i]) : -shift_value(sigma[i]);
      k_lo[i] = (box[i].lo / s - shift).floor() - 1;
      k_hi[i] = (box[i].hi / s - shift).floor() + 1;
      shift3[i] = (shift * Rat(3)).num();
    }
    // box bounds in units of s/3 as exact fractions num/den
    const Rat third = s / Rat(3);
    std::array<std::pair<std::int64_t, std::int64_t>, 3> boxu_lo, boxu_hi;
    for (int i = 0; i < 3; ++i) {
      Rat lo_scaled = box[i].lo / third;
      Rat hi_scaled = box[i].hi / third;
      boxu_lo[i] = {lo_scaled.num(), lo_scaled.den()};
      boxu_hi[i] = {hi_scaled.num(), hi_scaled.den()};
    }
    std::array<int, 3> vi{};
    for (int i = 0; i < 3; ++i) vi[i] = int(v[i].num());
    const bool integral_constants = c.c_lo.is_integer() && c.c_hi.is_integer();
    const __int128 lo2 = __int128(c.c_lo.num()) * c.c_lo.num() * 27;
    const __int128 hi2 = __int128(c.c_hi.num()) * c.c_hi.num() * 27;

    for (std::int64_t k1 = k_lo[0]; k1 <= k_hi[0]; ++k1) {
      for (std::int64_t k2 = k_lo[1]; k2 <= k_hi[1]; ++k2) {
        // plane passage: sum of corner coordinates must straddle zero, i.e.
        // base + 3 k3 in [-9, 0]
        const std::int64_t base = 3 * (k1 + k2) + shift3[0] + shift3[1];
        for (std::int64_t k3 = k_lo[2]; k3 <= k_hi[2]; ++k3) {
          const std::int64_t plane = base + 3 * k3 + shift3[2];
          if (plane > 0 || plane < -9) continue;
          std::array<std::int64_t, 3> lo_u{3 * k1 + shift3[0], 3 * k2 + shift3[1],
                                           3 * k3 + shift3[2]};
          std::array<std::int64_t, 3> hi_u{lo_u[0] + 3, lo_u[1] + 3, lo_u[2] + 3};
          // exact box intersection: lo_u < box_hi and lo_u + 3 > box_lo
          bool in_box = true;
          for (int i = 0; i < 3 && in_box; ++i) {
            if (!(__int128(lo_u[i]) * boxu_hi[i].second < boxu_hi[i].first))
              in_box = false;
            if (!(__int128(hi_u[i]) * boxu_lo[i].second > boxu_lo[i].first))
              in_box = false;
          }
          if (!in_box) continue;
          ShiftedCube q = mesh_cube(3, j, {k1, k2, k3}, sigma);
          if (integral_constants) {
            IntFrac d2 = dist2_box_line_int(lo_u, hi_u, vi);
            if (d2.num < lo2 * d2.den || d2.num > hi2 * d2.den) continue;
          } else {
            if (!sandwich_ok(q, line, c)) continue;
          }
          // side of the slice: sign at an on-plane point of the closed cube
          std::array<std::int64_t, 3> p = lo_u;
          std::int64_t budget = -(lo_u[0] + lo_u[1] + lo_u[2]);
          for (int i = 0; i < 3; ++i) {
            std::int64_t step = std::min<std::int64_t>(3, budget);
            if (step < 0) step = 0;
            p[i] += step;
            budget -= step;
          }
          std::int64_t sgn = (line == SingularLine::two_xi1_eq_xi2)
                                 ? 2 * p[0] - p[1]
                                 : p[0] - p[1];
          cover.cubes.push_back(q);
          cover.side.push_back(sgn < 0 ? +1 : -1);
        }
      }
    }
  }

  // rank-1 refinement: same-scale cubes of one mesh are disjoint, so the
  // binding clause is the shared-axis one; cross-scale pairs fall back to
  // the full pairwise predicate
  CubeRankConstants rank_c;
  std::set<int> scales;
  for (const auto& q : cover.cubes) scales.insert(q.scale_exp());
  if (scales.size() <= 1) {
    // first-fit coloring with per-axis occupancy maps: classes sharing an
    // axis index with the cube are blocked
    std::array<std::unordered_map<std::int64_t, std::vector<std::uint32_t>>, 3>
        users;
    std::vector<char> blocked;
    for (std::size_t idx = 0; idx < cover.cubes.size(); ++idx) {
      const auto& q = cover.cubes[idx];
      blocked.assign(cover.rank1_parts.size(), 0);
      for (int i = 0; i < 3; ++i) {
        auto it = users[i].find(q.axis[i].k);
        if (it != users[i].end())
          for (std::uint32_t cl : it->second) blocked[cl] = 1;
      }
      std::size_t cl = 0;
      while (cl < blocked.size() && blocked[cl]) ++cl;
      if (cl == cover.rank1_parts.size()) cover.rank1_parts.push_back({});
      cover.rank1_parts[cl].push_back(idx);
      for (int i = 0; i < 3; ++i)
        users[i][q.axis[i].k].push_back(std::uint32_t(cl));
    }
  } else {
    for (std::size_t idx = 0; idx < cover.cubes.size(); ++idx) {
      bool placed = false;
      for (auto& part : cover.rank1_parts) {
        bool ok = true;
        for (std::size_t other : part)
          if (!cube_pair_rank1_ok(cover.cubes[other], cover.cubes[idx], rank_c)) {
            ok = false;
            break;
          }
        if (ok) {
          part.push_back(idx);
          placed = true;
          break;
        }
      }
      if (!placed) cover.rank1_parts.push_back({idx});
    }
  }
  return cover;
}

double AxisProfile::value(double t) const {
  return smoothstep((t - anchor) / window) -
         smoothstep((t - anchor - 1.0 / 3.0) / window);
}

SymbolSeries fourier_split(const std::vector<WhitneyCover>& covers, int k_trunc,
                           const FourierSplitOptions& opt) {
  if (k_trunc < 1) throw std::invalid_argument("fourier_split: K must be >= 1");
  if (covers.empty()) throw std::invalid_argument("fourier_split: no covers");
  SymbolSeries s;
  s.line = covers.front().line;
  s.truncation = k_trunc;
  s.coeff_halfwidth = std::max(k_trunc, opt.store_halfwidth);

  std::optional<int> scale;
  for (const auto& cov : covers) {
    if (cov.line != s.line)
      throw std::invalid_argument("fourier_split: mixed singular lines");
    for (std::size_t i = 0; i < cov.cubes.size(); ++i) {
      const auto& q = cov.cubes[i];
      if (!scale)
        scale = q.scale_exp();
      else if (*scale != q.scale_exp())
        throw std::invalid_argument("fourier_split: covers must share one scale");
      SymbolSeries::Term t;
      const Rat third = Rat::pow2(q.scale_exp()) / Rat(3);
      for (int ax = 0; ax < 3; ++ax) {
        t.lo[ax] = q.axis_interval(ax).lo;
        Rat l = t.lo[ax] / third;
        if (!l.is_integer())
          throw std::logic_error("fourier_split: corner off the third-lattice");
        t.lattice[ax] = l.num();
      }
      t.side = cov.side[i];
      s.terms.push_back(t);
    }
  }
  if (!scale) throw std::invalid_argument("fourier_split: empty covers");
  s.scale_exp = *scale;
  s.side_len = std::exp2(double(s.scale_exp));
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    auto [it, fresh] =
        s.lattice_index.emplace(SymbolSeries::lattice_key(s.terms[i].lattice), i);
    if (!fresh)
      throw std::logic_error("fourier_split: duplicate cube across covers");
  }

  const double sqrt3 = std::sqrt(3.0);
  const double c_lo = covers.front().constants.c_lo.to_double();
  const double c_hi = covers.front().constants.c_hi.to_double();
  s.valid_dist_lo = sqrt3 * s.side_len * (c_lo + 1.0);
  s.valid_dist_hi = sqrt3 * s.side_len * c_hi;

  // 1-D profile coefficients on the unit period
  const int g = opt.profile_grid;
  std::vector<double> samples(g);
  for (int i = 0; i < g; ++i) samples[i] = s.profile.value(double(i) / g);
  s.axis_coeffs.assign(2 * s.coeff_halfwidth + 1, cplx(0.0, 0.0));
  for (int k = -s.coeff_halfwidth; k <= s.coeff_halfwidth; ++k) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < g; ++i) {
      double ang = -2.0 * std::numbers::pi * k * double(i) / g;
      acc += samples[i] * cplx(std::cos(ang), std::sin(ang));
    }
    s.axis_coeffs[k + s.coeff_halfwidth] = acc / double(g);
  }

  // |c_k| per |k|_inf shell for the decay report
  s.ck_shell_max.assign(s.coeff_halfwidth + 1, 0.0);
  std::vector<double> mag(s.axis_coeffs.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(s.axis_coeffs[i]);
  std::vector<double> prefix_max(s.coeff_halfwidth + 1, 0.0);
  for (int m = 0; m <= s.coeff_halfwidth; ++m) {
    double here = std::max(mag[s.coeff_halfwidth + m], mag[s.coeff_halfwidth - m]);
    prefix_max[m] = m == 0 ? here : std::max(prefix_max[m - 1], here);
  }
  for (int m = 0; m <= s.coeff_halfwidth; ++m) {
    double shell = std::max(mag[s.coeff_halfwidth + m], mag[s.coeff_halfwidth - m]);
    s.ck_shell_max[m] = shell * prefix_max[m] * prefix_max[m];
  }
  return s;
}

namespace {

double theta_window(double u) {
  return smoothstep((u - 0.05) / 0.05) * smoothstep((0.95 - u) / 0.05);
}

// theta-windowed partial sum of the axis profile at relative coordinate u
double axis_partial(const SymbolSeries& s, double u, int k_trunc) {
  double th = theta_window(u);
  if (th == 0.0) return 0.0;
  double acc = 0.0;
  for (int k = -k_trunc; k <= k_trunc; ++k) {
    double ang = 2.0 * std::numbers::pi * k * u;
    cplx c = s.axis_coeffs[k + s.coeff_halfwidth];
    acc += c.real() * std::cos(ang) - c.imag() * std::sin(ang);
  }
  return th * acc;
}

double term_partial(const SymbolSeries& s, const SymbolSeries::Term& t,
                    const std::array<double, 3>& xi, int k_trunc) {
  double prod = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    double u = (xi[ax] - t.lo[ax].to_double()) / s.side_len;
    if (u <= 0.05 || u >= 0.95) return 0.0;
    prod *= axis_partial(s, u, k_trunc);
  }
  return prod;
}

double dist_to_line(const std::array<double, 3>& xi, SingularLine l) {
  double v1 = 1.0, v2 = l == SingularLine::two_xi1_eq_xi2 ? 2.0 : 1.0;
  double v3 = -(v1 + v2);
  double vv = v1 * v1 + v2 * v2 + v3 * v3;
  double pv = xi[0] * v1 + xi[1] * v2 + xi[2] * v3;
  double pp = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  return std::sqrt(std::max(pp - pv * pv / vv, 0.0));
}

}  // namespace

std::uint64_t SymbolSeries::lattice_key(const std::array<std::int64_t, 3>& l) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::int64_t v : l) {
    h ^= std::uint64_t(v) + 0x9e3779b97f4a7c15ull;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

// indices of terms whose (9/10)-support can contain xi: lattice positions
// with lo in (xi - 0.95 s, xi - 0.05 s) per axis
template <typename F>
void for_each_covering_term(const SymbolSeries& s, const std::array<double, 3>& xi,
                            F&& fn) {
  const double third = s.side_len / 3.0;
  std::array<std::vector<std::int64_t>, 3> cand;
  for (int ax = 0; ax < 3; ++ax) {
    std::int64_t hi = std::int64_t(std::floor((xi[ax] - 0.05 * s.side_len) / third));
    for (std::int64_t v = hi - 2; v <= hi; ++v) cand[ax].push_back(v);
  }
  std::array<std::int64_t, 3> l{};
  for (std::int64_t a : cand[0])
    for (std::int64_t b : cand[1])
      for (std::int64_t c : cand[2]) {
        l = {a, b, c};
        auto it = s.lattice_index.find(SymbolSeries::lattice_key(l));
        if (it == s.lattice_index.end()) continue;
        const auto& t = s.terms[it->second];
        if (t.lattice != l) continue;  // hash collision guard
        fn(t);
      }
}

}  // namespace

double reconstruct_chi(const SymbolSeries& s, const std::array<double, 3>& xi,
                       int k_trunc) {
  if (k_trunc > s.coeff_halfwidth)
    throw std::invalid_argument("reconstruct_chi: K beyond stored coefficients");
  double d = dist_to_line(xi, s.line);
  if (d < s.valid_dist_lo || d > s.valid_dist_hi)
    throw std::domain_error("reconstruct_chi: point outside the validity annulus");
  double acc = 0.0;
  for_each_covering_term(s, xi, [&](const SymbolSeries::Term& t) {
    if (t.side != +1) return;
    acc += term_partial(s, t, xi, k_trunc);
  });
  return acc;
}

double exact_partition_value(const SymbolSeries& s, const std::array<double, 3>& xi) {
  double acc = 0.0;
  for_each_covering_term(s, xi, [&](const SymbolSeries::Term& t) {
    if (t.side != +1) return;
    double prod = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
      double u = (xi[ax] - t.lo[ax].to_double()) / s.side_len;
      prod *= s.profile.value(u);
      if (prod == 0.0) break;
    }
    acc += prod;
  });
  return acc;
}

double MPrimeEvaluator::eval(double x1, double x2, double x3, double x4) const {
  const std::array<double, 3> ua{x1, x2 + x3, x4};
  const std::array<double, 3> ub{x2, x3, x1 + x4};
  std::vector<const SymbolSeries::Term*> a_hits, b_hits;
  for_each_covering_term(*chi_cone, ua, [&](const SymbolSeries::Term& t) {
    if (t.side == +1) a_hits.push_back(&t);
  });
  for_each_covering_term(*chi_inner, ub, [&](const SymbolSeries::Term& t) {
    if (t.side == +1) b_hits.push_back(&t);
  });
  double acc = 0.0;
  const Rat sa = Rat::pow2(chi_cone->scale_exp);
  const Rat sb = Rat::pow2(chi_inner->scale_exp);
  for (const auto* ta : a_hits) {
    double va = term_partial(*chi_cone, *ta, ua, k_trunc);
    if (va == 0.0) continue;
    QInterval q2{ta->lo[1], ta->lo[1] + sa};
    for (const auto* tb : b_hits) {
      double vb = term_partial(*chi_inner, *tb, ub, k_trunc);
      if (vb == 0.0) continue;
      QInterval q3_neg = QInterval{tb->lo[2], tb->lo[2] + sb}.negate();
      if (!q2.contains(q3_neg)) {
        ++constraint_skipped;
        continue;
      }
      acc += va * vb;
    }
  }
  return acc;
}

MPrimeEvaluator build_mprime(const SymbolSeries& cone_series,
                             const SymbolSeries& inner_series, int k_trunc) {
  if (cone_series.line != SingularLine::two_xi1_eq_xi2 ||
      inner_series.line != SingularLine::xi1_eq_xi2)
    throw std::invalid_argument("build_mprime: series lines mismatched");
  MPrimeEvaluator e;
  e.chi_cone = &cone_series;
  e.chi_inner = &inner_series;
  e.k_trunc = k_trunc;
  e.side_a = cone_series.side_len;
  e.side_b = inner_series.side_len;
  return e;
}

}  // namespace biest
