#include "biest/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "biest/calibration.hpp"
#include "biest/decomp.hpp"
#include "biest/ensembles.hpp"
#include "biest/forms.hpp"

namespace biest {

void SuiteReport::add(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok, detail});
  passed = passed && ok;
}

std::string SuiteReport::to_json(const RunConfig& cfg) const {
  nlohmann::json out;
  out["suite"] = suite;
  out["passed"] = passed;
  out["config_hash"] = cfg.hash();
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json rec;
    rec["name"] = c.name;
    rec["passed"] = c.passed;
    if (!c.detail.empty()) rec["detail"] = c.detail;
    out["checks"].push_back(rec);
  }
  return out.dump(2);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

GenParams small_gen(std::uint64_t seed, std::size_t count) {
  GenParams g;
  g.seed = seed;
  g.count = count;
  g.scale_ladder = {6, 1, -4, -9, -14};
  g.window_exp = 8;
  g.freq_window_exp = 17;
  return g;
}

SuiteReport verify_grid(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "grid";
  std::mt19937_64 rng(cfg.seed + 11);

  {
    bool ok = true;
    std::uniform_int_distribution<int> jd(-8, 8);
    std::uniform_int_distribution<std::int64_t> kd(-50, 50);
    std::uniform_int_distribution<int> sd(0, 2);
    for (int t = 0; t < 200 && ok; ++t) {
      int j = jd(rng);
      std::int64_t k = kd(rng);
      Shift sig = Shift(sd(rng));
      ShiftedInterval iv = mesh_interval(j, k, sig);
      Rat sgn_shift = (j % 2 == 0) ? shift_value(sig) : -shift_value(sig);
      Rat lo_scaled = iv.lo() / Rat::pow2(j) - sgn_shift;
      Rat hi_scaled = iv.hi() / Rat::pow2(j) - sgn_shift;
      ok = lo_scaled == Rat(k) && hi_scaled == Rat(k + 1) &&
           iv.length() == Rat::pow2(j);
    }
    rep.add("mesh_endpoints_exact", ok);
  }
  {
    bool ok = true;
    for (int sigma_i = 0; sigma_i < 3 && ok; ++sigma_i) {
      for (int j : {-3, 0, 5}) {
        Rat covered_hi;
        for (std::int64_t k = -16; k <= 16; ++k) {
          ShiftedInterval iv = mesh_interval(j, k, Shift(sigma_i));
          if (k > -16 && !(covered_hi == iv.lo())) ok = false;
          covered_hi = iv.hi();
        }
      }
    }
    rep.add("mesh_tiles_line", ok);
  }
  {
    bool ok = true;
    std::uniform_real_distribution<double> pos(-4.0, 4.0);
    for (int t = 0; t < 50 && ok; ++t) {
      int den = 1 << (t % 5);
      Rat lo(std::int64_t(pos(rng) * den), den);
      Rat len(1 + (t % 7), 4);
      Box q;
      q.n = 1;
      q.axis[0] = QInterval{lo, lo + len};
      ShiftedCube enc = enclosing_shifted_cube(q);
      Box core = dilate_box(cube_box(enc), Rat(7, 10));
      ok = core.contains(q) && !(Rat(8) * len < enc.side());
    }
    rep.add("enclosing_cube_7_10", ok);
  }
  {
    const Rat factor(4);
    std::vector<ShiftedCube> cubes;
    for (int j = 0; j < 8; ++j)
      cubes.push_back(mesh_cube(1, j, {std::int64_t(1) << (7 - j), 0, 0},
                                {Shift::zero, Shift::zero, Shift::zero}));
    auto split = sparse_split(cubes, factor);
    bool ok = true;
    std::size_t total = 0;
    for (const auto& part : split.parts) {
      total += part.size();
      if (!is_sparse(part, factor)) ok = false;
    }
    ok = ok && total == cubes.size();
    rep.add("sparse_split_parts_sparse", ok,
            "parts=" + std::to_string(split.parts.size()));
  }
  {
    DyadicUnion e({dyadic_interval(-2, 1), dyadic_interval(-3, 1)});
    DyadicUnion bigger = DyadicUnion::union_of(e, DyadicUnion({dyadic_interval(-2, 4)}));
    bool ok = true;
    std::uniform_real_distribution<double> xs(-2.0, 4.0);
    for (int t = 0; t < 100 && ok; ++t) {
      Rat x(std::int64_t(xs(rng) * 64), 64);
      Rat small = dyadic_maximal(e, x, cfg.maximal_root_scale_exp);
      Rat big = dyadic_maximal(bigger, x, cfg.maximal_root_scale_exp);
      ok = !(big < small) && !(Rat(1) < small) && !(Rat(1) < big);
    }
    rep.add("maximal_monotone_bounded", ok);
  }
  {
    ApproxCutoff c{0.0, 1.0};
    bool ok = cutoff_value(c, 0.0, 4) == 1.0;
    ok = ok && std::fabs(cutoff_value(c, 1.0, 2) - 0.5) < 1e-15;
    ok = ok && cutoff_value(c, 0.5, 2) > cutoff_value(c, 0.7, 2);
    ok = ok && std::fabs(cutoff_value(c, 3.0, 1) - std::pow(10.0, -0.5)) < 1e-15;
    rep.add("cutoff_values", ok);
  }
  return rep;
}

SuiteReport verify_tiles(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "tiles";
  const OrderConstants oc =
      cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
  std::mt19937_64 rng(cfg.seed + 22);

  std::vector<TriTile> u = gen_rank1(small_gen(cfg.seed + 1, 14), oc);
  {
    bool ok = !check_rank1(u, oc).has_value();
    auto again = gen_rank1(small_gen(cfg.seed + 1, 14), oc);
    ok = ok && again.size() == u.size();
    for (std::size_t i = 0; i < u.size() && ok; ++i) ok = again[i] == u[i];
    rep.add("gen_rank1_checker_and_determinism", ok,
            "tiles=" + std::to_string(u.size()));
  }
  {
    // transitivity of < on all same-index pairs/triples in the family
    bool ok = true;
    for (int idx = 1; idx <= 3 && ok; ++idx) {
      for (std::size_t a = 0; a < u.size() && ok; ++a)
        for (std::size_t b = 0; b < u.size() && ok; ++b)
          for (std::size_t c2 = 0; c2 < u.size() && ok; ++c2) {
            if (order_lt(u[a].tile(idx), u[b].tile(idx), oc) &&
                order_lt(u[b].tile(idx), u[c2].tile(idx), oc))
              ok = order_lt(u[a].tile(idx), u[c2].tile(idx), oc);
          }
      for (std::size_t a = 0; a < u.size() && ok; ++a)
        ok = !order_lt(u[a].tile(idx), u[a].tile(idx), oc);
    }
    rep.add("order_lt_strict_partial_order", ok);
  }
  {
    int violations = 0;
    int lt_pairs = 0;
    for (int idx = 1; idx <= 3; ++idx)
      for (std::size_t a = 0; a < u.size(); ++a)
        for (std::size_t b = 0; b < u.size(); ++b)
          if (order_lt(u[a].tile(idx), u[b].tile(idx), oc)) {
            ++lt_pairs;
            if (!order_lesssim(u[a].tile(idx), u[b].tile(idx), oc)) ++violations;
          }
    rep.add("lt_implies_lesssim", violations == 0,
            "lt_pairs=" + std::to_string(lt_pairs) +
                " violations=" + std::to_string(violations));
  }
  {
    // i-tree members in a sparse universe: other coordinates equal or
    // 2-dilate disjoint
    bool ok = true;
    for (std::size_t t = 0; t < u.size() && ok; ++t) {
      for (int i = 1; i <= 3 && ok; ++i) {
        Tree tr = maximal_tree(u, u[t], i, oc);
        for (int j = 1; j <= 3 && ok; ++j) {
          if (j == i) continue;
          for (std::size_t a : tr.members)
            for (std::size_t b : tr.members) {
              if (a == b) continue;
              QInterval wa = u[a].freq[j - 1].interval();
              QInterval wb = u[b].freq[j - 1].interval();
              if (wa == wb) continue;
              if (wa.dilate(Rat(2)).intersects(wb.dilate(Rat(2)))) ok = false;
            }
        }
      }
    }
    rep.add("tree_other_coordinates_dichotomy", ok);
  }
  {
    // maximal_tree equals a brute-force filter
    bool ok = true;
    for (std::size_t t = 0; t < u.size() && ok; ++t) {
      Tree tr = maximal_tree(u, u[t], 2, oc);
      std::vector<std::size_t> brute;
      for (std::size_t m = 0; m < u.size(); ++m)
        if (order_le(u[m].tile(2), u[t].tile(2), oc)) brute.push_back(m);
      ok = tr.members == brute;
    }
    rep.add("maximal_tree_filter", ok);
  }
  {
    // strong disjointness consequence on the witness collection of a random
    // sequence: rectangles I x 2omega_i pairwise disjoint across trees
    CoefficientSequence seq = random_sequence(2, u.size(), rng);
    std::vector<TriTile> small(u.begin(), u.begin() + std::min<std::size_t>(7, u.size()));
    seq.values.resize(small.size());
    ModifiedEnergyResult me = modified_energy(small, seq, oc);
    bool ok = true;
    const auto& trees = me.witness.trees;
    if (!check_strongly_disjoint(trees, small, 2)) {
      for (std::size_t a = 0; a < trees.size() && ok; ++a)
        for (std::size_t b = 0; b < trees.size() && ok; ++b) {
          if (a == b) continue;
          for (std::size_t ma : trees[a].members)
            for (std::size_t mb : trees[b].members) {
              bool time_meet = small[ma].time.interval().intersects(
                  small[mb].time.interval());
              bool freq_meet =
                  small[ma].freq[1].interval().dilate(Rat(2)).intersects(
                      small[mb].freq[1].interval().dilate(Rat(2)));
              if (time_meet && freq_meet) ok = false;
            }
        }
    }
    rep.add("strongly_disjoint_rectangles", ok,
            "witness_trees=" + std::to_string(trees.size()));
  }
  {
    // biest-trick equivalence on a sparse tree against a random P universe
    std::vector<TriTile> q_univ = gen_rank1(small_gen(cfg.seed + 5, 10), oc);
    std::vector<TriTile> p_univ = gen_rank1(small_gen(cfg.seed + 6, 10), oc);
    bool ok = true;
    for (std::size_t t = 0; t < q_univ.size() && ok; ++t) {
      for (int i = 1; i <= 2 && ok; ++i) {
        Tree tr = maximal_tree(q_univ, q_univ[t], i, oc);
        auto r = biest_trick_predicate(tr, q_univ, p_univ, Rat(oc.c_scale));
        ok = r.equivalence_holds;
      }
    }
    rep.add("biest_trick_equivalence", ok);
  }
  return rep;
}

SuiteReport verify_functionals(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "functionals";
  const OrderConstants oc =
      cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
  std::mt19937_64 rng(cfg.seed + 33);

  std::vector<TriTile> u = gen_rank1(small_gen(cfg.seed + 2, 7), oc);
  CoefficientSequence seq = random_sequence(1, u.size(), rng);
  {
    // size and energy are exactly homogeneous; the modified energy is only
    // dyadically homogeneous (its sup runs over integer powers of two), so
    // general scalars get the two-sided factor-2 comparison instead
    const cplx lam(1.7, -0.4);
    CoefficientSequence scaled = seq;
    for (auto& v : scaled.values) v *= lam;
    double s0 = size(u, seq, oc).value;
    double s1 = size(u, scaled, oc).value;
    double e0 = energy(u, seq).lower, e1 = energy(u, scaled).lower;
    double a = std::abs(lam);
    bool ok = std::fabs(s1 - a * s0) <= 1e-12 * std::max(1.0, s1) &&
              std::fabs(e1 - a * e0) <= 1e-12 * std::max(1.0, e1);
    CoefficientSequence dyadic = seq;
    for (auto& v : dyadic.values) v *= 8.0;
    double m0 = modified_energy(u, seq, oc).lower;
    double m8 = modified_energy(u, dyadic, oc).lower;
    double m_lam = modified_energy(u, scaled, oc).lower;
    ok = ok && std::fabs(m8 - 8.0 * m0) <= 1e-12 * std::max(1.0, m8);
    ok = ok && m_lam >= 0.5 * a * m0 * (1.0 - 1e-12) &&
         m_lam <= 2.0 * a * m0 * (1.0 + 1e-12);
    rep.add("homogeneity", ok);
  }
  {
    ModifiedEnergyResult full = modified_energy(u, seq, oc);
    bool ok = true;
    for (int drop = 0; drop < int(u.size()); ++drop) {
      std::vector<TriTile> sub;
      CoefficientSequence ssub;
      ssub.slot = seq.slot;
      for (std::size_t m = 0; m < u.size(); ++m)
        if (int(m) != drop) {
          sub.push_back(u[m]);
          ssub.values.push_back(seq.values[m]);
        }
      ModifiedEnergyResult me = modified_energy(sub, ssub, oc);
      if (me.lower > full.lower * (1.0 + 1e-12)) ok = false;
    }
    rep.add("modified_energy_monotone", ok);
  }
  {
    ModifiedEnergyResult me = modified_energy(u, seq, oc);
    EnergyResult en = energy(u, seq);
    rep.add("modified_energy_dominated", me.lower <= en.lower * (1.0 + 1e-12),
            "me=" + fmt(me.lower) + " energy=" + fmt(en.lower));
  }
  {
    auto w = dual_energy_witness(u, seq, oc);
    bool ok = w.has_value();
    if (ok) {
      ok = w->pairing_ratio >= 1.0 - 1e-9 && w->pairing_ratio <= 4.0 + 1e-9 &&
           w->normalization_worst <= 4.0 + 1e-9;
    }
    rep.add("dual_energy_witness_clauses", ok,
            ok ? "ratio=" + fmt(w->pairing_ratio) +
                     " norm=" + fmt(w->normalization_worst)
               : "no witness");
  }
  {
    StepFunction f;
    f.pieces.emplace_back(QInterval{Rat(0), Rat(1)}, 1.0);
    double a = weak_l1(f, QInterval{Rat(-1), Rat(2)});
    StepFunction g;
    g.pieces.emplace_back(QInterval{Rat(0), Rat(1, 2)}, 2.0);
    double b = weak_l1(g, QInterval{Rat(0), Rat(1)});
    StepFunction h;
    h.pieces.emplace_back(QInterval{Rat(0), Rat(1, 3)}, 1.0);
    h.pieces.emplace_back(QInterval{Rat(1, 3), Rat(2, 3)}, 2.0);
    h.pieces.emplace_back(QInterval{Rat(2, 3), Rat(1)}, 4.0);
    double c = weak_l1(h, QInterval{Rat(0), Rat(1)});
    bool ok = std::fabs(a - 1.0) < 1e-15 && std::fabs(b - 1.0) < 1e-15 &&
              std::fabs(c - std::max({1.0, 2.0 * 2.0 / 3.0, 4.0 / 3.0})) < 1e-12;
    rep.add("weak_l1_values", ok);
  }
  {
    double lo = HUGE_VAL, hi = 0.0;
    for (int t = 0; t < 12; ++t) {
      std::vector<TriTile> uu = gen_rank1(small_gen(cfg.seed + 40 + t, 10), oc);
      CoefficientSequence s2 = random_sequence(2, uu.size(), rng);
      JnComparison jn = jn_compare(uu, s2, oc);
      lo = std::min(lo, jn.ratio);
      hi = std::max(hi, jn.ratio);
    }
    bool ok = lo >= calibration::jn_ratio_lo && hi <= calibration::jn_ratio_hi;
    rep.add("jn_ratio_window", ok, "window=[" + fmt(lo) + "," + fmt(hi) + "]");
  }
  return rep;
}

SuiteReport verify_decomp(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "decomp";
  const OrderConstants oc =
      cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
  std::mt19937_64 rng(cfg.seed + 44);

  {
    bool ok = true;
    double worst = 0.0;
    for (int t = 0; t < 25 && ok; ++t) {
      std::vector<TriTile> u = gen_rank1(small_gen(cfg.seed + 60 + t, 9), oc);
      CoefficientSequence a1 = random_sequence(1, u.size(), rng);
      CoefficientSequence a2 = random_sequence(2, u.size(), rng);
      CoefficientSequence a3 = random_sequence(3, u.size(), rng);
      for (std::size_t top = 0; top < u.size(); ++top) {
        for (int i = 1; i <= 3; ++i) {
          Tree tr = maximal_tree(u, u[top], i, oc);
          TreeFormResult r = tree_form(u, tr, a1, a2, a3, oc);
          double slack = std::abs(r.value) - r.bound;
          worst = std::max(worst, slack / std::max(1.0, r.bound));
          if (std::abs(r.value) > r.bound * (1.0 + 1e-12)) ok = false;
        }
      }
    }
    rep.add("tree_estimate_constant_one", ok, "worst_rel_slack=" + fmt(worst));
  }
  {
    GenParams deep;
    deep.seed = cfg.seed + 3;
    deep.count = 26;
    deep.scale_ladder = {5, 0};
    deep.window_exp = 5;
    deep.child_bias = 1.0;
    deep.sibling_bias = 0.95;
    deep.up_bias = 0.8;
    deep.tree_coord = 1;
    deep.root_scale_index = 0;
    deep.max_tries_per_tile = 2000;
    std::vector<TriTile> u = gen_rank1(deep, oc);
    CoefficientSequence a = function_like_sequence(u, 2, rng, 0.9, 1.1);
    for (std::size_t m = 0; m < u.size(); ++m)
      if (u[m].time.j == 5) a.values[m] = 0.0;
    double e = modified_energy(u, a, oc).upper;
    double s = size(u, a, oc).value;
    int n = int(std::floor(-std::log2(s / e))) - 1;
    SelectionTrace t1 = select_trees(u, a, n, e, oc);
    SelectionTrace t2 = select_trees(u, a, n, e, oc);
    bool ok = t1.to_json() == t2.to_json();
    ok = ok && t1.plus_left_ok && t1.plus_right_ok && t1.strongly_disjoint_ok &&
         t1.size_lower_ok;
    ok = ok && t1.sum_tree_lengths <=
                   calibration::c_sel * std::exp2(2.0 * n) + 1e-12;
    rep.add("selection_postconditions", ok,
            "pairs=" + std::to_string(t1.selected.size()) +
                " sumI=" + fmt(t1.sum_tree_lengths));
  }
  {
    std::vector<TriTile> u = gen_rank1(small_gen(cfg.seed + 4, 16), oc);
    CoefficientSequence a1 = random_sequence(1, u.size(), rng);
    CoefficientSequence a2 = random_sequence(2, u.size(), rng);
    CoefficientSequence a3 = random_sequence(3, u.size(), rng);
    PartitionResult part = partition(u, a1, a2, a3, oc);
    std::vector<int> hits(u.size(), 0);
    for (const auto& lv : part.levels)
      for (std::size_t m : lv.tiles) ++hits[m];
    bool ok = true;
    for (int h : hits) ok = ok && h == 1;
    // per-level cover really covers the level's tiles
    for (const auto& lv : part.levels) {
      std::vector<char> covered(u.size(), 0);
      for (const auto& tr : lv.cover)
        for (std::size_t m : tr.members) covered[m] = 1;
      for (std::size_t m : lv.tiles) ok = ok && covered[m];
    }
    rep.add("partition_exhaustive_disjoint", ok,
            "levels=" + std::to_string(part.levels.size()));

    // per-level display: sum |tree_form| <= sum |I_T| prod min(2^-n E, S)
    bool ok2 = true;
    for (const auto& lv : part.levels) {
      double lhs = 0.0, sum_len = 0.0;
      for (const auto& tr : lv.cover) {
        lhs += std::abs(tree_form(u, tr, a1, a2, a3, oc).value);
        sum_len += tr.top.spatial_length().to_double();
      }
      double prod = 1.0;
      for (int j = 0; j < 3; ++j)
        prod *= std::min(std::exp2(double(-lv.n)) * part.energies[j],
                         part.sizes[j]);
      if (lhs > sum_len * prod * (1.0 + 1e-9) + 1e-12) ok2 = false;
    }
    rep.add("per_level_tree_sum_bound", ok2);
  }
  return rep;
}

SuiteReport verify_whitney(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "whitney";
  const WhitneyConstants wc =
      Rat(100) < cfg.whitney.c_hi ? WhitneyConstants::desk() : cfg.whitney;

  // covers at the single admissible scale for the probe annulus
  WhitneyCoverRequest req;
  req.box.n = 3;
  for (int i = 0; i < 3; ++i)
    req.box.axis[i] = QInterval{Rat(-9, 16), Rat(9, 16)};
  req.min_scale_exp = -6;
  req.max_scale_exp = -6;

  std::vector<WhitneyCover> covers(27);
  static const Shift all[3] = {Shift::zero, Shift::third, Shift::two_thirds};
#pragma omp parallel for schedule(dynamic)
  for (int combo = 0; combo < 27; ++combo)
    covers[combo] = whitney_cover(
        {all[combo % 3], all[(combo / 3) % 3], all[combo / 9]}, req, wc,
        SingularLine::two_xi1_eq_xi2);
  {
    // builder filters with exact integer arithmetic; cross-check a sample of
    // cubes against the independent rational distance path
    bool ok = true;
    std::size_t count = 0;
    for (const auto& cov : covers) count += cov.cubes.size();
    std::mt19937_64 rng(cfg.seed + 3141);
    for (int t = 0; t < 2000; ++t) {
      const auto& cov = covers[rng() % covers.size()];
      if (cov.cubes.empty()) continue;
      const auto& q = cov.cubes[rng() % cov.cubes.size()];
      if (!sandwich_ok(q, cov.line, wc) || !cube_meets_plane(q)) ok = false;
    }
    rep.add("cover_sandwich_exact", ok, "cubes=" + std::to_string(count));
  }
  {
    bool ok = true;
    std::size_t parts = 0;
    CubeRankConstants rc;
    std::mt19937_64 rng(cfg.seed + 2718);
    for (const auto& cov : covers) {
      parts = std::max(parts, cov.rank1_parts.size());
      if (cov.rank1_parts.empty()) continue;
      // partition sanity: every cube in exactly one part
      std::size_t assigned = 0;
      for (const auto& part : cov.rank1_parts) assigned += part.size();
      if (assigned != cov.cubes.size()) ok = false;
      // full pairwise predicate on a sample of parts
      for (int t = 0; t < 3; ++t) {
        const auto& part = cov.rank1_parts[rng() % cov.rank1_parts.size()];
        std::vector<ShiftedCube> sub;
        for (std::size_t i : part) sub.push_back(cov.cubes[i]);
        if (!cube_collection_rank1(sub, rc)) ok = false;
      }
    }
    rep.add("rank1_refinement", ok, "max_parts=" + std::to_string(parts));
  }

  SymbolSeries series = fourier_split(covers, 6);
  {
    bool ok = true;
    double c_worst = 0.0;
    for (std::size_t m = 0; m < series.ck_shell_max.size(); ++m) {
      double bound = calibration::ck_decay_c / std::pow(1.0 + double(m), 4.0);
      c_worst = std::max(c_worst,
                         series.ck_shell_max[m] * std::pow(1.0 + double(m), 4.0));
      if (series.ck_shell_max[m] > bound) ok = false;
    }
    rep.add("ck_rapid_decay", ok, "max_c=" + fmt(c_worst));
  }
  {
    // probe grid on the plane at distance >= 1/4 on both sides
    std::vector<std::array<double, 3>> probes;
    std::vector<int> want;
    const double v[3] = {1.0, 2.0, -3.0};
    const double vn = std::sqrt(14.0);
    // orthonormal-ish frame in the plane: direction along the line and the
    // in-plane normal to it
    const double t1[3] = {v[0] / vn, v[1] / vn, v[2] / vn};
    double n1[3] = {2.0, -1.0, -1.0};  // in plane, orthogonal to v
    double nn = std::sqrt(6.0);
    for (auto& x : n1) x /= nn;
    for (int it = -6; it <= 6; ++it) {
      for (double d : {0.26, 0.33, 0.40}) {
        for (int sgn : {-1, +1}) {
          std::array<double, 3> p{};
          for (int i = 0; i < 3; ++i)
            p[i] = 0.06 * it * t1[i] + sgn * d * n1[i];
          // indicator side: sign of 2p1 - p2
          probes.push_back(p);
          want.push_back(2.0 * p[0] - p[1] < 0 ? 1 : 0);
        }
      }
    }
    double err_prev = HUGE_VAL;
    bool monotone = true;
    double err5 = 0.0;
    std::string sweep;
    for (int k = 3; k <= 6; ++k) {
      double err = 0.0;
      for (std::size_t i = 0; i < probes.size(); ++i) {
        double rec = reconstruct_chi(series, probes[i], k);
        err = std::max(err, std::fabs(rec - want[i]));
      }
      if (k == 5) err5 = err;
      if (err > err_prev * calibration::recon_monotone_slack) monotone = false;
      err_prev = err;
      sweep += (k > 3 ? " " : "") + fmt(err);
    }
    rep.add("reconstruction_error", err5 < calibration::whitney_recon_tol,
            "max_err_K5=" + fmt(err5));
    rep.add("reconstruction_monotone_in_K", monotone, "K3..K6: " + sweep);
    // exact partition defect at probes should be zero
    double defect = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      defect = std::max(defect, std::fabs(exact_partition_value(series, probes[i]) -
                                          want[i]));
    rep.add("partition_exact_at_probes", defect < 1e-12, "defect=" + fmt(defect));
  }
  return rep;
}

SuiteReport verify_forms(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "forms";
  const OrderConstants oc =
      cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
  std::mt19937_64 rng(cfg.seed + 55);
  SampleGrid grid = cfg.window;

  {
    // vertex table and the exponent example
    AdmissibleTuple a;
    a.alpha = {Rat(-45, 100), Rat(93, 100), Rat(4, 100), Rat(48, 100)};
    VertexExponents e = exponents_for_vertex(a, 9);
    bool ok = std::fabs(e.theta_j[0] - 0.1) < 1e-12 &&
              std::fabs(e.theta_j[1] - 0.86) < 1e-12 &&
              std::fabs(e.theta_j[2] - 0.04) < 1e-12 &&
              std::fabs(e.theta - 12.0 / 13.0) < 1e-12;
    auto a2 = vertex_coordinates(2);
    ok = ok && a2[0] == Rat(1, 2) && a2[1] == Rat(1) && a2[2] == Rat(1) &&
         a2[3] == Rat(-3, 2);
    rep.add("vertex_exponents", ok);
  }
  {
    std::vector<MeasurableSetSpec> e(4);
    std::uniform_int_distribution<int> mag(1, 16);
    bool ok = true;
    for (int t = 0; t < 10 && ok; ++t) {
      for (int j = 0; j < 4; ++j) {
        std::vector<ShiftedInterval> cells;
        int n_cells = mag(rng);
        for (int i = 0; i < n_cells; ++i)
          cells.push_back(dyadic_interval(-3, (i * 37 + t * 11) % 512));
        e[j].set = DyadicUnion(cells);
      }
      auto r = exceptional_set(e, 4, Rat(8), cfg.maximal_root_scale_exp);
      ok = r.majority_ok;
      // major subset is contained in the pivot set and keeps half the mass
      ok = ok && !(r.major_subset.measure() * Rat(2) < e[3].measure());
      for (const auto& piece : r.major_subset.pieces())
        if (!e[3].set.contains_point(piece.center())) ok = false;
    }
    rep.add("exceptional_set_majority", ok);
  }
  {
    DyadicUnion omega;
    std::vector<TriTile> tiles = gen_rank1(small_gen(cfg.seed + 7, 6), oc);
    auto strata = stratify_k(tiles, omega);
    bool ok = true;
    for (int k : strata) ok = ok && k == 0;
    rep.add("stratify_empty_omega", ok);
  }
  {
    // reorder identity on a small function-mode instance
    GenParams gp;
    gp.seed = cfg.seed + 8;
    gp.count = 6;
    gp.scale_ladder = {2, -3};
    gp.window_exp = 6;
    gp.freq_window_exp = 4;
    std::vector<TriTile> p_tiles = gen_rank1(gp, oc);
    gp.seed = cfg.seed + 9;
    std::vector<TriTile> q_tiles = gen_rank1(gp, oc);
    PacketCache pc(grid), qc(grid);
    std::mt19937_64 rng2(cfg.seed + 77);
    DyadicUnion full({dyadic_interval(6, 0)});
    std::array<SampledFunction, 4> f;
    for (auto& fi : f) fi = sample_x_of_e(full, grid, rng2);
    cplx by_p = lambda_biest(p_tiles, q_tiles, pc, qc, f[0], f[1], f[2], f[3], oc);
    cplx by_q = lambda_biest_qform(p_tiles, q_tiles, pc, qc, f[0], f[1], f[2], f[3]);
    double scale = std::max(1.0, std::abs(by_p));
    rep.add("reorder_identity", std::abs(by_p - by_q) <= 1e-10 * scale,
            "lambda=" + fmt(std::abs(by_p)));
  }
  return rep;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"grid", "tiles", "functionals", "decomp", "whitney", "forms"};
}

std::vector<SuiteReport> run_verify(const std::string& suite, const RunConfig& cfg) {
  std::vector<SuiteReport> out;
  auto run_one = [&](const std::string& name) {
    if (name == "grid") out.push_back(verify_grid(cfg));
    else if (name == "tiles") out.push_back(verify_tiles(cfg));
    else if (name == "functionals") out.push_back(verify_functionals(cfg));
    else if (name == "decomp") out.push_back(verify_decomp(cfg));
    else if (name == "whitney") out.push_back(verify_whitney(cfg));
    else if (name == "forms") out.push_back(verify_forms(cfg));
    else throw std::invalid_argument("unknown suite: " + name);
  };
  if (suite == "all") {
    for (const auto& name : verify_suite_names()) run_one(name);
  } else {
    run_one(suite);
  }
  return out;
}

}  // namespace biest
