#include "biest/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace biest {

void check_sequence(const std::vector<TriTile>& universe,
                    const CoefficientSequence& seq) {
  if (seq.slot < 1 || seq.slot > 3)
    throw std::invalid_argument("CoefficientSequence: slot out of range");
  if (seq.values.size() != universe.size())
    throw std::invalid_argument("CoefficientSequence: size mismatch");
  for (const auto& v : seq.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("CoefficientSequence: non-finite value");
}

SizeResult size_over(const std::vector<TriTile>& universe,
                     const CoefficientSequence& seq, const OrderConstants& c,
                     const std::vector<std::size_t>& members,
                     const TriTile* extra_top) {
  check_sequence(universe, seq);
  SizeResult best;
  auto consider = [&](const TriTile& top) {
    for (int i = 1; i <= 3; ++i) {
      if (i == seq.slot) continue;
      Tile top_tile = top.tile(i);
      double mass = 0.0;
      std::vector<std::size_t> tree_members;
      for (std::size_t m : members)
        if (order_le(universe[m].tile(i), top_tile, c)) {
          mass += seq.weight(m);
          tree_members.push_back(m);
        }
      double val = std::sqrt(mass / top.spatial_length().to_double());
      if (val > best.value) {
        best.value = val;
        best.witness = Tree{top, i, tree_members};
        best.has_witness = true;
      }
    }
  };
  for (std::size_t t : members) consider(universe[t]);
  if (extra_top) consider(*extra_top);
  return best;
}

SizeResult size(const std::vector<TriTile>& universe,
                const CoefficientSequence& seq, const OrderConstants& c) {
  std::vector<std::size_t> all(universe.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return size_over(universe, seq, c, all, nullptr);
}

namespace {

bool tiles_intersect(const Tile& a, const Tile& b) {
  return a.time.interval().intersects(b.time.interval()) &&
         a.freq.interval().intersects(b.freq.interval());
}

struct IndependentSetSearch {
  const std::vector<double>& w;
  const std::vector<std::vector<char>>& conflict;
  std::vector<std::size_t> best_set;
  double best = 0.0;

  void run(std::vector<std::size_t>& chosen, std::vector<char>& banned,
           std::size_t from, double acc, double rest) {
    if (acc > best) {
      best = acc;
      best_set = chosen;
    }
    if (acc + rest <= best) return;
    for (std::size_t i = from; i < w.size(); ++i) {
      rest -= w[i];
      if (banned[i] || w[i] == 0.0) continue;
      std::vector<char> banned2 = banned;
      for (std::size_t k = i + 1; k < w.size(); ++k)
        if (conflict[i][k]) banned2[k] = 1;
      chosen.push_back(i);
      double rest2 = 0.0;
      for (std::size_t k = i + 1; k < w.size(); ++k)
        if (!banned2[k]) rest2 += w[k];
      run(chosen, banned2, i + 1, acc + w[i], rest2);
      chosen.pop_back();
    }
  }
};

}  // namespace

EnergyResult energy(const std::vector<TriTile>& universe,
                    const CoefficientSequence& seq, std::size_t exact_budget) {
  check_sequence(universe, seq);
  const std::size_t n = universe.size();
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = seq.weight(i);
    total += w[i];
  }
  EnergyResult r;
  r.upper = std::sqrt(total);
  if (n == 0) {
    r.exact = true;
    return r;
  }
  std::vector<std::vector<char>> conflict(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool clash = tiles_intersect(universe[i].tile(seq.slot),
                                   universe[j].tile(seq.slot));
      conflict[i][j] = conflict[j][i] = clash;
    }
  if (n <= exact_budget) {
    IndependentSetSearch search{w, conflict, {}, 0.0};
    std::vector<std::size_t> chosen;
    std::vector<char> banned(n, 0);
    search.run(chosen, banned, 0, 0.0, total);
    r.lower = r.upper = std::sqrt(search.best);
    r.witness = search.best_set;
    r.exact = true;
    return r;
  }
  // greedy lower bound: heaviest-first compatible selection
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  double acc = 0.0;
  for (std::size_t i : order) {
    bool ok = w[i] > 0.0;
    for (std::size_t k : r.witness)
      if (conflict[i][k]) {
        ok = false;
        break;
      }
    if (ok) {
      r.witness.push_back(i);
      acc += w[i];
    }
  }
  r.lower = std::sqrt(acc);
  return r;
}

namespace {

// strong j-disjointness bullets for a single cross-tree member pair
bool pair_strongly_disjoint(const TriTile& pa, const QInterval& top_a,
                            const TriTile& pb, const QInterval& top_b, int j) {
  Tile ta = pa.tile(j), tb = pb.tile(j);
  if (ta == tb) return false;
  if (ta.freq.interval().dilate(Rat(2)).intersects(
          tb.freq.interval().dilate(Rat(2)))) {
    if (pb.time.interval().intersects(top_a)) return false;
    if (pa.time.interval().intersects(top_b)) return false;
  }
  return true;
}

struct METree {
  std::size_t top;
  int type;
  std::uint32_t members;  // bitmask over the universe (exact mode only)
  double i_len;           // |I_top|
  std::size_t min_member;
};

bool me_trees_compatible(const METree& a, const METree& b,
                         const std::vector<TriTile>& universe,
                         const QInterval& top_a, const QInterval& top_b, int j) {
  if ((a.members & b.members) != 0) return false;
  for (std::uint32_t ma = a.members; ma; ma &= ma - 1) {
    std::size_t ia = std::size_t(__builtin_ctz(ma));
    for (std::uint32_t mb = b.members; mb; mb &= mb - 1) {
      std::size_t ib = std::size_t(__builtin_ctz(mb));
      if (!pair_strongly_disjoint(universe[ia], top_a, universe[ib], top_b, j))
        return false;
    }
  }
  return true;
}

struct MECollectionSearch {
  const std::vector<METree>& cands;
  const std::vector<TriTile>& universe;
  const std::vector<QInterval>& top_ivs;
  int slot;
  double best = 0.0;
  std::vector<std::size_t> best_pick;

  void run(std::uint32_t free_mask, std::vector<std::size_t>& pick, double acc) {
    if (acc > best) {
      best = acc;
      best_pick = pick;
    }
    if (free_mask == 0) return;
    std::size_t t = std::size_t(__builtin_ctz(free_mask));
    // skip tile t entirely
    run(free_mask & (free_mask - 1), pick, acc);
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      const METree& cand = cands[ci];
      if (cand.min_member != t) continue;
      if ((cand.members & ~free_mask) != 0) continue;
      bool ok = true;
      for (std::size_t pi : pick) {
        if (!me_trees_compatible(cands[pi], cand, universe, top_ivs[pi],
                                 top_ivs[ci], slot)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      pick.push_back(ci);
      run(free_mask & ~cand.members, pick, acc + cand.i_len);
      pick.pop_back();
    }
  }
};

}  // namespace

ModifiedEnergyResult modified_energy(
    const std::vector<TriTile>& universe, const CoefficientSequence& seq,
    const OrderConstants& c, const ModifiedEnergyOptions& opts,
    const std::vector<TreeCollection>& extra_candidates) {
  check_sequence(universe, seq);
  ModifiedEnergyResult r;
  const std::size_t n_tiles = universe.size();
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < n_tiles; ++i)
    if (seq.weight(i) > 0.0) nonzero.push_back(i);
  if (nonzero.empty()) {
    r.exact = true;
    return r;
  }

  // n-range from coefficient magnitudes: outside it no collection satisfies
  // both clauses
  double min_ratio = HUGE_VAL, max_ratio = 0.0;
  for (std::size_t i : nonzero) {
    double ratio = std::abs(seq.values[i]) /
                   std::sqrt(universe[i].spatial_length().to_double());
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
  }
  const int n_lo = int(std::floor(std::log2(min_ratio))) - 2;
  const int n_hi = int(std::ceil(std::log2(max_ratio))) + 1;

  // clause helpers over arbitrary member index sets (bracket mode)
  auto tree_mass = [&](const std::vector<std::size_t>& members) {
    double s = 0.0;
    for (std::size_t m : members) s += seq.weight(m);
    return s;
  };
  auto subtree_upper_ok = [&](const std::vector<std::size_t>& members, int n) {
    const double cap_scale = std::exp2(2.0 * (n + 1));
    for (std::size_t t = 0; t < n_tiles; ++t) {
      for (int ty = 1; ty <= 3; ++ty) {
        Tile top_tile = universe[t].tile(ty);
        double s = 0.0;
        for (std::size_t m : members)
          if (order_le(universe[m].tile(ty), top_tile, c)) s += seq.weight(m);
        if (s > cap_scale * universe[t].spatial_length().to_double())
          return false;
      }
    }
    return true;
  };

  if (n_tiles <= opts.exact_budget && n_tiles <= 20) {
    // precomputed order relation and subset-mass table keep the per-n scan
    // cheap enough for large ensembles
    std::array<std::vector<std::uint32_t>, 3> below;
    for (int ty = 1; ty <= 3; ++ty) {
      below[ty - 1].assign(n_tiles, 0);
      for (std::size_t t = 0; t < n_tiles; ++t)
        for (std::size_t m = 0; m < n_tiles; ++m)
          if (order_le(universe[m].tile(ty), universe[t].tile(ty), c))
            below[ty - 1][t] |= std::uint32_t(1) << m;
    }
    std::vector<double> wtable(std::size_t(1) << n_tiles, 0.0);
    for (std::uint32_t m = 1; m < wtable.size(); ++m) {
      std::uint32_t low = m & (m - 1);
      wtable[m] = wtable[low] + seq.weight(std::size_t(__builtin_ctz(m)));
    }
    std::vector<double> ilen(n_tiles);
    for (std::size_t t = 0; t < n_tiles; ++t)
      ilen[t] = universe[t].spatial_length().to_double();
    std::uint32_t nonzero_mask = 0;
    for (std::size_t m : nonzero) nonzero_mask |= std::uint32_t(1) << m;

    double best_val = 0.0;
    int best_n = 0;
    std::vector<METree> best_pick_trees;
    for (int n = n_hi; n >= n_lo; --n) {
      const double floor_scale = std::exp2(2.0 * n);
      const double cap_scale = 4.0 * floor_scale;
      std::vector<METree> cands;
      std::vector<QInterval> top_ivs;
      std::set<std::pair<std::size_t, std::uint32_t>> seen;  // tree type is immaterial
      for (std::size_t t = 0; t < n_tiles; ++t) {
        for (int ty = 1; ty <= 3; ++ty) {
          const std::uint32_t maximal = below[ty - 1][t] & nonzero_mask;
          if (!maximal) continue;
          for (std::uint32_t sm = maximal;; sm = (sm - 1) & maximal) {
            if (sm == 0) break;
            do {
              if (wtable[sm] < floor_scale * ilen[t]) break;
              if (seen.count({t, sm})) break;
              bool cap_ok = true;
              for (std::size_t t2 = 0; t2 < n_tiles && cap_ok; ++t2)
                for (int ty2 = 1; ty2 <= 3; ++ty2)
                  if (wtable[sm & below[ty2 - 1][t2]] > cap_scale * ilen[t2]) {
                    cap_ok = false;
                    break;
                  }
              if (!cap_ok) break;
              seen.insert({t, sm});
              cands.push_back(METree{t, ty, sm, ilen[t],
                                     std::size_t(__builtin_ctz(sm))});
              top_ivs.push_back(universe[t].time.interval());
            } while (false);
          }
        }
      }
      if (cands.empty()) continue;
      MECollectionSearch search{cands, universe, top_ivs, seq.slot, 0.0, {}};
      std::vector<std::size_t> pick;
      search.run(nonzero_mask, pick, 0.0);
      if (search.best > 0.0) {
        double val = std::exp2(double(n)) * std::sqrt(search.best);
        if (val > best_val) {
          best_val = val;
          best_n = n;
          best_pick_trees.clear();
          for (std::size_t ci : search.best_pick) best_pick_trees.push_back(cands[ci]);
        }
      }
    }
    r.lower = r.upper = best_val;
    r.exact = true;
    r.witness_n = best_n;
    r.witness.disjointness_type = seq.slot;
    r.witness.verified_strongly_disjoint = true;
    for (const auto& mt : best_pick_trees) {
      Tree t;
      t.top = universe[mt.top];
      t.type = mt.type;
      for (std::uint32_t m = mt.members; m; m &= m - 1)
        t.members.push_back(std::size_t(__builtin_ctz(m)));
      r.witness.trees.push_back(t);
    }
    return r;
  }

  // bracket mode
  EnergyResult e = energy(universe, seq, opts.energy_budget);
  r.upper = e.upper;
  r.exact = false;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double floor_scale = std::exp2(2.0 * n);
    const double cap_scale = 4.0 * floor_scale;
    // admissible singletons, greedily packed by descending spatial length
    std::vector<std::size_t> pool;
    for (std::size_t m : nonzero) {
      double ratio = seq.weight(m) / universe[m].spatial_length().to_double();
      if (ratio >= floor_scale && ratio <= cap_scale) pool.push_back(m);
    }
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      return universe[a].spatial_length() > universe[b].spatial_length();
    });
    std::vector<std::size_t> chosen;
    double sum_len = 0.0;
    for (std::size_t m : pool) {
      bool ok = true;
      for (std::size_t k : chosen)
        if (!pair_strongly_disjoint(universe[m], universe[k].time.interval(),
                                    universe[k], universe[m].time.interval(),
                                    seq.slot)) {
          ok = false;
          break;
        }
      if (ok) {
        chosen.push_back(m);
        sum_len += universe[m].spatial_length().to_double();
      }
    }
    if (!chosen.empty()) {
      double val = std::exp2(double(n)) * std::sqrt(sum_len);
      if (val > r.lower) {
        r.lower = val;
        r.witness_n = n;
        r.witness = TreeCollection{};
        r.witness.disjointness_type = seq.slot;
        r.witness.verified_strongly_disjoint = true;
        for (std::size_t m : chosen) {
          Tree t;
          t.top = universe[m];
          t.type = seq.slot;
          t.members = {m};
          r.witness.trees.push_back(t);
        }
      }
    }
  }
  // caller-supplied candidate collections (e.g. from the selection algorithm)
  for (const auto& coll : extra_candidates) {
    if (coll.trees.empty()) continue;
    if (check_strongly_disjoint(coll.trees, universe, seq.slot)) continue;
    for (int n = n_lo; n <= n_hi; ++n) {
      const double floor_scale = std::exp2(2.0 * n);
      bool ok = true;
      double sum_len = 0.0;
      for (const auto& t : coll.trees) {
        double mass = tree_mass(t.members);
        double i_len = t.top.spatial_length().to_double();
        if (mass < floor_scale * i_len || !subtree_upper_ok(t.members, n)) {
          ok = false;
          break;
        }
        sum_len += i_len;
      }
      if (!ok) continue;
      double val = std::exp2(double(n)) * std::sqrt(sum_len);
      if (val > r.lower) {
        r.lower = val;
        r.witness_n = n;
        r.witness = coll;
        r.witness.verified_strongly_disjoint = true;
      }
    }
  }
  r.lower = std::min(r.lower, r.upper);
  return r;
}

std::optional<DualEnergyWitness> dual_energy_witness(
    const std::vector<TriTile>& universe, const CoefficientSequence& seq,
    const OrderConstants& c, const ModifiedEnergyOptions& opts) {
  ModifiedEnergyResult me = modified_energy(universe, seq, c, opts);
  if (me.witness.trees.empty() || me.lower == 0.0) return std::nullopt;

  DualEnergyWitness w;
  w.trees = me.witness;
  w.modified_energy = me.lower;
  double sum_len = 0.0;
  for (const auto& t : w.trees.trees) sum_len += t.top.spatial_length().to_double();
  const double scale = std::exp2(double(-me.witness_n)) / std::sqrt(sum_len);
  w.c_values.assign(universe.size(), cplx(0.0, 0.0));
  cplx pairing(0.0, 0.0);
  for (const auto& t : w.trees.trees)
    for (std::size_t m : t.members) {
      w.c_values[m] = scale * seq.values[m];
      pairing += seq.values[m] * std::conj(w.c_values[m]);
    }
  w.pairing = std::abs(pairing);
  w.pairing_ratio = w.pairing / w.modified_energy;

  // normalization clause: sum over subtrees of |c|^2 against |I_T'| / sum|I_T|
  double worst = 0.0;
  for (const auto& t : w.trees.trees) {
    for (std::size_t top = 0; top < universe.size(); ++top) {
      for (int ty = 1; ty <= 3; ++ty) {
        Tile top_tile = universe[top].tile(ty);
        double s = 0.0;
        bool any = false;
        for (std::size_t m : t.members)
          if (order_le(universe[m].tile(ty), top_tile, c)) {
            s += std::norm(w.c_values[m]);
            any = true;
          }
        if (!any) continue;
        double bound = universe[top].spatial_length().to_double() / sum_len;
        worst = std::max(worst, s / bound);
      }
    }
  }
  w.normalization_worst = worst;
  return w;
}

double weak_l1(const StepFunction& f, const QInterval& window) {
  std::vector<double> levels;
  for (const auto& [iv, v] : f.pieces)
    if (v > 0.0 && iv.intersects(window)) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double best = 0.0;
  for (double v : levels) {
    Rat meas(0);
    for (const auto& [iv, val] : f.pieces) {
      if (val < v) continue;
      Rat lo = max(iv.lo, window.lo), hi = min(iv.hi, window.hi);
      if (lo < hi) meas += hi - lo;
    }
    best = std::max(best, v * meas.to_double());
  }
  return best;
}

JnComparison jn_compare(const std::vector<TriTile>& universe,
                        const CoefficientSequence& seq, const OrderConstants& c) {
  check_sequence(universe, seq);
  JnComparison out;
  SizeResult s = size(universe, seq, c);
  out.lhs = s.value;

  for (std::size_t top = 0; top < universe.size(); ++top) {
    for (int i = 1; i <= 3; ++i) {
      if (i == seq.slot) continue;
      Tree t = maximal_tree(universe, universe[top], i, c);
      if (t.members.empty()) continue;
      const QInterval it = universe[top].time.interval();
      // refinement cells of the square function inside I_T
      std::vector<Rat> cuts{it.lo, it.hi};
      for (std::size_t m : t.members) {
        QInterval im = universe[m].time.interval();
        if (it.lo < im.lo && im.lo < it.hi) cuts.push_back(im.lo);
        if (it.lo < im.hi && im.hi < it.hi) cuts.push_back(im.hi);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      StepFunction g;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        QInterval cell{cuts[k], cuts[k + 1]};
        double sum = 0.0;
        for (std::size_t m : t.members)
          if (universe[m].time.interval().contains(cell.center()))
            sum += seq.weight(m) / universe[m].spatial_length().to_double();
        if (sum > 0.0) g.pieces.emplace_back(cell, std::sqrt(sum));
      }
      double rhs_tree =
          weak_l1(g, it) / universe[top].spatial_length().to_double();
      out.rhs = std::max(out.rhs, rhs_tree);
    }
  }
  if (out.lhs == 0.0 && out.rhs == 0.0)
    out.ratio = 1.0;
  else if (out.lhs == 0.0)
    out.ratio = HUGE_VAL;
  else
    out.ratio = out.rhs / out.lhs;
  return out;
}

}  // namespace biest
