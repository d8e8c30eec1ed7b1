#include "biest/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biest {

TreeFormResult tree_form(const std::vector<TriTile>& universe, const Tree& t,
                         const CoefficientSequence& a1,
                         const CoefficientSequence& a2,
                         const CoefficientSequence& a3,
                         const OrderConstants& c) {
  TreeFormResult r;
  const CoefficientSequence* seqs[3] = {&a1, &a2, &a3};
  for (std::size_t m : t.members) {
    double inv_sqrt = 1.0 / std::sqrt(universe[m].spatial_length().to_double());
    r.value += inv_sqrt * a1.values[m] * a2.values[m] * a3.values[m];
  }
  r.bound = t.top.spatial_length().to_double();
  for (int j = 0; j < 3; ++j) {
    SizeResult s = size_over(universe, *seqs[j], c, t.members, &t.top);
    r.sizes[j] = s.value;
    r.bound *= s.value;
  }
  return r;
}

namespace {

struct NormalizedWeights {
  std::vector<double> w;  // |a|^2 / energy_norm^2
};

// one-sided tree members under a chosen (top, type): P_i <= top_i and
// P_j lesssim^{+/-} top_j
std::vector<std::size_t> one_sided_members(const std::vector<TriTile>& universe,
                                           const std::vector<std::size_t>& pool,
                                           const TriTile& top, int i, int j,
                                           bool upward, const OrderConstants& c) {
  std::vector<std::size_t> out;
  Tile top_i = top.tile(i);
  Tile top_j = top.tile(j);
  for (std::size_t m : pool) {
    if (!order_le(universe[m].tile(i), top_i, c)) continue;
    bool side = upward ? order_lesssim_plus(universe[m].tile(j), top_j, c)
                       : order_lesssim_minus(universe[m].tile(j), top_j, c);
    if (side) out.push_back(m);
  }
  return out;
}

double mass_of(const NormalizedWeights& nw, const std::vector<std::size_t>& v) {
  double s = 0.0;
  for (std::size_t m : v) s += nw.w[m];
  return s;
}

}  // namespace

SelectionTrace select_trees(const std::vector<TriTile>& universe,
                            const CoefficientSequence& seq, int n,
                            double energy_norm, const OrderConstants& c) {
  check_sequence(universe, seq);
  if (!(energy_norm > 0.0))
    throw std::invalid_argument("select_trees: energy_norm must be positive");
  const int j = seq.slot;

  SelectionTrace trace;
  trace.slot = j;
  trace.level_n = n;
  trace.energy_norm = energy_norm;
  trace.threshold_scale = std::exp2(-2.0 * n - 3.0);

  NormalizedWeights nw;
  nw.w.resize(universe.size());
  for (std::size_t m = 0; m < universe.size(); ++m)
    nw.w[m] = seq.weight(m) / (energy_norm * energy_norm);

  {
    SizeResult s0 = size(universe, seq, c);
    if (s0.value / energy_norm > std::exp2(double(-n)))
      throw std::invalid_argument("select_trees: size-stop precondition fails");
  }

  std::vector<std::size_t> pool(universe.size());
  for (std::size_t m = 0; m < pool.size(); ++m) pool[m] = m;

  auto remove_from_pool = [&](const std::vector<std::size_t>& gone) {
    std::vector<std::size_t> next;
    next.reserve(pool.size());
    for (std::size_t m : pool)
      if (std::find(gone.begin(), gone.end(), m) == gone.end())
        next.push_back(m);
    pool = std::move(next);
  };

  auto run_pass = [&](bool upward) {
    for (;;) {
      // eligible maximal one-sided trees
      struct Candidate {
        std::size_t top;
        int type;
        std::vector<std::size_t> members;
        double mass;
      };
      std::vector<Candidate> eligible;
      for (std::size_t t : pool) {
        for (int i = 1; i <= 3; ++i) {
          if (i == j) continue;
          auto members =
              one_sided_members(universe, pool, universe[t], i, j, upward, c);
          if (members.empty()) continue;
          double mass = mass_of(nw, members);
          double thr = trace.threshold_scale *
                       universe[t].spatial_length().to_double();
          if (mass >= thr) eligible.push_back({t, i, std::move(members), mass});
        }
      }
      if (eligible.empty()) break;
      // primary goal: extreme xi_{T,j}; secondary: inclusion-maximal;
      // further ties broken canonically
      std::size_t best = 0;
      for (std::size_t k = 1; k < eligible.size(); ++k) {
        const auto& a = eligible[k];
        const auto& b = eligible[best];
        Rat xa = universe[a.top].tile(j).xi();
        Rat xb = universe[b.top].tile(j).xi();
        if (xa != xb) {
          bool better = upward ? (xa > xb) : (xa < xb);
          if (better) best = k;
          continue;
        }
        auto superset = [](const std::vector<std::size_t>& big,
                           const std::vector<std::size_t>& small) {
          return std::includes(big.begin(), big.end(), small.begin(), small.end());
        };
        if (superset(a.members, b.members) && a.members.size() > b.members.size()) {
          best = k;
          continue;
        }
        if (superset(b.members, a.members) && b.members.size() > a.members.size())
          continue;
        const TriTile& ta = universe[a.top];
        const TriTile& tb = universe[b.top];
        if (ta.spatial_length() != tb.spatial_length()) {
          if (ta.spatial_length() > tb.spatial_length()) best = k;
          continue;
        }
        if (ta.time.lo() != tb.time.lo()) {
          if (ta.time.lo() < tb.time.lo()) best = k;
          continue;
        }
        if (a.top < b.top) best = k;
      }
      Candidate chosen = eligible[best];

      // companion j-tree under the same top, drawn from what remains
      std::vector<std::size_t> companion;
      Tile top_j = universe[chosen.top].tile(j);
      for (std::size_t m : pool) {
        if (std::find(chosen.members.begin(), chosen.members.end(), m) !=
            chosen.members.end())
          continue;
        if (order_le(universe[m].tile(j), top_j, c)) companion.push_back(m);
      }

      SelectedPair pair;
      pair.pass = upward ? SelectionPass::up : SelectionPass::down;
      pair.tree = Tree{universe[chosen.top], chosen.type, chosen.members};
      pair.companion = companion;
      pair.tree_mass = chosen.mass;
      pair.companion_mass = mass_of(nw, companion);
      trace.selected.push_back(pair);

      std::vector<std::size_t> gone = chosen.members;
      gone.insert(gone.end(), companion.begin(), companion.end());
      remove_from_pool(gone);
    }
  };

  run_pass(true);
  run_pass(false);
  trace.remainder = pool;

  // postconditions
  for (std::size_t t : pool) {
    double thr = trace.threshold_scale * universe[t].spatial_length().to_double();
    for (int i = 1; i <= 3; ++i) {
      if (i == j) continue;
      double up = mass_of(nw, one_sided_members(universe, pool, universe[t], i,
                                                j, true, c));
      double down = mass_of(nw, one_sided_members(universe, pool, universe[t],
                                                  i, j, false, c));
      if (!(up < thr)) trace.plus_left_ok = false;
      if (!(down < thr)) trace.plus_right_ok = false;
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<Tree> primaries;
    for (const auto& p : trace.selected)
      if ((p.pass == SelectionPass::up) == (pass == 0)) primaries.push_back(p.tree);
    if (check_strongly_disjoint(primaries, universe, j))
      trace.strongly_disjoint_ok = false;
  }
  {
    CoefficientSequence rest = seq;
    for (std::size_t m = 0; m < universe.size(); ++m) rest.values[m] = 0.0;
    for (std::size_t m : pool) rest.values[m] = seq.values[m];
    SizeResult s = size_over(universe, rest, c, pool, nullptr);
    trace.remainder_size = s.value / energy_norm;
    trace.size_lower_ok = trace.remainder_size <= std::exp2(double(-n - 1));
  }
  for (const auto& p : trace.selected) {
    trace.sum_tree_lengths += p.tree.top.spatial_length().to_double();
    if (!p.companion.empty())
      trace.sum_tree_lengths += p.tree.top.spatial_length().to_double();
  }
  return trace;
}

std::string SelectionTrace::to_json() const {
  nlohmann::json out;
  out["slot"] = slot;
  out["n"] = level_n;
  out["energy_norm"] = energy_norm;
  out["threshold_scale"] = threshold_scale;
  out["selected"] = nlohmann::json::array();
  for (const auto& p : selected) {
    nlohmann::json rec;
    rec["pass"] = p.pass == SelectionPass::up ? "up" : "down";
    rec["top_scale_exp"] = p.tree.top.time.j;
    rec["top_k"] = p.tree.top.time.k;
    rec["type"] = p.tree.type;
    rec["members"] = p.tree.members;
    rec["companion"] = p.companion;
    rec["tree_mass"] = p.tree_mass;
    rec["companion_mass"] = p.companion_mass;
    out["selected"].push_back(rec);
  }
  out["remainder"] = remainder;
  out["plus_left_ok"] = plus_left_ok;
  out["plus_right_ok"] = plus_right_ok;
  out["strongly_disjoint_ok"] = strongly_disjoint_ok;
  out["size_lower_ok"] = size_lower_ok;
  out["remainder_size"] = remainder_size;
  out["sum_tree_lengths"] = sum_tree_lengths;
  return out.dump(2);
}

PartitionResult partition(const std::vector<TriTile>& universe,
                          const CoefficientSequence& a1,
                          const CoefficientSequence& a2,
                          const CoefficientSequence& a3,
                          const OrderConstants& c) {
  const CoefficientSequence* seqs[3] = {&a1, &a2, &a3};
  for (int j = 0; j < 3; ++j) check_sequence(universe, *seqs[j]);

  PartitionResult out;
  std::vector<std::size_t> live;
  for (std::size_t m = 0; m < universe.size(); ++m) {
    bool zero = true;
    for (int j = 0; j < 3; ++j)
      if (seqs[j]->weight(m) > 0.0) zero = false;
    if (zero)
      out.zero_tiles.push_back(m);
    else
      live.push_back(m);
  }

  for (int j = 0; j < 3; ++j) {
    ModifiedEnergyResult me = modified_energy(universe, *seqs[j], c);
    out.energies[j] = me.upper;
    out.sizes[j] = size(universe, *seqs[j], c).value;
  }
  if (live.empty()) return out;

  auto restricted = [&](int j, const std::vector<std::size_t>& pool) {
    CoefficientSequence s = *seqs[j];
    std::vector<char> keep(universe.size(), 0);
    for (std::size_t m : pool) keep[m] = 1;
    for (std::size_t m = 0; m < universe.size(); ++m)
      if (!keep[m]) s.values[m] = 0.0;
    return s;
  };
  auto size_on = [&](int j, const std::vector<std::size_t>& pool) {
    CoefficientSequence s = restricted(j, pool);
    return size_over(universe, s, c, pool, nullptr);
  };

  // starting level: size_j <= 2^{-n} E_j for all j with a nonzero energy
  int n0 = 0;
  bool first = true;
  for (int j = 0; j < 3; ++j) {
    if (out.energies[j] == 0.0 || out.sizes[j] == 0.0) continue;
    int nj = int(std::floor(-std::log2(out.sizes[j] / out.energies[j])));
    while (out.sizes[j] > std::exp2(double(-nj)) * out.energies[j]) --nj;
    n0 = first ? nj : std::min(n0, nj);
    first = false;
  }

  std::vector<std::size_t> pool = live;
  int n = n0;
  const int max_levels = 400;
  for (int guard = 0; !pool.empty() && guard < max_levels; ++guard, ++n) {
    PartitionLevel level;
    level.n = n;
    std::vector<char> taken(universe.size(), 0);

    for (int j = 0; j < 3; ++j) {
      if (out.energies[j] == 0.0) continue;
      CoefficientSequence rest = restricted(j, pool);
      SelectionTrace tr = select_trees(universe, rest, n, out.energies[j], c);
      level.selected_pairs[j] = int(tr.selected.size());
      std::vector<char> in_pool(universe.size(), 0);
      for (std::size_t m : pool) in_pool[m] = 1;
      for (const auto& p : tr.selected) {
        // the selection ran over the whole universe with coefficients zeroed
        // off the pool; only pool members actually move at this level
        Tree cover_tree = p.tree;
        cover_tree.members.clear();
        for (std::size_t m : p.tree.members)
          if (in_pool[m]) cover_tree.members.push_back(m);
        for (std::size_t m : p.companion)
          if (in_pool[m]) cover_tree.members.push_back(m);
        if (!cover_tree.members.empty()) {
          level.cover.push_back(cover_tree);
          level.sum_tree_lengths += cover_tree.top.spatial_length().to_double();
        }
        for (std::size_t m : cover_tree.members) taken[m] = 1;
      }
      std::vector<std::size_t> next;
      for (std::size_t m : pool)
        if (!taken[m]) next.push_back(m);
      pool = std::move(next);
    }

    // restore the next level's entry bound: move whole size-witness trees
    // (plus their companion j-trees) into this level's cover
    for (int j = 0; j < 3; ++j) {
      if (out.energies[j] == 0.0) continue;
      for (;;) {
        if (pool.empty()) break;
        SizeResult s = size_on(j, pool);
        if (s.value <= std::exp2(double(-n - 1)) * out.energies[j]) break;
        Tree w = s.witness;
        Tile top_j = w.top.tile(seqs[j]->slot);
        for (std::size_t m : pool) {
          if (std::find(w.members.begin(), w.members.end(), m) != w.members.end())
            continue;
          if (order_le(universe[m].tile(seqs[j]->slot), top_j, c))
            w.members.push_back(m);
        }
        level.cover.push_back(w);
        level.sum_tree_lengths += w.top.spatial_length().to_double();
        ++level.flushed_trees;
        for (std::size_t m : w.members) taken[m] = 1;
        std::vector<std::size_t> next;
        for (std::size_t m : pool)
          if (!taken[m]) next.push_back(m);
        pool = std::move(next);
      }
    }

    for (std::size_t m = 0; m < universe.size(); ++m)
      if (taken[m]) level.tiles.push_back(m);
    if (!level.tiles.empty()) out.levels.push_back(level);
    if (pool.empty()) break;
  }
  if (!pool.empty())
    throw std::runtime_error("partition: failed to exhaust the universe");

  // zero tiles carry no mass; cover them by singleton trees at the last level
  if (!out.zero_tiles.empty()) {
    PartitionLevel& last = out.levels.empty()
                               ? out.levels.emplace_back()
                               : out.levels.back();
    for (std::size_t m : out.zero_tiles) {
      last.tiles.push_back(m);
      last.cover.push_back(Tree{universe[m], 1, {m}});
      last.sum_tree_lengths += universe[m].spatial_length().to_double();
    }
  }
  return out;
}

std::string PartitionResult::to_json() const {
  nlohmann::json out;
  out["energies"] = energies;
  out["sizes"] = sizes;
  out["zero_tiles"] = zero_tiles;
  out["levels"] = nlohmann::json::array();
  for (const auto& lv : levels) {
    nlohmann::json rec;
    rec["n"] = lv.n;
    rec["tiles"] = lv.tiles;
    rec["sum_tree_lengths"] = lv.sum_tree_lengths;
    rec["selected_pairs"] = lv.selected_pairs;
    rec["flushed_trees"] = lv.flushed_trees;
    rec["cover"] = nlohmann::json::array();
    for (const auto& t : lv.cover) {
      nlohmann::json tr;
      tr["type"] = t.type;
      tr["top_scale_exp"] = t.top.time.j;
      tr["top_k"] = t.top.time.k;
      tr["members"] = t.members;
      rec["cover"].push_back(tr);
    }
    out["levels"].push_back(rec);
  }
  return out.dump(2);
}

AbstractBoundResult abstract_bound(const std::vector<TriTile>& universe,
                                   const CoefficientSequence& a1,
                                   const CoefficientSequence& a2,
                                   const CoefficientSequence& a3,
                                   const std::array<double, 3>& theta,
                                   const OrderConstants& c) {
  double tsum = theta[0] + theta[1] + theta[2];
  for (double t : theta)
    if (t < 0.0 || t >= 1.0)
      throw std::invalid_argument("abstract_bound: theta out of range");
  if (std::fabs(tsum - 1.0) > 1e-12)
    throw std::invalid_argument("abstract_bound: theta must sum to 1");

  AbstractBoundResult r;
  const CoefficientSequence* seqs[3] = {&a1, &a2, &a3};
  cplx acc(0.0, 0.0);
  for (std::size_t m = 0; m < universe.size(); ++m) {
    double inv_sqrt = 1.0 / std::sqrt(universe[m].spatial_length().to_double());
    acc += inv_sqrt * a1.values[m] * a2.values[m] * a3.values[m];
  }
  r.lhs = std::abs(acc);
  r.rhs = 1.0;
  for (int j = 0; j < 3; ++j) {
    r.sizes[j] = size(universe, *seqs[j], c).value;
    r.energies[j] = modified_energy(universe, *seqs[j], c).upper;
    r.rhs *= std::pow(r.sizes[j], theta[j]) * std::pow(r.energies[j], 1.0 - theta[j]);
  }
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs == 0.0 ? 0.0 : HUGE_VAL);

  // refinement with slots ordered by energy/size
  std::array<int, 3> ord{0, 1, 2};
  auto ratio_of = [&](int j) {
    return r.sizes[j] > 0.0 ? r.energies[j] / r.sizes[j] : HUGE_VAL;
  };
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    return ratio_of(a) < ratio_of(b);
  });
  double e1 = r.energies[ord[0]], e2 = r.energies[ord[1]], e3 = r.energies[ord[2]];
  double s2 = r.sizes[ord[1]], s3 = r.sizes[ord[2]];
  if (s3 > 0.0 && s2 > 0.0 && e2 > 0.0) {
    r.refined_rhs = e1 * e2 * s3 * std::log1p((e3 / s3) / (e2 / s2));
    r.refined_ratio = r.refined_rhs > 0.0 ? r.lhs / r.refined_rhs
                                          : (r.lhs == 0.0 ? 0.0 : HUGE_VAL);
  } else {
    r.refined_rhs = 0.0;
    r.refined_ratio = r.lhs == 0.0 ? 0.0 : HUGE_VAL;
  }
  return r;
}

}  // namespace biest
