#include "biest/tiles.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biest {

ShiftedCube TriTile::freq_cube() const {
  ShiftedCube q;
  q.n = 3;
  q.axis = freq;
  return q;
}

TriTile make_tri_tile(const ShiftedInterval& time,
                      const std::array<ShiftedInterval, 3>& freq) {
  for (int i = 0; i < 3; ++i) {
    if (freq[i].j != -time.j)
      throw std::invalid_argument("TriTile: area-1 constraint violated");
    if (freq[i].j != freq[0].j)
      throw std::invalid_argument("TriTile: frequency cube must be a cube");
  }
  return TriTile{time, freq};
}

bool order_lt(const Tile& a, const Tile& b, const OrderConstants& c) {
  if (!(b.time.interval().contains(a.time.interval()))) return false;
  if (a.time == b.time) return false;
  Rat f(c.c_order);
  return a.freq.interval().dilate(f).contains(b.freq.interval().dilate(f));
}

bool order_le(const Tile& a, const Tile& b, const OrderConstants& c) {
  return a == b || order_lt(a, b, c);
}

bool order_lesssim(const Tile& a, const Tile& b, const OrderConstants& c) {
  if (!b.time.interval().contains(a.time.interval())) return false;
  Rat f(c.c_lesssim);
  return a.freq.interval().dilate(f).contains(b.freq.interval().dilate(f));
}

bool order_lesssim_prime(const Tile& a, const Tile& b, const OrderConstants& c) {
  return order_lesssim(a, b, c) && !order_le(a, b, c);
}

bool order_lesssim_plus(const Tile& a, const Tile& b, const OrderConstants& c) {
  return order_lesssim_prime(a, b, c) && a.xi() > b.xi();
}

bool order_lesssim_minus(const Tile& a, const Tile& b, const OrderConstants& c) {
  return order_lesssim_prime(a, b, c) && a.xi() < b.xi();
}

std::optional<RankViolation> check_rank1(const std::vector<TriTile>& tiles,
                                         const OrderConstants& c) {
  const Rat scale(c.c_scale);
  for (std::size_t x = 0; x < tiles.size(); ++x) {
    for (std::size_t y = 0; y < tiles.size(); ++y) {
      if (x == y) continue;
      const TriTile& pp = tiles[x];  // P'
      const TriTile& p = tiles[y];   // P
      for (int j = 1; j <= 3; ++j)
        if (pp.tile(j) == p.tile(j)) return RankViolation{x, y, 1};
      int j_le = 0;
      for (int j = 1; j <= 3; ++j)
        if (order_le(pp.tile(j), p.tile(j), c)) {
          j_le = j;
          break;
        }
      if (j_le == 0) continue;
      for (int i = 1; i <= 3; ++i)
        if (!order_lesssim(pp.tile(i), p.tile(i), c))
          return RankViolation{x, y, 2};
      if (scale * pp.spatial_length() < p.spatial_length()) {
        for (int i = 1; i <= 3; ++i) {
          if (i == j_le) continue;
          if (!order_lesssim_prime(pp.tile(i), p.tile(i), c))
            return RankViolation{x, y, 3};
        }
      }
    }
  }
  return std::nullopt;
}

bool is_tree(const Tree& t, const std::vector<TriTile>& universe,
             const OrderConstants& c) {
  Tile top = t.top.tile(t.type);
  for (std::size_t m : t.members)
    if (!order_le(universe[m].tile(t.type), top, c)) return false;
  return true;
}

Tree maximal_tree(const std::vector<TriTile>& universe, const TriTile& top,
                  int i, const OrderConstants& c) {
  Tree t;
  t.top = top;
  t.type = i;
  Tile top_tile = top.tile(i);
  for (std::size_t m = 0; m < universe.size(); ++m)
    if (order_le(universe[m].tile(i), top_tile, c)) t.members.push_back(m);
  return t;
}

std::optional<DisjointnessViolation> check_strongly_disjoint(
    const std::vector<Tree>& trees, const std::vector<TriTile>& universe, int i) {
  for (std::size_t ta = 0; ta < trees.size(); ++ta) {
    for (std::size_t tb = 0; tb < trees.size(); ++tb) {
      if (ta == tb) continue;
      for (std::size_t ma : trees[ta].members) {
        for (std::size_t mb : trees[tb].members) {
          Tile pa = universe[ma].tile(i);
          Tile pb = universe[mb].tile(i);
          if (pa == pb) return DisjointnessViolation{ta, tb, ma, mb, 1};
          // 2omega overlap forces the other member's spatial interval out of
          // this tree's top interval
          if (pa.freq.interval().dilate(Rat(2))
                  .intersects(pb.freq.interval().dilate(Rat(2)))) {
            if (universe[mb].time.interval().intersects(trees[ta].top_interval()))
              return DisjointnessViolation{ta, tb, ma, mb, 2};
          }
        }
      }
    }
  }
  return std::nullopt;
}

BiestTrickResult biest_trick_predicate(const Tree& t,
                                       const std::vector<TriTile>& q_universe,
                                       const std::vector<TriTile>& p_universe,
                                       const Rat& sparse_factor) {
  // sparseness of the tree's cubes is a precondition; verify it
  std::vector<ShiftedCube> cubes;
  for (std::size_t m : t.members) cubes.push_back(q_universe[m].freq_cube());
  if (!is_sparse(cubes, sparse_factor))
    throw std::invalid_argument("biest_trick_predicate: tree is not sparse");

  BiestTrickResult r;
  for (std::size_t p = 0; p < p_universe.size(); ++p) {
    bool in = false;
    for (std::size_t m : t.members) {
      if (p_universe[p].freq[0].interval().contains(
              q_universe[m].freq[2].interval())) {
        in = true;
        break;
      }
    }
    if (in) r.selected.push_back(p);
  }
  for (std::size_t p = 0; p < p_universe.size() && r.equivalence_holds; ++p) {
    bool in_selected = std::binary_search(r.selected.begin(), r.selected.end(), p);
    for (std::size_t m : t.members) {
      QInterval w_p1 = p_universe[p].freq[0].interval();
      QInterval w_q3 = q_universe[m].freq[2].interval();
      if (!w_p1.intersects(w_q3)) continue;
      bool incl = w_p1.contains(w_q3);
      if (incl != in_selected) {
        r.equivalence_holds = false;
        r.bad_q = m;
        r.bad_p = p;
        break;
      }
    }
  }
  return r;
}

namespace {

// candidate k values for a mesh interval at scale exponent jf whose dilated
// containment relation against `ref` matches `want_le` (c_order) and
// `want_ls` (c_lesssim)
std::vector<std::int64_t> freq_candidates(const ShiftedInterval& ref, int jf,
                                          Shift sig, bool want_3, bool forbid_3,
                                          const OrderConstants& c,
                                          std::int64_t k_abs_max) {
  std::vector<std::int64_t> out;
  Rat step = Rat::pow2(jf);
  std::int64_t k_center = (ref.center() / step).floor();
  const Rat f3(c.c_order), fl(c.c_lesssim);
  for (std::int64_t k = k_center - 6; k <= k_center + 6; ++k) {
    if (std::llabs(k) > k_abs_max) continue;
    ShiftedInterval cand{jf, k, sig};
    // cand is the wider (member-side) interval: the dilate of the parent's
    // interval must sit inside the dilate of the candidate's
    bool has3 = cand.interval().dilate(f3).contains(ref.interval().dilate(f3));
    bool hasl = cand.interval().dilate(fl).contains(ref.interval().dilate(fl));
    if (!hasl) continue;
    if (want_3 && !has3) continue;
    if (forbid_3 && has3) continue;
    out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<TriTile> gen_rank1(const GenParams& p, const OrderConstants& c) {
  std::mt19937_64 rng(p.seed);
  std::vector<TriTile> tiles;
  std::vector<int> ladder = p.scale_ladder;
  std::sort(ladder.begin(), ladder.end(), std::greater<int>());
  const Rat sparse_factor(c.c_scale);

  auto uniform_int = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  auto uniform01 = [&]() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };

  auto admissible = [&](const TriTile& cand) {
    std::vector<TriTile> probe = tiles;
    probe.push_back(cand);
    if (check_rank1(probe, c)) return false;
    std::vector<ShiftedCube> cubes;
    for (const auto& t : probe) cubes.push_back(t.freq_cube());
    return is_sparse(cubes, sparse_factor);
  };

  auto fresh_root = [&]() -> std::optional<TriTile> {
    int js = p.root_scale_index >= 0 && p.root_scale_index < int(ladder.size())
                 ? ladder[p.root_scale_index]
                 : ladder[uniform_int(0, std::int64_t(ladder.size()) - 1)];
    if (js > p.window_exp) return std::nullopt;
    std::int64_t k_max = (std::int64_t(1) << (p.window_exp - js)) - 1;
    ShiftedInterval time = dyadic_interval(js, uniform_int(0, k_max));
    int jf = -js;
    Rat step = Rat::pow2(jf);
    std::int64_t kf_max =
        (Rat::pow2(p.freq_window_exp) / step).floor() - 1;
    if (kf_max < 1) return std::nullopt;
    std::array<ShiftedInterval, 3> freq;
    for (int i = 0; i < 3; ++i)
      freq[i] = ShiftedInterval{jf, uniform_int(-kf_max, kf_max), p.sigma[i]};
    return make_tri_tile(time, freq);
  };

  auto fresh_child = [&]() -> std::optional<TriTile> {
    if (tiles.empty()) return std::nullopt;
    // only tiles with a ladder scale below them can parent a child
    std::vector<std::size_t> eligible;
    for (std::size_t t = 0; t < tiles.size(); ++t)
      if (tiles[t].time.j > ladder.back()) eligible.push_back(t);
    if (eligible.empty()) return std::nullopt;
    const TriTile& parent =
        tiles[eligible[uniform_int(0, std::int64_t(eligible.size()) - 1)]];
    // next ladder scale strictly below the parent's
    int js = 0;
    bool found = false;
    for (int cand : ladder)
      if (cand < parent.time.j) {
        js = cand;
        found = true;
        break;
      }
    if (!found) return std::nullopt;
    int depth = parent.time.j - js;
    std::int64_t off = uniform_int(0, (std::int64_t(1) << depth) - 1);
    ShiftedInterval time = dyadic_interval(js, (parent.time.k << depth) + off);

    // spatial siblings share a frequency cube; sparseness constrains the set
    // of cubes, not the multiset, and this is what gives trees their mass
    std::vector<const TriTile*> cube_donors;
    for (const auto& t : tiles)
      if (t.time.j == js && parent.time.interval().contains(t.time.interval()))
        cube_donors.push_back(&t);
    if (!cube_donors.empty() && uniform01() < p.sibling_bias) {
      const TriTile* donor =
          cube_donors[uniform_int(0, std::int64_t(cube_donors.size()) - 1)];
      return make_tri_tile(time, donor->freq);
    }

    int jf = -js;
    std::int64_t kf_max = (Rat::pow2(p.freq_window_exp) / Rat::pow2(jf)).floor() - 1;
    int tree_coord = p.tree_coord != 0 ? p.tree_coord : int(uniform_int(1, 3));
    bool upward = uniform01() < p.up_bias;
    std::array<ShiftedInterval, 3> freq;
    for (int i = 1; i <= 3; ++i) {
      bool is_tree_axis = (i == tree_coord);
      auto ks = freq_candidates(parent.freq[i - 1], jf, p.sigma[i - 1],
                                is_tree_axis, !is_tree_axis, c, kf_max);
      if (ks.empty()) return std::nullopt;
      if (!is_tree_axis) {
        // keep only candidates on the requested side of the parent's center
        std::vector<std::int64_t> sided;
        for (std::int64_t k : ks) {
          ShiftedInterval cand{jf, k, p.sigma[i - 1]};
          bool above = parent.freq[i - 1].center() < cand.center();
          if (above == upward) sided.push_back(k);
        }
        if (!sided.empty()) ks = sided;
      }
      freq[i - 1] =
          ShiftedInterval{jf, ks[uniform_int(0, std::int64_t(ks.size()) - 1)],
                          p.sigma[i - 1]};
    }
    return make_tri_tile(time, freq);
  };

  const int total_budget = int(p.count) * p.max_tries_per_tile;
  int tries = 0;
  while (tiles.size() < p.count) {
    if (++tries > total_budget)
      throw std::runtime_error(
          "gen_rank1: constraints unsatisfiable at requested density");
    std::optional<TriTile> cand;
    if (!tiles.empty() && uniform01() < p.child_bias) cand = fresh_child();
    if (!cand) cand = fresh_root();
    if (!cand) continue;
    bool dup = false;
    for (const auto& t : tiles)
      if (t == *cand) dup = true;
    if (dup) continue;
    if (admissible(*cand)) tiles.push_back(*cand);
  }

  // canonical order: scale, spatial index, frequency indices
  std::sort(tiles.begin(), tiles.end(), [](const TriTile& a, const TriTile& b) {
    if (a.time.j != b.time.j) return a.time.j > b.time.j;
    if (a.time.k != b.time.k) return a.time.k < b.time.k;
    for (int i = 0; i < 3; ++i)
      if (a.freq[i].k != b.freq[i].k) return a.freq[i].k < b.freq[i].k;
    return false;
  });
  return tiles;
}

std::string dump_tri_tiles(const std::vector<TriTile>& tiles) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tiles) {
    nlohmann::json rec;
    rec["I"] = {t.time.lo().str(), t.time.hi().str()};
    for (int i = 0; i < 3; ++i)
      rec["omega_" + std::to_string(i + 1)] = {t.freq[i].lo().str(),
                                               t.freq[i].hi().str()};
    rec["shift"] = {shift_value(t.freq[0].sigma).str(),
                    shift_value(t.freq[1].sigma).str(),
                    shift_value(t.freq[2].sigma).str()};
    rec["scale_exp"] = t.time.j;
    rec["k"] = t.time.k;
    rec["freq_k"] = {t.freq[0].k, t.freq[1].k, t.freq[2].k};
    arr.push_back(rec);
  }
  return arr.dump(2);
}

std::vector<TriTile> parse_tri_tiles(const std::string& json_text) {
  nlohmann::json arr = nlohmann::json::parse(json_text);
  std::vector<TriTile> out;
  for (const auto& rec : arr) {
    int js = rec.at("scale_exp").get<int>();
    std::int64_t k = rec.at("k").get<std::int64_t>();
    std::array<ShiftedInterval, 3> freq;
    for (int i = 0; i < 3; ++i) {
      Rat s = Rat::parse(rec.at("shift")[i].get<std::string>());
      Shift sig = s.is_zero() ? Shift::zero
                  : (s == Rat(1, 3) ? Shift::third : Shift::two_thirds);
      freq[i] = ShiftedInterval{-js, rec.at("freq_k")[i].get<std::int64_t>(), sig};
    }
    out.push_back(make_tri_tile(dyadic_interval(js, k), freq));
  }
  return out;
}

}  // namespace biest
