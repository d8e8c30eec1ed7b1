#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace biest;
using namespace testsupport;

namespace {

const OrderConstants kOc = OrderConstants::desk();

// brute-force size: sup over (top, type, subset) with the subset inside the
// maximal tree, tops from the universe
double brute_size(const std::vector<TriTile>& u, const CoefficientSequence& a) {
  double best = 0.0;
  for (std::size_t top = 0; top < u.size(); ++top) {
    for (int i = 1; i <= 3; ++i) {
      if (i == a.slot) continue;
      std::vector<std::size_t> members;
      for (std::size_t m = 0; m < u.size(); ++m)
        if (order_le(u[m].tile(i), u[top].tile(i), kOc)) members.push_back(m);
      if (members.empty()) continue;
      const std::uint32_t full = (1u << members.size()) - 1;
      for (std::uint32_t sm = 0; sm <= full; ++sm) {
        double mass = 0.0;
        for (std::size_t b = 0; b < members.size(); ++b)
          if (sm & (1u << b)) mass += a.weight(members[b]);
        best = std::max(
            best, std::sqrt(mass / u[top].spatial_length().to_double()));
      }
    }
  }
  return best;
}

// brute-force energy: max over all subsets with pairwise disjoint slot tiles
double brute_energy(const std::vector<TriTile>& u, const CoefficientSequence& a) {
  const std::size_t n = u.size();
  double best = 0.0;
  for (std::uint32_t sm = 0; sm < (1u << n); ++sm) {
    bool ok = true;
    double mass = 0.0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(sm & (1u << i))) continue;
      mass += a.weight(i);
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        if (!(sm & (1u << j))) continue;
        Tile ti = u[i].tile(a.slot), tj = u[j].tile(a.slot);
        if (ti.time.interval().intersects(tj.time.interval()) &&
            ti.freq.interval().intersects(tj.freq.interval()))
          ok = false;
      }
    }
    if (ok) best = std::max(best, mass);
  }
  return std::sqrt(best);
}

// brute-force modified energy: straight recursion assigning each tri-tile to
// one open tree (keyed by top and type) or to none, then scanning levels
struct BruteME {
  const std::vector<TriTile>& u;
  const CoefficientSequence& a;
  double best = 0.0;

  struct TreeAcc {
    std::size_t top;
    int type;
    std::vector<std::size_t> members;
  };
  std::vector<TreeAcc> trees;

  bool tree_ok(const TreeAcc& t) const {
    Tile top_tile = u[t.top].tile(t.type);
    for (std::size_t m : t.members)
      if (!order_le(u[m].tile(t.type), top_tile, kOc)) return false;
    return true;
  }

  bool collection_disjoint() const {
    std::vector<Tree> ts;
    for (const auto& t : trees) ts.push_back(Tree{u[t.top], t.type, t.members});
    return !check_strongly_disjoint(ts, u, a.slot).has_value();
  }

  void score() {
    if (trees.empty()) return;
    for (const auto& t : trees)
      if (t.members.empty() || !tree_ok(t)) return;
    if (!collection_disjoint()) return;
    double n_hi = HUGE_VAL;
    for (const auto& t : trees) {
      double mass = 0.0;
      for (std::size_t m : t.members) mass += a.weight(m);
      double i_len = u[t.top].spatial_length().to_double();
      n_hi = std::min(n_hi, 0.5 * std::log2(mass / i_len));
    }
    double n_lo = -HUGE_VAL;
    for (const auto& t : trees) {
      for (std::size_t top = 0; top < u.size(); ++top) {
        for (int ty = 1; ty <= 3; ++ty) {
          Tile top_tile = u[top].tile(ty);
          double mass = 0.0;
          bool any = false;
          for (std::size_t m : t.members)
            if (order_le(u[m].tile(ty), top_tile, kOc)) {
              mass += a.weight(m);
              any = true;
            }
          if (!any) continue;
          double i_len = u[top].spatial_length().to_double();
          n_lo = std::max(n_lo, 0.5 * std::log2(mass / i_len) - 1.0);
        }
      }
    }
    int lo = int(std::ceil(n_lo - 1e-9));
    int hi = int(std::floor(n_hi + 1e-9));
    if (lo > hi) return;
    double sum_len = 0.0;
    for (const auto& t : trees) sum_len += u[t.top].spatial_length().to_double();
    best = std::max(best, std::exp2(double(hi)) * std::sqrt(sum_len));
  }

  void rec(std::size_t tile) {
    if (tile == u.size()) {
      score();
      return;
    }
    rec(tile + 1);  // leave unassigned
    if (a.weight(tile) == 0.0) return;
    for (auto& t : trees) {
      t.members.push_back(tile);
      if (tree_ok(t)) rec(tile + 1);
      t.members.pop_back();
    }
    for (std::size_t top = 0; top < u.size(); ++top) {
      for (int ty = 1; ty <= 3; ++ty) {
        if (!order_le(u[tile].tile(ty), u[top].tile(ty), kOc)) continue;
        trees.push_back(TreeAcc{top, ty, {tile}});
        rec(tile + 1);
        trees.pop_back();
      }
    }
  }
};

double brute_modified_energy(const std::vector<TriTile>& u,
                             const CoefficientSequence& a) {
  BruteME b{u, a};
  b.rec(0);
  return b.best;
}

TriTile unit_tri_tile() {
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  return make_tri_tile(dyadic_interval(0, 0),
                       {ShiftedInterval{0, 0, sig[0]},
                        ShiftedInterval{0, 4, sig[1]},
                        ShiftedInterval{0, 8, sig[2]}});
}

}  // namespace

TEST_CASE("size on worked instances") {
  std::vector<TriTile> one{unit_tri_tile()};
  CoefficientSequence a{1, {cplx(2.0, 0.0)}};
  CHECK(size(one, a, kOc).value == doctest::Approx(2.0));
  CoefficientSequence zero{1, {cplx(0.0, 0.0)}};
  CHECK(size(one, zero, kOc).value == 0.0);
  CHECK(size({}, CoefficientSequence{1, {}}, kOc).value == 0.0);
}

TEST_CASE("size equals the exponential brute force on 5-tile instances") {
  std::mt19937_64 rng(41);
  for (unsigned seed = 0; seed < 12; ++seed) {
    auto u = gen_rank1(combinatorial_gen(100 + seed, 5), kOc);
    for (int slot = 1; slot <= 3; ++slot) {
      auto a = random_sequence(slot, u.size(), rng);
      CHECK(size(u, a, kOc).value ==
            doctest::Approx(brute_size(u, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy on worked instances") {
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  TriTile t1 = unit_tri_tile();
  TriTile t2 = make_tri_tile(dyadic_interval(0, 5),
                             {ShiftedInterval{0, 40, sig[0]},
                              ShiftedInterval{0, 44, sig[1]},
                              ShiftedInterval{0, 48, sig[2]}});
  CoefficientSequence a{1, {cplx(3.0, 0.0), cplx(0.0, 4.0)}};
  EnergyResult e = energy({t1, t2}, a);
  CHECK(e.exact);
  CHECK(e.lower == doctest::Approx(5.0));

  // same slot tile twice: only singletons are admissible
  TriTile t3 = make_tri_tile(dyadic_interval(0, 0),
                             {ShiftedInterval{0, 0, sig[0]},
                              ShiftedInterval{0, 44, sig[1]},
                              ShiftedInterval{0, 48, sig[2]}});
  EnergyResult e2 = energy({t1, t3}, a);
  CHECK(e2.lower == doctest::Approx(4.0));
}

TEST_CASE("energy equals the subset brute force on 10-tile instances") {
  std::mt19937_64 rng(43);
  for (unsigned seed = 0; seed < 10; ++seed) {
    auto u = gen_rank1(combinatorial_gen(200 + seed, 10), kOc);
    for (int slot = 1; slot <= 3; ++slot) {
      auto a = random_sequence(slot, u.size(), rng);
      EnergyResult e = energy(u, a);
      CHECK(e.exact);
      CHECK(e.lower == doctest::Approx(brute_energy(u, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy beyond the budget returns an honest bracket") {
  std::mt19937_64 rng(47);
  auto u = gen_rank1(combinatorial_gen(300, 12), kOc);
  auto a = random_sequence(2, u.size(), rng);
  EnergyResult bracket = energy(u, a, 8);  // force bracket mode
  EnergyResult exact = energy(u, a, 20);
  CHECK(!bracket.exact);
  CHECK(bracket.lower <= exact.lower * (1 + 1e-12));
  CHECK(exact.lower <= bracket.upper * (1 + 1e-12));
}

TEST_CASE("modified energy worked instances") {
  TriTile t = unit_tri_tile();
  CoefficientSequence a{1, {cplx(1.0, 0.0)}};
  ModifiedEnergyResult me = modified_energy({t}, a, kOc);
  CHECK(me.exact);
  CHECK(me.lower == doctest::Approx(1.0));
  CHECK(me.witness_n == 0);

  CoefficientSequence zero{1, {cplx(0.0, 0.0)}};
  CHECK(modified_energy({t}, zero, kOc).lower == 0.0);
}

TEST_CASE("modified energy equals exhaustive enumeration on 6-tile instances") {
  std::mt19937_64 rng(53);
  for (unsigned seed = 0; seed < 8; ++seed) {
    auto u = gen_rank1(combinatorial_gen(400 + seed, 6), kOc);
    for (int slot = 1; slot <= 3; ++slot) {
      auto a = random_sequence(slot, u.size(), rng);
      ModifiedEnergyResult me = modified_energy(u, a, kOc);
      REQUIRE(me.exact);
      double oracle = brute_modified_energy(u, a);
      CHECK(me.lower == doctest::Approx(oracle).epsilon(1e-12));
      ModifiedEnergyOptions opts;
      opts.exact_budget = 3;
      ModifiedEnergyResult br = modified_energy(u, a, kOc, opts);
      CHECK(!br.exact);
      CHECK(br.lower <= me.lower * (1 + 1e-12));
      CHECK(me.lower <= br.upper * (1 + 1e-12));
    }
  }
}

TEST_CASE("dual energy witness clauses") {
  TriTile t = unit_tri_tile();
  CoefficientSequence a{1, {cplx(1.0, 0.0)}};
  auto w = dual_energy_witness({t}, a, kOc);
  REQUIRE(w.has_value());
  CHECK(w->trees.trees.size() == 1);
  CHECK(w->pairing == doctest::Approx(1.0));
  CHECK(w->modified_energy == doctest::Approx(1.0));
  CHECK(std::abs(w->c_values[0] - cplx(1.0, 0.0)) < 1e-15);

  // dyadic scaling moves the witness level, so 2^{-n} absorbs the scalar:
  // c stays put while the pairing and the modified energy scale linearly
  CoefficientSequence b{1, {cplx(4.0, 0.0)}};
  auto w4 = dual_energy_witness({t}, b, kOc);
  REQUIRE(w4.has_value());
  CHECK(std::abs(w4->c_values[0] - cplx(1.0, 0.0)) < 1e-14);
  CHECK(w4->pairing == doctest::Approx(4.0));
  CHECK(w4->modified_energy == doctest::Approx(4.0));
  CHECK(w4->pairing_ratio == doctest::Approx(1.0));

  CHECK(!dual_energy_witness({t}, CoefficientSequence{1, {cplx(0.0, 0.0)}}, kOc)
             .has_value());

  std::mt19937_64 rng(59);
  for (unsigned seed = 0; seed < 8; ++seed) {
    auto u = gen_rank1(combinatorial_gen(500 + seed, 6), kOc);
    auto a6 = random_sequence(2, u.size(), rng);
    auto ww = dual_energy_witness(u, a6, kOc);
    REQUIRE(ww.has_value());
    CHECK(ww->pairing_ratio >= 1.0 - 1e-12);
    CHECK(ww->pairing_ratio <= 4.0 + 1e-12);
    CHECK(ww->normalization_worst <= 4.0 + 1e-12);
  }
}

TEST_CASE("weak L1 on worked step functions") {
  StepFunction f;
  f.pieces.emplace_back(QInterval{Rat(0), Rat(1)}, 1.0);
  CHECK(weak_l1(f, QInterval{Rat(-2), Rat(2)}) == doctest::Approx(1.0));

  StepFunction g;
  g.pieces.emplace_back(QInterval{Rat(0), Rat(1, 2)}, 2.0);
  CHECK(weak_l1(g, QInterval{Rat(0), Rat(1)}) == doctest::Approx(1.0));

  StepFunction h;  // staircase 1, 2, 4 on equal thirds
  h.pieces.emplace_back(QInterval{Rat(0), Rat(1, 3)}, 1.0);
  h.pieces.emplace_back(QInterval{Rat(1, 3), Rat(2, 3)}, 2.0);
  h.pieces.emplace_back(QInterval{Rat(2, 3), Rat(1)}, 4.0);
  double expect = std::max({1.0, 2.0 * (2.0 / 3.0), 4.0 * (1.0 / 3.0)});
  CHECK(weak_l1(h, QInterval{Rat(0), Rat(1)}) == doctest::Approx(expect));
}

TEST_CASE("john-nirenberg comparison conventions and window") {
  TriTile t = unit_tri_tile();
  CoefficientSequence a{1, {cplx(0.7, 0.3)}};
  JnComparison jn = jn_compare({t}, a, kOc);
  CHECK(jn.ratio == doctest::Approx(1.0));
  JnComparison z = jn_compare({t}, CoefficientSequence{1, {cplx(0.0, 0.0)}}, kOc);
  CHECK(z.ratio == 1.0);

  std::mt19937_64 rng(61);
  double lo = HUGE_VAL, hi = 0.0;
  for (unsigned seed = 0; seed < 10; ++seed) {
    auto u = gen_rank1(combinatorial_gen(600 + seed, 30), kOc);
    auto seq = function_like_sequence(u, 2, rng);
    JnComparison r = jn_compare(u, seq, kOc);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  // recorded two-sided window for random ensembles
  CHECK(lo >= 0.24);
  CHECK(hi <= 4.0);
}

TEST_CASE("sequence validation") {
  auto u = gen_rank1(combinatorial_gen(700, 4), kOc);
  CoefficientSequence bad{1, {}};
  CHECK_THROWS(check_sequence(u, bad));
  CoefficientSequence nan_seq{1, std::vector<cplx>(u.size(), cplx(0.0, 0.0))};
  nan_seq.values[0] = cplx(HUGE_VAL, 0.0);
  CHECK_THROWS(check_sequence(u, nan_seq));
  CoefficientSequence wrong_slot{5, std::vector<cplx>(u.size())};
  CHECK_THROWS(check_sequence(u, wrong_slot));
}
