#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace biest;
using namespace testsupport;

namespace {

const OrderConstants kOc = OrderConstants::desk();

TriTile unit_tri_tile() {
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  return make_tri_tile(dyadic_interval(0, 0),
                       {ShiftedInterval{0, 0, sig[0]},
                        ShiftedInterval{0, 4, sig[1]},
                        ShiftedInterval{0, 8, sig[2]}});
}

}  // namespace

TEST_CASE("tree estimate: equality on singletons, zero slots, random trees") {
  TriTile t = unit_tri_tile();
  CoefficientSequence ones{1, {cplx(1.0, 0.0)}};
  CoefficientSequence ones2 = ones, ones3 = ones;
  ones2.slot = 2;
  ones3.slot = 3;
  Tree tr{t, 1, {0}};
  TreeFormResult r = tree_form({t}, tr, ones, ones2, ones3, kOc);
  CHECK(std::abs(r.value) == doctest::Approx(1.0));
  CHECK(r.bound == doctest::Approx(1.0));

  CoefficientSequence zero{2, {cplx(0.0, 0.0)}};
  TreeFormResult rz = tree_form({t}, tr, ones, zero, ones3, kOc);
  CHECK(std::abs(rz.value) == 0.0);
  CHECK(rz.bound >= 0.0);

  std::mt19937_64 rng(3);
  for (unsigned seed = 0; seed < 60; ++seed) {
    RandomTreeParams params;
    params.seed = seed;
    params.max_members = 12;
    RandomTree rt = random_tree(params, kOc);
    auto a1 = random_sequence(1, rt.universe.size(), rng);
    auto a2 = random_sequence(2, rt.universe.size(), rng);
    auto a3 = random_sequence(3, rt.universe.size(), rng);
    TreeFormResult rr = tree_form(rt.universe, rt.tree, a1, a2, a3, kOc);
    CHECK(std::abs(rr.value) <= rr.bound * (1.0 + 1e-12));
  }
}

TEST_CASE("selection on degenerate inputs") {
  auto u = gen_rank1(selection_gen(7, 20, 1), kOc);
  CoefficientSequence zero{2, std::vector<cplx>(u.size(), cplx(0.0, 0.0))};
  SelectionTrace tr = select_trees(u, zero, 0, 1.0, kOc);
  CHECK(tr.selected.empty());
  CHECK(tr.remainder.size() == u.size());

  std::mt19937_64 rng(11);
  auto a = selection_sequence(u, 2, rng);
  double e = modified_energy(u, a, kOc).upper;
  double s = size(u, a, kOc).value;
  int n_max = int(std::floor(-std::log2(s / e)));
  // thresholds beyond the total mass: nothing selectable
  SelectionTrace none = select_trees(u, a, n_max - 12, e, kOc);
  CHECK(none.selected.empty());
  CHECK(none.plus_left_ok);
  CHECK(none.plus_right_ok);
  CHECK(none.size_lower_ok);
  // violating the stop bound is a precondition error
  CHECK_THROWS(select_trees(u, a, n_max + 8, e, kOc));
}

namespace {

// brute-force first step of the upward pass: every (top, type, one-sided
// maximal member set) candidate, then the primary/secondary goals
struct BruteChoice {
  std::size_t top;
  int type;
  std::vector<std::size_t> members;
};

std::optional<BruteChoice> brute_first_upward(const std::vector<TriTile>& u,
                                              const CoefficientSequence& a,
                                              double energy_norm, int n) {
  const int j = a.slot;
  const double thr_scale = std::exp2(-2.0 * n - 3.0);
  std::vector<BruteChoice> eligible;
  for (std::size_t top = 0; top < u.size(); ++top) {
    for (int i = 1; i <= 3; ++i) {
      if (i == j) continue;
      std::vector<std::size_t> members;
      double mass = 0.0;
      for (std::size_t m = 0; m < u.size(); ++m) {
        if (!order_le(u[m].tile(i), u[top].tile(i), kOc)) continue;
        if (!order_lesssim_plus(u[m].tile(j), u[top].tile(j), kOc)) continue;
        members.push_back(m);
        mass += a.weight(m) / (energy_norm * energy_norm);
      }
      if (members.empty()) continue;
      if (mass >= thr_scale * u[top].spatial_length().to_double())
        eligible.push_back({top, i, members});
    }
  }
  if (eligible.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t k = 1; k < eligible.size(); ++k) {
    Rat xa = u[eligible[k].top].tile(j).xi();
    Rat xb = u[eligible[best].top].tile(j).xi();
    if (xa > xb) best = k;
    else if (xa == xb &&
             eligible[k].members.size() > eligible[best].members.size())
      best = k;
  }
  return eligible[best];
}

}  // namespace

TEST_CASE("selection picks the brute-force first upward tree") {
  int attempts = 0, matched = 0;
  for (unsigned seed = 1; seed <= 40 && matched < 8; ++seed) {
    auto u = gen_rank1(selection_gen(seed, 26, 1), kOc);
    std::mt19937_64 rng(seed + 99);
    auto a = selection_sequence(u, 2, rng);
    double e = modified_energy(u, a, kOc).upper;
    double s = size(u, a, kOc).value;
    if (s == 0.0 || e == 0.0) continue;
    int n = int(std::floor(-std::log2(s / e))) - 1;
    SelectionTrace tr = select_trees(u, a, n, e, kOc);
    auto first = brute_first_upward(u, a, e, n);
    ++attempts;
    if (!first.has_value()) {
      CHECK(std::count_if(tr.selected.begin(), tr.selected.end(),
                          [](const SelectedPair& p) {
                            return p.pass == SelectionPass::up;
                          }) == 0);
      continue;
    }
    REQUIRE(!tr.selected.empty());
    const SelectedPair& got = tr.selected.front();
    CHECK(got.pass == SelectionPass::up);
    CHECK(got.tree.top == u[first->top]);
    CHECK(got.tree.members == first->members);
    ++matched;
  }
  CHECK(matched >= 3);
  CHECK(attempts > 0);
}

TEST_CASE("selection postconditions and determinism on dense ensembles") {
  int with_selection = 0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    auto u = gen_rank1(selection_gen(seed, 26, 1), kOc);
    std::mt19937_64 rng(seed + 7);
    for (int slot : {2, 3}) {
      auto a = selection_sequence(u, slot, rng);
      double e = modified_energy(u, a, kOc).upper;
      double s = size(u, a, kOc).value;
      if (s == 0.0 || e == 0.0) continue;
      int n = int(std::floor(-std::log2(s / e))) - 1;
      SelectionTrace t1 = select_trees(u, a, n, e, kOc);
      SelectionTrace t2 = select_trees(u, a, n, e, kOc);
      CHECK(t1.to_json() == t2.to_json());
      CHECK(t1.plus_left_ok);
      CHECK(t1.plus_right_ok);
      CHECK(t1.strongly_disjoint_ok);
      CHECK(t1.size_lower_ok);
      CHECK(t1.sum_tree_lengths <= 64.0 * std::exp2(2.0 * n) + 1e-12);
      if (!t1.selected.empty()) ++with_selection;
      std::vector<char> seen(u.size(), 0);
      for (const auto& p : t1.selected) {
        for (std::size_t m : p.tree.members) {
          CHECK(!seen[m]);
          seen[m] = 1;
        }
        for (std::size_t m : p.companion) {
          CHECK(!seen[m]);
          seen[m] = 1;
        }
      }
      for (std::size_t m : t1.remainder) {
        CHECK(!seen[m]);
        seen[m] = 1;
      }
      for (char c : seen) CHECK(c == 1);
    }
  }
  CHECK(with_selection >= 10);
}

TEST_CASE("partition on worked instances") {
  TriTile t = unit_tri_tile();
  CoefficientSequence a1{1, {cplx(1.0, 0.0)}};
  CoefficientSequence a2{2, {cplx(0.5, 0.5)}};
  CoefficientSequence a3{3, {cplx(-1.0, 0.0)}};
  PartitionResult pr = partition({t}, a1, a2, a3, kOc);
  REQUIRE(pr.levels.size() == 1);
  CHECK(pr.levels[0].tiles == std::vector<std::size_t>{0});
  CHECK(pr.levels[0].cover.size() >= 1);

  // two widely separated tri-tiles with equal coefficients exit together
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  TriTile t2 = make_tri_tile(dyadic_interval(0, 40),
                             {ShiftedInterval{0, 100, sig[0]},
                              ShiftedInterval{0, 104, sig[1]},
                              ShiftedInterval{0, 108, sig[2]}});
  CoefficientSequence b1{1, {cplx(1.0, 0.0), cplx(1.0, 0.0)}};
  CoefficientSequence b2{2, {cplx(1.0, 0.0), cplx(1.0, 0.0)}};
  CoefficientSequence b3{3, {cplx(1.0, 0.0), cplx(1.0, 0.0)}};
  PartitionResult pr2 = partition({t, t2}, b1, b2, b3, kOc);
  REQUIRE(pr2.levels.size() == 1);
  CHECK(pr2.levels[0].tiles.size() == 2);
  CHECK(pr2.levels[0].cover.size() == 2);
}

TEST_CASE("partition is exhaustive and disjoint with covered levels") {
  std::mt19937_64 rng(17);
  for (unsigned seed = 1; seed <= 6; ++seed) {
    auto u = gen_rank1(selection_gen(seed + 50, 24, 1), kOc);
    auto a1 = function_like_sequence(u, 1, rng);
    auto a2 = function_like_sequence(u, 2, rng);
    auto a3 = function_like_sequence(u, 3, rng);
    PartitionResult pr = partition(u, a1, a2, a3, kOc);
    std::vector<int> hits(u.size(), 0);
    for (const auto& lv : pr.levels) {
      std::vector<char> covered(u.size(), 0);
      for (const auto& tr : lv.cover) {
        CHECK(is_tree(tr, u, kOc));
        for (std::size_t m : tr.members) covered[m] = 1;
      }
      for (std::size_t m : lv.tiles) {
        ++hits[m];
        CHECK(covered[m]);
      }
    }
    for (int h : hits) CHECK(h == 1);
    for (std::size_t k = 1; k < pr.levels.size(); ++k)
      CHECK(pr.levels[k].n > pr.levels[k - 1].n);
  }
}

TEST_CASE("partition level sizes obey min(2^-n energy, size)") {
  std::mt19937_64 rng(23);
  auto u = gen_rank1(selection_gen(77, 26, 1), kOc);
  auto a1 = function_like_sequence(u, 1, rng);
  auto a2 = function_like_sequence(u, 2, rng);
  auto a3 = function_like_sequence(u, 3, rng);
  PartitionResult pr = partition(u, a1, a2, a3, kOc);
  const CoefficientSequence* seqs[3] = {&a1, &a2, &a3};
  for (const auto& lv : pr.levels) {
    for (int j = 0; j < 3; ++j) {
      CoefficientSequence restricted = *seqs[j];
      std::vector<char> keep(u.size(), 0);
      for (std::size_t m : lv.tiles) keep[m] = 1;
      for (std::size_t m = 0; m < u.size(); ++m)
        if (!keep[m]) restricted.values[m] = 0.0;
      double s = size_over(u, restricted, kOc, lv.tiles, nullptr).value;
      double cap = std::min(std::exp2(double(-lv.n)) * pr.energies[j],
                            pr.sizes[j]);
      CHECK(s <= cap * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("abstract bound on worked and random instances") {
  TriTile t = unit_tri_tile();
  CoefficientSequence a1{1, {cplx(1.0, 0.0)}};
  CoefficientSequence a2{2, {cplx(1.0, 0.0)}};
  CoefficientSequence a3{3, {cplx(1.0, 0.0)}};
  AbstractBoundResult r = abstract_bound(
      {t}, a1, a2, a3, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, kOc);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(1.0));
  CHECK(r.ratio == doctest::Approx(1.0));

  CoefficientSequence zero{2, {cplx(0.0, 0.0)}};
  AbstractBoundResult rz = abstract_bound(
      {t}, a1, zero, a3, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, kOc);
  CHECK(rz.lhs == 0.0);

  CHECK_THROWS(abstract_bound({t}, a1, a2, a3, {0.5, 0.5, 0.5}, kOc));
  CHECK_THROWS(abstract_bound({t}, a1, a2, a3, {1.2, -0.1, -0.1}, kOc));

  std::mt19937_64 rng(29);
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 12; ++seed) {
    auto u = gen_rank1(combinatorial_gen(800 + seed, 16), kOc);
    auto b1 = function_like_sequence(u, 1, rng);
    auto b2 = function_like_sequence(u, 2, rng);
    auto b3 = function_like_sequence(u, 3, rng);
    AbstractBoundResult rr =
        abstract_bound(u, b1, b2, b3, {0.6, 0.2, 0.2}, kOc);
    CHECK(std::isfinite(rr.ratio));
    CHECK(std::isfinite(rr.refined_ratio));
    worst = std::max(worst, rr.ratio);
  }
  CHECK(worst < 64.0);  // recorded desk-scale ceiling
}

TEST_CASE("selection trace serializes deterministically") {
  auto u = gen_rank1(selection_gen(5, 26, 1), kOc);
  std::mt19937_64 rng(31);
  auto a = selection_sequence(u, 2, rng);
  double e = modified_energy(u, a, kOc).upper;
  double s = size(u, a, kOc).value;
  int n = int(std::floor(-std::log2(s / e))) - 1;
  SelectionTrace tr = select_trees(u, a, n, e, kOc);
  std::string j1 = tr.to_json();
  CHECK(j1.find("\"slot\"") != std::string::npos);
  CHECK(j1.find("\"selected\"") != std::string::npos);
  CHECK(j1 == select_trees(u, a, n, e, kOc).to_json());
}
