#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace biest;
using namespace testsupport;

namespace {

Tile tile_of(int js, std::int64_t kt, std::int64_t kf, Shift sig = Shift::zero,
             int index = 1) {
  return Tile{dyadic_interval(js, kt), ShiftedInterval{-js, kf, sig}, index};
}

}  // namespace

TEST_CASE("order relations on the definition's instances") {
  const auto oc = OrderConstants::desk();
  Tile p = tile_of(0, 0, 0);
  CHECK(!order_lt(p, p, oc));
  CHECK(order_le(p, p, oc));
  CHECK(order_lesssim(p, p, oc));
  CHECK(!order_lesssim_prime(p, p, oc));

  // I' = [0,1), w' = [0,1); I = [0,2), w = [0,1/2): the 3-dilates nest
  Tile pp = tile_of(0, 0, 0);
  Tile big{dyadic_interval(1, 0), ShiftedInterval{-1, 0, Shift::zero}, 1};
  CHECK(order_lt(pp, big, oc));
  CHECK(order_lesssim(pp, big, oc));

  Tile far = tile_of(0, 5, 0);
  CHECK(!order_lt(far, big, oc));
  CHECK(!order_lesssim(far, big, oc));
}

TEST_CASE("lesssim plus and minus split by frequency center") {
  const auto oc = OrderConstants::desk();
  Tile top{dyadic_interval(5, 0), ShiftedInterval{-5, 0, Shift::zero}, 2};
  // members at scale 0 with frequency offset above / below
  Tile above{dyadic_interval(0, 3), ShiftedInterval{0, 2, Shift::zero}, 2};
  Tile below{dyadic_interval(0, 7), ShiftedInterval{0, -3, Shift::zero}, 2};
  CHECK(order_lesssim_plus(above, top, oc));
  CHECK(!order_lesssim_minus(above, top, oc));
  CHECK(order_lesssim_minus(below, top, oc));
}

TEST_CASE("rank-1 checker catches shared component tiles") {
  const auto oc = OrderConstants::desk();
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  std::array<ShiftedInterval, 3> f1{ShiftedInterval{0, 0, sig[0]},
                                    ShiftedInterval{0, 5, sig[1]},
                                    ShiftedInterval{0, 9, sig[2]}};
  std::array<ShiftedInterval, 3> f2 = f1;
  f2[1].k = 40;  // P_2 differs, P_1 and P_3 coincide
  TriTile a = make_tri_tile(dyadic_interval(0, 0), f1);
  TriTile b = make_tri_tile(dyadic_interval(0, 0), f2);
  CHECK(!check_rank1({a}, oc).has_value());
  auto v = check_rank1({a, b}, oc);
  REQUIRE(v.has_value());
  CHECK(v->clause == 1);
}

TEST_CASE("generated families pass the checker, deterministically") {
  const auto oc = OrderConstants::desk();
  auto u1 = gen_rank1(combinatorial_gen(3, 20), oc);
  auto u2 = gen_rank1(combinatorial_gen(3, 20), oc);
  CHECK(u1.size() == 20);
  CHECK(!check_rank1(u1, oc).has_value());
  REQUIRE(u1.size() == u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i) CHECK(u1[i] == u2[i]);
  // the family is sparse as a set of frequency cubes
  std::vector<ShiftedCube> cubes;
  for (const auto& t : u1) cubes.push_back(t.freq_cube());
  CHECK(is_sparse(cubes, Rat(oc.c_scale)));
}

TEST_CASE("order_lt transitive and implies lesssim on generated families") {
  const auto oc = OrderConstants::desk();
  auto u = gen_rank1(combinatorial_gen(11, 18), oc);
  int lt_pairs = 0;
  for (int idx = 1; idx <= 3; ++idx) {
    for (std::size_t a = 0; a < u.size(); ++a) {
      CHECK(!order_lt(u[a].tile(idx), u[a].tile(idx), oc));
      for (std::size_t b = 0; b < u.size(); ++b) {
        if (order_lt(u[a].tile(idx), u[b].tile(idx), oc)) {
          ++lt_pairs;
          CHECK(order_lesssim(u[a].tile(idx), u[b].tile(idx), oc));
        }
        for (std::size_t c = 0; c < u.size(); ++c)
          if (order_lt(u[a].tile(idx), u[b].tile(idx), oc) &&
              order_lt(u[b].tile(idx), u[c].tile(idx), oc))
            CHECK(order_lt(u[a].tile(idx), u[c].tile(idx), oc));
      }
    }
  }
  CHECK(lt_pairs > 0);
}

TEST_CASE("maximal tree equals the filter and the trivial cases") {
  const auto oc = OrderConstants::desk();
  auto u = gen_rank1(selection_gen(5, 14, 1), oc);
  // singleton universe
  std::vector<TriTile> one{u[0]};
  Tree t1 = maximal_tree(one, u[0], 2, oc);
  CHECK(t1.members == std::vector<std::size_t>{0});
  for (std::size_t top = 0; top < u.size(); ++top) {
    for (int i = 1; i <= 3; ++i) {
      Tree t = maximal_tree(u, u[top], i, oc);
      CHECK(is_tree(t, u, oc));
      std::vector<std::size_t> brute;
      for (std::size_t m = 0; m < u.size(); ++m)
        if (order_le(u[m].tile(i), u[top].tile(i), oc)) brute.push_back(m);
      CHECK(t.members == brute);
    }
  }
}

TEST_CASE("strong disjointness violations carry witnesses") {
  const auto oc = OrderConstants::desk();
  auto u = gen_rank1(selection_gen(9, 16, 1), oc);
  // single tree: vacuously disjoint
  Tree t = maximal_tree(u, u.front(), 2, oc);
  CHECK(!check_strongly_disjoint({t}, u, 2).has_value());
  // two trees sharing a member tile: bullet one
  Tree t2 = t;
  if (t.members.size() >= 2) {
    Tree a{u[t.members[0]], 2, {t.members[0]}};
    Tree b{u[t.members[0]], 2, {t.members[0]}};
    auto v = check_strongly_disjoint({a, b}, u, 2);
    REQUIRE(v.has_value());
    CHECK(v->bullet == 1);
  }
  // two trees whose members' 2-dilates overlap while the spatial interval
  // meets the other top: bullet two
  {
    std::size_t root = 0;
    for (std::size_t m = 0; m < u.size(); ++m)
      if (u[m].time.j == 5) root = m;
    std::vector<std::size_t> kids;
    for (std::size_t m = 0; m < u.size(); ++m)
      if (u[m].time.j == 0 && u[m].freq[1] == u[kids.empty() ? m : kids[0]].freq[1])
        kids.push_back(m);
    if (kids.size() >= 2) {
      Tree a{u[root], 1, {kids[0]}};
      Tree b{u[root], 1, {kids[1]}};  // same top interval, shared 2-omega
      auto v = check_strongly_disjoint({a, b}, u, 2);
      REQUIRE(v.has_value());
      CHECK(v->bullet == 2);
    }
  }
}

TEST_CASE("biest trick equivalence on sparse trees") {
  const auto oc = OrderConstants::desk();
  auto q_univ = gen_rank1(combinatorial_gen(21, 14), oc);
  auto p_univ = gen_rank1(combinatorial_gen(22, 50), oc);
  int verified = 0;
  for (std::size_t t = 0; t < q_univ.size(); ++t) {
    for (int i = 1; i <= 2; ++i) {
      Tree tr = maximal_tree(q_univ, q_univ[t], i, oc);
      auto r = biest_trick_predicate(tr, q_univ, p_univ, Rat(oc.c_scale));
      CHECK(r.equivalence_holds);
      ++verified;
    }
  }
  CHECK(verified > 0);

  // singleton tree whose omega_{Q3} sits inside a P tile's omega_{P1}
  std::array<Shift, 3> sig{Shift::zero, Shift::third, Shift::two_thirds};
  TriTile q = make_tri_tile(
      dyadic_interval(0, 0),
      {ShiftedInterval{0, 0, sig[0]}, ShiftedInterval{0, 4, sig[1]},
       ShiftedInterval{0, 1, sig[2]}});
  TriTile p_in = make_tri_tile(
      dyadic_interval(-4, 0),
      {ShiftedInterval{4, 0, sig[0]}, ShiftedInterval{4, 30, sig[1]},
       ShiftedInterval{4, -30, sig[2]}});
  TriTile p_out = make_tri_tile(
      dyadic_interval(-4, 1),
      {ShiftedInterval{4, 50, sig[0]}, ShiftedInterval{4, 100, sig[1]},
       ShiftedInterval{4, -100, sig[2]}});
  REQUIRE(p_in.freq[0].interval().contains(q.freq[2].interval()));
  REQUIRE(!p_out.freq[0].interval().intersects(q.freq[2].interval()));
  Tree single{q, 1, {0}};
  auto r = biest_trick_predicate(single, {q}, {p_in, p_out}, Rat(oc.c_scale));
  CHECK(r.equivalence_holds);
  CHECK(r.selected == std::vector<std::size_t>{0});
}

TEST_CASE("tri-tile dump and parse round trip") {
  const auto oc = OrderConstants::desk();
  auto u = gen_rank1(combinatorial_gen(31, 12), oc);
  auto text = dump_tri_tiles(u);
  auto back = parse_tri_tiles(text);
  REQUIRE(back.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);
}

TEST_CASE("generator reports unsatisfiable densities") {
  GenParams g;
  g.seed = 1;
  g.count = 400;  // cannot fit: one scale, tiny window
  g.scale_ladder = {0};
  g.window_exp = 2;
  g.freq_window_exp = 3;
  g.max_tries_per_tile = 20;
  CHECK_THROWS(gen_rank1(g, OrderConstants::desk()));
}
