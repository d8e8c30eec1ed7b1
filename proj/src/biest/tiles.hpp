#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "biest/grid.hpp"

namespace biest {

/// Dilation factors of the tile order relations.  Paper values (3, 1e7, 1e9)
/// need ~30 binary orders of scale separation to produce nontrivial
/// configurations; desk() is the scaled-down set used across the test suite.
struct OrderConstants {
  std::int64_t c_order = 3;            // < and <= use c_order * omega
  std::int64_t c_lesssim = 10'000'000; // lesssim uses c_lesssim * omega
  std::int64_t c_scale = 1'000'000'000;// scale-separation factor (also sparseness)

  static OrderConstants paper() { return {}; }
  static OrderConstants desk() { return {3, 8, 16}; }
};

/// Tile with index i: spatial dyadic interval x frequency shifted-dyadic
/// interval, area exactly 1 (frequency scale is minus the spatial scale).
struct Tile {
  ShiftedInterval time;   // member of D^1_0
  ShiftedInterval freq;   // member of D^1_{sigma_i}
  int index = 1;          // i in {1,2,3}

  Rat xi() const { return freq.center(); }

  friend bool operator==(const Tile& a, const Tile& b) {
    return a.time == b.time && a.freq == b.freq && a.index == b.index;
  }
};

/// Three tiles over one spatial interval, one per frequency coordinate.
struct TriTile {
  ShiftedInterval time;
  std::array<ShiftedInterval, 3> freq;  // freq[i] from D^1_{sigma_{i+1}}

  Tile tile(int i) const { return Tile{time, freq[i - 1], i}; }
  Rat spatial_length() const { return time.length(); }
  ShiftedCube freq_cube() const;

  friend bool operator==(const TriTile& a, const TriTile& b) {
    return a.time == b.time && a.freq == b.freq;
  }
};

TriTile make_tri_tile(const ShiftedInterval& time,
                      const std::array<ShiftedInterval, 3>& freq);

/// P' < P: strict spatial inclusion and c_order-dilated frequency reversal.
bool order_lt(const Tile& a, const Tile& b, const OrderConstants& c);
bool order_le(const Tile& a, const Tile& b, const OrderConstants& c);
/// P' lesssim P: spatial inclusion and c_lesssim-dilated frequency reversal.
bool order_lesssim(const Tile& a, const Tile& b, const OrderConstants& c);
/// lesssim and not <=.
bool order_lesssim_prime(const Tile& a, const Tile& b, const OrderConstants& c);
/// lesssim' with xi(a) > xi(b) (upward) or xi(a) < xi(b) (downward).
bool order_lesssim_plus(const Tile& a, const Tile& b, const OrderConstants& c);
bool order_lesssim_minus(const Tile& a, const Tile& b, const OrderConstants& c);

struct RankViolation {
  std::size_t first = 0, second = 0;  // ordered pair (P', P) indices
  int clause = 0;                     // 1, 2, or 3
};

/// Rank-1 check over every ordered pair of distinct tri-tiles.  The
/// scale-separation clause fires when c_scale * |I_{P'}| < |I_P|; the
/// printed form of that hypothesis in the source text is vacuous (spatial
/// inclusion already bounds |I_{P'}| by |I_P|), and the appendix argument
/// uses the separated reading, so that is what is checked.
std::optional<RankViolation> check_rank1(const std::vector<TriTile>& tiles,
                                         const OrderConstants& c);

/// j-tree with an explicit top; the top need not be a member.
struct Tree {
  TriTile top;
  int type = 1;                       // j in {1,2,3}
  std::vector<std::size_t> members;   // indices into the owning universe

  QInterval top_interval() const { return top.time.interval(); }
  Rat top_length() const { return top.time.length(); }
};

/// True iff every member's type-tile sits below the top's in <=.
bool is_tree(const Tree& t, const std::vector<TriTile>& universe,
             const OrderConstants& c);

/// Maximal tree: all tri-tiles of the universe whose i-tile is below top's.
Tree maximal_tree(const std::vector<TriTile>& universe, const TriTile& top,
                  int i, const OrderConstants& c);

struct DisjointnessViolation {
  std::size_t tree_a = 0, tree_b = 0;
  std::size_t member_a = 0, member_b = 0;  // universe indices
  int bullet = 0;                          // 1: equal tiles, 2: 2omega/I_T clash
};

/// Strong i-disjointness across every cross-tree pair, both orientations.
std::optional<DisjointnessViolation> check_strongly_disjoint(
    const std::vector<Tree>& trees, const std::vector<TriTile>& universe, int i);

/// Trees plus the verified-disjointness bookkeeping used by the functionals.
struct TreeCollection {
  std::vector<Tree> trees;
  int disjointness_type = 1;
  bool verified_strongly_disjoint = false;
};

struct BiestTrickResult {
  std::vector<std::size_t> selected;  // P-universe indices in P'
  bool equivalence_holds = true;
  std::size_t bad_q = 0, bad_p = 0;   // witness when the equivalence fails
};

/// P' = {P : omega_{Q_3} inside omega_{P_1} for some Q in T}, plus the
/// verification that for every (Q, P) with intersecting omega_{P_1} and
/// omega_{Q_3} the inclusion is equivalent to membership in P'.  A failure
/// signals a non-sparse input tree.
BiestTrickResult biest_trick_predicate(const Tree& t,
                                       const std::vector<TriTile>& q_universe,
                                       const std::vector<TriTile>& p_universe,
                                       const Rat& sparse_factor);

/// Generator controls for random sparse rank-1 families.
struct GenParams {
  std::uint64_t seed = 0;
  std::size_t count = 10;
  std::vector<int> scale_ladder = {4, -1, -6, -11, -16};  // spatial exponents
  int window_exp = 6;        // spatial window [0, 2^window_exp)
  int freq_window_exp = 17;  // frequency cube centers within +-2^freq_window_exp
  std::array<Shift, 3> sigma = {Shift::zero, Shift::third, Shift::two_thirds};
  double child_bias = 0.6;   // probability of attaching below an existing tile
  double sibling_bias = 0.6; // probability a child reuses a sibling's cube
  double up_bias = 0.5;      // share of children placed on the upward side
  int tree_coord = 0;        // 0 = random per child, else fixed in {1,2,3}
  int root_scale_index = -1; // -1 = random ladder scale for fresh roots
  int max_tries_per_tile = 400;
};

/// Deterministic-in-seed sparse rank-1 family; throws if the constraints
/// cannot be met at the requested density.
std::vector<TriTile> gen_rank1(const GenParams& p, const OrderConstants& c);

/// JSON dump of a tri-tile collection (rational endpoints as strings);
/// inverse of parse_tri_tiles.
std::string dump_tri_tiles(const std::vector<TriTile>& tiles);
std::vector<TriTile> parse_tri_tiles(const std::string& json_text);

}  // namespace biest
