#include "biest/ensembles.hpp"

#include <cmath>

namespace biest {

CoefficientSequence random_sequence(int slot, std::size_t n, std::mt19937_64& rng,
                                    double lo, double hi) {
  CoefficientSequence s;
  s.slot = slot;
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (std::size_t i = 0; i < n; ++i)
    s.values.push_back(std::polar(mag(rng), ang(rng)));
  return s;
}

CoefficientSequence function_like_sequence(const std::vector<TriTile>& universe,
                                           int slot, std::mt19937_64& rng,
                                           double lo, double hi) {
  CoefficientSequence s = random_sequence(slot, universe.size(), rng, lo, hi);
  for (std::size_t i = 0; i < universe.size(); ++i)
    s.values[i] *= std::sqrt(universe[i].spatial_length().to_double());
  return s;
}

RandomTree random_tree(const RandomTreeParams& params, const OrderConstants& c) {
  std::mt19937_64 rng(params.seed * 0x2545f4914f6cdd1dull + 5);
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };

  const std::array<Shift, 3> sigma{Shift::zero, Shift::third, Shift::two_thirds};
  const int jt = params.top_scale;
  std::array<ShiftedInterval, 3> top_freq;
  for (int i = 0; i < 3; ++i)
    top_freq[i] = ShiftedInterval{-jt, pick(-4, 4), sigma[i]};
  TriTile top = make_tri_tile(dyadic_interval(jt, pick(0, 3)), top_freq);

  RandomTree out;
  out.universe.push_back(top);
  out.tree.top = top;
  out.tree.type = int(pick(1, 3));
  out.tree.members.push_back(0);

  const std::size_t want = std::size_t(pick(1, std::int64_t(params.max_members)));
  int guard = 0;
  while (out.universe.size() < want && ++guard < 400) {
    int jm = int(pick(params.min_scale, jt - 1));
    int depth = jt - jm;
    std::int64_t off = pick(0, (std::int64_t(1) << depth) - 1);
    ShiftedInterval time = dyadic_interval(jm, (top.time.k << depth) + off);
    std::array<ShiftedInterval, 3> freq;
    bool ok = true;
    for (int i = 1; i <= 3; ++i) {
      Rat step = Rat::pow2(-jm);
      std::int64_t kc = (top.freq[i - 1].center() / step).floor();
      if (i == out.tree.type) {
        std::vector<std::int64_t> cands;
        for (std::int64_t k = kc - 4; k <= kc + 4; ++k) {
          ShiftedInterval cand{-jm, k, sigma[i - 1]};
          if (cand.interval().dilate(Rat(c.c_order))
                  .contains(top.freq[i - 1].interval().dilate(Rat(c.c_order))))
            cands.push_back(k);
        }
        if (cands.empty()) {
          ok = false;
          break;
        }
        freq[i - 1] = ShiftedInterval{-jm, cands[pick(0, std::int64_t(cands.size()) - 1)],
                                      sigma[i - 1]};
      } else {
        freq[i - 1] = ShiftedInterval{-jm, kc + pick(-6, 6), sigma[i - 1]};
      }
    }
    if (!ok) continue;
    TriTile cand = make_tri_tile(time, freq);
    bool dup = false;
    for (const auto& t : out.universe)
      if (t == cand) dup = true;
    if (dup) continue;
    out.universe.push_back(cand);
    out.tree.members.push_back(out.universe.size() - 1);
  }
  return out;
}

}  // namespace biest
