#include "biest/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biest {

bool AdmissibleTuple::valid() const {
  Rat sum(0);
  int negatives = 0;
  for (const auto& a : alpha) {
    if (!(a < Rat(1))) return false;
    if (a.is_negative()) ++negatives;
    sum += a;
  }
  return sum == Rat(1) && negatives <= 1;
}

int AdmissibleTuple::bad_index() const {
  for (int i = 0; i < 4; ++i)
    if (alpha[i].is_negative()) return i + 1;
  return 0;
}

double AdmissibleTuple::weighted_measure(const std::array<double, 4>& e) const {
  double v = 1.0;
  for (int i = 0; i < 4; ++i) v *= std::pow(e[i], alpha[i].to_double());
  return v;
}

std::array<Rat, 4> vertex_coordinates(int i) {
  const Rat h(1, 2), th(3, 2);
  switch (i) {
    case 1: return {Rat(1), h, Rat(1), -th};
    case 2: return {h, Rat(1), Rat(1), -th};
    case 3: return {h, Rat(1), -th, Rat(1)};
    case 4: return {Rat(1), h, -th, Rat(1)};
    case 5: return {Rat(1), -h, Rat(0), h};
    case 6: return {Rat(1), -h, h, Rat(0)};
    case 7: return {h, -h, Rat(0), Rat(1)};
    case 8: return {h, -h, Rat(1), Rat(0)};
    case 9: return {-h, Rat(1), Rat(0), h};
    case 10: return {-h, Rat(1), h, Rat(0)};
    case 11: return {-h, h, Rat(1), Rat(0)};
    case 12: return {-h, h, Rat(0), Rat(1)};
    default: throw std::invalid_argument("vertex_coordinates: index 1..12");
  }
}

VertexExponents exponents_for_vertex(const AdmissibleTuple& a, int vertex_id) {
  if (!a.valid()) throw std::invalid_argument("exponents_for_vertex: inadmissible tuple");
  std::array<double, 4> al;
  for (int i = 0; i < 4; ++i) al[i] = a.alpha[i].to_double();

  VertexExponents e;
  auto low_family = [&](double a1, double a2, double a3, double a4) {
    // bad index 1 reference case
    e.theta_j = {2 * a1 + 1, 2 * a2 - 1, 2 * (a3 + a4) - 1};
    e.theta = a4 / (a3 + a4);
  };
  auto high_family = [&](double a1, double a2, double a3, double a4) {
    // bad index 4 reference case
    e.theta_j = {2 * a1 - 1, 2 * a2 - 1, 2 * (a3 + a4) + 1};
    e.theta = (3 * a3 + 2 * a4) / (a3 + a4);
  };
  if (vertex_id >= 9 && vertex_id <= 12) {
    e.pivot = 1;
    low_family(al[0], al[1], al[2], al[3]);
  } else if (vertex_id >= 5 && vertex_id <= 8) {
    e.pivot = 2;
    low_family(al[1], al[0], al[2], al[3]);
  } else if (vertex_id == 1 || vertex_id == 2) {
    e.pivot = 4;
    high_family(al[0], al[1], al[2], al[3]);
  } else if (vertex_id == 3 || vertex_id == 4) {
    e.pivot = 3;
    high_family(al[0], al[1], al[3], al[2]);
  } else {
    throw std::invalid_argument("exponents_for_vertex: vertex 1..12");
  }
  double sum = e.theta_j[0] + e.theta_j[1] + e.theta_j[2];
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::logic_error("exponents_for_vertex: theta_j do not sum to 1");
  for (double t : e.theta_j)
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("exponents_for_vertex: theta_j outside (0,1)");
  if (!(e.theta > 0.0 && e.theta < 1.0))
    throw std::invalid_argument("exponents_for_vertex: theta outside (0,1)");
  return e;
}

ExceptionalSetResult exceptional_set(const std::vector<MeasurableSetSpec>& e,
                                     int pivot, const Rat& c_big,
                                     int root_scale_exp) {
  if (pivot < 1 || int(e.size()) < pivot)
    throw std::invalid_argument("exceptional_set: pivot out of range");
  if (!(Rat(0) < c_big))
    throw std::invalid_argument("exceptional_set: C must be positive");
  const Rat pivot_measure = e[pivot - 1].measure();
  if (pivot_measure.is_zero())
    throw std::invalid_argument("exceptional_set: pivot set has measure zero");

  DyadicUnion omega;
  for (const auto& spec : e) {
    if (spec.set.empty()) continue;
    Rat lambda = c_big * spec.measure() / pivot_measure;
    if (!(lambda < Rat(1))) continue;  // maximal function never exceeds 1
    DyadicUnion level = maximal_superlevel(spec.set, lambda, root_scale_exp);
    omega = DyadicUnion::union_of(omega, level);
  }
  ExceptionalSetResult r;
  r.omega = omega;
  r.omega_measure = omega.measure();
  r.major_subset = e[pivot - 1].set.set_minus(omega);
  r.majority_ok = r.omega_measure * Rat(2) < pivot_measure;
  return r;
}

int stratum_of(const TriTile& p, const DyadicUnion& omega) {
  const QInterval ip = p.time.interval();
  // locate the maximal run of omega containing I_P, if any
  Rat run_lo, run_hi;
  bool inside = false;
  Rat cursor_lo, cursor_hi;
  bool open = false;
  for (const auto& piece : omega.pieces()) {
    QInterval q = piece.interval();
    if (!open) {
      cursor_lo = q.lo;
      cursor_hi = q.hi;
      open = true;
    } else if (q.lo == cursor_hi) {
      cursor_hi = q.hi;
    } else {
      if (!(ip.lo < cursor_lo) && !(cursor_hi < ip.hi)) {
        run_lo = cursor_lo;
        run_hi = cursor_hi;
        inside = true;
      }
      cursor_lo = q.lo;
      cursor_hi = q.hi;
    }
  }
  if (open && !(ip.lo < cursor_lo) && !(cursor_hi < ip.hi)) {
    run_lo = cursor_lo;
    run_hi = cursor_hi;
    inside = true;
  }
  if (!inside) return 0;
  Rat dist = min(ip.lo - run_lo, run_hi - ip.hi);
  Rat ratio = Rat(1) + dist / ip.length();
  int k = 0;
  while (!(ratio < Rat::pow2(k + 1))) ++k;
  return k;
}

std::vector<int> stratify_k(const std::vector<TriTile>& tiles,
                            const DyadicUnion& omega) {
  std::vector<int> out(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) out[i] = stratum_of(tiles[i], omega);
  return out;
}

cplx lambda_bht(const std::vector<TriTile>& tiles, PacketCache& cache,
                const SampledFunction& f1, const SampledFunction& f2,
                const SampledFunction& f3) {
  cplx acc(0.0, 0.0);
  const SampledFunction* fs[3] = {&f1, &f2, &f3};
  for (const auto& p : tiles) {
    cplx prod = 1.0 / std::sqrt(p.spatial_length().to_double());
    for (int j = 1; j <= 3; ++j) prod *= inner(*fs[j - 1], cache.get(p.tile(j)));
    acc += prod;
  }
  return acc;
}

cplx lambda_bht_coeffs(const std::vector<TriTile>& tiles,
                       const CoefficientSequence& a1,
                       const CoefficientSequence& a2,
                       const CoefficientSequence& a3) {
  check_sequence(tiles, a1);
  check_sequence(tiles, a2);
  check_sequence(tiles, a3);
  cplx acc(0.0, 0.0);
  for (std::size_t m = 0; m < tiles.size(); ++m)
    acc += a1.values[m] * a2.values[m] * a3.values[m] /
           std::sqrt(tiles[m].spatial_length().to_double());
  return acc;
}

SampledFunction b_p2(const Tile& p2, const std::vector<TriTile>& q_tiles,
                     PacketCache& q_cache, const SampledFunction& f2,
                     const SampledFunction& f3) {
  SampledFunction out = SampledFunction::zeros(q_cache.grid());
  for (const auto& q : q_tiles) {
    if (!p2.freq.interval().contains(q.freq[2].interval())) continue;
    cplx coef = inner(f2, q_cache.get(q.tile(1))) *
                inner(f3, q_cache.get(q.tile(2))) /
                std::sqrt(q.spatial_length().to_double());
    out = out.plus(q_cache.get(q.tile(3)).values.scaled(coef));
  }
  return out;
}

cplx rightform_a3(const Tile& q3, const std::vector<TriTile>& p_tiles,
                  PacketCache& p_cache, PacketCache& q_cache,
                  const SampledFunction& f3, const SampledFunction& f4) {
  cplx acc(0.0, 0.0);
  const WavePacket& phi_q3 = q_cache.get(q3);
  for (const auto& p : p_tiles) {
    if (!p.freq[0].interval().contains(q3.freq.interval())) continue;
    acc += inner(f3, p_cache.get(p.tile(2))) * inner(f4, p_cache.get(p.tile(3))) *
           inner(p_cache.get(p.tile(1)).values, phi_q3.values) /
           std::sqrt(p.spatial_length().to_double());
  }
  return acc;
}

cplx rightform_b1(const Tile& p1, const TreeCollection& trees,
                  const std::vector<TriTile>& q_tiles,
                  const std::vector<cplx>& c_values, PacketCache& p_cache,
                  PacketCache& q_cache) {
  cplx acc(0.0, 0.0);
  const WavePacket& phi_p1 = p_cache.get(p1);
  for (const auto& t : trees.trees) {
    for (std::size_t m : t.members) {
      if (!p1.freq.interval().contains(q_tiles[m].freq[2].interval())) continue;
      // <phi_P1, c phi_Q3> = conj(c) <phi_P1, phi_Q3>
      acc += std::conj(c_values[m]) *
             inner(phi_p1.values, q_cache.get(q_tiles[m].tile(3)).values);
    }
  }
  return acc;
}

cplx lambda_biest(const std::vector<TriTile>& p_tiles,
                  const std::vector<TriTile>& q_tiles, PacketCache& p_cache,
                  PacketCache& q_cache, const SampledFunction& f1,
                  const SampledFunction& f2, const SampledFunction& f3,
                  const SampledFunction& f4, const OrderConstants& c) {
  if (auto v = check_rank1(p_tiles, c))
    throw std::invalid_argument("lambda_biest: P collection is not rank 1");
  if (auto v = check_rank1(q_tiles, c))
    throw std::invalid_argument("lambda_biest: Q collection is not rank 1");

  // per-Q pairings computed once
  std::vector<cplx> q_factor(q_tiles.size());
  for (std::size_t m = 0; m < q_tiles.size(); ++m)
    q_factor[m] = inner(f1, q_cache.get(q_tiles[m].tile(1))) *
                  inner(f2, q_cache.get(q_tiles[m].tile(2))) /
                  std::sqrt(q_tiles[m].spatial_length().to_double());

  cplx acc(0.0, 0.0);
  for (const auto& p : p_tiles) {
    cplx g(0.0, 0.0);
    const WavePacket& phi_p1 = p_cache.get(p.tile(1));
    for (std::size_t m = 0; m < q_tiles.size(); ++m) {
      if (!p.freq[0].interval().contains(q_tiles[m].freq[2].interval())) continue;
      g += q_factor[m] * inner(phi_p1.values, q_cache.get(q_tiles[m].tile(3)).values);
    }
    if (g == cplx(0.0, 0.0)) continue;
    acc += g * inner(f3, p_cache.get(p.tile(2))) *
           inner(f4, p_cache.get(p.tile(3))) /
           std::sqrt(p.spatial_length().to_double());
  }
  return acc;
}

cplx lambda_biest_qform(const std::vector<TriTile>& p_tiles,
                        const std::vector<TriTile>& q_tiles,
                        PacketCache& p_cache, PacketCache& q_cache,
                        const SampledFunction& f1, const SampledFunction& f2,
                        const SampledFunction& f3, const SampledFunction& f4,
                        const std::vector<std::size_t>* q_subset) {
  cplx acc(0.0, 0.0);
  std::vector<std::size_t> all;
  if (!q_subset) {
    all.resize(q_tiles.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    q_subset = &all;
  }
  for (std::size_t m : *q_subset) {
    const TriTile& q = q_tiles[m];
    cplx a1 = inner(f1, q_cache.get(q.tile(1)));
    cplx a2 = inner(f2, q_cache.get(q.tile(2)));
    cplx a3 = rightform_a3(q.tile(3), p_tiles, p_cache, q_cache, f3, f4);
    acc += a1 * a2 * a3 / std::sqrt(q.spatial_length().to_double());
  }
  return acc;
}

SampledFunction sample_x_of_e(const DyadicUnion& e, const SampleGrid& grid,
                              std::mt19937_64& rng) {
  std::vector<cplx> v(grid.N, cplx(0.0, 0.0));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Rat step = grid.L / Rat(grid.N);
  for (const auto& piece : e.pieces()) {
    std::int64_t m0 = (piece.lo() / step).floor();
    std::int64_t m1 = (piece.hi() / step).floor();
    for (std::int64_t m = m0; m < m1; ++m) {
      if (m < 0 || m >= grid.N) continue;
      if (!piece.interval().contains(Rat(m) * step)) continue;
      v[std::size_t(m)] = std::polar(1.0, angle(rng));
    }
  }
  return SampledFunction::from_samples(grid, std::move(v));
}

double cutoff_mass_over_set(const DyadicUnion& e, const ShiftedInterval& time,
                            int m, const SampleGrid& grid) {
  const double l = grid.length();
  const double dx = l / grid.N;
  const double center = time.center().to_double();
  const double width = time.length().to_double();
  const Rat step = grid.L / Rat(grid.N);
  double acc = 0.0;
  for (const auto& piece : e.pieces()) {
    std::int64_t m0 = (piece.lo() / step).floor();
    std::int64_t m1 = (piece.hi() / step).floor();
    for (std::int64_t s = m0; s < m1; ++s) {
      if (s < 0 || s >= grid.N) continue;
      if (!piece.interval().contains(Rat(s) * step)) continue;
      acc += cutoff_value_periodic(ApproxCutoff{center, width}, double(s) * dx, m, l);
    }
  }
  return acc * dx / width;
}

namespace {

DyadicUnion random_dyadic_set(std::mt19937_64& rng, int window_exp,
                              int cell_scale, int cell_count) {
  const std::int64_t cells = std::int64_t(1) << (window_exp - cell_scale);
  std::vector<std::int64_t> idx(cells);
  for (std::int64_t i = 0; i < cells; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<ShiftedInterval> pieces;
  for (int i = 0; i < cell_count && i < int(cells); ++i)
    pieces.push_back(dyadic_interval(cell_scale, idx[i]));
  return DyadicUnion(pieces);
}

GenParams experiment_gen_params(std::uint64_t seed, std::size_t count) {
  GenParams gp;
  gp.seed = seed;
  gp.count = count;
  gp.scale_ladder = {2, -3};
  gp.window_exp = 6;
  gp.freq_window_exp = 4;
  gp.child_bias = 0.35;
  return gp;
}

}  // namespace

ExperimentReport restricted_type_experiment(const ExperimentParams& params) {
  ExperimentReport rep;
  rep.params = params;
  rep.exponents = exponents_for_vertex(params.alpha, params.vertex);
  const int pivot = rep.exponents.pivot;

  for (int inst = 0; inst < params.instances; ++inst) {
    std::uint64_t seed = params.seed0 + std::uint64_t(inst);
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);

    ExperimentInstance out;
    out.seed = seed;

    // sets with measures spanning three dyadic orders
    std::vector<MeasurableSetSpec> e(4);
    std::uniform_int_distribution<int> mag(1, 16);  // cells of length 1/8
    for (int j = 0; j < 4; ++j) {
      e[j].set = random_dyadic_set(rng, 6, -3, mag(rng));
      out.e_measures[j] = e[j].measure().to_double();
    }
    ExceptionalSetResult exc =
        exceptional_set(e, pivot, params.exceptional_c, params.root_scale_exp);
    out.omega_measure = exc.omega_measure.to_double();
    out.majority_ok = exc.majority_ok;

    std::array<SampledFunction, 4> f;
    for (int j = 0; j < 4; ++j) {
      const DyadicUnion& source =
          (j + 1 == pivot) ? exc.major_subset : e[j].set;
      f[j] = sample_x_of_e(source, params.grid, rng);
    }

    std::vector<TriTile> p_tiles =
        gen_rank1(experiment_gen_params(seed * 2 + 1, params.p_count),
                  params.constants);
    std::vector<TriTile> q_tiles =
        gen_rank1(experiment_gen_params(seed * 2 + 2, params.q_count),
                  params.constants);
    PacketCache p_cache(params.grid), q_cache(params.grid);

    cplx lam = lambda_biest_qform(p_tiles, q_tiles, p_cache, q_cache, f[0],
                                  f[1], f[2], f[3]);
    out.lambda_abs = std::abs(lam);
    out.ratio = out.lambda_abs / params.alpha.weighted_measure(out.e_measures);

    std::vector<int> strata = stratify_k(q_tiles, exc.omega);
    int kmax = 0;
    for (int k : strata) kmax = std::max(kmax, k);
    out.stratum_abs.assign(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
      std::vector<std::size_t> subset;
      for (std::size_t m = 0; m < strata.size(); ++m)
        if (strata[m] == k) subset.push_back(m);
      if (subset.empty()) continue;
      out.stratum_abs[k] = std::abs(lambda_biest_qform(
          p_tiles, q_tiles, p_cache, q_cache, f[0], f[1], f[2], f[3], &subset));
    }

    rep.max_ratio = std::max(rep.max_ratio, out.ratio);
    if (out.stratum_abs.size() > rep.stratum_totals.size())
      rep.stratum_totals.resize(out.stratum_abs.size(), 0.0);
    for (std::size_t k = 0; k < out.stratum_abs.size(); ++k)
      rep.stratum_totals[k] += out.stratum_abs[k];
    rep.instances.push_back(std::move(out));
  }
  return rep;
}

ExperimentReport bht_experiment(const BhtExperimentParams& params) {
  // three-linear analogue with bad index 3
  Rat sum(0);
  for (const auto& a : params.alpha) sum += a;
  if (!(sum == Rat(1)))
    throw std::invalid_argument("bht_experiment: alpha must sum to 1");

  ExperimentReport rep;
  rep.params.vertex = 0;
  rep.params.instances = params.instances;
  rep.params.seed0 = params.seed0;
  rep.params.grid = params.grid;
  rep.params.constants = params.constants;
  rep.params.exceptional_c = params.exceptional_c;
  rep.exponents.pivot = 3;

  for (int inst = 0; inst < params.instances; ++inst) {
    std::uint64_t seed = params.seed0 + std::uint64_t(inst);
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 7);

    ExperimentInstance out;
    out.seed = seed;
    std::vector<MeasurableSetSpec> e(3);
    std::uniform_int_distribution<int> mag(1, 16);
    std::array<double, 3> meas{};
    for (int j = 0; j < 3; ++j) {
      e[j].set = random_dyadic_set(rng, 6, -3, mag(rng));
      meas[j] = e[j].measure().to_double();
      out.e_measures[j] = meas[j];
    }
    ExceptionalSetResult exc =
        exceptional_set(e, 3, params.exceptional_c, params.root_scale_exp);
    out.omega_measure = exc.omega_measure.to_double();
    out.majority_ok = exc.majority_ok;

    std::array<SampledFunction, 3> f;
    for (int j = 0; j < 3; ++j) {
      const DyadicUnion& source = (j == 2) ? exc.major_subset : e[j].set;
      f[j] = sample_x_of_e(source, params.grid, rng);
    }
    std::vector<TriTile> p_tiles =
        gen_rank1(experiment_gen_params(seed * 2 + 3, params.p_count),
                  params.constants);
    PacketCache cache(params.grid);
    cplx lam = lambda_bht(p_tiles, cache, f[0], f[1], f[2]);
    out.lambda_abs = std::abs(lam);
    double denom = 1.0;
    for (int j = 0; j < 3; ++j)
      denom *= std::pow(meas[j], params.alpha[j].to_double());
    out.ratio = out.lambda_abs / denom;

    std::vector<int> strata = stratify_k(p_tiles, exc.omega);
    int kmax = 0;
    for (int k : strata) kmax = std::max(kmax, k);
    out.stratum_abs.assign(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
      cplx acc(0.0, 0.0);
      for (std::size_t m = 0; m < p_tiles.size(); ++m) {
        if (strata[m] != k) continue;
        cplx prod = 1.0 / std::sqrt(p_tiles[m].spatial_length().to_double());
        for (int j = 1; j <= 3; ++j)
          prod *= inner(f[j - 1], cache.get(p_tiles[m].tile(j)));
        acc += prod;
      }
      out.stratum_abs[k] = std::abs(acc);
    }

    rep.max_ratio = std::max(rep.max_ratio, out.ratio);
    if (out.stratum_abs.size() > rep.stratum_totals.size())
      rep.stratum_totals.resize(out.stratum_abs.size(), 0.0);
    for (std::size_t k = 0; k < out.stratum_abs.size(); ++k)
      rep.stratum_totals[k] += out.stratum_abs[k];
    rep.instances.push_back(std::move(out));
  }
  return rep;
}

std::string ExperimentReport::to_json() const {
  nlohmann::json out;
  out["vertex"] = params.vertex;
  nlohmann::json alpha = nlohmann::json::array();
  for (const auto& a : params.alpha.alpha) alpha.push_back(a.str());
  out["alpha"] = alpha;
  out["pivot"] = exponents.pivot;
  out["theta_j"] = exponents.theta_j;
  out["theta"] = exponents.theta;
  out["seed0"] = params.seed0;
  out["instances"] = nlohmann::json::array();
  for (const auto& inst : instances) {
    nlohmann::json rec;
    rec["seed"] = inst.seed;
    rec["E_sizes"] = inst.e_measures;
    rec["omega_measure"] = inst.omega_measure;
    rec["majority_ok"] = inst.majority_ok;
    rec["lambda_abs"] = inst.lambda_abs;
    rec["ratio"] = inst.ratio;
    rec["stratum_abs"] = inst.stratum_abs;
    out["instances"].push_back(rec);
  }
  out["max_ratio"] = max_ratio;
  out["stratum_totals"] = stratum_totals;
  return out.dump(2);
}

std::string ExperimentReport::to_csv() const {
  std::string csv = "seed,E1,E2,E3,E4,lambda_abs,ratio\n";
  for (const auto& inst : instances) {
    csv += std::to_string(inst.seed);
    for (double m : inst.e_measures) csv += "," + std::to_string(m);
    csv += "," + std::to_string(inst.lambda_abs);
    csv += "," + std::to_string(inst.ratio);
    csv += "\n";
  }
  return csv;
}

}  // namespace biest
