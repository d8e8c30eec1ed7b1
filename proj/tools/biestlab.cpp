// Command-line front end: verification suites, decomposition traces,
// restricted-type experiments, tile dumps, and symbol reconstruction sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "biest/decomp.hpp"
#include "biest/ensembles.hpp"
#include "biest/forms.hpp"
#include "biest/verify.hpp"

using namespace biest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig::desk();
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return RunConfig::from_json(text);
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output path " + path);
  out << payload << "\n";
}

int cmd_verify(const std::string& suite, const RunConfig& cfg,
               const std::string& out_path, bool dry_run) {
  if (dry_run) {
    std::printf("would run suite '%s' at config %s\n", suite.c_str(),
                cfg.hash().c_str());
    return kExitOk;
  }
  auto reports = run_verify(suite, cfg);
  nlohmann::json bundle = nlohmann::json::array();
  bool all_ok = true;
  for (const auto& r : reports) {
    bundle.push_back(nlohmann::json::parse(r.to_json(cfg)));
    all_ok = all_ok && r.passed;
    std::printf("suite %-12s %s\n", r.suite.c_str(), r.passed ? "PASS" : "FAIL");
    for (const auto& c : r.checks)
      std::printf("  %-40s %-4s %s\n", c.name.c_str(), c.passed ? "ok" : "FAIL",
                  c.detail.c_str());
  }
  if (!out_path.empty()) write_output(out_path, bundle.dump(2));
  return all_ok ? kExitOk : kExitAssertion;
}

int cmd_decompose(const std::string& input, int slot, const RunConfig& cfg,
                  const std::string& out_path, bool dry_run) {
  std::ifstream in(input);
  if (!in) {
    std::fprintf(stderr, "decompose: cannot open %s\n", input.c_str());
    return kExitUsage;
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "decompose: malformed input: %s\n", e.what());
    return kExitUsage;
  }
  std::vector<TriTile> universe = parse_tri_tiles(doc.at("universe").dump());
  auto parse_seq = [&](const std::string& key, int j) {
    CoefficientSequence s;
    s.slot = j;
    s.values.assign(universe.size(), cplx(0.0, 0.0));
    for (const auto& rec : doc.at(key)) {
      std::size_t id = rec.at("tile_id").get<std::size_t>();
      if (id >= universe.size())
        throw std::runtime_error("coefficient tile_id out of range");
      s.values[id] = cplx(rec.at("re").get<double>(), rec.at("im").get<double>());
    }
    return s;
  };
  CoefficientSequence a1 = parse_seq("a1", 1);
  CoefficientSequence a2 = parse_seq("a2", 2);
  CoefficientSequence a3 = parse_seq("a3", 3);
  if (dry_run) {
    std::printf("would decompose %zu tri-tiles (config %s)\n", universe.size(),
                cfg.hash().c_str());
    return kExitOk;
  }
  if (slot != 0) {
    const CoefficientSequence& seq = slot == 1 ? a1 : (slot == 2 ? a2 : a3);
    ModifiedEnergyResult me = modified_energy(universe, seq, cfg.order);
    SizeResult s = size(universe, seq, cfg.order);
    if (me.upper == 0.0 || s.value == 0.0) {
      write_output(out_path, "{\"selected\": [], \"note\": \"zero sequence\"}");
      return kExitOk;
    }
    int n = int(std::floor(-std::log2(s.value / me.upper))) - 1;
    SelectionTrace tr = select_trees(universe, seq, n, me.upper, cfg.order);
    write_output(out_path, tr.to_json());
    return kExitOk;
  }
  PartitionResult pr = partition(universe, a1, a2, a3, cfg.order);
  write_output(out_path, pr.to_json());
  return kExitOk;
}

int cmd_experiment(const std::string& kind, int vertex, int instances,
                   std::uint64_t seed, const RunConfig& cfg,
                   const std::string& out_path, bool dry_run) {
  if (dry_run) {
    std::printf("would run %s experiment: vertex=%d instances=%d seed=%llu "
                "config=%s\n",
                kind.c_str(), vertex, instances, (unsigned long long)seed,
                cfg.hash().c_str());
    return kExitOk;
  }
  ExperimentReport rep;
  if (kind == "biest") {
    ExperimentParams params;
    params.vertex = vertex;
    params.instances = instances;
    params.seed0 = seed;
    params.grid = cfg.window;
    params.constants =
        cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
    if (vertex == 2)
      params.alpha.alpha = {Rat(52, 100), Rat(97, 100), Rat(96, 100),
                            Rat(-145, 100)};
    else if (vertex == 9)
      params.alpha.alpha = {Rat(-48, 100), Rat(97, 100), Rat(2, 100),
                            Rat(49, 100)};
    else {
      std::fprintf(stderr, "experiment: built-in tuples exist for vertices 2 "
                           "and 9; supply others via code\n");
      return kExitUsage;
    }
    rep = restricted_type_experiment(params);
  } else if (kind == "bht") {
    BhtExperimentParams params;
    params.instances = instances;
    params.seed0 = seed;
    params.grid = cfg.window;
    params.constants =
        cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
    rep = bht_experiment(params);
  } else {
    std::fprintf(stderr, "experiment: kind must be biest or bht\n");
    return kExitUsage;
  }
  std::printf("max |Lambda| / |E|^alpha over %zu instances: %.6g\n",
              rep.instances.size(), rep.max_ratio);
  write_output(out_path, rep.to_json());
  if (!out_path.empty()) {
    std::ofstream csv(out_path + ".csv");
    csv << rep.to_csv();
  }
  return kExitOk;
}

int cmd_dump_tiles(int count, std::uint64_t seed, const RunConfig& cfg,
                   const std::string& out_path) {
  GenParams gp;
  gp.seed = seed;
  gp.count = std::size_t(count);
  OrderConstants oc =
      cfg.order.c_scale > 1000 ? OrderConstants::desk() : cfg.order;
  std::vector<TriTile> tiles = gen_rank1(gp, oc);
  write_output(out_path, dump_tri_tiles(tiles));
  return kExitOk;
}

int cmd_reconstruct_symbol(int k_trunc, const RunConfig& cfg,
                           const std::string& out_path, bool dry_run) {
  WhitneyConstants wc =
      Rat(100) < cfg.whitney.c_hi ? WhitneyConstants::desk() : cfg.whitney;
  if (dry_run) {
    std::printf("would sweep the symbol reconstruction at K=%d, c=(%s,%s)\n",
                k_trunc, wc.c_lo.str().c_str(), wc.c_hi.str().c_str());
    return kExitOk;
  }
  WhitneyCoverRequest req;
  req.box.n = 3;
  for (int i = 0; i < 3; ++i)
    req.box.axis[i] = QInterval{Rat(-9, 16), Rat(9, 16)};
  req.min_scale_exp = -6;
  req.max_scale_exp = -6;
  std::vector<WhitneyCover> covers(27);
  static const Shift all3[3] = {Shift::zero, Shift::third, Shift::two_thirds};
#pragma omp parallel for schedule(dynamic)
  for (int combo = 0; combo < 27; ++combo)
    covers[combo] =
        whitney_cover({all3[combo % 3], all3[(combo / 3) % 3], all3[combo / 9]},
                      req, wc, SingularLine::two_xi1_eq_xi2);
  SymbolSeries series = fourier_split(covers, std::max(k_trunc, 6));

  std::string csv = "xi1,xi2,xi3,value,target,error\n";
  const double t1[3] = {1.0 / std::sqrt(14.0), 2.0 / std::sqrt(14.0),
                        -3.0 / std::sqrt(14.0)};
  double n1[3] = {2.0 / std::sqrt(6.0), -1.0 / std::sqrt(6.0),
                  -1.0 / std::sqrt(6.0)};
  double max_err = 0.0;
  for (int it = -6; it <= 6; ++it) {
    for (double d : {0.26, 0.33, 0.40}) {
      for (int sgn : {-1, +1}) {
        std::array<double, 3> p{};
        for (int i = 0; i < 3; ++i) p[i] = 0.06 * it * t1[i] + sgn * d * n1[i];
        double want = 2.0 * p[0] - p[1] < 0 ? 1.0 : 0.0;
        double got = reconstruct_chi(series, p, k_trunc);
        double err = std::fabs(got - want);
        max_err = std::max(max_err, err);
        char line[160];
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.8f,%.0f,%.2e\n",
                      p[0], p[1], p[2], got, want, err);
        csv += line;
      }
    }
  }
  std::printf("reconstruction sweep at K=%d: max error %.3e over %d probes\n",
              k_trunc, max_err, 13 * 3 * 2);
  write_output(out_path, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the discretized biest model"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  bool dry_run = false;
  app.add_option("--config", config_path, "config JSON path (desk defaults)");
  app.add_option("--out", out_path, "output path (stdout when omitted)");
  app.add_option("--seed", seed, "base seed");
  app.add_flag("--dry-run", dry_run, "print the resolved plan and exit");

  auto* verify = app.add_subcommand("verify", "run module invariant suites");
  std::string suite = "all";
  verify->add_option("--suite", suite, "grid|tiles|functionals|decomp|whitney|forms|all");

  auto* decompose = app.add_subcommand("decompose", "tree-selection decomposition");
  std::string input;
  int slot = 0;
  decompose->add_option("input", input, "coefficient file")->required();
  decompose->add_option("--slot", slot, "emit one slot's selection trace (1..3)");

  auto* experiment = app.add_subcommand("experiment", "restricted-type experiments");
  std::string kind = "biest";
  int vertex = 2, instances = 10;
  experiment->add_option("--kind", kind, "biest|bht");
  experiment->add_option("--vertex", vertex, "vertex index (2 or 9 built in)");
  experiment->add_option("--instances", instances, "instance count");

  auto* dump = app.add_subcommand("dump-tiles", "emit a generated tile family");
  int dump_count = 12;
  dump->add_option("--count", dump_count, "tri-tile count");

  auto* recon = app.add_subcommand("reconstruct-symbol", "indicator reconstruction sweep");
  int k_trunc = 5;
  recon->add_option("--K", k_trunc, "series truncation");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    cfg.seed = seed;
    if (verify->parsed()) return cmd_verify(suite, cfg, out_path, dry_run);
    if (decompose->parsed())
      return cmd_decompose(input, slot, cfg, out_path, dry_run);
    if (experiment->parsed())
      return cmd_experiment(kind, vertex, instances, seed, cfg, out_path, dry_run);
    if (dump->parsed()) return cmd_dump_tiles(dump_count, seed, cfg, out_path);
    if (recon->parsed())
      return cmd_reconstruct_symbol(k_trunc, cfg, out_path, dry_run);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAssertion;
  }
  return kExitUsage;
}
