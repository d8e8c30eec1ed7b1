#include "biest/config.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace biest {

RunConfig RunConfig::desk() {
  RunConfig c;
  c.order = OrderConstants::desk();
  c.whitney = WhitneyConstants::desk();
  return c;
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["window"]["L"] = window.L.str();
  j["window"]["N"] = window.N;
  j["order_constants"]["c_order"] = order.c_order;
  j["order_constants"]["c_lesssim"] = order.c_lesssim;
  j["order_constants"]["c_scale"] = order.c_scale;
  j["whitney_constants"]["c_lo"] = whitney.c_lo.str();
  j["whitney_constants"]["c_hi"] = whitney.c_hi.str();
  j["seed"] = seed;
  j["budgets"]["energy_exact"] = energy_exact_budget;
  j["budgets"]["modified_energy_exact"] = modified_energy_exact_budget;
  j["budgets"]["quadrature"] = quadrature_budget;
  j["maximal_root_scale_exp"] = maximal_root_scale_exp;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunConfig c;
  if (j.contains("window")) {
    c.window.L = Rat::parse(j["window"].value("L", std::string("64")));
    c.window.N = j["window"].value("N", 4096);
  }
  if (j.contains("order_constants")) {
    const auto& o = j["order_constants"];
    c.order.c_order = o.value("c_order", std::int64_t(3));
    c.order.c_lesssim = o.value("c_lesssim", std::int64_t(10'000'000));
    c.order.c_scale = o.value("c_scale", std::int64_t(1'000'000'000));
  }
  if (j.contains("whitney_constants")) {
    const auto& w = j["whitney_constants"];
    c.whitney.c_lo = Rat::parse(w.value("c_lo", std::string("1000")));
    c.whitney.c_hi = Rat::parse(w.value("c_hi", std::string("100000")));
  }
  c.seed = j.value("seed", std::uint64_t(0));
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    c.energy_exact_budget = b.value("energy_exact", std::size_t(20));
    c.modified_energy_exact_budget =
        b.value("modified_energy_exact", std::size_t(8));
    c.quadrature_budget = b.value("quadrature", std::size_t(1) << 31);
  }
  c.maximal_root_scale_exp = j.value("maximal_root_scale_exp", 26);
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (window.N <= 0 || (window.N & (window.N - 1)) != 0)
    throw std::invalid_argument("config: N must be a power of two");
  if (!(Rat(0) < window.L))
    throw std::invalid_argument("config: L must be positive");
  if (order.c_order <= 0 || order.c_lesssim <= 0 || order.c_scale <= 0)
    throw std::invalid_argument("config: order constants must be positive");
  if (!(Rat(1) < whitney.c_lo) || !(whitney.c_lo < whitney.c_hi))
    throw std::invalid_argument("config: need 1 < c_lo < c_hi");
  if (energy_exact_budget == 0 || quadrature_budget == 0)
    throw std::invalid_argument("config: budgets must be positive");
}

std::string RunConfig::hash() const {
  const std::string s = to_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

}  // namespace biest
