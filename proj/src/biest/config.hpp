#pragma once

#include <string>

#include "biest/sampled.hpp"
#include "biest/tiles.hpp"
#include "biest/whitney.hpp"

namespace biest {

/// Run-wide knobs.  Paper values are the defaults; desk() scales the order
/// and sandwich constants down to ranges where nontrivial configurations fit
/// into test-sized universes.
struct RunConfig {
  SampleGrid window{Rat(64), 4096};
  OrderConstants order = OrderConstants::paper();
  WhitneyConstants whitney = WhitneyConstants::paper();
  std::uint64_t seed = 0;
  std::size_t energy_exact_budget = 20;
  std::size_t modified_energy_exact_budget = 8;
  std::size_t quadrature_budget = std::size_t(1) << 31;
  int maximal_root_scale_exp = 26;  // window exponent plus 20

  static RunConfig desk();

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);

  /// FNV-1a hash of the canonical serialization, echoed into reports.
  std::string hash() const;

  void validate() const;
};

}  // namespace biest
