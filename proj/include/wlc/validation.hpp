#pragma once

#include "wlc/geometry.hpp"
#include "wlc/scale_engine.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace wlc {

/// One random (loop, centre of mass, scene) configuration for comparing the
/// exact scale sets with the brute-force predicate scan.
struct OracleInstance {
  Loop loop;
  Scene scene;
  CmPoint cm;
};

/// Instance `index` of a reproducible family: every preset, N in [4, 64].
OracleInstance oracle_instance(std::uint64_t seed, std::uint64_t index);

struct OracleComparison {
  ScaleSet exact;
  ScaleSet brute;     ///< grid resolution
  ScaleSet refined;   ///< boundaries bisected to the predicate transition
  std::size_t subcell_confirmed = 0;  ///< exact sub-cell intervals confirmed by the predicate
  bool sets_match = false;
  double exact_integral = 0.0;
  double refined_integral = 0.0;
  double relative_difference = 0.0;
};

/// Intervals of at least two grid cells must have a counterpart with both
/// ends within one cell (log spacing); integrals compare the exact set, cut
/// to the grid range, with the refined scan plus any sub-cell intervals the
/// predicate confirms.
OracleComparison compare_with_oracle(const OracleInstance& instance, std::span<const double> grid);

/// True if every interval spanning >= 2 cells of the log grid in one set has
/// a partner in the other with both ends within one cell.
bool scale_sets_match(const ScaleSet& a, const ScaleSet& b, std::span<const double> grid);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  unsigned threads = 0;
  std::uint64_t seed = 20240601;
  std::size_t oracle_instances = 200;
};

/// The self-test suite behind `validate`: loop-measure checks, oracle
/// comparison, a-scaling exactness, signs, density symmetries, truncation and
/// refinement robustness, thread invariance.
std::vector<CheckResult> run_validation(const ValidationOptions& options, std::ostream* log = nullptr);

}  // namespace wlc
