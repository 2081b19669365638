#pragma once

#include "wlc/unit_loop.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace wlc {

inline constexpr const char* kBridgeGenerator = "philox4x32-boxmuller-bridge-v1";
inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

struct EnsembleMeta {
  std::uint64_t seed = 0;
  std::string generator_id = kBridgeGenerator;
  std::uint64_t count = 0;
  std::uint64_t points = 0;  ///< N, points per loop
  std::uint32_t dim = 1;
  std::uint32_t format_version = kEnsembleFormatVersion;

  bool operator==(const EnsembleMeta&) const = default;
};

struct Ensemble {
  EnsembleMeta meta;
  std::vector<Loop> loops;
};

/// Checks count >= 1, N >= 4, d in {1,2,3}; throws std::invalid_argument.
void check_ensemble_shape(std::uint64_t count, std::uint64_t points, std::uint32_t dim);

/// Loop `index` of the ensemble (seed, N, d): per coordinate, N Gaussian
/// increments of variance 2/N are summed, the linear drift is removed so the
/// walk closes, and the mean is subtracted. Depends only on (seed, index).
Loop generate_loop(std::uint64_t seed, std::uint64_t index, std::uint64_t points, std::uint32_t dim);

/// Raw bridge before centring (point 0 at the origin); exposed for the
/// increment-variance measure checks.
Eigen::MatrixXd generate_bridge(std::uint64_t seed, std::uint64_t index, std::uint64_t points,
                                std::uint32_t dim);

/// Loops [first, last) of the ensemble described by (seed, points, dim).
std::vector<Loop> generate_loops(std::uint64_t seed, std::uint64_t first, std::uint64_t last,
                                 std::uint64_t points, std::uint32_t dim, unsigned threads = 0);

Ensemble generate_ensemble(std::uint64_t count, std::uint64_t points, std::uint32_t dim,
                           std::uint64_t seed, unsigned threads = 0);

/// Read-only access to an ensemble that is either held in memory or
/// regenerated on demand from its seed. Pipelines only see this interface,
/// so ensembles larger than memory can be streamed.
class LoopSource {
 public:
  static LoopSource generated(std::uint64_t count, std::uint64_t points, std::uint32_t dim,
                              std::uint64_t seed);
  static LoopSource stored(std::shared_ptr<const Ensemble> ensemble);
  static LoopSource stored(Ensemble ensemble);

  const EnsembleMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(meta_.count); }
  std::uint32_t dim() const noexcept { return meta_.dim; }

  Loop loop(std::size_t index) const;

 private:
  EnsembleMeta meta_;
  std::shared_ptr<const Ensemble> stored_;
};

}  // namespace wlc
