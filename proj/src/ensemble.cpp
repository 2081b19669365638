#include "wlc/ensemble.hpp"

#include "wlc/parallel.hpp"
#include "wlc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wlc {

void check_ensemble_shape(std::uint64_t count, std::uint64_t points, std::uint32_t dim) {
  if (count == 0) throw std::invalid_argument("ensemble: count must be positive");
  if (points < 4) throw std::invalid_argument("ensemble: need at least 4 points per loop");
  if (dim < 1 || dim > 3) throw std::invalid_argument("ensemble: dimension must be 1, 2 or 3");
}

Eigen::MatrixXd generate_bridge(std::uint64_t seed, std::uint64_t index, std::uint64_t points,
                                std::uint32_t dim) {
  check_ensemble_shape(1, points, dim);
  const auto n = static_cast<Eigen::Index>(points);
  const double sigma = std::sqrt(2.0 / static_cast<double>(points));
  SubStream stream(seed, index);
  Eigen::MatrixXd pts(dim, n);
  for (std::uint32_t c = 0; c < dim; ++c) {
    // Walk positions S_0 = 0, S_1, ..., S_{N-1}; S_N closes the walk.
    double walk = 0.0;
    pts(c, 0) = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) {
      walk += sigma * stream.normal();
      pts(c, k) = walk;
    }
    const double closing = walk + sigma * stream.normal();
    const double drift = closing / static_cast<double>(points);
    for (Eigen::Index k = 1; k < n; ++k) pts(c, k) -= drift * static_cast<double>(k);
  }
  return pts;
}

Loop generate_loop(std::uint64_t seed, std::uint64_t index, std::uint64_t points, std::uint32_t dim) {
  Eigen::MatrixXd pts = generate_bridge(seed, index, points, dim);
  center_in_place(pts);
  return Loop(std::move(pts));
}

std::vector<Loop> generate_loops(std::uint64_t seed, std::uint64_t first, std::uint64_t last,
                                 std::uint64_t points, std::uint32_t dim, unsigned threads) {
  if (last < first) throw std::invalid_argument("generate_loops: empty range");
  check_ensemble_shape(std::max<std::uint64_t>(last - first, 1), points, dim);
  std::vector<Loop> loops(last - first);
  parallel_for(0, loops.size(), threads,
               [&](std::size_t i) { loops[i] = generate_loop(seed, first + i, points, dim); }, 16);
  return loops;
}

Ensemble generate_ensemble(std::uint64_t count, std::uint64_t points, std::uint32_t dim,
                           std::uint64_t seed, unsigned threads) {
  check_ensemble_shape(count, points, dim);
  Ensemble e;
  e.meta.seed = seed;
  e.meta.count = count;
  e.meta.points = points;
  e.meta.dim = dim;
  e.loops = generate_loops(seed, 0, count, points, dim, threads);
  return e;
}

LoopSource LoopSource::generated(std::uint64_t count, std::uint64_t points, std::uint32_t dim,
                                 std::uint64_t seed) {
  check_ensemble_shape(count, points, dim);
  LoopSource src;
  src.meta_.seed = seed;
  src.meta_.count = count;
  src.meta_.points = points;
  src.meta_.dim = dim;
  return src;
}

LoopSource LoopSource::stored(std::shared_ptr<const Ensemble> ensemble) {
  if (!ensemble || ensemble->loops.empty()) throw std::invalid_argument("LoopSource: empty ensemble");
  if (ensemble->loops.size() != ensemble->meta.count)
    throw std::invalid_argument("LoopSource: loop count does not match metadata");
  LoopSource src;
  src.meta_ = ensemble->meta;
  src.stored_ = std::move(ensemble);
  return src;
}

LoopSource LoopSource::stored(Ensemble ensemble) {
  return stored(std::make_shared<const Ensemble>(std::move(ensemble)));
}

Loop LoopSource::loop(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("LoopSource: loop index out of range");
  if (stored_) return stored_->loops[index];
  return generate_loop(meta_.seed, index, meta_.points, meta_.dim);
}

}  // namespace wlc
