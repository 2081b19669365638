#include "wlc/statistics.hpp"

#include <cmath>
#include <stdexcept>

namespace wlc {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty input");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

JackknifeEstimate jackknife(std::span<const double> blocks) {
  const std::size_t n = blocks.size();
  if (n < 2) throw std::invalid_argument("jackknife: need at least two blocks");
  const double total = pairwise_sum(blocks);
  std::vector<double> leave_one_out(n);
  for (std::size_t i = 0; i < n; ++i) leave_one_out[i] = (total - blocks[i]) / static_cast<double>(n - 1);
  const double centre = mean(leave_one_out);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (leave_one_out[i] - centre) * (leave_one_out[i] - centre);
  const double var = pairwise_sum(sq) * static_cast<double>(n - 1) / static_cast<double>(n);
  return {total / static_cast<double>(n), std::sqrt(var)};
}

std::vector<double> block_means(std::span<const double> values, std::size_t n_blocks) {
  if (n_blocks == 0) throw std::invalid_argument("block_means: need at least one block");
  if (values.size() < n_blocks) throw std::invalid_argument("block_means: fewer values than blocks");
  std::vector<double> out(n_blocks);
  const std::size_t base = values.size() / n_blocks, extra = values.size() % n_blocks;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    out[b] = mean(values.subspan(pos, len));
    pos += len;
  }
  return out;
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - m) * (values[i] - m);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace wlc
