#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wlc {

/// Pairwise (cascade) summation; the order of additions depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

struct JackknifeEstimate {
  double mean;
  double std_err;
};

/// Delete-one jackknife over block values. Throws for fewer than 2 blocks.
JackknifeEstimate jackknife(std::span<const double> blocks);

/// Means of `n_blocks` contiguous groups of per-loop values. Group sizes
/// differ by at most one. Throws if there are fewer values than blocks.
std::vector<double> block_means(std::span<const double> values, std::size_t n_blocks);

/// Plain standard error of the mean of i.i.d. values.
double standard_error(std::span<const double> values);

}  // namespace wlc
