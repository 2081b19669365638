#pragma once

#include "wlc/ensemble.hpp"
#include "wlc/geometry.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>

namespace wlc {

/// Evenly spaced nodes (endpoints included), in units of a.
struct GridSpec {
  double x_lo = -3.0;
  double x_hi = 3.0;
  Eigen::Index nx = 121;
  double z_lo = -1.0;
  double z_hi = 2.0;
  Eigen::Index nz = 81;

  void validate() const;
};

/// Interaction energy density eps(x, z) = -(1/32 pi^2) <proper-time integral>
/// at centre-of-mass nodes; rows are z nodes, columns x nodes.
struct DensityGrid {
  Eigen::VectorXd x_nodes;
  Eigen::VectorXd z_nodes;
  Eigen::MatrixXd values;
  Eigen::MatrixXd std_err;
  std::string scene;
  double a = 1.0;
  EnsembleMeta ensemble;
  std::size_t n_blocks = 0;
};

DensityGrid density(const LoopSource& source, const Scene& scene, const GridSpec& spec, std::size_t n_blocks = 10,
                    unsigned threads = 0);

/// Trapezoid integral over the grid: energy per unit edge length.
double integrate(const DensityGrid& grid);

/// CSV: first cell "z\x", first row x nodes, first column z nodes, values
/// with 17 significant digits.
void export_grid(const DensityGrid& grid, const std::filesystem::path& path);
DensityGrid import_grid(const std::filesystem::path& path);

}  // namespace wlc
