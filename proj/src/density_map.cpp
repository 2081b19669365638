#include "wlc/density_map.hpp"

#include "wlc/parallel.hpp"
#include "wlc/quadrature.hpp"
#include "wlc/scale_engine.hpp"
#include "wlc/statistics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace wlc {
namespace {

Eigen::VectorXd nodes(double lo, double hi, Eigen::Index n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, lo);
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

double trapezoid_weight(const Eigen::VectorXd& v, Eigen::Index i) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  const double left = i > 0 ? v(i) - v(i - 1) : 0.0;
  const double right = i + 1 < n ? v(i + 1) - v(i) : 0.0;
  return 0.5 * (left + right);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::runtime_error("import_grid: line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 1 || nz < 1) throw std::invalid_argument("GridSpec: empty grid");
  if (!(x_hi >= x_lo) || !(z_hi >= z_lo) || (nx > 1 && !(x_hi > x_lo)) || (nz > 1 && !(z_hi > z_lo)))
    throw std::invalid_argument("GridSpec: node ranges must be increasing");
}

DensityGrid density(const LoopSource& source, const Scene& scene, const GridSpec& spec, std::size_t n_blocks,
                    unsigned threads) {
  spec.validate();
  scene.validate();
  if (scene.reduced_dim != 2) throw std::invalid_argument("density: scene must have reduced dimension 2");
  const std::size_t count = source.size();
  if (count == 0) throw std::invalid_argument("density: empty ensemble");
  n_blocks = std::max<std::size_t>(1, std::min(n_blocks, count));

  DensityGrid g;
  g.x_nodes = nodes(spec.x_lo, spec.x_hi, spec.nx);
  g.z_nodes = nodes(spec.z_lo, spec.z_hi, spec.nz);
  g.scene = std::string(scene_kind_name(scene.kind));
  g.a = scene.distance;
  g.ensemble = source.meta();
  g.n_blocks = n_blocks;
  const Scene ns = scene.normalized();

  // Loops are summed in index order inside each block; blocks are disjoint,
  // so the result does not depend on the thread count.
  std::vector<Eigen::MatrixXd> block_mean(n_blocks);
  const std::size_t base = count / n_blocks, extra = count % n_blocks;
  parallel_for(0, n_blocks, threads, [&](std::size_t b) {
    const std::size_t first = b * base + std::min(b, extra);
    const std::size_t last = first + base + (b < extra ? 1 : 0);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(spec.nz, spec.nx);
    for (std::size_t i = first; i < last; ++i) {
      const PreparedLoop pl(source.loop(i), ns);
      for (Eigen::Index c = 0; c < spec.nx; ++c)
        for (Eigen::Index r = 0; r < spec.nz; ++r)
          acc(r, c) += loop_propertime(pl, ns, CmPoint(g.z_nodes(r), g.x_nodes(c)));
    }
    block_mean[b] = acc / static_cast<double>(last - first);
  });

  const double factor = kEnergyPrefactor / std::pow(g.a, 4);
  g.values.resize(spec.nz, spec.nx);
  g.std_err = Eigen::MatrixXd::Zero(spec.nz, spec.nx);
  std::vector<double> per_block(n_blocks);
  for (Eigen::Index c = 0; c < spec.nx; ++c)
    for (Eigen::Index r = 0; r < spec.nz; ++r) {
      for (std::size_t b = 0; b < n_blocks; ++b) per_block[b] = block_mean[b](r, c) * factor;
      if (n_blocks >= 2) {
        const JackknifeEstimate jk = jackknife(per_block);
        g.values(r, c) = jk.mean;
        g.std_err(r, c) = jk.std_err;
      } else {
        g.values(r, c) = per_block[0];
      }
    }
  return g;
}

double integrate(const DensityGrid& grid) {
  if (grid.values.size() == 0) throw std::invalid_argument("integrate: empty grid");
  double sum = 0.0;
  for (Eigen::Index c = 0; c < grid.x_nodes.size(); ++c)
    for (Eigen::Index r = 0; r < grid.z_nodes.size(); ++r)
      sum += trapezoid_weight(grid.x_nodes, c) * trapezoid_weight(grid.z_nodes, r) * grid.values(r, c);
  return sum * grid.a * grid.a;
}

void export_grid(const DensityGrid& grid, const std::filesystem::path& path) {
  if (grid.values.size() == 0 || grid.values.rows() != grid.z_nodes.size() || grid.values.cols() != grid.x_nodes.size())
    throw std::invalid_argument("export_grid: empty grid or node lists do not match the values");
  std::ofstream out(path);
  if (!out) throw std::system_error(errno, std::generic_category(), "export_grid: cannot open " + path.string());
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out << buf;
  };
  out << "z\\x";
  for (Eigen::Index c = 0; c < grid.x_nodes.size(); ++c) {
    out << ',';
    put(grid.x_nodes(c));
  }
  out << '\n';
  for (Eigen::Index r = 0; r < grid.z_nodes.size(); ++r) {
    put(grid.z_nodes(r));
    for (Eigen::Index c = 0; c < grid.x_nodes.size(); ++c) {
      out << ',';
      put(grid.values(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::system_error(errno, std::generic_category(), "export_grid: write failed for " + path.string());
}

DensityGrid import_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::system_error(errno, std::generic_category(), "import_grid: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("import_grid: empty file");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "z\\x") throw std::runtime_error("import_grid: line 1: bad header");
  std::vector<double> xs;
  for (std::size_t i = 1; i < header.size(); ++i) xs.push_back(parse_number(header[i], 1));
  std::vector<double> zs, vals;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw std::runtime_error("import_grid: line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells");
    zs.push_back(parse_number(cells[0], line_no));
    for (std::size_t i = 1; i < cells.size(); ++i) vals.push_back(parse_number(cells[i], line_no));
  }
  if (zs.empty()) throw std::runtime_error("import_grid: no data rows");
  DensityGrid g;
  g.x_nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  g.z_nodes = Eigen::Map<Eigen::VectorXd>(zs.data(), static_cast<Eigen::Index>(zs.size()));
  g.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      vals.data(), g.z_nodes.size(), g.x_nodes.size());
  g.std_err = Eigen::MatrixXd::Zero(g.values.rows(), g.values.cols());
  return g;
}

}  // namespace wlc
