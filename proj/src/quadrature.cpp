#include "wlc/quadrature.hpp"

#include "wlc/integrate.hpp"
#include "wlc/parallel.hpp"
#include "wlc/reduced.hpp"
#include "wlc/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace wlc {
namespace {

constexpr std::size_t kLoopChunk = 4;

bool same_primitives(const std::vector<Primitive>& a, const std::vector<Primitive>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Primitive &p = a[i], &q = b[i];
    if (p.kind != q.kind || p.normal != q.normal || p.side != q.side) return false;
    if (std::abs(p.level - q.level) > 1e-12 || std::abs(p.edge - q.edge) > 1e-12) return false;
  }
  return true;
}

/// True if the normalized scene is exactly the preset its kind names.
bool matches_preset(const Scene& normalized) {
  if (normalized.kind == SceneKind::Custom) return false;
  const Scene ref = normalized.kind == SceneKind::Comb
                        ? preset_comb(1.0, normalized.comb_spacing, normalized.comb_teeth)
                        : make_preset(scene_kind_name(normalized.kind), 1.0);
  return same_primitives(normalized.sigma1, ref.sigma1) && same_primitives(normalized.sigma2, ref.sigma2);
}

std::function<double(const Loop&)> with_extrapolation(std::function<double(const Loop&)> f, bool extrapolate) {
  if (!extrapolate) return f;
  return [f = std::move(f)](const Loop& loop) {
    if (loop.size() % 4 != 0 || loop.size() / 4 < 4)
      throw std::invalid_argument("extrapolation needs a point count divisible by 4 with N/4 >= 4");
    return 2.0 * f(loop) - f(decimate(loop, 4));
  };
}

QuadratureMeta base_meta(std::string observable, double a, int power, const QuadratureSettings& s, CmMethod method) {
  QuadratureMeta m;
  m.observable = std::move(observable);
  m.method = std::string(cm_method_name(method));
  m.extrapolated = s.extrapolate;
  m.a = a;
  m.power = power;
  m.domain = s.domain;
  m.edge_cells = s.edge_cells;
  return m;
}

void require_reduced_dim(const Scene& scene, int dim, const char* who) {
  scene.validate();
  if (scene.reduced_dim != dim)
    throw std::invalid_argument(std::string(who) + ": scene must have reduced dimension " + std::to_string(dim));
}

double sum_columns(std::span<const double> columns, std::span<const double> x_nodes, const CmDomain& domain) {
  double s = pairwise_sum(columns) * domain.spacing;
  if (domain.tail == TailMode::PowerLaw) s += power_law_tail(columns, x_nodes, domain.x_cut);
  return s;
}

/// The half-plane with normal Z whose covered side defines the bulk region.
const Primitive& covering_half_plane(const Scene& scene) {
  for (const auto* g : {&scene.sigma2, &scene.sigma1})
    for (const Primitive& p : *g)
      if (p.kind == PrimitiveKind::HalfPlane && p.normal == Axis::Z) return p;
  throw std::invalid_argument("edge_energy: scene has no horizontal half-plate");
}

}  // namespace

std::string_view cm_method_name(CmMethod method) { return method == CmMethod::Reduced ? "reduced" : "grid"; }

CmMethod parse_cm_method(std::string_view name) {
  if (name == "reduced") return CmMethod::Reduced;
  if (name == "grid") return CmMethod::Grid;
  throw std::invalid_argument("unknown cm method '" + std::string(name) + "' (expected reduced or grid)");
}

std::string_view tail_mode_name(TailMode mode) { return mode == TailMode::None ? "none" : "power-law"; }

TailMode parse_tail_mode(std::string_view name) {
  if (name == "none") return TailMode::None;
  if (name == "power-law") return TailMode::PowerLaw;
  throw std::invalid_argument("unknown tail mode '" + std::string(name) + "' (expected none or power-law)");
}

std::size_t CmDomain::nz() const { return static_cast<std::size_t>(std::llround((z_hi - z_lo) / spacing)); }
std::size_t CmDomain::nx() const { return static_cast<std::size_t>(std::llround(2.0 * x_cut / spacing)); }

std::vector<double> CmDomain::z_nodes() const {
  std::vector<double> z(nz());
  const double step = (z_hi - z_lo) / static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = z_lo + (static_cast<double>(i) + 0.5) * step;
  return z;
}

std::vector<double> CmDomain::x_nodes() const {
  std::vector<double> x(nx());
  const double step = 2.0 * x_cut / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -x_cut + (static_cast<double>(i) + 0.5) * step;
  return x;
}

void CmDomain::validate() const {
  if (!(spacing > 0) || !(z_hi > z_lo) || !(x_cut > 0) || !(support_margin >= 0))
    throw std::invalid_argument("CmDomain: need spacing > 0, z_hi > z_lo, x_cut > 0, margin >= 0");
  const double rz = (z_hi - z_lo) / spacing, rx = 2.0 * x_cut / spacing;
  if (std::abs(rz - std::round(rz)) > 1e-9 * rz || std::abs(rx - std::round(rx)) > 1e-9 * rx)
    throw std::invalid_argument("CmDomain: spacing must divide the z range and 2 x_cut");
  if (nz() < 1 || nx() < 2) throw std::invalid_argument("CmDomain: grid is empty");
}

void CmDomain::check_support(const Scene& normalized) const {
  auto inside = [&](double v, double lo, double hi) { return v >= lo + support_margin && v <= hi - support_margin; };
  for (const auto* g : {&normalized.sigma1, &normalized.sigma2})
    for (const Primitive& p : *g) {
      const bool z_normal = p.normal == Axis::Z;
      const bool level_ok = z_normal ? inside(p.level, z_lo, z_hi) : inside(p.level, -x_cut, x_cut);
      const bool edge_ok = p.kind == PrimitiveKind::InfinitePlane ||
                           (z_normal ? inside(p.edge, -x_cut, x_cut) : inside(p.edge, z_lo, z_hi));
      if (!level_ok || !edge_ok)
        throw DomainTooSmall("cm domain does not enclose every surface with a margin of " +
                             std::to_string(support_margin) + " a");
    }
}

std::vector<double> loop_values(const LoopSource& source, const LoopFunctional& functional, std::size_t first,
                                std::size_t last, unsigned threads) {
  if (last > source.size() || first > last) throw std::out_of_range("loop_values: loop range out of bounds");
  std::vector<double> out(last - first);
  parallel_for(
      first, last, threads, [&](std::size_t i) { out[i - first] = functional.per_loop(source.loop(i)); }, kLoopChunk);
  return out;
}

IntegralResult summarize(std::span<const double> per_loop, std::size_t n_blocks, const QuadratureMeta& meta) {
  if (per_loop.empty()) throw std::invalid_argument("summarize: empty ensemble");
  if (n_blocks < 1) throw std::invalid_argument("summarize: need at least one block");
  n_blocks = std::min(n_blocks, per_loop.size());
  const double factor = std::pow(meta.a, -meta.power);
  IntegralResult r;
  r.meta = meta;
  r.meta.loops = per_loop.size();
  r.n_blocks = n_blocks;
  r.blocks = block_means(per_loop, n_blocks);
  if (n_blocks >= 2) {
    const JackknifeEstimate jk = jackknife(r.blocks);
    r.value = jk.mean * factor;
    r.std_err = jk.std_err * factor;
  } else {
    r.value = r.blocks.front() * factor;
  }
  for (double& b : r.blocks) b *= factor;
  return r;
}

IntegralResult evaluate(const LoopSource& source, const LoopFunctional& functional, std::size_t n_blocks,
                        unsigned threads) {
  const std::vector<double> v = loop_values(source, functional, 0, source.size(), threads);
  QuadratureMeta meta = functional.meta;
  meta.points = source.meta().points;
  return summarize(v, n_blocks, meta);
}

std::vector<IntegralResult> evaluate(const LoopSource& source, std::span<const LoopFunctional> functionals,
                                     std::size_t n_blocks, unsigned threads) {
  const std::size_t n = source.size(), k = functionals.size();
  std::vector<std::vector<double>> values(k, std::vector<double>(n));
  parallel_for(
      0, n, threads,
      [&](std::size_t i) {
        const Loop loop = source.loop(i);
        for (std::size_t f = 0; f < k; ++f) values[f][i] = functionals[f].per_loop(loop);
      },
      kLoopChunk);
  std::vector<IntegralResult> out;
  out.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    QuadratureMeta meta = functionals[f].meta;
    meta.points = source.meta().points;
    out.push_back(summarize(values[f], n_blocks, meta));
  }
  return out;
}

double parallel_plates_cm_integral(const Loop& loop) {
  const Extent<double> e = extents(loop, 0);
  auto scale = [&](double offset) { return offset > 0 ? offset / e.max : offset < 0 ? offset / e.min : 0.0; };
  auto f = [&](double z) {
    const double s = std::max(scale(-z), scale(1.0 - z));
    const double s2 = s * s;
    return 0.5 / (s2 * s2);
  };
  const double z_star = -e.min / e.width();
  const double below = integrate_to_infinity([&](double t) { return f(-t); }, 0.0);
  const double above = integrate_to_infinity(f, 1.0);
  return below + integrate_adaptive(f, 0.0, z_star) + integrate_adaptive(f, z_star, 1.0) + above;
}

std::vector<double> grid_columns(const PreparedLoop& loop, const Scene& normalized, const CmDomain& domain) {
  const std::vector<double> zs = domain.z_nodes(), xs = domain.x_nodes();
  std::vector<double> columns(xs.size());
  std::vector<double> cell(zs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    for (std::size_t i = 0; i < zs.size(); ++i)
      cell[i] = loop_propertime(loop, normalized, CmPoint(zs[i], xs[j]));
    columns[j] = pairwise_sum(cell) * domain.spacing;
  }
  return columns;
}

double power_law_tail(std::span<const double> columns, std::span<const double> x_nodes, double x_cut) {
  // Least-squares c / |x|^3 on the outer half of each side; the tail beyond
  // x_cut then contributes c / (2 x_cut^2).
  double tail = 0.0;
  for (int side : {-1, 1}) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < x_nodes.size(); ++j) {
      const double ax = side * x_nodes[j];
      if (ax < 0.5 * x_cut) continue;
      const double w = 1.0 / (ax * ax * ax);
      num += columns[j] * w;
      den += w * w;
    }
    if (den > 0) tail += num / den / (2.0 * x_cut * x_cut);
  }
  return tail;
}

double grid_cm_integral(const PreparedLoop& loop, const Scene& normalized, const CmDomain& domain) {
  const std::vector<double> cols = grid_columns(loop, normalized, domain);
  return pairwise_sum(cols) * domain.spacing;
}

LoopFunctional parallel_plates_functional(double a, const QuadratureSettings& settings) {
  if (!(a > 0)) throw std::invalid_argument("parallel plates: a must be positive");
  LoopFunctional f;
  f.per_loop = with_extrapolation([](const Loop& loop) { return kEnergyPrefactor * parallel_plates_cm_integral(loop); },
                                  settings.extrapolate);
  f.meta = base_meta("parallel-plates energy per area", a, 3, settings, CmMethod::Reduced);
  return f;
}

LoopFunctional cm_energy_functional(const Scene& scene, const QuadratureSettings& settings) {
  require_reduced_dim(scene, 2, "cm_integrate_2d");
  const Scene ns = scene.normalized();
  CmMethod method = settings.method;
  if (method == CmMethod::Reduced && !(ns.kind == SceneKind::Perpendicular && matches_preset(ns)))
    method = CmMethod::Grid;  // no closed form for this scene
  LoopFunctional f;
  f.meta = base_meta(std::string(scene_kind_name(scene.kind)) + " energy per length", scene.distance, 2, settings,
                     method);
  if (method == CmMethod::Reduced) {
    f.per_loop = [](const Loop& loop) { return kEnergyPrefactor * reduced_perpendicular(loop); };
  } else {
    settings.domain.validate();
    settings.domain.check_support(ns);
    const CmDomain domain = settings.domain;
    const std::vector<double> xs = domain.x_nodes();
    f.per_loop = [ns, domain, xs](const Loop& loop) {
      const std::vector<double> cols = grid_columns(PreparedLoop(loop, ns), ns, domain);
      return kEnergyPrefactor * sum_columns(cols, xs, domain);
    };
  }
  f.per_loop = with_extrapolation(std::move(f.per_loop), settings.extrapolate);
  return f;
}

LoopFunctional edge_energy_functional(const Scene& scene, std::optional<double> bulk_per_area,
                                      const QuadratureSettings& settings) {
  require_reduced_dim(scene, 2, "edge_energy");
  if (scene.kind != SceneKind::OneSemiInfinite && scene.kind != SceneKind::TwoSemiInfinite)
    throw std::invalid_argument("edge_energy: scene must be one-semi-infinite or two-semi-infinite");
  const Scene ns = scene.normalized();
  CmMethod method = settings.method;
  if (method == CmMethod::Reduced && (bulk_per_area || !matches_preset(ns))) method = CmMethod::Grid;
  LoopFunctional f;
  f.meta = base_meta(std::string(scene_kind_name(scene.kind)) + " edge energy per length", scene.distance, 2,
                     settings, method);
  if (method == CmMethod::Reduced) {
    if (ns.kind == SceneKind::OneSemiInfinite) {
      f.per_loop = [](const Loop& loop) { return kEnergyPrefactor * reduced_one_semi_infinite_edge(loop); };
    } else {
      const std::size_t cells = settings.edge_cells;
      f.per_loop = [cells](const Loop& loop) {
        return kEnergyPrefactor * reduced_two_semi_infinite_edge(loop, cells);
      };
    }
  } else {
    settings.domain.validate();
    settings.domain.check_support(ns);
    const CmDomain domain = settings.domain;
    const std::vector<double> xs = domain.x_nodes();
    const Primitive cover = covering_half_plane(ns);
    const Scene bulk_scene = preset_parallel_plates(1.0);
    const std::optional<double> bulk_units =
        bulk_per_area ? std::optional<double>(*bulk_per_area * std::pow(scene.distance, 3) / kEnergyPrefactor)
                      : std::nullopt;
    f.per_loop = [ns, domain, xs, cover, bulk_scene, bulk_units](const Loop& loop) {
      std::vector<double> cols = grid_columns(PreparedLoop(loop, ns), ns, domain);
      double bulk = 0.0;
      if (bulk_units) {
        bulk = *bulk_units;
      } else {
        const PreparedLoop pl(loop.reduced(1), bulk_scene);
        const std::vector<double> zs = domain.z_nodes();
        std::vector<double> cell(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i) cell[i] = loop_propertime(pl, bulk_scene, CmPoint(zs[i], 0.0));
        bulk = pairwise_sum(cell) * domain.spacing;
      }
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (cover.side * xs[j] >= cover.side * cover.edge) cols[j] -= bulk;
      return kEnergyPrefactor * sum_columns(cols, xs, domain);
    };
  }
  f.per_loop = with_extrapolation(std::move(f.per_loop), settings.extrapolate);
  return f;
}

LoopFunctional comb_force_functional(double a, double spacing, int teeth, const QuadratureSettings& settings) {
  if (!(a > 0)) throw std::invalid_argument("comb: a must be positive");
  if (!(spacing > 0)) throw std::invalid_argument("comb: spacing must be positive");
  if (teeth < 0) throw std::invalid_argument("comb: tooth count must be >= 0 (0 = periodic)");
  const double d = spacing / a;
  const int panels = settings.comb_panels;
  LoopFunctional f;
  f.per_loop = with_extrapolation(
      [d, teeth, panels](const Loop& loop) { return kEnergyPrefactor * reduced_comb_force(loop, d, teeth, panels); },
      settings.extrapolate);
  f.meta = base_meta(teeth == 0 ? "periodic comb force per tooth and length" : "comb force per length", a, 3, settings,
                     CmMethod::Reduced);
  return f;
}

IntegralResult energy_parallel_plates(const LoopSource& source, double a, const QuadratureSettings& settings) {
  if (source.size() == 0) throw std::invalid_argument("energy_parallel_plates: empty ensemble");
  return evaluate(source, parallel_plates_functional(a, settings), settings.n_blocks, settings.threads);
}

IntegralResult cm_integrate_2d(const LoopSource& source, const Scene& scene, const QuadratureSettings& settings) {
  if (source.size() == 0) throw std::invalid_argument("cm_integrate_2d: empty ensemble");
  return evaluate(source, cm_energy_functional(scene, settings), settings.n_blocks, settings.threads);
}

double line_density(const LoopSource& source, const Scene& scene, double x, std::span<const double> z_nodes,
                    unsigned threads) {
  require_reduced_dim(scene, 2, "line_density");
  if (source.size() == 0) throw std::invalid_argument("line_density: empty ensemble");
  if (z_nodes.size() < 2) throw std::invalid_argument("line_density: need at least two z nodes");
  const double a = scene.distance;
  const Scene ns = scene.normalized();
  std::vector<double> zs(z_nodes.begin(), z_nodes.end());
  for (double& z : zs) z /= a;
  LoopFunctional f;
  f.per_loop = [&](const Loop& loop) {
    const PreparedLoop pl(loop, ns);
    double s = 0.0, prev = loop_propertime(pl, ns, CmPoint(zs[0], x / a));
    for (std::size_t i = 1; i < zs.size(); ++i) {
      const double cur = loop_propertime(pl, ns, CmPoint(zs[i], x / a));
      s += 0.5 * (prev + cur) * (zs[i] - zs[i - 1]);
      prev = cur;
    }
    return kEnergyPrefactor * s;
  };
  const std::vector<double> v = loop_values(source, f, 0, source.size(), threads);
  return mean(v) / (a * a * a);
}

IntegralResult edge_energy(const LoopSource& source, const Scene& scene, std::optional<double> bulk_per_area,
                           const QuadratureSettings& settings) {
  if (source.size() == 0) throw std::invalid_argument("edge_energy: empty ensemble");
  return evaluate(source, edge_energy_functional(scene, bulk_per_area, settings), settings.n_blocks,
                  settings.threads);
}

}  // namespace wlc
