#include "wlc/scale_engine.hpp"

#include <algorithm>
#include <cmath>

namespace wlc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int side_slot(int side) { return side > 0 ? 0 : 1; }

void check_dims(const Loop& loop, int reduced_dim) {
  if (loop.dim() < reduced_dim)
    throw std::invalid_argument("scale engine: loop dimension " + std::to_string(loop.dim()) +
                                " is smaller than the scene's reduced dimension " + std::to_string(reduced_dim));
}

void check_primitive_dim(const Primitive& p, int dim) {
  if (axis_index(p.normal) >= dim || (p.kind == PrimitiveKind::HalfPlane && dim < 2))
    throw std::invalid_argument("scale engine: primitive needs more loop dimensions than available");
}

ScaleSet plane_scales(const Extent<double>& ext, double offset) {
  if (offset > 0) return ScaleSet::half_line(offset / ext.max);
  if (offset < 0) return ScaleSet::half_line(offset / ext.min);
  return ScaleSet::single(0.0, kInf);
}

ScaleSet group_scales(const PreparedLoop& loop, const std::vector<Primitive>& group, const CmPoint& cm) {
  if (group.size() == 1) return loop_primitive_scales(loop, group.front(), cm);
  std::vector<Interval<double>> all;
  for (const Primitive& p : group) {
    const ScaleSet s = loop_primitive_scales(loop, p, cm);
    all.insert(all.end(), s.begin(), s.end());
  }
  return ScaleSet::from(std::move(all));
}

}  // namespace

PreparedLoop::PreparedLoop(const Loop& loop, const Scene& scene) : loop_(loop), dim_(scene.reduced_dim) {
  check_dims(loop, scene.reduced_dim);
  for (int c = 0; c < dim_; ++c) extents_[c] = extents(loop, c);
  for (const auto* group : {&scene.sigma1, &scene.sigma2})
    for (const Primitive& p : *group) {
      check_primitive_dim(p, dim_);
      if (p.kind != PrimitiveKind::HalfPlane) continue;
      auto& slot = envelopes_[axis_index(p.normal)][side_slot(p.side)];
      if (slot) continue;
      slot = CrossingEnvelope<double>::build(loop.coordinate(axis_index(p.normal)),
                                             loop.coordinate(axis_index(other_axis(p.normal))),
                                             p.side > 0 ? EnvelopeKind::Upper : EnvelopeKind::Lower);
    }
}

const CrossingEnvelope<double>& PreparedLoop::envelope(Axis normal, int side) const {
  const auto& slot = envelopes_[axis_index(normal)][side_slot(side)];
  if (!slot) throw std::logic_error("PreparedLoop: envelope was not prepared for this scene");
  return *slot;
}

ScaleSet loop_primitive_scales(const PreparedLoop& loop, const Primitive& primitive, const CmPoint& cm) {
  check_primitive_dim(primitive, loop.dim());
  const double offset = primitive.level - cm[axis_index(primitive.normal)];
  if (primitive.kind == PrimitiveKind::InfinitePlane) return plane_scales(loop.extent(primitive.normal), offset);

  const double edge = primitive.edge - cm[axis_index(other_axis(primitive.normal))];
  const auto& env = loop.envelope(primitive.normal, primitive.side);
  std::vector<Interval<double>> pieces;
  for (const auto& piece : env.pieces()) {
    const double alpha = piece.anchor_f - piece.slope * piece.anchor_h;
    if (auto iv = piece_scales(piece.h0, piece.h1, alpha, piece.slope, offset, edge, primitive.side))
      pieces.push_back(*iv);
  }
  return ScaleSet::from(std::move(pieces));
}

ScaleSet loop_primitive_scales_direct(const Loop& loop, const Primitive& primitive, const CmPoint& cm) {
  check_primitive_dim(primitive, static_cast<int>(loop.dim()));
  const int normal = axis_index(primitive.normal);
  const double offset = primitive.level - cm[normal];
  if (primitive.kind == PrimitiveKind::InfinitePlane) return plane_scales(extents(loop, normal), offset);

  const int free = axis_index(other_axis(primitive.normal));
  const double edge = primitive.edge - cm[free];
  const auto& pts = loop.points();
  const Eigen::Index n = loop.size();
  std::vector<Interval<double>> pieces;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index k1 = (k + 1) % n;
    if (auto iv = segment_halfline_scales(pts(free, k), pts(normal, k), pts(free, k1), pts(normal, k1), offset, edge,
                                          primitive.side))
      pieces.push_back(*iv);
  }
  return ScaleSet::from(std::move(pieces));
}

ScaleSet loop_scene_scales(const PreparedLoop& loop, const Scene& scene, const CmPoint& cm) {
  const ScaleSet first = group_scales(loop, scene.sigma1, cm);
  if (first.empty()) return first;
  return intersect(first, group_scales(loop, scene.sigma2, cm));
}

ScaleSet loop_scene_scales(const Loop& loop, const Scene& scene, const CmPoint& cm) {
  return loop_scene_scales(PreparedLoop(loop, scene), scene, cm);
}

double loop_propertime(const PreparedLoop& loop, const Scene& scene, const CmPoint& cm) {
  return propertime_integral(loop_scene_scales(loop, scene, cm));
}

bool scaled_loop_touches(const Loop& loop, const Primitive& primitive, const CmPoint& cm, double s) {
  check_primitive_dim(primitive, static_cast<int>(loop.dim()));
  const int normal = axis_index(primitive.normal);
  const bool half = primitive.kind == PrimitiveKind::HalfPlane;
  const int free = half ? axis_index(other_axis(primitive.normal)) : normal;
  const auto& pts = loop.points();
  const Eigen::Index n = loop.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index k1 = (k + 1) % n;
    const double pn = cm[normal] + s * pts(normal, k);
    const double qn = cm[normal] + s * pts(normal, k1);
    if (pn == qn) continue;
    if (!(std::min(pn, qn) <= primitive.level && primitive.level < std::max(pn, qn))) continue;
    if (!half) return true;
    const double pf = cm[free] + s * pts(free, k);
    const double qf = cm[free] + s * pts(free, k1);
    const double cross = pf + (primitive.level - pn) * (qf - pf) / (qn - pn);
    if (primitive.side * cross >= primitive.side * primitive.edge) return true;
  }
  return false;
}

bool scaled_loop_touches_both(const Loop& loop, const Scene& scene, const CmPoint& cm, double s) {
  auto any = [&](const std::vector<Primitive>& group) {
    return std::any_of(group.begin(), group.end(),
                       [&](const Primitive& p) { return scaled_loop_touches(loop, p, cm, s); });
  };
  return any(scene.sigma1) && any(scene.sigma2);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0 && hi > lo) || count < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> g(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

ScaleSet brute_force_scales(const Loop& loop, const Scene& scene, const CmPoint& cm, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("brute_force_scales: grid too small");
  std::vector<Interval<double>> runs;
  std::size_t i = 0;
  while (i < grid.size()) {
    if (!scaled_loop_touches_both(loop, scene, cm, grid[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && scaled_loop_touches_both(loop, scene, cm, grid[j + 1])) ++j;
    const double hi = (j + 1 == grid.size()) ? kInf : grid[j];
    // A single isolated grid point still marks a (sub-cell) interval.
    runs.push_back({grid[i], hi > grid[i] ? hi : std::nextafter(grid[i], kInf)});
    i = j + 1;
  }
  return ScaleSet::from(std::move(runs));
}

ScaleSet refine_brute_force(const Loop& loop, const Scene& scene, const CmPoint& cm, std::span<const double> grid,
                            const ScaleSet& coarse, int iterations) {
  auto transition = [&](double inside, double outside) {
    for (int it = 0; it < iterations; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      (scaled_loop_touches_both(loop, scene, cm, mid) ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  std::vector<Interval<double>> out;
  for (const auto& iv : coarse) {
    Interval<double> r = iv;
    auto lo_it = std::lower_bound(grid.begin(), grid.end(), iv.lo);
    if (lo_it != grid.begin() && lo_it != grid.end() && *lo_it == iv.lo) r.lo = transition(iv.lo, *(lo_it - 1));
    if (std::isfinite(iv.hi)) {
      // Last grid point inside the run (an isolated point's run is sub-cell wide).
      auto hi_it = std::upper_bound(grid.begin(), grid.end(), iv.hi);
      if (hi_it != grid.begin() && hi_it != grid.end()) r.hi = transition(*(hi_it - 1), *hi_it);
    }
    out.push_back(r);
  }
  return ScaleSet::from(std::move(out));
}

}  // namespace wlc
