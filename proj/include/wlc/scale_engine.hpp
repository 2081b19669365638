#pragma once

#include "wlc/envelope.hpp"
#include "wlc/geometry.hpp"
#include "wlc/interval.hpp"
#include "wlc/unit_loop.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wlc {

using ScaleSet = IntervalUnion<double>;

/// Same algebra for a line piece f(h) = alpha + beta h on [h_lo, h_hi).
template <typename Scalar>
std::optional<Interval<Scalar>> piece_scales(Scalar h_lo, Scalar h_hi, Scalar alpha, Scalar beta, Scalar offset,
                                                    Scalar edge, int side) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  Scalar lo = 0, hi = inf;
  // Range condition: offset / s in [h_lo, h_hi).
  if (offset > 0) {
    if (!(h_hi > 0)) return std::nullopt;
    lo = offset / h_hi;
    if (h_lo > 0) hi = offset / h_lo;
  } else if (offset < 0) {
    if (!(h_lo < 0)) return std::nullopt;
    lo = offset / h_lo;
    if (h_hi < 0) hi = offset / h_hi;
  } else if (!(h_lo <= 0 && 0 < h_hi)) {
    return std::nullopt;
  }
  // Side condition: side * (s alpha + beta offset) >= side * edge.
  const Scalar rhs = side * (edge - beta * offset);
  const Scalar coef = side * alpha;
  if (coef > 0) {
    lo = std::max(lo, rhs / coef);
  } else if (coef < 0) {
    hi = std::min(hi, rhs / coef);
  } else if (!(Scalar(0) >= rhs)) {
    return std::nullopt;
  }
  if (!(hi > lo)) return std::nullopt;
  return Interval<Scalar>{lo, hi};
}

/// Scales s > 0 at which the segment (s p, s q), placed at the centre of mass,
/// crosses the line {normal == level} on the covered side of a half-line.
///
/// Points are given as (free, normal) pairs relative to the centre of mass;
/// `offset` = level - cm_normal and `edge` = edge - cm_free. The crossing at
/// loop-frame height h = offset / s has free coordinate alpha + beta h, so the
/// side test is linear in s; the range test keeps h in [min, max) of the
/// segment's normal coordinate. The result is one interval or nothing.
template <typename Scalar>
std::optional<Interval<Scalar>> segment_halfline_scales(Scalar p_free, Scalar p_normal, Scalar q_free,
                                                        Scalar q_normal, Scalar offset, Scalar edge, int side) {
  if (!std::isfinite(p_free) || !std::isfinite(p_normal) || !std::isfinite(q_free) || !std::isfinite(q_normal) ||
      !std::isfinite(offset) || !std::isfinite(edge))
    throw std::invalid_argument("segment_halfline_scales: non-finite input");
  if (p_normal == q_normal) return std::nullopt;  // parallel to the line
  const Scalar beta = (q_free - p_free) / (q_normal - p_normal);
  const Scalar alpha = p_free - beta * p_normal;
  const Scalar h_lo = std::min(p_normal, q_normal);
  const Scalar h_hi = std::max(p_normal, q_normal);
  return piece_scales(h_lo, h_hi, alpha, beta, offset, edge, side);
}

/// Per-loop data reused for every centre-of-mass position: axis extents and
/// the crossing envelopes the scene's half-lines need.
class PreparedLoop {
 public:
  PreparedLoop() = default;
  PreparedLoop(const Loop& loop, const Scene& scene);

  int dim() const noexcept { return dim_; }
  const Loop& loop() const noexcept { return loop_; }
  const Extent<double>& extent(Axis axis) const { return extents_.at(axis_index(axis)); }

  /// Envelope over lines normal to `normal`: Upper for side +1, Lower for side -1.
  const CrossingEnvelope<double>& envelope(Axis normal, int side) const;

 private:
  Loop loop_;
  int dim_ = 0;
  std::array<Extent<double>, 2> extents_{};
  std::array<std::array<std::optional<CrossingEnvelope<double>>, 2>, 2> envelopes_;
};

/// Centre of mass in the reduced cross-section, indexed like loop coordinates
/// (component 0 is z, component 1 is x).
using CmPoint = Eigen::Vector2d;

/// Scale set of one primitive. Half-lines use the crossing envelope.
ScaleSet loop_primitive_scales(const PreparedLoop& loop, const Primitive& primitive, const CmPoint& cm);

/// Reference route: union over all N segments of segment_halfline_scales.
ScaleSet loop_primitive_scales_direct(const Loop& loop, const Primitive& primitive, const CmPoint& cm);

/// (union over sigma1) intersected with (union over sigma2).
ScaleSet loop_scene_scales(const PreparedLoop& loop, const Scene& scene, const CmPoint& cm);
ScaleSet loop_scene_scales(const Loop& loop, const Scene& scene, const CmPoint& cm);

/// Proper-time integral for the loop at `cm`; zero when no scale touches both groups.
double loop_propertime(const PreparedLoop& loop, const Scene& scene, const CmPoint& cm);

// ---------------------------------------------------------------------------
// Brute-force oracle: pointwise geometric predicate, no interval algebra.

/// Does the polygon cm + s * loop touch the primitive? Direct segment tests.
bool scaled_loop_touches(const Loop& loop, const Primitive& primitive, const CmPoint& cm, double s);
bool scaled_loop_touches_both(const Loop& loop, const Scene& scene, const CmPoint& cm, double s);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Grid-resolution scale set: maximal runs of grid points where the
/// predicate holds. A run reaching the last grid point is open to +inf.
ScaleSet brute_force_scales(const Loop& loop, const Scene& scene, const CmPoint& cm, std::span<const double> grid);

/// Moves every finite run boundary of a grid-resolution set to the predicate
/// transition by bisection between neighbouring grid points.
ScaleSet refine_brute_force(const Loop& loop, const Scene& scene, const CmPoint& cm, std::span<const double> grid,
                            const ScaleSet& coarse, int iterations = 60);

}  // namespace wlc
