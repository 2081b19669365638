#include "wlc/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wlc {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

// Point set of a primitive restricted to the line {normal == level}, as an
// interval of the free coordinate.
struct FreeRange {
  double lo;
  double hi;
};

FreeRange free_range(const Primitive& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (p.kind == PrimitiveKind::InfinitePlane) return {-inf, inf};
  return p.side > 0 ? FreeRange{p.edge, inf} : FreeRange{-inf, p.edge};
}

bool contains(const FreeRange& r, double v) { return r.lo <= v && v <= r.hi; }

}  // namespace

Primitive Primitive::plane(Axis normal, double level) {
  if (!std::isfinite(level)) throw std::invalid_argument("Primitive: level must be finite");
  return {PrimitiveKind::InfinitePlane, normal, level, 0.0, 1};
}

Primitive Primitive::half_line(Axis normal, double level, double edge, int side) {
  if (!std::isfinite(level) || !std::isfinite(edge)) throw std::invalid_argument("Primitive: non-finite parameters");
  if (side != 1 && side != -1) throw std::invalid_argument("Primitive: side must be +1 or -1");
  return {PrimitiveKind::HalfPlane, normal, level, edge, side};
}

Primitive Primitive::scaled(double factor) const {
  Primitive p = *this;
  p.level *= factor;
  p.edge *= factor;
  return p;
}

std::string_view scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::ParallelPlates: return "parallel";
    case SceneKind::Perpendicular: return "perpendicular";
    case SceneKind::OneSemiInfinite: return "one-semi-infinite";
    case SceneKind::TwoSemiInfinite: return "two-semi-infinite";
    case SceneKind::Comb: return "comb";
    case SceneKind::Custom: return "custom";
  }
  return "custom";
}

SceneKind parse_scene_kind(std::string_view name) {
  for (SceneKind k : {SceneKind::ParallelPlates, SceneKind::Perpendicular, SceneKind::OneSemiInfinite,
                      SceneKind::TwoSemiInfinite, SceneKind::Comb, SceneKind::Custom})
    if (scene_kind_name(k) == name) return k;
  throw std::invalid_argument("unknown geometry '" + std::string(name) + "'");
}

bool primitives_intersect(const Primitive& p, const Primitive& q, int reduced_dim) {
  if (reduced_dim == 1) return p.level == q.level;
  if (p.normal == q.normal) {
    if (p.level != q.level) return false;
    const FreeRange a = free_range(p), b = free_range(q);
    return a.lo <= b.hi && b.lo <= a.hi;
  }
  // Perpendicular lines cross at (free of p) = q.level and (free of q) = p.level.
  return contains(free_range(p), q.level) && contains(free_range(q), p.level);
}

void Scene::validate() const {
  if (sigma1.empty() || sigma2.empty()) throw std::invalid_argument("Scene: both surface groups must be nonempty");
  if (reduced_dim != 1 && reduced_dim != 2) throw std::invalid_argument("Scene: reduced dimension must be 1 or 2");
  if (reduced_dim + invariant_directions != 3)
    throw std::invalid_argument("Scene: reduced and invariant directions must add up to 3");
  require_positive(distance, "Scene distance");
  for (const auto* group : {&sigma1, &sigma2})
    for (const Primitive& p : *group) {
      if (!std::isfinite(p.level) || !std::isfinite(p.edge)) throw std::invalid_argument("Scene: non-finite primitive");
      if (reduced_dim == 1 && (p.kind != PrimitiveKind::InfinitePlane || p.normal != Axis::Z))
        throw std::invalid_argument("Scene: a one-dimensional scene holds only planes normal to z");
    }
  for (const Primitive& p : sigma1)
    for (const Primitive& q : sigma2)
      if (primitives_intersect(p, q, reduced_dim)) throw std::invalid_argument("Scene: surface groups intersect");
}

Scene Scene::scaled(double factor) const {
  require_positive(factor, "scale factor");
  Scene s = *this;
  for (auto& p : s.sigma1) p = p.scaled(factor);
  for (auto& p : s.sigma2) p = p.scaled(factor);
  s.distance *= factor;
  s.comb_spacing *= factor;
  return s;
}

Scene preset_parallel_plates(double a) {
  require_positive(a, "distance a");
  Scene s;
  s.sigma1 = {Primitive::plane(Axis::Z, 0.0)};
  s.sigma2 = {Primitive::plane(Axis::Z, a)};
  s.reduced_dim = 1;
  s.invariant_directions = 2;
  s.distance = a;
  s.kind = SceneKind::ParallelPlates;
  s.validate();
  return s;
}

Scene preset_perpendicular(double a) {
  require_positive(a, "distance a");
  Scene s;
  s.sigma1 = {Primitive::plane(Axis::Z, 0.0)};
  s.sigma2 = {Primitive::half_line(Axis::X, 0.0, a, +1)};
  s.reduced_dim = 2;
  s.invariant_directions = 1;
  s.distance = a;
  s.kind = SceneKind::Perpendicular;
  s.validate();
  return s;
}

Scene preset_one_semi_infinite(double a) {
  require_positive(a, "distance a");
  Scene s;
  s.sigma1 = {Primitive::plane(Axis::Z, 0.0)};
  s.sigma2 = {Primitive::half_line(Axis::Z, a, 0.0, -1)};
  s.reduced_dim = 2;
  s.invariant_directions = 1;
  s.distance = a;
  s.kind = SceneKind::OneSemiInfinite;
  s.validate();
  return s;
}

Scene preset_two_semi_infinite(double a) {
  require_positive(a, "distance a");
  Scene s;
  s.sigma1 = {Primitive::half_line(Axis::Z, 0.0, 0.0, -1)};
  s.sigma2 = {Primitive::half_line(Axis::Z, a, 0.0, -1)};
  s.reduced_dim = 2;
  s.invariant_directions = 1;
  s.distance = a;
  s.kind = SceneKind::TwoSemiInfinite;
  s.validate();
  return s;
}

Scene preset_comb(double a, double spacing, int teeth) {
  require_positive(a, "distance a");
  require_positive(spacing, "comb spacing");
  if (teeth < 1) throw std::invalid_argument("comb needs at least one tooth");
  Scene s;
  s.sigma1 = {Primitive::plane(Axis::Z, 0.0)};
  for (int k = 0; k < teeth; ++k) s.sigma2.push_back(Primitive::half_line(Axis::X, k * spacing, a, +1));
  s.reduced_dim = 2;
  s.invariant_directions = 1;
  s.distance = a;
  s.kind = SceneKind::Comb;
  s.comb_spacing = spacing;
  s.comb_teeth = teeth;
  s.validate();
  return s;
}

Scene make_preset(std::string_view name, double a, double spacing, int teeth) {
  switch (parse_scene_kind(name)) {
    case SceneKind::ParallelPlates: return preset_parallel_plates(a);
    case SceneKind::Perpendicular: return preset_perpendicular(a);
    case SceneKind::OneSemiInfinite: return preset_one_semi_infinite(a);
    case SceneKind::TwoSemiInfinite: return preset_two_semi_infinite(a);
    case SceneKind::Comb: return preset_comb(a, spacing, teeth);
    case SceneKind::Custom: break;
  }
  throw std::invalid_argument("make_preset: 'custom' is not a preset");
}

}  // namespace wlc
