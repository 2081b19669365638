#pragma once

#include "wlc/unit_loop.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace wlc {

enum class PrimitiveKind { InfinitePlane, HalfPlane };

/// Infinitely thin Dirichlet surface seen in the reduced cross-section.
///
/// The surface lies on the line {normal-coordinate == level}. A HalfPlane
/// covers only the part with side * free >= side * edge, where `free` is the
/// other cross-section axis. Horizontal plates with edges use normal = Z; the
/// vertical plate of the perpendicular geometry uses normal = X.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::InfinitePlane;
  Axis normal = Axis::Z;
  double level = 0.0;
  double edge = 0.0;
  int side = 1;

  static Primitive plane(Axis normal, double level);
  static Primitive half_line(Axis normal, double level, double edge, int side);

  Primitive scaled(double factor) const;
  bool operator==(const Primitive&) const = default;
};

enum class SceneKind { ParallelPlates, Perpendicular, OneSemiInfinite, TwoSemiInfinite, Comb, Custom };

std::string_view scene_kind_name(SceneKind kind);
SceneKind parse_scene_kind(std::string_view name);

/// Two disjoint surface groups; only worldlines touching both contribute.
struct Scene {
  std::vector<Primitive> sigma1;
  std::vector<Primitive> sigma2;
  int reduced_dim = 1;
  int invariant_directions = 2;
  double distance = 1.0;  ///< the length scale a
  SceneKind kind = SceneKind::Custom;
  double comb_spacing = 0.0;
  int comb_teeth = 0;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// Same scene with every length multiplied by `factor`.
  Scene scaled(double factor) const;

  /// The scene in units of its own distance (a = 1).
  Scene normalized() const { return scaled(1.0 / distance); }
};

/// True if the two primitives share at least one point of the cross-section.
bool primitives_intersect(const Primitive& p, const Primitive& q, int reduced_dim);

Scene preset_parallel_plates(double a);
Scene preset_perpendicular(double a);
Scene preset_one_semi_infinite(double a);
Scene preset_two_semi_infinite(double a);
Scene preset_comb(double a, double spacing, int teeth);

/// Builds a preset by name ("parallel", "perpendicular", "one-semi-infinite",
/// "two-semi-infinite", "comb").
Scene make_preset(std::string_view name, double a, double spacing = 0.0, int teeth = 0);

}  // namespace wlc
