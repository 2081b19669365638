#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wlc {

/// Cross-section axes. Loop coordinate 0 is always the distance axis z and
/// coordinate 1 the lateral axis x; a d = 3 loop carries the edge direction
/// as coordinate 2. Reducing a loop to k dimensions keeps the first k rows.
enum class Axis : int { Z = 0, X = 1 };

constexpr int axis_index(Axis axis) noexcept { return static_cast<int>(axis); }
constexpr Axis other_axis(Axis axis) noexcept { return axis == Axis::Z ? Axis::X : Axis::Z; }

template <typename Scalar>
struct Extent {
  Scalar min;
  Scalar max;
  Scalar width() const noexcept { return max - min; }
};

/// Closed discrete worldline at unit proper time, centre of mass at the
/// origin. Points are stored column-wise (dim x N); point N is point 0 again
/// and is not stored.
template <typename Scalar>
class UnitLoop {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  UnitLoop() = default;

  explicit UnitLoop(Matrix points) : points_(std::move(points)) { validate(); }

  Eigen::Index dim() const noexcept { return points_.rows(); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  const Matrix& points() const noexcept { return points_; }

  auto coordinate(int axis) const { return points_.row(axis); }
  auto point(Eigen::Index k) const { return points_.col(k); }

  /// Keeps the first `dim` coordinates (dimensional reduction).
  UnitLoop reduced(Eigen::Index dim) const {
    if (dim < 1 || dim > this->dim()) throw std::invalid_argument("UnitLoop::reduced: bad dimension");
    return UnitLoop(Matrix(points_.topRows(dim)));
  }

 private:
  void validate() const {
    if (points_.rows() < 1 || points_.rows() > 3)
      throw std::invalid_argument("UnitLoop: dimension must be 1, 2 or 3");
    if (points_.cols() < 4) throw std::invalid_argument("UnitLoop: need at least 4 points");
    if (!points_.allFinite()) throw std::invalid_argument("UnitLoop: non-finite coordinate");
    const Scalar scale = points_.cwiseAbs().maxCoeff();
    if (!(scale > Scalar(0))) throw std::invalid_argument("UnitLoop: degenerate loop (all points zero)");
    const auto mean = points_.rowwise().mean().eval();
    for (Eigen::Index c = 0; c < points_.rows(); ++c) {
      const Scalar axis_scale = points_.row(c).cwiseAbs().maxCoeff();
      if (std::abs(mean(c)) > Scalar(1e-12) * std::max(axis_scale, scale * Scalar(1e-300)))
        throw std::invalid_argument("UnitLoop: centre of mass is not at the origin (axis " +
                                    std::to_string(c) + ")");
    }
  }

  Matrix points_;
};

template <typename Scalar>
Extent<Scalar> extents(const UnitLoop<Scalar>& loop, int axis) {
  if (axis < 0 || axis >= loop.dim()) throw std::out_of_range("extents: axis out of range");
  const auto row = loop.coordinate(axis);
  return {row.minCoeff(), row.maxCoeff()};
}

/// Subtracts the row means so that the point set has zero centre of mass.
template <typename Derived>
void center_in_place(Eigen::MatrixBase<Derived>& points) {
  points.colwise() -= points.rowwise().mean();
}

/// Every `factor`-th point of the loop, re-centred. For a discrete Brownian
/// bridge this is again a sample of the bridge measure with N / factor points.
template <typename Scalar>
UnitLoop<Scalar> decimate(const UnitLoop<Scalar>& loop, Eigen::Index factor) {
  if (factor < 1 || loop.size() % factor != 0)
    throw std::invalid_argument("decimate: point count must be divisible by the factor");
  const Eigen::Index n = loop.size() / factor;
  typename UnitLoop<Scalar>::Matrix pts(loop.dim(), n);
  for (Eigen::Index k = 0; k < n; ++k) pts.col(k) = loop.point(k * factor);
  center_in_place(pts);
  return UnitLoop<Scalar>(std::move(pts));
}

using Loop = UnitLoop<double>;

}  // namespace wlc
