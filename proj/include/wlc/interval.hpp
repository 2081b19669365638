#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wlc {

/// Closed range [lo, hi] of the loop scale s = sqrt(T); hi may be +inf.
template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;
  bool operator==(const Interval&) const = default;
};

/// Sorted, disjoint, merged set of scale intervals with 0 <= lo < hi.
template <typename Scalar>
class IntervalUnion {
 public:
  using value_type = Interval<Scalar>;

  IntervalUnion() = default;

  /// Normalizes an arbitrary collection: clips to s >= 0, drops empty
  /// pieces, sorts and merges overlapping or touching intervals.
  static IntervalUnion from(std::vector<value_type> pieces) {
    IntervalUnion u;
    std::erase_if(pieces, [](const value_type& v) { return !(v.hi > std::max(v.lo, Scalar(0))); });
    for (auto& v : pieces) v.lo = std::max(v.lo, Scalar(0));
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (const auto& v : pieces) {
      if (!u.items_.empty() && v.lo <= u.items_.back().hi)
        u.items_.back().hi = std::max(u.items_.back().hi, v.hi);
      else
        u.items_.push_back(v);
    }
    return u;
  }

  static IntervalUnion single(Scalar lo, Scalar hi) { return from({{lo, hi}}); }
  static IntervalUnion half_line(Scalar lo) { return single(lo, std::numeric_limits<Scalar>::infinity()); }

  const std::vector<value_type>& intervals() const noexcept { return items_; }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  bool contains(Scalar s) const noexcept {
    for (const auto& v : items_)
      if (v.lo <= s && s <= v.hi) return true;
    return false;
  }

  /// Checks sortedness, disjointness and merging.
  bool well_formed() const noexcept {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (!(items_[i].lo >= 0 && items_[i].lo < items_[i].hi)) return false;
      if (i > 0 && !(items_[i - 1].hi < items_[i].lo)) return false;
    }
    return true;
  }

  bool operator==(const IntervalUnion&) const = default;

 private:
  std::vector<value_type> items_;
};

template <typename Scalar>
IntervalUnion<Scalar> unite(const IntervalUnion<Scalar>& a, const IntervalUnion<Scalar>& b) {
  std::vector<Interval<Scalar>> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return IntervalUnion<Scalar>::from(std::move(all));
}

template <typename Scalar>
IntervalUnion<Scalar> intersect(const IntervalUnion<Scalar>& a, const IntervalUnion<Scalar>& b) {
  std::vector<Interval<Scalar>> out;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    const Scalar lo = std::max(i->lo, j->lo);
    const Scalar hi = std::min(i->hi, j->hi);
    if (lo < hi) out.push_back({lo, hi});
    (i->hi < j->hi) ? ++i : ++j;
  }
  return IntervalUnion<Scalar>::from(std::move(out));
}

/// Thrown when a scale set reaches s = 0, i.e. both groups pass through the
/// centre of mass and the proper-time integral diverges.
class DivergentProperTime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed form of the proper-time integral over the set: the integral of
/// dT / T^3 with T = s^2 equals (lo^-4 - hi^-4) / 2 per interval.
template <typename Scalar>
Scalar propertime_integral(const IntervalUnion<Scalar>& set) {
  Scalar total = 0;
  for (const auto& v : set) {
    if (!(v.lo > 0))
      throw DivergentProperTime("proper-time integral diverges: scale interval reaches s = 0");
    const Scalar lo2 = v.lo * v.lo;
    Scalar term = Scalar(1) / (lo2 * lo2);
    if (std::isfinite(v.hi)) {
      const Scalar hi2 = v.hi * v.hi;
      term -= Scalar(1) / (hi2 * hi2);
    }
    total += term / 2;
  }
  return total;
}

}  // namespace wlc
