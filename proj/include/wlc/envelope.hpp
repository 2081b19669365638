#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace wlc {

/// One linear piece of a crossing envelope, valid on [h0, h1).
template <typename Scalar>
struct EnvelopePiece {
  Scalar h0;
  Scalar h1;
  Scalar anchor_h;
  Scalar anchor_f;
  Scalar slope;
  std::uint32_t segment;  ///< index of the polygon segment the piece lies on

  Scalar at(Scalar h) const noexcept { return anchor_f + slope * (h - anchor_h); }
};

enum class EnvelopeKind { Upper, Lower };

/// Extremal crossing of a closed polygon with the family of lines
/// {line-coordinate == h}: for each h, the largest (Upper) or smallest
/// (Lower) free coordinate among all segments crossing the line.
///
/// Segments cover the half-open range [min, max) of their line coordinate;
/// segments parallel to the lines are skipped, their crossings being carried
/// by the neighbours. The envelope is piecewise linear with jumps where an
/// extremal branch turns back, and is built by divide-and-conquer merging in
/// O(N log N).
template <typename Scalar>
class CrossingEnvelope {
 public:
  using Piece = EnvelopePiece<Scalar>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  CrossingEnvelope() = default;

  template <typename LineDerived, typename FreeDerived>
  static CrossingEnvelope build(const Eigen::DenseBase<LineDerived>& line, const Eigen::DenseBase<FreeDerived>& free,
                                EnvelopeKind kind) {
    const Eigen::Index n = line.size();
    std::vector<Scalar> h(line.begin(), line.end());
    std::vector<Scalar> f(free.begin(), free.end());
    if (kind == EnvelopeKind::Lower)
      for (auto& v : f) v = -v;
    CrossingEnvelope env;
    env.kind_ = kind;
    env.pieces_ = build_range(h, f, 0, static_cast<std::size_t>(n));
    if (kind == EnvelopeKind::Lower)
      for (auto& p : env.pieces_) {
        p.anchor_f = -p.anchor_f;
        p.slope = -p.slope;
      }
    return env;
  }

  EnvelopeKind kind() const noexcept { return kind_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }
  Scalar lo() const noexcept { return pieces_.front().h0; }
  Scalar hi() const noexcept { return pieces_.back().h1; }

  std::optional<Scalar> value_at(Scalar h) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), h,
                               [](Scalar v, const Piece& p) { return v < p.h0; });
    if (it == pieces_.begin()) return std::nullopt;
    --it;
    if (h >= it->h1) return std::nullopt;
    return it->at(h);
  }

 private:
  static std::vector<Piece> build_range(const std::vector<Scalar>& h, const std::vector<Scalar>& f, std::size_t first,
                                        std::size_t last) {
    const std::size_t n = h.size();
    if (last - first == 1) {
      const std::size_t k = first, k1 = (first + 1) % n;
      if (h[k] == h[k1]) return {};
      const Scalar slope = (f[k1] - f[k]) / (h[k1] - h[k]);
      return {Piece{std::min(h[k], h[k1]), std::max(h[k], h[k1]), h[k], f[k], slope,
                    static_cast<std::uint32_t>(k)}};
    }
    const std::size_t mid = first + (last - first) / 2;
    return merge_upper(build_range(h, f, first, mid), build_range(h, f, mid, last));
  }

  static void emit(std::vector<Piece>& out, const Piece& p, Scalar t0, Scalar t1) {
    if (!(t1 > t0)) return;
    if (!out.empty() && out.back().segment == p.segment && out.back().h1 == t0) {
      out.back().h1 = t1;
      return;
    }
    Piece q = p;
    q.h0 = t0;
    q.h1 = t1;
    out.push_back(q);
  }

  static std::vector<Piece> merge_upper(std::vector<Piece> a, std::vector<Piece> b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    std::vector<Piece> out;
    out.reserve(a.size() + b.size() + 2);
    std::size_t i = 0, j = 0;
    Scalar t = std::min(a.front().h0, b.front().h0);
    for (;;) {
      while (i < a.size() && a[i].h1 <= t) ++i;
      while (j < b.size() && b[j].h1 <= t) ++j;
      if (i == a.size() && j == b.size()) break;
      const bool a_on = i < a.size() && a[i].h0 <= t;
      const bool b_on = j < b.size() && b[j].h0 <= t;
      Scalar next = inf;
      if (i < a.size()) next = std::min(next, a_on ? a[i].h1 : a[i].h0);
      if (j < b.size()) next = std::min(next, b_on ? b[j].h1 : b[j].h0);
      if (a_on && b_on) {
        const Scalar d0 = a[i].at(t) - b[j].at(t);
        const Scalar d1 = a[i].at(next) - b[j].at(next);
        if (d0 >= 0 && d1 >= 0) {
          emit(out, a[i], t, next);
        } else if (d0 <= 0 && d1 <= 0) {
          emit(out, b[j], t, next);
        } else {
          Scalar tc = t + (next - t) * (d0 / (d0 - d1));
          tc = std::clamp(tc, t, next);
          emit(out, d0 > 0 ? a[i] : b[j], t, tc);
          emit(out, d0 > 0 ? b[j] : a[i], tc, next);
        }
      } else if (a_on) {
        emit(out, a[i], t, next);
      } else if (b_on) {
        emit(out, b[j], t, next);
      }
      t = next;
    }
    return out;
  }

  EnvelopeKind kind_ = EnvelopeKind::Upper;
  std::vector<Piece> pieces_;
};

}  // namespace wlc
