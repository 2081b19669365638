#include "wlc/reduced.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wlc {
namespace {

constexpr std::array<double, 4> kGl8Nodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                             0.9602898564975363};
constexpr std::array<double, 4> kGl8Weights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                               0.1012285362903763};

void require_2d(const Loop& loop, const char* who) {
  if (loop.dim() < 2) throw std::invalid_argument(std::string(who) + ": needs a loop with at least 2 dimensions");
}

CrossingEnvelope<double> lower_x_envelope(const Loop& loop) {
  return CrossingEnvelope<double>::build(loop.coordinate(0), loop.coordinate(1), EnvelopeKind::Lower);
}

// Values of the envelope at the midpoints of `cells` equal cells on [lo, hi).
std::vector<double> cell_values(const CrossingEnvelope<double>& env, std::size_t cells, double& delta) {
  if (cells < 1) throw std::invalid_argument("cell_values: need at least one cell");
  const double lo = env.lo(), hi = env.hi();
  delta = (hi - lo) / static_cast<double>(cells);
  std::vector<double> out(cells);
  const auto& pieces = env.pieces();
  std::size_t p = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double h = lo + (static_cast<double>(i) + 0.5) * delta;
    while (p + 1 < pieces.size() && !(h < pieces[p].h1)) ++p;
    out[i] = pieces[p].at(h);
  }
  return out;
}

// int over [h0, h1) of (w^3 - c^3)_+ for w linear from w0 to w1.
double cube_excess(double h0, double h1, double w0, double w1, double c) {
  if (w0 <= c && w1 <= c) return 0.0;
  if (w0 < c || w1 < c) {
    const double t = (c - w0) / (w1 - w0);
    const double hc = h0 + t * (h1 - h0);
    if (w0 < c) {
      h0 = hc;
      w0 = c;
    } else {
      h1 = hc;
      w1 = c;
    }
  }
  const double len = h1 - h0;
  return len * ((w0 + w1) * (w0 * w0 + w1 * w1) / 4.0 - c * c * c);
}

}  // namespace

double reduced_parallel(const Loop& loop) {
  const double r = extents(loop, 0).width();
  return r * r * r * r / 6.0;
}

CrossingEnvelope<double> height_profile(const Loop& loop) {
  require_2d(loop, "height_profile");
  return CrossingEnvelope<double>::build(loop.coordinate(1), loop.coordinate(0), EnvelopeKind::Upper);
}

double profile_cube_integral(const CrossingEnvelope<double>& profile, double zmin) {
  double sum = 0.0;
  for (const auto& p : profile.pieces()) {
    const double w0 = p.at(p.h0) - zmin, w1 = p.at(p.h1) - zmin;
    sum += (p.h1 - p.h0) * (w0 + w1) * (w0 * w0 + w1 * w1) / 4.0;
  }
  return sum;
}

double reduced_perpendicular(const Loop& loop) {
  return profile_cube_integral(height_profile(loop), extents(loop, 0).min) / 3.0;
}

double reduced_one_semi_infinite_edge(const Loop& loop) {
  require_2d(loop, "reduced_one_semi_infinite_edge");
  const double zmin = extents(loop, 0).min;
  const auto env = lower_x_envelope(loop);
  const double g = 1.0 / std::sqrt(3.0);
  double sum = 0.0;
  for (const auto& p : env.pieces()) {
    // Cubic integrand: two-point Gauss-Legendre is exact.
    const double c = 0.5 * (p.h0 + p.h1), r = 0.5 * (p.h1 - p.h0);
    for (double t : {-g, g}) {
      const double h = c + r * t;
      sum += r * (-p.at(h)) * (h - zmin) * (h - zmin);
    }
  }
  return sum;
}

double reduced_two_semi_infinite_edge(const Loop& loop, std::size_t cells) {
  require_2d(loop, "reduced_two_semi_infinite_edge");
  double delta = 0.0;
  const std::vector<double> x = cell_values(lower_x_envelope(loop), cells, delta);
  const std::size_t m = x.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });

  // Fenwick trees over cell index: count and index sum of processed cells.
  std::vector<double> cnt(m + 1, 0.0), idx(m + 1, 0.0);
  auto add = [&](std::size_t i) {
    for (std::size_t k = i + 1; k <= m; k += k & (~k + 1)) {
      cnt[k] += 1.0;
      idx[k] += static_cast<double>(i);
    }
  };
  auto prefix = [&](std::size_t i, double& c, double& s) {  // cells [0, i)
    c = s = 0.0;
    for (std::size_t k = i; k > 0; k -= k & (~k + 1)) {
      c += cnt[k];
      s += idx[k];
    }
  };
  double total_c = 0.0, total_s = 0.0, pairs = 0.0, diagonal = 0.0;
  for (std::size_t j : order) {
    double c_lo, s_lo;
    prefix(j, c_lo, s_lo);
    const double jj = static_cast<double>(j);
    const double dist = (jj * c_lo - s_lo) + ((total_s - s_lo) - jj * (total_c - c_lo));
    pairs += -x[j] * dist;
    diagonal += -x[j];
    add(j);
    total_c += 1.0;
    total_s += jj;
  }
  return 2.0 * delta * delta * delta * pairs + diagonal * delta * delta * delta / 3.0;
}

double reduced_two_semi_infinite_edge_direct(const Loop& loop, std::size_t cells) {
  require_2d(loop, "reduced_two_semi_infinite_edge_direct");
  double delta = 0.0;
  const std::vector<double> x = cell_values(lower_x_envelope(loop), cells, delta);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += -x[i] * delta * delta * delta / 3.0;
    for (std::size_t j = i + 1; j < x.size(); ++j)
      sum += 2.0 * (static_cast<double>(j - i) * delta) * -std::max(x[i], x[j]) * delta * delta;
  }
  return sum;
}

std::vector<std::pair<double, double>> profile_superlevel(const CrossingEnvelope<double>& profile, double zmin,
                                                          double u) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : profile.pieces()) {
    const double w0 = p.at(p.h0) - zmin, w1 = p.at(p.h1) - zmin;
    double a = p.h0, b = p.h1;
    if (w0 <= u && w1 <= u) continue;
    if (w0 <= u) a = p.h0 + (u - w0) / (w1 - w0) * (p.h1 - p.h0);
    if (w1 <= u) b = p.h0 + (u - w0) / (w1 - w0) * (p.h1 - p.h0);
    if (!(b > a)) continue;
    if (!out.empty() && out.back().second >= a)
      out.back().second = std::max(out.back().second, b);
    else
      out.emplace_back(a, b);
  }
  return out;
}

double comb_cover_measure(const std::vector<std::pair<double, double>>& superlevel, double shift, int teeth) {
  if (teeth < 0) throw std::invalid_argument("comb_cover_measure: negative tooth count");
  std::vector<std::pair<double, double>> all;
  if (teeth > 0) {
    all.reserve(superlevel.size() * static_cast<std::size_t>(teeth));
    for (int k = 0; k < teeth; ++k)
      for (const auto& [a, b] : superlevel) all.emplace_back(a - k * shift, b - k * shift);
  } else {
    if (!(shift > 0)) throw std::invalid_argument("comb_cover_measure: periodic comb needs a positive period");
    for (const auto& [a, b] : superlevel) {
      if (b - a >= shift) return shift;
      const double a0 = a - std::floor(a / shift) * shift;
      const double b0 = a0 + (b - a);
      if (b0 <= shift) {
        all.emplace_back(a0, b0);
      } else {
        all.emplace_back(a0, shift);
        all.emplace_back(0.0, b0 - shift);
      }
    }
  }
  std::sort(all.begin(), all.end());
  double measure = 0.0, cur_lo = 0.0, cur_hi = 0.0;
  bool open = false;
  for (const auto& [a, b] : all) {
    if (open && a <= cur_hi) {
      cur_hi = std::max(cur_hi, b);
      continue;
    }
    if (open) measure += cur_hi - cur_lo;
    cur_lo = a;
    cur_hi = b;
    open = true;
  }
  if (open) measure += cur_hi - cur_lo;
  return teeth > 0 ? measure : std::min(measure, shift);
}

double reduced_comb_force(const Loop& loop, double spacing, int teeth, int panels) {
  if (!(spacing > 0)) throw std::invalid_argument("reduced_comb_force: spacing must be positive");
  if (teeth < 0) throw std::invalid_argument("reduced_comb_force: negative tooth count");
  if (panels < 1) throw std::invalid_argument("reduced_comb_force: need at least one panel");
  const auto profile = height_profile(loop);
  const double zmin = extents(loop, 0).min;
  const double width = profile.hi() - profile.lo();
  double w_max = 0.0;
  for (const auto& p : profile.pieces()) w_max = std::max({w_max, p.at(p.h0) - zmin, p.at(p.h1) - zmin});

  const double copies = teeth == 0 ? 1.0 : static_cast<double>(teeth);
  const double u_sep = teeth == 1 ? 0.0 : width / spacing;
  double separated = 0.0;
  for (const auto& p : profile.pieces())
    separated += cube_excess(p.h0, p.h1, p.at(p.h0) - zmin, p.at(p.h1) - zmin, u_sep);
  double g = copies * 2.0 / 3.0 * separated;

  const double top = std::min(u_sep, w_max);
  if (top > 0) {
    const double h = top / panels;
    double overlap = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double c = (k + 0.5) * h, r = 0.5 * h;
      for (std::size_t i = 0; i < kGl8Nodes.size(); ++i)
        for (double sgn : {-1.0, 1.0}) {
          const double u = c + sgn * r * kGl8Nodes[i];
          const double m = comb_cover_measure(profile_superlevel(profile, zmin, u), spacing * u, teeth);
          overlap += r * kGl8Weights[i] * 2.0 * u * u * m;
        }
    }
    g += overlap;
  }
  return g;
}

}  // namespace wlc
