#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wlc {

namespace gk15 {
// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk15

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi] (finite).
/// Bisects until the Kronrod/Gauss difference of every panel meets its share
/// of max(abs_tol, rel_tol * |estimate|).
template <typename F>
double integrate_adaptive(F&& f, double lo, double hi, double rel_tol = 1e-12, double abs_tol = 0.0,
                          int max_depth = 40) {
  struct Panel {
    double value;
    double error;
  };
  auto panel = [&](double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * gk15::kronrod[7], g = fc * gk15::gauss[3];
    for (int i = 0; i < 7; ++i) {
      const double dx = h * gk15::nodes[i];
      const double sum = f(c - dx) + f(c + dx);
      k += gk15::kronrod[i] * sum;
      if (i % 2 == 1) g += gk15::gauss[i / 2] * sum;
    }
    return Panel{k * h, std::abs((k - g) * h)};
  };
  auto recurse = [&](auto&& self, double a, double b, Panel whole, double tol, int depth) -> double {
    if (whole.error <= tol || depth >= max_depth || !(b - a > 4 * std::numeric_limits<double>::epsilon() * std::abs(a)))
      return whole.value;
    const double m = 0.5 * (a + b);
    const Panel left = panel(a, m), right = panel(m, b);
    return self(self, a, m, left, 0.5 * tol, depth + 1) + self(self, m, b, right, 0.5 * tol, depth + 1);
  };
  if (!(hi > lo)) {
    if (hi == lo) return 0.0;
    throw std::invalid_argument("integrate_adaptive: hi < lo");
  }
  const Panel whole = panel(lo, hi);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
  return recurse(recurse, lo, hi, whole, tol, 0);
}

/// Integral of f over [lo, +inf) via x = lo + t / (1 - t), t in [0, 1).
template <typename F>
double integrate_to_infinity(F&& f, double lo, double rel_tol = 1e-12, double abs_tol = 0.0) {
  auto mapped = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    return f(lo + t / u) / (u * u);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, rel_tol, abs_tol);
}

}  // namespace wlc
