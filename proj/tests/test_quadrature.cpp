#include "doctest.h"

#include "wlc/ensemble.hpp"
#include "wlc/integrate.hpp"
#include "wlc/observables.hpp"
#include "wlc/quadrature.hpp"
#include "wlc/reduced.hpp"
#include "wlc/scale_engine.hpp"

#include <cmath>

using namespace wlc;

namespace {

// Direct quadrature of the parallel-plate centre-of-mass integral for one
// loop, split at the kinks of the minimal touching scale.
double plates_by_quadrature(const Loop& loop) {
  const Scene plates = preset_parallel_plates(1.0);
  const PreparedLoop pl(loop, plates);
  auto f = [&](double z) { return loop_propertime(pl, plates, CmPoint(z, 0.0)); };
  const auto e = extents(loop, 0);
  const double kink = -e.min / e.width();
  return integrate_to_infinity([&](double t) { return f(-t); }, 0.0) + integrate_adaptive(f, 0.0, kink) +
         integrate_adaptive(f, kink, 1.0) + integrate_to_infinity(f, 1.0);
}

double spread(const std::vector<double>& v) {
  double lo = v.front(), hi = v.front();
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("parallel plates: closed form equals the centre-of-mass quadrature") {
  for (std::uint64_t i = 0; i < 6; ++i) {
    const Loop l = generate_loop(31, i, 16 + 16 * i, 1);
    const auto e = extents(l, 0);
    const double r = e.width();
    CHECK(parallel_plates_cm_integral(l) == doctest::Approx(std::pow(r, 4) / 6.0).epsilon(1e-13));
    CHECK(reduced_parallel(l) == doctest::Approx(std::pow(r, 4) / 6.0).epsilon(1e-13));
    CHECK(plates_by_quadrature(l) == doctest::Approx(std::pow(r, 4) / 6.0).epsilon(1e-8));
  }
}

TEST_CASE("closed-form kernels agree with the grid") {
  CmDomain fine;
  fine.spacing = 0.02;
  fine.x_cut = 12.0;
  const Scene perp = preset_perpendicular(1.0), one = preset_one_semi_infinite(1.0),
              two = preset_two_semi_infinite(1.0);
  QuadratureSettings grid;
  grid.method = CmMethod::Grid;
  grid.domain = fine;
  const LoopFunctional gp = cm_energy_functional(perp, grid), g1 = edge_energy_functional(one, std::nullopt, grid),
                       g2 = edge_energy_functional(two, std::nullopt, grid);
  const LoopFunctional rp = cm_energy_functional(perp), r1 = edge_energy_functional(one, std::nullopt),
                       r2 = edge_energy_functional(two, std::nullopt);
  CHECK(gp.meta.method == "grid");
  CHECK(rp.meta.method == "reduced");
  for (std::uint64_t i = 0; i < 3; ++i) {
    const Loop l = generate_loop(41, i, 64, 2);
    CHECK(gp.per_loop(l) == doctest::Approx(rp.per_loop(l)).epsilon(5e-3));
    CHECK(g1.per_loop(l) == doctest::Approx(r1.per_loop(l)).epsilon(3e-2));
    CHECK(g2.per_loop(l) == doctest::Approx(r2.per_loop(l)).epsilon(3e-2));
  }
}

TEST_CASE("two-semi-infinite kernel: tree sum equals the direct double sum") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const Loop l = generate_loop(43, i, 48, 2);
    CHECK(reduced_two_semi_infinite_edge(l, 512) ==
          doctest::Approx(reduced_two_semi_infinite_edge_direct(l, 512)).epsilon(1e-12));
  }
}

TEST_CASE("two-semi-infinite kernel converges in the cell count") {
  const Loop l = generate_loop(44, 0, 64, 2);
  const double c4k = reduced_two_semi_infinite_edge(l, 4096), c16k = reduced_two_semi_infinite_edge(l, 16384);
  CHECK(std::abs(c4k - c16k) <= 1e-3 * std::abs(c16k));
}

TEST_CASE("comb kernels") {
  for (std::uint64_t i = 0; i < 4; ++i) {
    const Loop l = generate_loop(45, i, 64, 2);
    CHECK(reduced_comb_force(l, 10.0, 1) == doctest::Approx(2.0 * reduced_perpendicular(l)).epsilon(1e-12));
    // Far-apart teeth act independently (up to the overlap quadrature).
    CHECK(reduced_comb_force(l, 1e3, 3) == doctest::Approx(6.0 * reduced_perpendicular(l)).epsilon(1e-7));
  }
}

TEST_CASE("comb force is minus the derivative of the comb energy") {
  CmDomain dom;
  dom.spacing = 0.02;
  dom.x_cut = 12.0;
  QuadratureSettings grid;
  grid.method = CmMethod::Grid;
  grid.domain = dom;
  const double d = 0.8, h = 0.02;
  for (std::uint64_t i = 0; i < 2; ++i) {
    const Loop l = generate_loop(46, i, 64, 2);
    // Plate distance a enters through the scene; teeth keep their spacing d.
    auto energy = [&](double a) {
      const LoopFunctional f = cm_energy_functional(preset_comb(a, d, 3), grid);
      return f.per_loop(l) * std::pow(a, -f.meta.power);
    };
    auto energy_fixed_d = [&](double a) {
      // E(a; d) = a^-2 J(d / a): evaluate the unit scene with spacing d / a.
      const LoopFunctional f = cm_energy_functional(preset_comb(1.0, d / a, 3), grid);
      return f.per_loop(l) / (a * a);
    };
    const double fd = -(energy_fixed_d(1.0 + h) - energy_fixed_d(1.0 - h)) / (2.0 * h);
    const double force = kEnergyPrefactor * reduced_comb_force(l, d, 3);
    CHECK(energy(1.0) == doctest::Approx(energy_fixed_d(1.0)).epsilon(1e-12));
    CHECK(force == doctest::Approx(fd).epsilon(2e-2));
  }
}

TEST_CASE("energies scale as a^-power") {
  const LoopSource src = LoopSource::generated(64, 64, 2, 5);
  QuadratureSettings s;
  s.n_blocks = 8;
  const IntegralResult e1 = cm_integrate_2d(src, preset_perpendicular(1.0), s);
  const IntegralResult e2 = cm_integrate_2d(src, preset_perpendicular(2.0), s);
  CHECK(e2.value / e1.value == doctest::Approx(0.25).epsilon(1e-12));
  for (auto scene_at : {&preset_one_semi_infinite, &preset_two_semi_infinite}) {
    const IntegralResult g1 = edge_energy(src, scene_at(1.0), std::nullopt, s);
    const IntegralResult g2 = edge_energy(src, scene_at(2.0), std::nullopt, s);
    CHECK(g2.value / g1.value == doctest::Approx(0.25).epsilon(1e-12));
  }
  const LoopSource line = LoopSource::generated(64, 64, 1, 5);
  const IntegralResult p1 = energy_parallel_plates(line, 1.0, s), p2 = energy_parallel_plates(line, 2.0, s);
  CHECK(p2.value / p1.value == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(p1.meta.power == 3);
}

TEST_CASE("signs of energies and forces") {
  const LoopSource src = LoopSource::generated(40, 64, 2, 6);
  QuadratureSettings s;
  s.n_blocks = 4;
  CHECK(energy_parallel_plates(src, 1.0, s).value < 0);
  CHECK(cm_integrate_2d(src, preset_perpendicular(1.0), s).value < 0);
  // Edges add attraction beyond the bulk term.
  CHECK(edge_energy(src, preset_one_semi_infinite(1.0), std::nullopt, s).value < 0);
  CHECK(edge_energy(src, preset_two_semi_infinite(1.0), std::nullopt, s).value < 0);
  CHECK(comb_force_per_area(src, 1.0, 2.0, 3, s).value < 0);
}

TEST_CASE("dimensional reduction: three-dimensional loops give the same answer") {
  QuadratureSettings s;
  s.n_blocks = 10;
  const IntegralResult d2 = cm_integrate_2d(LoopSource::generated(2000, 64, 2, 8), preset_perpendicular(1.0), s);
  const IntegralResult d3 = cm_integrate_2d(LoopSource::generated(2000, 64, 3, 9), preset_perpendicular(1.0), s);
  CHECK(std::abs(d2.value - d3.value) < 2.0 * std::hypot(d2.std_err, d3.std_err) + 1e-15);
  const IntegralResult p1 = energy_parallel_plates(LoopSource::generated(4000, 64, 1, 8), 1.0, s);
  const IntegralResult p2 = energy_parallel_plates(LoopSource::generated(4000, 64, 2, 9), 1.0, s);
  CHECK(std::abs(p1.value - p2.value) < 2.0 * std::hypot(p1.std_err, p2.std_err));
}

TEST_CASE("results are independent of the thread count") {
  const LoopSource src = LoopSource::generated(97, 64, 2, 10);
  QuadratureSettings one, many;
  one.threads = 1;
  many.threads = 4;
  one.n_blocks = many.n_blocks = 7;
  const IntegralResult a = edge_energy(src, preset_two_semi_infinite(1.0), std::nullopt, one);
  const IntegralResult b = edge_energy(src, preset_two_semi_infinite(1.0), std::nullopt, many);
  CHECK(a.value == b.value);
  CHECK(a.std_err == b.std_err);
  CHECK(a.blocks == b.blocks);
}

TEST_CASE("one pass over several functionals equals separate passes") {
  const LoopSource src = LoopSource::generated(50, 32, 2, 11);
  const std::vector<LoopFunctional> fs = {cm_energy_functional(preset_perpendicular(1.0)),
                                          edge_energy_functional(preset_one_semi_infinite(1.0), std::nullopt)};
  const auto joint = evaluate(src, fs, 5);
  REQUIRE(joint.size() == 2);
  for (std::size_t k = 0; k < fs.size(); ++k) CHECK(joint[k].value == evaluate(src, fs[k], 5).value);
}

TEST_CASE("extrapolation combines full and decimated loops") {
  QuadratureSettings plain, ex;
  ex.extrapolate = true;
  const Loop l = generate_loop(12, 3, 64, 2);
  const double full = cm_energy_functional(preset_perpendicular(1.0), plain).per_loop(l);
  const double coarse = cm_energy_functional(preset_perpendicular(1.0), plain).per_loop(decimate(l, 4));
  CHECK(cm_energy_functional(preset_perpendicular(1.0), ex).per_loop(l) == doctest::Approx(2 * full - coarse));
  CHECK_THROWS_AS(cm_energy_functional(preset_perpendicular(1.0), ex).per_loop(generate_loop(1, 0, 12, 2)),
                  std::invalid_argument);
}

TEST_CASE("domain checks") {
  CmDomain d;
  CHECK_NOTHROW(d.validate());
  CHECK(d.nz() == 180);
  CHECK(d.nx() == 1000);
  CmDomain tight;
  tight.z_hi = 1.5;
  QuadratureSettings s;
  s.method = CmMethod::Grid;
  s.domain = tight;
  CHECK_THROWS_AS(cm_energy_functional(preset_perpendicular(1.0), s), DomainTooSmall);
  CmDomain bad;
  bad.spacing = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(parse_cm_method("grid") == CmMethod::Grid);
  CHECK(parse_tail_mode("none") == TailMode::None);
  CHECK_THROWS_AS(parse_tail_mode("cubic"), std::invalid_argument);
}

TEST_CASE("power-law tail recovers c / x^3 columns") {
  std::vector<double> xs, cols;
  const double x_cut = 10.0, h = 0.05;
  for (double x = -x_cut + h / 2; x < x_cut; x += h) {
    xs.push_back(x);
    cols.push_back(std::abs(x) > 1.0 ? 3.0 / std::pow(std::abs(x), 3) : 1.0);
  }
  // Both sides: 2 * integral_{x_cut}^inf 3 / x^3 = 3 / x_cut^2.
  CHECK(power_law_tail(cols, xs, x_cut) == doctest::Approx(3.0 / (x_cut * x_cut)).epsilon(1e-3));
}

TEST_CASE("block statistics") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  QuadratureMeta m;
  m.a = 2.0;
  m.power = 1;
  const IntegralResult r = summarize(v, 4, m);
  CHECK(r.value == doctest::Approx(4.5 / 2.0));
  CHECK(r.n_blocks == 4);
  CHECK(summarize(v, 100, m).n_blocks == v.size());
  CHECK(summarize(std::vector<double>{5.0}, 10, m).std_err == 0.0);
  CHECK(spread(r.blocks) > 0);
}

TEST_CASE("adaptive integration") {
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) == doctest::Approx(2.0));
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0) == doctest::Approx(1.0));
}
