#include "doctest.h"

#include "wlc/density_map.hpp"
#include "wlc/observables.hpp"
#include "wlc/quadrature.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace wlc;

namespace {

IntegralResult fixed_energy(double value, double err, int power, double a) {
  IntegralResult r;
  r.value = value;
  r.std_err = err;
  r.meta.power = power;
  r.meta.a = a;
  return r;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("force from energy") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (double a : {0.5, 1.0, 3.0}) {
    const Force f = force_from_energy(-pi2 / 1440.0 / std::pow(a, 3), 0.0, 3, a);
    CHECK(f.value == doctest::Approx(-pi2 / 480.0 / std::pow(a, 4)));
    const double g = 1.2e-2;
    const Force p = force_from_energy(fixed_energy(-g / 2 / (a * a), 1e-4, 2, a));
    CHECK(p.value == doctest::Approx(-g / std::pow(a, 3)));
    CHECK(p.std_err == doctest::Approx(2e-4 / a));
  }
  CHECK(force_from_energy(0.0, 0.0, 2, 1.0).value == 0.0);
  CHECK_THROWS_AS(force_from_energy(1.0, 0.0, 4, 1.0), std::invalid_argument);
}

TEST_CASE("coefficients from energies") {
  const Coefficient g = coefficient_from_energy(CoefficientName::GammaPerp, fixed_energy(-0.006 / 4, 1e-5, 2, 2.0));
  CHECK(g.value == doctest::Approx(0.012));
  CHECK(g.std_err == doctest::Approx(8e-5));
  CHECK(g.provenance == Provenance::Computed);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const Coefficient p =
      coefficient_from_energy(CoefficientName::GammaParallel, fixed_energy(-pi2 / 1440.0, 0.0, 3, 1.0));
  CHECK(p.value == doctest::Approx(kGammaParallel));
  CHECK_THROWS_AS(coefficient_from_energy(CoefficientName::Gamma1si, fixed_energy(-1.0, 0.0, 3, 1.0)),
                  std::invalid_argument);
  CHECK(parse_coefficient_name("gamma_2si") == CoefficientName::Gamma2si);
  CHECK_THROWS_AS(parse_coefficient_name("gamma_3"), std::invalid_argument);
}

TEST_CASE("stored coefficients") {
  CHECK(kGammaParallel == doctest::Approx(std::numbers::pi * std::numbers::pi / 480.0));
  CHECK(reference_coefficient(CoefficientName::GammaPerp).value == 1.200e-2);
  CHECK(reference_coefficient(CoefficientName::Gamma1si).value == 5.23e-3);
  CHECK(reference_coefficient(CoefficientName::Gamma2si).std_err == doctest::Approx(0.01e-3));
  CHECK(reference_coefficient(CoefficientName::Gamma1si).provenance == Provenance::Reference);
  const double ratio =
      reference_coefficient(CoefficientName::Gamma2si).value / reference_coefficient(CoefficientName::Gamma1si).value;
  CHECK(ratio == doctest::Approx(0.44).epsilon(0.01));
}

TEST_CASE("effective area") {
  const double l = 1.2e-3, a = 3e-6;
  const EffectiveArea bressi = effective_area({l * l, 3 * l, l, a});
  CHECK(bressi.relative_correction == doctest::Approx(2.19e-3).epsilon(5e-3));
  CHECK(bressi.area > l * l);
  const EffectiveArea one_percent = effective_area({l * l, 4 * l, 0.0, 0.01 * l});
  CHECK(one_percent.relative_correction == doctest::Approx(1.02e-2).epsilon(5e-3));
  const EffectiveArea tiny = effective_area({1.0, 4.0, 0.0, 1e-12});
  CHECK(tiny.area == doctest::Approx(1.0));
  // Linear in a and in each circumference part.
  const EffectiveArea twice = effective_area({l * l, 6 * l, 2 * l, a});
  CHECK(twice.relative_correction == doctest::Approx(2 * bressi.relative_correction));
  const EffectiveArea far = effective_area({l * l, 3 * l, l, 2 * a});
  CHECK(far.relative_correction == doctest::Approx(2 * bressi.relative_correction));
  CHECK_THROWS_AS(effective_area({0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(effective_area({1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(effective_area({1.0, 1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("comb estimate") {
  CHECK(comb_estimate(1.0, 10.0, 1.2e-2) == doctest::Approx(-1.2e-3));
  CHECK(comb_estimate(2.0, 5.0) * 5.0 == doctest::Approx(comb_estimate(2.0, 7.0) * 7.0));
  CHECK_THROWS_AS(comb_estimate(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("computed coefficients are positive and invariant under rescaling") {
  const LoopSource src = LoopSource::generated(400, 64, 2, 17);
  QuadratureSettings s;
  s.n_blocks = 10;
  for (auto name : {CoefficientName::GammaPerp, CoefficientName::Gamma1si, CoefficientName::Gamma2si}) {
    const Coefficient c = coefficient(name, src, s);
    CHECK(c.value > 5 * c.std_err);
    CHECK(c.provenance == Provenance::Computed);
    CHECK(c.ensemble == src.meta());
    CHECK_FALSE(c.settings_hash.empty());
  }
  const Coefficient p = gamma_parallel(LoopSource::generated(400, 64, 1, 17), s);
  CHECK(p.value > 5 * p.std_err);
  // gamma is extracted from E(a) a^2, exact for any a.
  const IntegralResult e1 = cm_integrate_2d(src, preset_perpendicular(1.0), s);
  const IntegralResult e3 = cm_integrate_2d(src, preset_perpendicular(3.0), s);
  CHECK(coefficient_from_energy(CoefficientName::GammaPerp, e3).value ==
        doctest::Approx(coefficient_from_energy(CoefficientName::GammaPerp, e1).value).epsilon(1e-12));
}

TEST_CASE("comb force per area normalisation") {
  const LoopSource src = LoopSource::generated(100, 64, 2, 18);
  QuadratureSettings s;
  s.n_blocks = 5;
  const IntegralResult one = comb_force_per_area(src, 1.0, 10.0, 1, s);
  const Force perp = force_from_energy(cm_integrate_2d(src, preset_perpendicular(1.0), s));
  CHECK(one.value * 10.0 == doctest::Approx(perp.value).epsilon(1e-12));
  CHECK_THROWS_AS(comb_force_per_area(src, 1.0, -1.0, 3, s), std::invalid_argument);
}

TEST_CASE("density grid structure") {
  const LoopSource src = LoopSource::generated(300, 64, 2, 19);
  GridSpec spec;
  spec.nx = 25;
  spec.nz = 19;
  const DensityGrid perp = density(src, preset_perpendicular(1.0), spec, 10);
  CHECK(perp.values.rows() == 19);
  CHECK(perp.values.cols() == 25);
  CHECK(perp.values.maxCoeff() <= 0.0);
  // x -> -x mirror symmetry within errors.
  const Eigen::MatrixXd diff = perp.values - perp.values.rowwise().reverse();
  const Eigen::MatrixXd err = (perp.std_err.array().square() + perp.std_err.rowwise().reverse().array().square()).sqrt();
  CHECK(((diff.array().abs() <= 5 * err.array() + 1e-14)).all());
  // Peak between the edge and the lower plate.
  Eigen::Index r, c;
  perp.values.minCoeff(&r, &c);
  CHECK(perp.z_nodes(r) > 0.0);
  CHECK(perp.z_nodes(r) < 1.0);
  CHECK(std::abs(perp.x_nodes(c)) <= 0.5);

  const DensityGrid one = density(src, preset_one_semi_infinite(1.0), spec, 10);
  bool spill = true;
  for (Eigen::Index j = 0; j < spec.nx; ++j)
    if (one.x_nodes(j) > 0.2 && one.x_nodes(j) < 1.0) {
      const Eigen::Index mid = spec.nz / 2;  // z = a / 2
      spill = spill && one.values(mid, j) < 0.0;
    }
  CHECK(spill);

  const DensityGrid two = density(src, preset_two_semi_infinite(1.0), spec, 10);
  // z -> a - z maps node k of [-1, 2] onto node k' with z' = 1 - z.
  int compared = 0;
  bool symmetric = true;
  for (Eigen::Index k = 0; k < spec.nz; ++k)
    for (Eigen::Index k2 = 0; k2 < spec.nz; ++k2)
      if (std::abs(two.z_nodes(k) + two.z_nodes(k2) - 1.0) < 1e-9) {
        ++compared;
        for (Eigen::Index j = 0; j < spec.nx; ++j) {
          const double e = std::hypot(two.std_err(k, j), two.std_err(k2, j));
          symmetric = symmetric && std::abs(two.values(k, j) - two.values(k2, j)) <= 5 * e + 1e-14;
        }
      }
  CHECK(compared > 5);
  CHECK(symmetric);
}

TEST_CASE("far-apart groups give a vanishing grid") {
  const LoopSource src = LoopSource::generated(20, 32, 2, 20);
  GridSpec spec;
  spec.nx = 5;
  spec.nz = 5;
  spec.z_lo = 0.1;
  spec.z_hi = 0.2;
  spec.x_lo = -0.1;
  spec.x_hi = 0.1;
  Scene far;
  far.sigma1 = {Primitive::plane(Axis::Z, 0.0)};
  far.sigma2 = {Primitive::plane(Axis::Z, 1e4)};
  far.reduced_dim = 2;
  far.invariant_directions = 1;
  // Only scales s ~ 1e4 touch both planes; their weight is s^-4.
  const DensityGrid g = density(src, far, spec, 4);
  CHECK(max_abs(g.values) < 1e-12);
}

TEST_CASE("density integrates to the energy") {
  const LoopSource src = LoopSource::generated(200, 64, 2, 21);
  GridSpec spec;
  spec.x_lo = -10.0;
  spec.x_hi = 10.0;
  spec.nx = 161;
  spec.z_lo = -4.0;
  spec.z_hi = 5.0;
  spec.nz = 73;
  const DensityGrid g = density(src, preset_perpendicular(1.0), spec, 10);
  QuadratureSettings s;
  s.n_blocks = 10;
  const IntegralResult e = cm_integrate_2d(src, preset_perpendicular(1.0), s);
  CHECK(integrate(g) == doctest::Approx(e.value).epsilon(0.03));
}

TEST_CASE("density grid csv round trip") {
  const LoopSource src = LoopSource::generated(20, 32, 2, 22);
  GridSpec spec;
  spec.nx = 7;
  spec.nz = 5;
  const DensityGrid g = density(src, preset_perpendicular(1.0), spec, 4);
  const auto path = std::filesystem::temp_directory_path() / "wlc_test_grid.csv";
  export_grid(g, path);
  const DensityGrid back = import_grid(path);
  CHECK(back.x_nodes == g.x_nodes);
  CHECK(back.z_nodes == g.z_nodes);
  CHECK(back.values == g.values);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("z\\x,", 0) == 0);
  }
  {
    std::ofstream out(path);
    out << "z\\x,0,1\n0,1.0\n";
  }
  CHECK_THROWS(import_grid(path));
  DensityGrid empty;
  CHECK_THROWS(export_grid(empty, path));
  GridSpec bad;
  bad.nx = 0;
  CHECK_THROWS_AS(density(src, preset_perpendicular(1.0), bad, 4), std::invalid_argument);
}
