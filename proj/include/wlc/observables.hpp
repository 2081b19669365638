#pragma once

#include "wlc/ensemble.hpp"
#include "wlc/quadrature.hpp"
#include "wlc/statistics.hpp"

#include <numbers>
#include <string>
#include <string_view>

namespace wlc {

enum class CoefficientName { GammaParallel, GammaPerp, Gamma1si, Gamma2si };
enum class Provenance { Reference, Computed };

std::string_view coefficient_name(CoefficientName name);
CoefficientName parse_coefficient_name(std::string_view name);
std::string_view provenance_name(Provenance p);

/// Dimensionless force coefficient: F/A = -gamma_parallel / a^4 for plates,
/// F/L = -gamma / a^3 for the edge geometries.
struct Coefficient {
  CoefficientName name = CoefficientName::GammaParallel;
  double value = 0.0;
  double std_err = 0.0;
  Provenance provenance = Provenance::Reference;
  EnsembleMeta ensemble;
  std::string settings_hash;
  IntegralResult energy;  ///< the energy the coefficient was derived from
};

inline constexpr double kGammaParallel = std::numbers::pi * std::numbers::pi / 480.0;

/// Published values with their quoted uncertainties.
Coefficient reference_coefficient(CoefficientName name);

/// Energy observable E(a) ~ a^-power to the force F = -dE/da = power E / a.
/// power 3: per area, power 2: per length.
struct Force {
  double value;
  double std_err;
};
Force force_from_energy(double energy, double std_err, int power, double a);
Force force_from_energy(const IntegralResult& energy);

Coefficient gamma_parallel(const LoopSource& source, const QuadratureSettings& settings = {});
Coefficient gamma_perp(const LoopSource& source, const QuadratureSettings& settings = {});
Coefficient gamma_1si(const LoopSource& source, const QuadratureSettings& settings = {});
Coefficient gamma_2si(const LoopSource& source, const QuadratureSettings& settings = {});
Coefficient coefficient(CoefficientName name, const LoopSource& source, const QuadratureSettings& settings = {});

/// Coefficient from an already evaluated energy: gamma = -power a^power E.
Coefficient coefficient_from_energy(CoefficientName name, const IntegralResult& energy);

/// Full-pipeline comb force per unit area, A = L n d (teeth == 0: periodic
/// comb, A = L d per tooth).
IntegralResult comb_force_per_area(const LoopSource& source, double a, double spacing, int teeth,
                                   const QuadratureSettings& settings = {});

/// Additive estimate -gamma_perp / (a^3 d) per unit area.
double comb_estimate(double a, double spacing, double gamma_perp = reference_coefficient(CoefficientName::GammaPerp).value);

struct PlateSpec {
  double area = 0.0;
  double c_1si = 0.0;  ///< edge length facing open substrate
  double c_2si = 0.0;  ///< edge length facing an aligned substrate edge
  double a = 0.0;

  void validate() const;
};

struct EffectiveArea {
  double area;
  double relative_correction;
};

/// A_eff = A + (a / gamma_parallel)(gamma_1si C_1si + gamma_2si C_2si).
EffectiveArea effective_area(const PlateSpec& spec, double gamma_1si_value, double gamma_2si_value);
EffectiveArea effective_area(const PlateSpec& spec);

}  // namespace wlc
