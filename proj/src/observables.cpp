#include "wlc/observables.hpp"

#include "wlc/ensemble_io.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wlc {
namespace {

std::string settings_hash(const QuadratureSettings& s) {
  std::ostringstream os;
  os.precision(17);
  os << cm_method_name(s.method) << ';' << s.domain.z_lo << ';' << s.domain.z_hi << ';' << s.domain.x_cut << ';'
     << s.domain.spacing << ';' << tail_mode_name(s.domain.tail) << ';' << s.domain.support_margin << ';'
     << s.n_blocks << ';' << s.extrapolate << ';' << s.edge_cells << ';' << s.comb_panels;
  const std::string text = os.str();
  std::ostringstream hex;
  hex << std::hex << fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
  return hex.str();
}

Coefficient computed(CoefficientName name, const IntegralResult& energy, const LoopSource& source,
                     const QuadratureSettings& settings) {
  Coefficient c = coefficient_from_energy(name, energy);
  c.ensemble = source.meta();
  c.settings_hash = settings_hash(settings);
  return c;
}

}  // namespace

std::string_view coefficient_name(CoefficientName name) {
  switch (name) {
    case CoefficientName::GammaParallel: return "gamma_parallel";
    case CoefficientName::GammaPerp: return "gamma_perp";
    case CoefficientName::Gamma1si: return "gamma_1si";
    case CoefficientName::Gamma2si: return "gamma_2si";
  }
  return "unknown";
}

CoefficientName parse_coefficient_name(std::string_view name) {
  for (auto n : {CoefficientName::GammaParallel, CoefficientName::GammaPerp, CoefficientName::Gamma1si,
                 CoefficientName::Gamma2si})
    if (coefficient_name(n) == name) return n;
  throw std::invalid_argument("unknown coefficient '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) { return p == Provenance::Reference ? "reference" : "computed"; }

Coefficient reference_coefficient(CoefficientName name) {
  Coefficient c;
  c.name = name;
  c.provenance = Provenance::Reference;
  switch (name) {
    case CoefficientName::GammaParallel: c.value = kGammaParallel; break;
    case CoefficientName::GammaPerp: c.value = 1.200e-2; c.std_err = 0.004e-2; break;
    case CoefficientName::Gamma1si: c.value = 5.23e-3; c.std_err = 0.02e-3; break;
    case CoefficientName::Gamma2si: c.value = 2.30e-3; c.std_err = 0.01e-3; break;
  }
  return c;
}

Force force_from_energy(double energy, double std_err, int power, double a) {
  if (power != 2 && power != 3) throw std::invalid_argument("force_from_energy: power must be 2 (per length) or 3 (per area)");
  if (!(a > 0)) throw std::invalid_argument("force_from_energy: a must be positive");
  return {power * energy / a, power * std_err / a};
}

Force force_from_energy(const IntegralResult& energy) {
  return force_from_energy(energy.value, energy.std_err, energy.meta.power, energy.meta.a);
}

Coefficient coefficient_from_energy(CoefficientName name, const IntegralResult& energy) {
  const int power = name == CoefficientName::GammaParallel ? 3 : 2;
  if (energy.meta.power != power) throw std::invalid_argument("coefficient_from_energy: energy has the wrong a-scaling");
  const double factor = -power * std::pow(energy.meta.a, power);
  Coefficient c;
  c.name = name;
  c.provenance = Provenance::Computed;
  c.value = factor * energy.value;
  c.std_err = std::abs(factor) * energy.std_err;
  c.energy = energy;
  return c;
}

Coefficient gamma_parallel(const LoopSource& source, const QuadratureSettings& settings) {
  return computed(CoefficientName::GammaParallel, energy_parallel_plates(source, 1.0, settings), source, settings);
}

Coefficient gamma_perp(const LoopSource& source, const QuadratureSettings& settings) {
  return computed(CoefficientName::GammaPerp, cm_integrate_2d(source, preset_perpendicular(1.0), settings), source,
                  settings);
}

Coefficient gamma_1si(const LoopSource& source, const QuadratureSettings& settings) {
  return computed(CoefficientName::Gamma1si, edge_energy(source, preset_one_semi_infinite(1.0), std::nullopt, settings),
                  source, settings);
}

Coefficient gamma_2si(const LoopSource& source, const QuadratureSettings& settings) {
  return computed(CoefficientName::Gamma2si, edge_energy(source, preset_two_semi_infinite(1.0), std::nullopt, settings),
                  source, settings);
}

Coefficient coefficient(CoefficientName name, const LoopSource& source, const QuadratureSettings& settings) {
  switch (name) {
    case CoefficientName::GammaParallel: return gamma_parallel(source, settings);
    case CoefficientName::GammaPerp: return gamma_perp(source, settings);
    case CoefficientName::Gamma1si: return gamma_1si(source, settings);
    case CoefficientName::Gamma2si: return gamma_2si(source, settings);
  }
  throw std::invalid_argument("coefficient: unknown name");
}

IntegralResult comb_force_per_area(const LoopSource& source, double a, double spacing, int teeth,
                                   const QuadratureSettings& settings) {
  if (source.size() == 0) throw std::invalid_argument("comb_force_per_area: empty ensemble");
  IntegralResult r = evaluate(source, comb_force_functional(a, spacing, teeth, settings), settings.n_blocks,
                              settings.threads);
  const double per_length_to_area = 1.0 / (spacing * (teeth == 0 ? 1 : teeth));
  r.value *= per_length_to_area;
  r.std_err *= per_length_to_area;
  for (double& b : r.blocks) b *= per_length_to_area;
  r.meta.observable = teeth == 0 ? "periodic comb force per area" : "comb force per area";
  return r;
}

double comb_estimate(double a, double spacing, double gamma_perp_value) {
  if (!(spacing > 0)) throw std::invalid_argument("comb_estimate: spacing must be positive");
  if (!(a > 0)) throw std::invalid_argument("comb_estimate: a must be positive");
  return -gamma_perp_value / (a * a * a * spacing);
}

void PlateSpec::validate() const {
  if (!(area > 0) || !(a > 0) || !(c_1si >= 0) || !(c_2si >= 0) || !std::isfinite(area) || !std::isfinite(a) ||
      !std::isfinite(c_1si) || !std::isfinite(c_2si))
    throw std::invalid_argument("PlateSpec: need A > 0, a > 0 and non-negative circumference parts");
}

EffectiveArea effective_area(const PlateSpec& spec, double g1, double g2) {
  spec.validate();
  const double extra = spec.a / kGammaParallel * (g1 * spec.c_1si + g2 * spec.c_2si);
  return {spec.area + extra, extra / spec.area};
}

EffectiveArea effective_area(const PlateSpec& spec) {
  return effective_area(spec, reference_coefficient(CoefficientName::Gamma1si).value,
                        reference_coefficient(CoefficientName::Gamma2si).value);
}

}  // namespace wlc
