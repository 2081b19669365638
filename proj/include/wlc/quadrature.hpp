#pragma once

#include "wlc/ensemble.hpp"
#include "wlc/geometry.hpp"
#include "wlc/scale_engine.hpp"

#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlc {

/// -1 / (32 pi^2): proper-time integrals to energies.
inline constexpr double kEnergyPrefactor = -1.0 / (32.0 * std::numbers::pi * std::numbers::pi);

enum class CmMethod { Reduced, Grid };
enum class TailMode { None, PowerLaw };

std::string_view cm_method_name(CmMethod method);
CmMethod parse_cm_method(std::string_view name);
std::string_view tail_mode_name(TailMode mode);
TailMode parse_tail_mode(std::string_view name);

class DomainTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Midpoint tensor grid over the cross-section, in units of a.
struct CmDomain {
  double z_lo = -4.0;
  double z_hi = 5.0;
  double x_cut = 25.0;  ///< x in [-x_cut, x_cut]
  double spacing = 0.05;
  TailMode tail = TailMode::PowerLaw;
  double support_margin = 2.0;  ///< required clearance around every primitive

  std::size_t nz() const;
  std::size_t nx() const;
  std::vector<double> z_nodes() const;
  std::vector<double> x_nodes() const;

  void validate() const;
  /// Throws DomainTooSmall unless every primitive level and edge of the
  /// (normalized) scene lies at least support_margin inside the domain.
  void check_support(const Scene& normalized) const;
};

struct QuadratureSettings {
  CmMethod method = CmMethod::Reduced;
  CmDomain domain;
  std::size_t n_blocks = 20;
  unsigned threads = 0;
  bool extrapolate = false;        ///< per-loop 2 J(N) - J(N/4)
  std::size_t edge_cells = 4096;   ///< cells of the two-semi-infinite double integral
  int comb_panels = 32;
};

struct QuadratureMeta {
  std::string observable;
  std::string method;
  bool extrapolated = false;
  double a = 1.0;
  int power = 0;  ///< result scales as a^-power
  std::size_t loops = 0;
  std::uint64_t points = 0;
  CmDomain domain;
  std::size_t edge_cells = 0;
};

struct IntegralResult {
  double value = 0.0;
  double std_err = 0.0;
  std::size_t n_blocks = 0;
  std::vector<double> blocks;
  QuadratureMeta meta;
};

/// One number per loop, in units of a, whose ensemble mean times a^-power is
/// the observable.
struct LoopFunctional {
  std::function<double(const Loop&)> per_loop;
  QuadratureMeta meta;
};

/// Per-loop values for loops [first, last); slot i holds loop first + i.
std::vector<double> loop_values(const LoopSource& source, const LoopFunctional& functional, std::size_t first,
                                std::size_t last, unsigned threads = 0);

/// Blocks the per-loop values, jackknifes, and applies a^-power.
IntegralResult summarize(std::span<const double> per_loop, std::size_t n_blocks, const QuadratureMeta& meta);

IntegralResult evaluate(const LoopSource& source, const LoopFunctional& functional, std::size_t n_blocks,
                        unsigned threads = 0);

/// Several observables from one pass over the ensemble.
std::vector<IntegralResult> evaluate(const LoopSource& source, std::span<const LoopFunctional> functionals,
                                     std::size_t n_blocks, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Per-loop kernels (a = 1).

/// int dz_cm of s_min^-4 / 2 for plates z = 0 and z = 1, by adaptive
/// Gauss-Kronrod split at 0, the switching point and 1.
double parallel_plates_cm_integral(const Loop& loop);

/// Grid sum of the proper-time integral over the domain (no tail).
double grid_cm_integral(const PreparedLoop& loop, const Scene& normalized, const CmDomain& domain);

/// z-integrated proper-time integral per x node, and the tail estimate.
std::vector<double> grid_columns(const PreparedLoop& loop, const Scene& normalized, const CmDomain& domain);
double power_law_tail(std::span<const double> columns, std::span<const double> x_nodes, double x_cut);

// ---------------------------------------------------------------------------
// Functional factories.

LoopFunctional parallel_plates_functional(double a, const QuadratureSettings& settings = {});
LoopFunctional cm_energy_functional(const Scene& scene, const QuadratureSettings& settings = {});
/// bulk_per_area: nullopt subtracts each loop's own parallel-plate energy on
/// the same z nodes (and is exact on the reduced route); a value subtracts
/// that constant energy per area (grid route).
LoopFunctional edge_energy_functional(const Scene& scene, std::optional<double> bulk_per_area,
                                      const QuadratureSettings& settings = {});
/// Comb force per unit length; teeth == 0 gives the force per tooth of the
/// infinite periodic comb.
LoopFunctional comb_force_functional(double a, double spacing, int teeth, const QuadratureSettings& settings = {});

// ---------------------------------------------------------------------------
// Observables.

/// E/A for parallel plates (1-dimensional or higher loops).
IntegralResult energy_parallel_plates(const LoopSource& source, double a, const QuadratureSettings& settings = {});

/// E/L for a scene with reduced_dim = 2.
IntegralResult cm_integrate_2d(const LoopSource& source, const Scene& scene, const QuadratureSettings& settings = {});

/// f(x) = -(1/32 pi^2) int dz <proper-time integral> at fixed x (trapezoid
/// over z_nodes). x and z_nodes in physical units.
double line_density(const LoopSource& source, const Scene& scene, double x, std::span<const double> z_nodes,
                    unsigned threads = 0);

/// Edge term per unit length of a one- or two-semi-infinite scene.
IntegralResult edge_energy(const LoopSource& source, const Scene& scene, std::optional<double> bulk_per_area,
                           const QuadratureSettings& settings = {});

}  // namespace wlc
