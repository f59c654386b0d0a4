#pragma once

#include <optional>
#include <string_view>

#include "lighttrap/eikonal.hpp"
#include "lighttrap/field.hpp"

namespace lighttrap {

/// Radial-orbit theory for radial static fields. Everything here derives from
/// the effective radius function h(r) = n(r) * r: a ray with impact invariant
/// b = L/C has radial turning points exactly where h(r) = |b|, and circular
/// orbits where dh/dr = 0.

/// Critical radii of h: r_m is the local maximum (circular-orbit radius),
/// r_v the local minimum that bounds the trap from outside. r_v is absent
/// when h decays monotonically beyond r_m (pure Gaussian, n_C = 0).
struct CriticalRadii {
  double r_m;
  std::optional<double> r_v;
};

/// Open interval of |b| values with bound orbits: b_hi = h(r_m),
/// b_lo = h(r_v) (or 0 with no valley).
struct TrappedBand {
  double b_lo;
  double b_hi;
};

struct TurningRadii {
  double r_min;
  double r_max;
};

enum class OrbitClass { Trapped, Escaping, Plunging, Circular };

std::string_view to_string(OrbitClass c);

/// The allowed radial region {h >= |b|} containing r_launch.
/// hi is +infinity when the region is unbounded outward; lo is 0 when it
/// reaches the axis.
struct RegionEdges {
  double lo;
  double hi;
};

/// Orbit statistics extracted from an integrated trajectory.
struct OrbitSummary {
  double b;                    // impact invariant L/C at launch (signed)
  OrbitClass classification;
  double r_min_obs;            // mean radius over minimum turning events
  double r_max_obs;            // mean radius over maximum turning events
  double w_o;                  // r_max_obs - r_min_obs
  double T_r;                  // mean radial period
  double delta_phi_per_T_r;    // mean azimuthal advance per radial period
  double periodicity_residual; // (max - min)/mean of successive period estimates
  int turning_count;
};

/// h(r) = n(r) * r. Throws std::invalid_argument unless the field is radial
/// static.
double h_profile(const IndexField& field, double r);

/// dh/dr = n + r dn_dr, from analytic field derivatives.
double h_profile_slope(const IndexField& field, double r);

/// Locates extrema of h by bracketing sign changes of dh/dr on a 512-point
/// log grid over [1e-3 * length scale, r_search_max], refined by bisection to
/// 1e-12. Empty when h is monotone (no trap exists).
std::optional<CriticalRadii> find_critical_radii(const IndexField& field,
                                                 double r_search_max = 0.0);

std::optional<TrappedBand> trapped_band(const IndexField& field,
                                        double r_search_max = 0.0);

/// Roots of h(r) = |b| bracketing r_m. Empty when |b| lies outside the open
/// trapped band; |b| equal to the band top returns the degenerate pair
/// (r_m, r_m). r_search_max = 0 picks 30 * length scale.
std::optional<TurningRadii> turning_radii(const IndexField& field, double b,
                                          double r_search_max = 0.0);

/// Edges of the allowed region containing r_launch. Works for any radial
/// static field, including profiles whose allowed set has several components
/// (perturbed traps). r_launch sitting exactly on a root (tangential launch)
/// is handled by probing the side the ray can move to.
RegionEdges allowed_region(const IndexField& field, double b, double r_launch,
                           double r_search_max = 0.0);

/// Classification by region analysis:
///   Circular  — |b| within 1e-9 of the band top and r_launch at r_m;
///   Escaping  — the allowed region reaches escape_r (or is unbounded);
///   Plunging  — the allowed region reaches the axis;
///   Trapped   — bounded on both sides.
OrbitClass classify(const IndexField& field, double b, double r_launch,
                    double escape_r = std::numeric_limits<double>::infinity());

/// Alias of find_critical_radii(...).r_m.
std::optional<double> circular_orbit_radius(const IndexField& field,
                                            double r_search_max = 0.0);

/// Turning events (zeros of r'(tau)) located on the dense output of an
/// integrated trajectory.
struct TurningEvent {
  double tau;
  double r;
  double phi;
  bool is_min;  // r' crosses - to + (pericenter)
};

std::vector<TurningEvent> turning_events(const Trajectory& traj);

/// Summarizes a trajectory with at least 3 turning events; empty otherwise
/// (insufficient data: escaping/plunging rays turn fewer than 3 times).
std::optional<OrbitSummary> summarize_orbit(const Trajectory& traj);

/// Radial period by quadrature of dtau = r dr / (C sqrt(h^2 - b^2)) between
/// the turning radii, with a sin^2 substitution absorbing the endpoint
/// singularities. Independent of the integrator. Empty when b is out of band.
std::optional<double> radial_period_quadrature(const IndexField& field,
                                               double b, double gauge_C,
                                               double r_search_max = 0.0);

/// Azimuthal advance over one radial period, by the same quadrature.
std::optional<double> azimuthal_advance_quadrature(const IndexField& field,
                                                   double b, double r_search_max = 0.0);

}  // namespace lighttrap
