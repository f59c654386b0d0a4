#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lighttrap/field.hpp"

namespace lighttrap {

/// Ray phase-space point: 4-position (r, phi, z, t) and its derivatives with
/// respect to the affine parameter tau.
struct RayState {
  double tau = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double z = 0.0;
  double t = 0.0;
  double dr = 0.0;
  double dphi = 0.0;
  double dz = 0.0;
  double dt = 0.0;
};

/// Second derivatives returned by the ray equations.
struct RayAccel {
  double d2r;
  double d2phi;
  double d2z;
  double d2t;
};

/// Constants of motion monitored along rays:
///   L   = r^2 phi'            (conserved iff dn_dphi = 0)
///   C   = t' / n^2            (conserved iff dn_dt = 0)
///   p_z = z'                  (conserved iff dn_dz = 0)
///   N   = t'^2/n^2 - (r'^2 + r^2 phi'^2 + z'^2)   (conserved always; 0 on light rays)
struct ConservedSet {
  double L;
  double C;
  double p_z;
  double N;
};

/// Radius below which the polar chart is considered degenerate.
inline constexpr double kRadiusFloor = 1e-9;

/// Right-hand side of the ray system:
///   r''   = r phi'^2 + t'^2 dn_dr / n^3
///   phi'' = (-2 r r' phi' + t'^2 dn_dphi / n^3) / r^2
///   z''   = t'^2 dn_dz / n^3
///   t''   = t' (t' dn_dt + 2 (z' dn_dz + phi' dn_dphi + r' dn_dr)) / n
/// Throws std::domain_error when r < kRadiusFloor.
RayAccel eikonal_rhs(const RayState& state, const IndexField& field);

/// Rescales t' so the state satisfies the null constraint
/// t'^2 / n^2 = r'^2 + r^2 phi'^2 + z'^2 exactly (to roundoff), leaving the
/// spatial components untouched. Throws std::domain_error when the spatial
/// speed vanishes.
RayState normalize_null(const RayState& state, const IndexField& field);

ConservedSet conserved_quantities(const RayState& state, const IndexField& field);

/// |N| scaled by t'^2/n^2 — the dimensionless null-constraint violation.
double null_residual_relative(const RayState& state, const FieldSample& at);

/// Tangential launch at (r0, phi=0, z=0, t=0): r' = z' = 0,
/// phi' = sense / (n(r0) r0), with the affine gauge fixed by t' = 1.
/// The impact invariant of the result is b = L/C = sense * n(r0) * r0.
RayState launch_tangential(const IndexField& field, double r0, int sense = +1);

/// Default escape radius: max(10 * length scale, 2 * launch radius). Beyond
/// this the Gaussian contrast is far below double precision.
double default_escape_radius(const IndexField& field, double r_launch);

enum class Termination { MaxTau, Escaped, PlungedBelowMinR, StepFailure };

std::string_view to_string(Termination t);

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_tau = 1000.0;
  double escape_r = std::numeric_limits<double>::infinity();
  double min_r = 1e-6;
  std::int64_t max_steps = 4'000'000;
  double sample_interval = 0.25;
};

struct TrajectorySample {
  RayState state;
  FieldSample field;
  ConservedSet conserved;
};

/// One accepted integrator step with endpoint derivatives; supports cubic
/// Hermite evaluation anywhere inside [tau0, tau1] for event location.
struct DenseStep {
  double tau0, tau1;
  std::array<double, 8> y0, f0, y1, f1;

  std::array<double, 8> eval(double tau) const;
  double eval_component(double tau, int i) const;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<DenseStep> steps;
  Termination termination = Termination::MaxTau;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  /// Relative change of t' applied by the initial null re-normalization.
  double null_correction = 0.0;

  double tau_begin() const { return samples.front().state.tau; }
  double tau_end() const { return samples.back().state.tau; }
  const RayState& final_state() const { return samples.back().state; }

  /// Dense-output state at any tau within the integrated span.
  RayState state_at(double tau) const;
};

/// Adaptive Dormand-Prince 5(4) integration with PI step control and
/// event-located termination (escape radius, inner guard radius, max tau).
/// The initial state is re-normalized to the null constraint first; the
/// applied correction is recorded on the trajectory. Consecutive stored
/// samples are kept within pi/8 of each other in phi so winding numbers are
/// unambiguous.
Trajectory integrate(const RayState& state0, const IndexField& field,
                     const IntegrateOptions& opts = {});

/// CSV export, one row per sample:
/// tau,r,phi,z,t,dr,dphi,dz,dt,n,L,C,pz,null_residual
/// Values use shortest round-trip decimal formatting.
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace lighttrap
