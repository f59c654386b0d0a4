#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lighttrap/eikonal.hpp"
#include "lighttrap/field.hpp"
#include "lighttrap/orbit.hpp"

namespace lighttrap {

/// Inverse problem: the trap annulus [r_min_target, r_max_target] is set a
/// priori and a Gaussian profile realizing it must respect the material
/// bounds. The index contrast is pinned to the allowed extremes (n_A at the
/// material limit, n_C at the floor unless fixed_n_c overrides), which
/// reduces the solve to one equation h(r_min) = h(r_max) in sigma.
struct DesignProblem {
  double r_min_target;
  double r_max_target;
  double n_max_material = GaussianRadialField::kDefaultMaterialLimit;
  double n_floor = 1.0;
  std::optional<double> fixed_n_c;  // cladding mode: overrides n_floor pin
};

struct DesignSolution {
  double n_a;
  double n_c;
  double sigma;
  double b;            // impact invariant of the designed orbit
  TrappedBand band;
  double margin_lo;    // b - b_lo  (> 0 strictly inside the band)
  double margin_hi;    // b_hi - b
  TurningRadii achieved;
};

/// Diagnostics for every sigma candidate examined, kept for infeasibility
/// reports.
struct DesignCandidate {
  double sigma;
  std::string verdict;  // "ok" or the failed check
};

struct DesignOutcome {
  std::optional<DesignSolution> solution;
  std::string failure_reason;  // empty on success
  std::vector<DesignCandidate> candidates;

  bool feasible() const { return solution.has_value(); }
};

/// Solves for sigma by bracketed bisection of h(r_min) - h(r_max) over a log
/// grid of sigma in [1e-3, 1e3] * r_max_target, then validates each root:
/// the targets must bracket r_m, b = h(r_min_target) must sit strictly inside
/// the open trapped band (margins > 1e-9), and the h-roots at b must
/// reproduce the targets. Deterministic: identical problems give identical
/// outcomes. Throws std::invalid_argument when the problem itself is
/// malformed (non-positive radii, r_min >= r_max, n_max <= floor).
DesignOutcome design_gaussian_trap(const DesignProblem& problem);

struct DesignVerification {
  TurningRadii observed;
  double w_o;
  double rel_dev_r_min;
  double rel_dev_r_max;
  OrbitClass classification;
  Termination termination;
  int turning_count;
};

/// Closes the loop: launches a tangential ray at r_min_target on the solved
/// profile, integrates >= 10 radial periods, and reports observed turning
/// radii against the targets.
DesignVerification verify_design(const DesignSolution& solution,
                                 const DesignProblem& problem,
                                 double rel_tol = 1e-10, double abs_tol = 1e-12);

/// One sampled sigma of the achievable-target map.
struct FeasibleRegionEntry {
  double sigma;
  bool has_trap;
  double r_m, r_v;          // valid when has_trap
  double b_lo, b_hi;
  double r_min_at_b_lo;     // innermost reachable r_min (at the band bottom)
  double ratio_max;         // largest achievable r_max/r_min for this profile
};

/// Charts what the material constraints admit over a sigma grid. With no
/// index contrast (n_max <= floor) every entry reports has_trap = false.
std::vector<FeasibleRegionEntry> feasible_target_region(
    double n_max_material, double n_floor, const std::vector<double>& sigma_grid);

}  // namespace lighttrap
