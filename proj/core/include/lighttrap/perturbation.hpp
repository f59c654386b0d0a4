#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lighttrap/eikonal.hpp"
#include "lighttrap/field.hpp"
#include "lighttrap/orbit.hpp"

namespace lighttrap {

struct DeviationOptions {
  double periods = 20.0;  // base radial periods to integrate
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double escape_r = 0.0;  // 0 -> default_escape_radius(base, launch radius)
};

/// How one perturbation moved the orbit. Deltas compare observed turning
/// statistics (perturbed minus base); when the perturbed ray leaves before
/// turning three times the extremes of its samples stand in and
/// classification_changed is set.
struct DeviationReport {
  double delta_r_min = 0.0;
  double delta_r_max = 0.0;
  double delta_w_o = 0.0;
  bool classification_changed = false;
  std::optional<double> escape_tau;
  OrbitClass base_class = OrbitClass::Trapped;
  OrbitClass perturbed_class = OrbitClass::Trapped;
  double base_r_min = 0.0, base_r_max = 0.0, base_w_o = 0.0;
  double pert_r_min = 0.0, pert_r_max = 0.0, pert_w_o = 0.0;
};

/// "Modified entirely": the classification flipped or the orbit width moved
/// by more than half of its unperturbed value.
bool modified_entirely(const DeviationReport& r);

/// Integrates the same launch state on both fields over the same tau horizon
/// (periods * base radial period) and compares the observed orbit summaries.
/// Works for non-axisymmetric perturbations too, where the band theory does
/// not apply: turning statistics always come from the integrated extrema.
/// Throws std::invalid_argument when the launch is not trapped on base.
DeviationReport orbit_deviation(const IndexField& base,
                                const IndexField& perturbed,
                                const RayState& launch,
                                const DeviationOptions& opts = {});

/// Bump template for amplitude scans. Each scanned amplitude a is applied as
/// delta_n = direction * a; the default direction is -1 (a dip), which erodes
/// the band-defining maximum of h and is the worst case for trap survival.
struct ScanShape {
  std::optional<double> r_p;    // absent: placed at the circular-orbit radius
  double s_p = 0.0;             // <= 0: 0.2 * field length scale
  double direction = -1.0;
  std::optional<double> phi_p;  // set (or randomized) => azimuthal bump
  bool randomize_phi = false;   // draw phi_p from the seeded generator
  double phi_width = 0.5;
};

struct ScanRow {
  double amplitude;       // requested |delta_n|
  double applied_delta;   // signed delta_n actually applied
  bool ok = false;
  std::string error;      // set when the row failed (e.g. index went negative)
  DeviationReport report;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::optional<double> threshold_amplitude;  // smallest "modified entirely"
  double base_b = 0.0;
  double base_r_min = 0.0, base_r_max = 0.0, base_w_o = 0.0;
  BumpPerturbation resolved_shape;  // template with r_p / phi_p resolved
  std::uint64_t seed = 0;
};

/// Deviation table over an ordered amplitude grid. Axisymmetric rows are
/// evaluated through the h-root region analysis, which is exact for radial
/// static perturbations (L and C stay conserved); rows whose region becomes
/// unbounded are additionally integrated to time the escape. Azimuthal rows
/// fall back to full integration. Rows run in parallel (jobs <= 0 picks the
/// hardware count) and are emitted in grid order; identical inputs produce
/// identical tables.
/// Preconditions: >= 3 amplitudes, non-decreasing, all >= 0; the launch must
/// be trapped on the base field.
ScanTable threshold_scan(const FieldPtr& base, const RayState& launch,
                         const std::vector<double>& amplitudes,
                         const ScanShape& shape, std::uint64_t seed,
                         int jobs = 0);

/// CSV export:
/// delta_n,delta_r_min,delta_r_max,delta_w_o,classification_changed,escape_tau
std::string scan_to_csv(const ScanTable& table);

}  // namespace lighttrap
