#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lighttrap/eikonal.hpp"
#include "lighttrap/field.hpp"
#include "lighttrap/orbit.hpp"
#include "lighttrap/perturbation.hpp"

namespace lighttrap::cli {

/// Row of a parameter sweep as written to the CSV / fed to the trend plot.
struct SweepRow {
  double n_a, n_c, sigma;
  double b;       // NaN when no trap exists
  double r_min, r_max, w_o;
  std::string classification;  // Trapped|Escaping|Plunging|Circular|NoTrap
};

/// x-y path over index shading rings plus r'(tau) / phi'(tau) panels.
std::string trace_figure(const Trajectory& traj, const IndexField& field);

/// Trend lines of r_min and w_o against the swept parameter.
std::string sweep_figure(const std::vector<SweepRow>& rows,
                         const std::string& parameter);

/// Deviation magnitude |delta w_o| / w_o against the scanned amplitude, with
/// the reported threshold marked.
std::string perturb_figure(const ScanTable& table);

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows);

}  // namespace lighttrap::cli
