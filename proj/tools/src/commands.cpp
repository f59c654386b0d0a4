#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <thread>

#include "lighttrap/design.hpp"
#include "lighttrap/orbit.hpp"
#include "plots.hpp"

namespace lighttrap::cli {

namespace {

RayState resolve_launch(const LaunchSpec& spec, const IndexField& field) {
  if (spec.state) return *spec.state;
  return launch_tangential(field, *spec.r0, spec.sense);
}

/// Reduced summary for rays that never develop three turning points.
json fallback_summary(const Trajectory& traj, const IndexField& field) {
  const TrajectorySample& first = traj.samples.front();
  const double b = first.conserved.L / first.conserved.C;
  double r_lo = first.state.r, r_hi = first.state.r;
  for (const TrajectorySample& s : traj.samples) {
    r_lo = std::min(r_lo, s.state.r);
    r_hi = std::max(r_hi, s.state.r);
  }
  OrbitClass cls;
  switch (traj.termination) {
    case Termination::Escaped: cls = OrbitClass::Escaping; break;
    case Termination::PlungedBelowMinR: cls = OrbitClass::Plunging; break;
    default:
      cls = field.radial_static() ? classify(field, b, first.state.r)
                                  : OrbitClass::Escaping;
      break;
  }
  return {{"b", b},
          {"classification", std::string(to_string(cls))},
          {"r_min_obs", r_lo},
          {"r_max_obs", r_hi},
          {"w_o", r_hi - r_lo},
          {"T_r", nullptr},
          {"delta_phi_per_T_r", nullptr},
          {"periodicity_residual", nullptr},
          {"turning_count", static_cast<int>(turning_events(traj).size())}};
}

int worker_count(int jobs, std::size_t n) {
  int w = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp<int>(w, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
}

template <class Fn>
void run_indexed(std::size_t n, int jobs, Fn&& fn) {
  const int workers = worker_count(jobs, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

int cmd_trace(const json& config, const std::filesystem::path& out_dir) {
  SceneConfig cfg = parse_scene_config(config);
  const RayState launch = resolve_launch(cfg.launch, *cfg.field);
  if (!cfg.escape_r_given) {
    cfg.integrator.escape_r = default_escape_radius(*cfg.field, launch.r);
  }

  const Trajectory traj = integrate(launch, *cfg.field, cfg.integrator);

  if (cfg.outputs.trajectory_csv) {
    write_file(out_dir, *cfg.outputs.trajectory_csv, trajectory_to_csv(traj));
  }
  if (cfg.outputs.summary_json) {
    const auto summary = summarize_orbit(traj);
    json j = summary ? orbit_summary_to_json(*summary)
                     : fallback_summary(traj, *cfg.field);
    j["termination"] = std::string(to_string(traj.termination));
    j["null_correction"] = traj.null_correction;
    j["samples"] = traj.samples.size();
    if (traj.termination == Termination::Escaped) {
      j["escape_tau"] = traj.tau_end();
    }
    write_file(out_dir, *cfg.outputs.summary_json, j.dump(2) + "\n");
  }
  if (cfg.outputs.plot_svg) {
    write_file(out_dir, *cfg.outputs.plot_svg, trace_figure(traj, *cfg.field));
  }
  if (traj.termination == Termination::StepFailure) {
    std::cerr << "trace: integration failed (step-size underflow or step cap)\n";
    return kNumericalFailure;
  }
  return kOk;
}

int cmd_design(const json& config, const std::filesystem::path& out_dir) {
  const DesignConfig cfg = parse_design_config(config);

  DesignOutcome outcome;
  try {
    outcome = design_gaussian_trap(cfg.problem);
  } catch (const std::invalid_argument& e) {
    throw JsonSchemaError("config", e.what());
  }

  json out = design_outcome_to_json(outcome);
  out["problem"] = design_problem_to_json(cfg.problem);

  json verification = nullptr;
  if (outcome.feasible()) {
    verification = design_verification_to_json(
        verify_design(*outcome.solution, cfg.problem));
  }
  write_file(out_dir, cfg.outcome_path.value_or("solution.json"),
             out.dump(2) + "\n");
  write_file(out_dir, cfg.verification_path.value_or("verification.json"),
             verification.dump(2) + "\n");

  if (!outcome.feasible()) {
    std::cerr << "design: infeasible: " << outcome.failure_reason << "\n";
    return kInfeasible;
  }
  return kOk;
}

namespace {

SweepRow sweep_point(const SweepConfig& cfg, double value) {
  SweepRow row{cfg.n_a, cfg.n_c, cfg.sigma,
               std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(), "NoTrap"};
  if (cfg.parameter == "n_c") row.n_c = value;
  if (cfg.parameter == "sigma") row.sigma = value;

  FieldPtr field;
  try {
    field = make_gaussian(row.n_a, row.n_c, row.sigma);
  } catch (const std::invalid_argument&) {
    row.classification = "InvalidField";
    return row;
  }
  const auto band = trapped_band(*field);
  if (!band) return row;  // NoTrap

  row.b = (cfg.parameter == "b") ? value : 0.5 * (band->b_lo + band->b_hi);
  const auto tr = turning_radii(*field, row.b);
  if (!tr) {
    row.classification = "Escaping";  // b outside the band: no bound annulus
    return row;
  }

  const RayState launch = launch_tangential(*field, tr->r_min, +1);
  const ConservedSet cs = conserved_quantities(launch, *field);
  const auto t_r = radial_period_quadrature(*field, cs.L / cs.C, cs.C);

  IntegrateOptions opts = cfg.integrator;
  const double period = t_r.value_or(10.0);
  opts.max_tau = launch.tau + 12.0 * period;
  opts.sample_interval = period / 64.0;
  opts.escape_r = default_escape_radius(*field, launch.r);

  const Trajectory traj = integrate(launch, *field, opts);
  const auto summary = summarize_orbit(traj);
  if (summary) {
    row.r_min = summary->r_min_obs;
    row.r_max = summary->r_max_obs;
    row.w_o = summary->w_o;
    row.classification = std::string(to_string(summary->classification));
  } else {
    double r_lo = launch.r, r_hi = launch.r;
    for (const TrajectorySample& s : traj.samples) {
      r_lo = std::min(r_lo, s.state.r);
      r_hi = std::max(r_hi, s.state.r);
    }
    row.r_min = r_lo;
    row.r_max = r_hi;
    row.w_o = r_hi - r_lo;
    row.classification =
        traj.termination == Termination::PlungedBelowMinR ? "Plunging"
                                                          : "Escaping";
  }
  return row;
}

}  // namespace

int cmd_sweep(const json& config, const std::filesystem::path& out_dir,
              int jobs) {
  SweepConfig cfg = parse_sweep_config(config);
  if (!cfg.integrator_given) {
    cfg.integrator = IntegrateOptions{};
  }

  std::vector<SweepRow> rows(cfg.values.size());
  run_indexed(cfg.values.size(), jobs,
              [&](std::size_t i) { rows[i] = sweep_point(cfg, cfg.values[i]); });

  write_file(out_dir, cfg.csv_path.value_or("sweep.csv"),
             sweep_rows_to_csv(rows));
  if (cfg.svg_path) {
    write_file(out_dir, *cfg.svg_path, sweep_figure(rows, cfg.parameter));
  }
  return kOk;
}

int cmd_perturb(const json& config, const std::filesystem::path& out_dir,
                int jobs, std::optional<std::uint64_t> seed_override) {
  PerturbConfig cfg = parse_perturb_config(config);
  if (seed_override) cfg.seed = *seed_override;

  RayState launch;
  if (cfg.launch_r0) {
    launch = launch_tangential(*cfg.field, *cfg.launch_r0, cfg.sense);
  } else {
    // mid-band tangential reference launch
    if (!cfg.field->radial_static()) {
      throw JsonSchemaError("config.launch",
                            "required: the field is not radial static, so no "
                            "mid-band launch can be derived");
    }
    const auto band = trapped_band(*cfg.field);
    if (!band) {
      throw JsonSchemaError("config.field",
                            "no trapped band exists; specify launch.r0");
    }
    const double b = 0.5 * (band->b_lo + band->b_hi);
    const auto tr = turning_radii(*cfg.field, b);
    launch = launch_tangential(*cfg.field, tr->r_min, cfg.sense);
  }

  ScanTable table;
  try {
    table = threshold_scan(cfg.field, launch, cfg.amplitudes, cfg.shape,
                           cfg.seed, jobs);
  } catch (const std::invalid_argument& e) {
    throw JsonSchemaError("config", e.what());
  }

  write_file(out_dir, cfg.csv_path.value_or("scan.csv"), scan_to_csv(table));
  json j = scan_table_to_json(table);
  j["periods"] = cfg.periods;
  write_file(out_dir, cfg.json_path.value_or("scan.json"), j.dump(2) + "\n");
  if (cfg.svg_path) {
    write_file(out_dir, *cfg.svg_path, perturb_figure(table));
  }
  return kOk;
}

}  // namespace lighttrap::cli
