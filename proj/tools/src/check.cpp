#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "lighttrap/orbit.hpp"
#include "lighttrap/roots.hpp"

namespace lighttrap::cli {

namespace {

/// Fault-injection fixture: flips the sign of dn_dr, corrupting the radial
/// force term while leaving n itself intact. Breaks null-constraint
/// conservation immediately.
class GradientSignFlippedField final : public IndexField {
 public:
  explicit GradientSignFlippedField(FieldPtr base) : base_(std::move(base)) {}

  bool radial_static() const override { return base_->radial_static(); }
  double length_scale() const override { return base_->length_scale(); }

 protected:
  FieldSample eval(double r, double phi, double z, double t) const override {
    FieldSample s = base_->sample(r, phi, z, t);
    s.dn_dr = -s.dn_dr;
    return s;
  }

 private:
  FieldPtr base_;
};

struct SuiteResult {
  std::string name;
  bool pass;
  std::string detail;
};

SuiteResult check_gradients() {
  double worst = 0.0;
  const std::vector<FieldPtr> fields = {
      make_gaussian(3.8, 1.0, 1.0),
      make_switchable(GaussianRadialField(3.8, 1.0, 1.0), 1.0, 2.0)};
  for (const FieldPtr& f : fields) {
    for (double r : log_grid(1e-3, 10.0, 16)) {
      for (double phi : {0.0, 1.5, 3.9}) {
        for (double t : {0.0, 1.7, 4.0}) {
          worst = std::max(worst, gradient_fd_check(*f, r, phi, 0.0, t, 1e-5));
        }
      }
    }
  }
  std::ostringstream os;
  os << "max scaled gradient error " << worst << " (limit 1e-6)";
  return {"field-gradients", worst <= 1e-6, os.str()};
}

SuiteResult check_null_residual(bool inject) {
  FieldPtr field = make_gaussian(3.8, 1.0, 1.0);
  if (inject) field = std::make_shared<GradientSignFlippedField>(field);

  double worst = 0.0;
  for (double r0 : {0.85, 0.95, 1.1}) {
    const RayState launch = launch_tangential(*field, r0, +1);
    IntegrateOptions opts;
    opts.max_tau = 40.0;
    opts.escape_r = 12.0;
    const Trajectory traj = integrate(launch, *field, opts);
    for (const TrajectorySample& s : traj.samples) {
      worst = std::max(worst, null_residual_relative(s.state, s.field));
    }
  }
  std::ostringstream os;
  os << "max |N| / (t'^2/n^2) = " << worst << " (limit 1e-8)";
  return {"null-residual", worst <= 1e-8, os.str()};
}

SuiteResult check_symmetry_constants() {
  const FieldPtr field = make_gaussian(3.8, 1.0, 1.0);
  const auto band = trapped_band(*field);
  const double b = 0.5 * (band->b_lo + band->b_hi);
  const auto tr = turning_radii(*field, b);
  const RayState launch = launch_tangential(*field, tr->r_min, +1);
  const ConservedSet c0 = conserved_quantities(launch, *field);

  IntegrateOptions opts;
  opts.max_tau = 5.0 * 21.3;  // five radial periods
  const Trajectory traj = integrate(launch, *field, opts);
  double drift = 0.0, z_max = 0.0;
  for (const TrajectorySample& s : traj.samples) {
    drift = std::max(drift, std::abs(s.conserved.L - c0.L) / std::abs(c0.L));
    drift = std::max(drift, std::abs(s.conserved.C - c0.C) / std::abs(c0.C));
    z_max = std::max(z_max, std::abs(s.state.z));
  }
  std::ostringstream os;
  os << "max L/C drift " << drift << " (limit 1e-8), |z| " << z_max
     << " (limit 1e-12)";
  return {"symmetry-constants", drift <= 1e-8 && z_max <= 1e-12, os.str()};
}

SuiteResult check_turning_oracle() {
  const FieldPtr field = make_gaussian(3.8, 1.0, 1.0);
  const auto band = trapped_band(*field);
  double worst = 0.0;
  for (double u : {0.3, 0.5, 0.7}) {
    const double b = band->b_lo + u * (band->b_hi - band->b_lo);
    const auto tr = turning_radii(*field, b);
    const RayState launch = launch_tangential(*field, tr->r_min, +1);
    const ConservedSet cs = conserved_quantities(launch, *field);
    const auto t_r = radial_period_quadrature(*field, cs.L / cs.C, cs.C);
    IntegrateOptions opts;
    opts.max_tau = 6.0 * t_r.value_or(20.0);
    const Trajectory traj = integrate(launch, *field, opts);
    const auto sum = summarize_orbit(traj);
    if (!sum) return {"turning-oracle", false, "insufficient turning events"};
    worst = std::max(worst, std::abs(sum->r_min_obs - tr->r_min) / tr->r_min);
    worst = std::max(worst, std::abs(sum->r_max_obs - tr->r_max) / tr->r_max);
  }
  std::ostringstream os;
  os << "max turning-radius deviation " << worst << " (limit 1e-5)";
  return {"turning-oracle", worst <= 1e-5, os.str()};
}

SuiteResult check_straight_rays() {
  const FieldPtr field = make_constant(1.4);
  RayState s0;
  s0.r = 2.0;
  s0.dr = -0.3;
  s0.dphi = 0.2;
  s0.dz = 0.1;
  s0.dt = 1.0;
  IntegrateOptions opts;
  opts.max_tau = 8.0;
  opts.sample_interval = 0.1;
  const Trajectory traj = integrate(s0, *field, opts);

  // least-squares line through x(tau): max residual
  std::vector<double> tau, x, y;
  for (const TrajectorySample& s : traj.samples) {
    tau.push_back(s.state.tau);
    x.push_back(s.state.r * std::cos(s.state.phi));
    y.push_back(s.state.r * std::sin(s.state.phi));
  }
  auto fit_residual = [](const std::vector<double>& xs,
                         const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(ys[i] - (slope * xs[i] + icept)));
    }
    return worst;
  };
  const double worst = std::max(fit_residual(tau, x), fit_residual(tau, y));
  std::ostringstream os;
  os << "max deviation from a straight line " << worst << " (limit 1e-8)";
  return {"straight-line", worst <= 1e-8, os.str()};
}

}  // namespace

int cmd_check(const std::optional<std::string>& report_path,
              const std::filesystem::path& out_dir,
              bool inject_rhs_sign_error) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<SuiteResult> results;
  results.push_back(check_gradients());
  results.push_back(check_null_residual(inject_rhs_sign_error));
  results.push_back(check_symmetry_constants());
  results.push_back(check_turning_oracle());
  results.push_back(check_straight_rays());

  bool all_pass = true;
  json report = json::object();
  for (const SuiteResult& r : results) {
    std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.name << ": " << r.detail
              << "\n";
    report[r.name] = {{"pass", r.pass}, {"detail", r.detail}};
    all_pass = all_pass && r.pass;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  std::cout << (all_pass ? "check: all suites passed"
                         : "check: FAILURES detected")
            << " (" << seconds << " s)\n";
  if (report_path) {
    report["all_pass"] = all_pass;
    write_file(out_dir, *report_path, report.dump(2) + "\n");
  }
  return all_pass ? kOk : kNumericalFailure;
}

}  // namespace lighttrap::cli
