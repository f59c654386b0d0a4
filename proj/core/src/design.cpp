#include "lighttrap/design.hpp"

#include <cmath>
#include <stdexcept>

#include "lighttrap/roots.hpp"

namespace lighttrap {

namespace {

constexpr double kSigmaBisectTol = 1e-12;
constexpr double kMarginFloor = 1e-9;

double gaussian_h(double n_a, double n_c, double sigma, double r) {
  const double u = r / sigma;
  return (n_c + (n_a - n_c) * std::exp(-u * u)) * r;
}

void validate_problem(const DesignProblem& p) {
  if (!(p.r_min_target > 0.0) || !(p.r_max_target > p.r_min_target)) {
    throw std::invalid_argument(
        "DesignProblem: need 0 < r_min_target < r_max_target (strict)");
  }
  const double n_c = p.fixed_n_c.value_or(p.n_floor);
  if (!(n_c >= 0.0)) {
    throw std::invalid_argument("DesignProblem: n_C must be >= 0");
  }
  if (!(p.n_max_material > n_c)) {
    throw std::invalid_argument(
        "DesignProblem: n_max_material must exceed the pinned n_C");
  }
}

}  // namespace

DesignOutcome design_gaussian_trap(const DesignProblem& problem) {
  validate_problem(problem);
  const double r1 = problem.r_min_target;
  const double r2 = problem.r_max_target;
  const double n_a = problem.n_max_material;
  const double n_c = problem.fixed_n_c.value_or(problem.n_floor);

  DesignOutcome out;

  // h(r1) = h(r2) as a function of sigma. Negative at both ends of the sigma
  // range (both targets on the same rising branch), positive only when the
  // peak of h sits between them, so at most two roots.
  auto mismatch = [&](double sigma) {
    return gaussian_h(n_a, n_c, sigma, r1) - gaussian_h(n_a, n_c, sigma, r2);
  };

  const auto grid = log_grid(1e-3 * r2, 1e3 * r2, 512);
  const auto brackets = scan_sign_changes(mismatch, grid);
  if (brackets.empty()) {
    out.failure_reason =
        "no sigma in [1e-3, 1e3] * r_max_target equalizes h at the two targets; "
        "the requested r_max/r_min ratio exceeds what the index contrast admits";
    return out;
  }

  for (const Bracket& br : brackets) {
    const double sigma = bisect(mismatch, br.lo, br.hi, kSigmaBisectTol);
    DesignCandidate cand{sigma, "ok"};

    const FieldPtr field = make_gaussian(n_a, n_c, sigma, problem.n_max_material);
    const double search_max = std::max(30.0 * sigma, 4.0 * r2);
    const auto crit = find_critical_radii(*field, search_max);
    if (!crit) {
      cand.verdict = "no circular-orbit radius (h monotone)";
      out.candidates.push_back(cand);
      continue;
    }
    if (!(r1 < crit->r_m && crit->r_m < r2)) {
      cand.verdict = "targets do not bracket r_m";
      out.candidates.push_back(cand);
      continue;
    }
    const double b = gaussian_h(n_a, n_c, sigma, r1);
    const double b_hi = h_profile(*field, crit->r_m);
    const double b_lo = crit->r_v ? h_profile(*field, *crit->r_v) : 0.0;
    if (!(b - b_lo > kMarginFloor) || !(b_hi - b > kMarginFloor)) {
      cand.verdict = "b not strictly inside the trapped band";
      out.candidates.push_back(cand);
      continue;
    }
    const auto tr = turning_radii(*field, b, search_max);
    if (!tr) {
      cand.verdict = "turning radii not found at the designed b";
      out.candidates.push_back(cand);
      continue;
    }
    const double tol1 = 1e-6 * r1, tol2 = 1e-6 * r2;
    if (std::abs(tr->r_min - r1) > tol1 || std::abs(tr->r_max - r2) > tol2) {
      cand.verdict = "h-roots at b do not reproduce the targets "
                     "(annulus crosses the barrier valley)";
      out.candidates.push_back(cand);
      continue;
    }

    out.candidates.push_back(cand);
    out.solution = DesignSolution{
        n_a,      n_c, sigma, b, TrappedBand{b_lo, b_hi},
        b - b_lo, b_hi - b, *tr};
    return out;
  }

  out.failure_reason = "no sigma root yields a valid trap: ";
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    if (i) out.failure_reason += "; ";
    out.failure_reason += "sigma=" + std::to_string(out.candidates[i].sigma) +
                          " -> " + out.candidates[i].verdict;
  }
  return out;
}

namespace {

/// A ray hosting an arbitrary admissible |b| at r_host: the tangential
/// fraction is sin(alpha) = |b| / h(r_host), the rest goes into inward radial
/// motion. Tangential launches are the alpha = pi/2 special case.
RayState hosted_launch(const IndexField& field, double b, double r_host) {
  const double h = h_profile(field, r_host);
  const double sin_a = std::min(std::abs(b) / h, 1.0);
  const double cos_a = std::sqrt(std::max(1.0 - sin_a * sin_a, 0.0));
  RayState s;
  s.r = r_host;
  s.dphi = sin_a / r_host;
  s.dr = -cos_a;
  s.dt = 1.0;
  return normalize_null(s, field);
}

}  // namespace

DesignVerification verify_design(const DesignSolution& solution,
                                 const DesignProblem& problem,
                                 double rel_tol, double abs_tol) {
  const FieldPtr field =
      make_gaussian(solution.n_a, solution.n_c, solution.sigma,
                    problem.n_max_material);
  const double search_max =
      std::max(30.0 * solution.sigma, 4.0 * problem.r_max_target);
  const auto band = trapped_band(*field, search_max);

  DesignVerification v{};
  v.classification = OrbitClass::Escaping;
  v.termination = Termination::MaxTau;
  v.observed = {std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
  v.w_o = std::numeric_limits<double>::quiet_NaN();
  v.turning_count = 0;

  const bool in_band =
      band && solution.b > band->b_lo && solution.b < band->b_hi;

  RayState launch;
  bool have_launch = false;
  double t_r = 10.0;
  if (in_band) {
    // Honest solutions land the tangential launch exactly on r_min_target.
    const auto tr = turning_radii(*field, solution.b, search_max);
    if (tr) {
      launch = launch_tangential(*field, tr->r_min, +1);
      have_launch = true;
      const ConservedSet cs = conserved_quantities(launch, *field);
      t_r = radial_period_quadrature(*field, cs.L / cs.C, cs.C, search_max)
                .value_or(10.0);
    }
  } else {
    // The claimed b cannot sit in the trap. Host it on the outer rising
    // branch where h still admits it and integrate: any such ray escapes.
    double r_host = 0.0;
    for (double r = 2.0 * problem.r_max_target; r < 1e6 * solution.sigma;
         r *= 1.5) {
      if (h_profile(*field, r) > std::abs(solution.b)) {
        r_host = r;
        break;
      }
    }
    if (r_host > 0.0) {
      launch = hosted_launch(*field, solution.b, r_host);
      have_launch = true;
    }
  }

  if (have_launch) {
    IntegrateOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.escape_r = default_escape_radius(*field, launch.r);
    opts.max_tau = in_band ? 12.0 * t_r : 200.0 * t_r;
    opts.sample_interval = t_r / 64.0;

    const Trajectory traj = integrate(launch, *field, opts);
    const auto summary = summarize_orbit(traj);
    v.termination = traj.termination;
    if (summary) {
      v.observed = {summary->r_min_obs, summary->r_max_obs};
      v.w_o = summary->w_o;
      v.classification = summary->classification;
      v.turning_count = summary->turning_count;
    } else {
      double r_lo = launch.r, r_hi = launch.r;
      for (const TrajectorySample& s : traj.samples) {
        r_lo = std::min(r_lo, s.state.r);
        r_hi = std::max(r_hi, s.state.r);
      }
      v.observed = {r_lo, r_hi};
      v.w_o = r_hi - r_lo;
      v.classification = (traj.termination == Termination::PlungedBelowMinR)
                             ? OrbitClass::Plunging
                             : OrbitClass::Escaping;
      v.turning_count = static_cast<int>(turning_events(traj).size());
    }
  }
  v.rel_dev_r_min =
      std::abs(v.observed.r_min - problem.r_min_target) / problem.r_min_target;
  v.rel_dev_r_max =
      std::abs(v.observed.r_max - problem.r_max_target) / problem.r_max_target;
  return v;
}

std::vector<FeasibleRegionEntry> feasible_target_region(
    double n_max_material, double n_floor,
    const std::vector<double>& sigma_grid) {
  if (sigma_grid.empty()) {
    throw std::invalid_argument("feasible_target_region: empty sigma grid");
  }
  std::vector<FeasibleRegionEntry> out;
  out.reserve(sigma_grid.size());
  for (double sigma : sigma_grid) {
    FeasibleRegionEntry e{};
    e.sigma = sigma;
    e.has_trap = false;
    if (n_max_material > n_floor && n_floor >= 0.0 && sigma > 0.0) {
      const FieldPtr field = make_gaussian(n_max_material, n_floor, sigma,
                                           n_max_material);
      const auto crit = find_critical_radii(*field, 30.0 * sigma);
      if (crit && crit->r_v) {
        e.has_trap = true;
        e.r_m = crit->r_m;
        e.r_v = *crit->r_v;
        e.b_hi = h_profile(*field, crit->r_m);
        e.b_lo = h_profile(*field, *crit->r_v);
        // innermost usable r_min: the inner h-root at the band bottom
        auto g = [&](double r) { return h_profile(*field, r) - e.b_lo; };
        double lo = crit->r_m;
        for (int i = 0; i < 300 && g(lo) >= 0.0; ++i) lo *= 0.5;
        e.r_min_at_b_lo = bisect(g, lo, crit->r_m, 1e-12);
        e.ratio_max = e.r_v / e.r_min_at_b_lo;
      } else if (crit && !crit->r_v) {
        // pure-floor profiles (n_floor = 0) trap every b in (0, b_hi); the
        // outer turning radius is unbounded as b -> 0, so the whole region
        // beyond r_m is nominally reachable.
        e.has_trap = true;
        e.r_m = crit->r_m;
        e.r_v = std::numeric_limits<double>::infinity();
        e.b_hi = h_profile(*field, crit->r_m);
        e.b_lo = 0.0;
        e.r_min_at_b_lo = 0.0;
        e.ratio_max = std::numeric_limits<double>::infinity();
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace lighttrap
