#include "lighttrap/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "lighttrap/format.hpp"
#include "lighttrap/roots.hpp"

namespace lighttrap {

namespace {

using Vec8 = std::array<double, 8>;
// component order: r, phi, z, t, dr, dphi, dz, dt

Vec8 to_vec(const RayState& s) {
  return {s.r, s.phi, s.z, s.t, s.dr, s.dphi, s.dz, s.dt};
}

RayState to_state(double tau, const Vec8& y) {
  return {tau, y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]};
}

/// Evaluates the ray equations; false when the point leaves the valid chart
/// (r at or below the floor, n <= 0, or any non-finite value).
bool rhs_eval(const IndexField& field, const Vec8& y, Vec8& f) {
  const double r = y[0];
  if (!(r > kRadiusFloor) || !std::isfinite(r)) return false;
  const FieldSample s = field.sample(r, y[1], y[2], y[3]);
  if (!(s.n > 0.0) || !std::isfinite(s.n)) return false;
  const double dr = y[4], dphi = y[5], dz = y[6], dt = y[7];
  const double n3 = s.n * s.n * s.n;
  f[0] = dr;
  f[1] = dphi;
  f[2] = dz;
  f[3] = dt;
  f[4] = r * dphi * dphi + dt * dt * s.dn_dr / n3;
  f[5] = (-2.0 * r * dr * dphi + dt * dt * s.dn_dphi / n3) / (r * r);
  f[6] = dt * dt * s.dn_dz / n3;
  f[7] = dt * (dt * s.dn_dt + 2.0 * (dz * s.dn_dz + dphi * s.dn_dphi + dr * s.dn_dr)) / s.n;
  for (double v : f) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                 kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0,
                 kA74 = 125.0 / 192.0, kA75 = -2187.0 / 6784.0,
                 kA76 = 11.0 / 84.0;
// b(5th) - b(4th), applied to k1..k7 for the embedded error estimate
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct StageWork {
  Vec8 k1, k2, k3, k4, k5, k6, k7, ytmp, y1, yerr;
};

/// One trial step from (y0, k1 = f(y0)) with size h. Returns false when any
/// stage leaves the valid chart. On success fills y1, k7 = f(y1), and the
/// scaled error norm.
bool try_step(const IndexField& field, const Vec8& y0, double h, StageWork& w,
              double rel_tol, double abs_tol, double& err_norm) {
  auto stage = [&](const Vec8& y, Vec8& k) { return rhs_eval(field, y, k); };
  for (int i = 0; i < 8; ++i) w.ytmp[i] = y0[i] + h * kA21 * w.k1[i];
  if (!stage(w.ytmp, w.k2)) return false;
  for (int i = 0; i < 8; ++i)
    w.ytmp[i] = y0[i] + h * (kA31 * w.k1[i] + kA32 * w.k2[i]);
  if (!stage(w.ytmp, w.k3)) return false;
  for (int i = 0; i < 8; ++i)
    w.ytmp[i] = y0[i] + h * (kA41 * w.k1[i] + kA42 * w.k2[i] + kA43 * w.k3[i]);
  if (!stage(w.ytmp, w.k4)) return false;
  for (int i = 0; i < 8; ++i)
    w.ytmp[i] = y0[i] + h * (kA51 * w.k1[i] + kA52 * w.k2[i] + kA53 * w.k3[i] +
                             kA54 * w.k4[i]);
  if (!stage(w.ytmp, w.k5)) return false;
  for (int i = 0; i < 8; ++i)
    w.ytmp[i] = y0[i] + h * (kA61 * w.k1[i] + kA62 * w.k2[i] + kA63 * w.k3[i] +
                             kA64 * w.k4[i] + kA65 * w.k5[i]);
  if (!stage(w.ytmp, w.k6)) return false;
  for (int i = 0; i < 8; ++i)
    w.y1[i] = y0[i] + h * (kA71 * w.k1[i] + kA73 * w.k3[i] + kA74 * w.k4[i] +
                           kA75 * w.k5[i] + kA76 * w.k6[i]);
  if (!stage(w.y1, w.k7)) return false;  // FSAL stage

  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    w.yerr[i] = h * (kE1 * w.k1[i] + kE3 * w.k3[i] + kE4 * w.k4[i] +
                     kE5 * w.k5[i] + kE6 * w.k6[i] + kE7 * w.k7[i]);
    const double sk =
        abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(w.y1[i]));
    const double q = w.yerr[i] / sk;
    sum += q * q;
  }
  err_norm = std::sqrt(sum / 8.0);
  return std::isfinite(err_norm);
}

double initial_step_size(const IndexField& field, const Vec8& y0,
                         const Vec8& f0, double rel_tol, double abs_tol,
                         double span) {
  auto rms_scaled = [&](const Vec8& v) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double sk = abs_tol + rel_tol * std::abs(y0[i]);
      const double q = v[i] / sk;
      s += q * q;
    }
    return std::sqrt(s / 8.0);
  };
  const double d0 = rms_scaled(y0);
  const double d1 = rms_scaled(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vec8 y1, f1;
  for (int i = 0; i < 8; ++i) y1[i] = y0[i] + h0 * f0[i];
  double h1 = h0;
  if (rhs_eval(field, y1, f1)) {
    double d2 = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double sk = abs_tol + rel_tol * std::abs(y0[i]);
      const double q = (f1[i] - f0[i]) / sk;
      d2 += q * q;
    }
    d2 = std::sqrt(d2 / 8.0) / h0;
    const double dmax = std::max(d1, d2);
    h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                         : std::pow(0.01 / dmax, 0.2);
  }
  return std::max(std::min({100.0 * h0, h1, span}), 1e-12);
}

}  // namespace

// ---- public pointwise operations ----

RayAccel eikonal_rhs(const RayState& state, const IndexField& field) {
  if (!(state.r > kRadiusFloor)) {
    throw std::domain_error("eikonal_rhs: radius " + std::to_string(state.r) +
                            " is at or below the coordinate floor");
  }
  Vec8 f;
  if (!rhs_eval(field, to_vec(state), f)) {
    throw std::domain_error("eikonal_rhs: state outside the valid chart");
  }
  return {f[4], f[5], f[6], f[7]};
}

RayState normalize_null(const RayState& state, const IndexField& field) {
  const double cross = state.r * state.dphi;
  const double s2 = state.dr * state.dr + cross * cross + state.dz * state.dz;
  if (!(s2 > 0.0)) {
    throw std::domain_error("normalize_null: spatial speed is zero (degenerate ray)");
  }
  const FieldSample fs = field.sample(state.r, state.phi, state.z, state.t);
  RayState out = state;
  out.dt = fs.n * std::sqrt(s2);
  return out;
}

ConservedSet conserved_quantities(const RayState& state, const IndexField& field) {
  const FieldSample fs = field.sample(state.r, state.phi, state.z, state.t);
  const double n2 = fs.n * fs.n;
  const double cross = state.r * state.dphi;
  const double s2 = state.dr * state.dr + cross * cross + state.dz * state.dz;
  return {state.r * state.r * state.dphi, state.dt / n2, state.dz,
          state.dt * state.dt / n2 - s2};
}

double null_residual_relative(const RayState& state, const FieldSample& at) {
  const double cross = state.r * state.dphi;
  const double s2 = state.dr * state.dr + cross * cross + state.dz * state.dz;
  const double tt = state.dt * state.dt / (at.n * at.n);
  return std::abs(tt - s2) / tt;
}

RayState launch_tangential(const IndexField& field, double r0, int sense) {
  if (!(r0 > 0.0)) {
    throw std::domain_error("launch_tangential: launch radius must be > 0");
  }
  if (sense != 1 && sense != -1) {
    throw std::invalid_argument("launch_tangential: sense must be +1 or -1");
  }
  const double n = field.sample(r0, 0.0, 0.0, 0.0).n;
  RayState s;
  s.r = r0;
  s.dphi = static_cast<double>(sense) / (n * r0);
  s.dt = 1.0;  // affine gauge: t'(0) = 1; the state is null by construction
  return s;
}

double default_escape_radius(const IndexField& field, double r_launch) {
  return std::max(10.0 * field.length_scale(), 2.0 * r_launch);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxTau: return "MaxTau";
    case Termination::Escaped: return "Escaped";
    case Termination::PlungedBelowMinR: return "PlungedBelowMinR";
    case Termination::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

// ---- dense output ----

std::array<double, 8> DenseStep::eval(double tau) const {
  const double h = tau1 - tau0;
  const double th = (h > 0.0) ? (tau - tau0) / h : 0.0;
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  std::array<double, 8> y;
  for (int i = 0; i < 8; ++i) {
    y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }
  return y;
}

double DenseStep::eval_component(double tau, int i) const {
  const double h = tau1 - tau0;
  const double th = (h > 0.0) ? (tau - tau0) / h : 0.0;
  const double th2 = th * th, th3 = th2 * th;
  return (2.0 * th3 - 3.0 * th2 + 1.0) * y0[i] +
         (th3 - 2.0 * th2 + th) * h * f0[i] +
         (-2.0 * th3 + 3.0 * th2) * y1[i] + (th3 - th2) * h * f1[i];
}

RayState Trajectory::state_at(double tau) const {
  if (steps.empty()) return samples.front().state;
  if (tau <= steps.front().tau0) return to_state(steps.front().tau0, steps.front().y0);
  if (tau >= steps.back().tau1) return to_state(steps.back().tau1, steps.back().y1);
  auto it = std::upper_bound(
      steps.begin(), steps.end(), tau,
      [](double v, const DenseStep& s) { return v < s.tau1; });
  if (it == steps.end()) --it;
  return to_state(tau, it->eval(tau));
}

// ---- integration ----

Trajectory integrate(const RayState& state0, const IndexField& field,
                     const IntegrateOptions& opts) {
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: tolerances must be > 0");
  }
  if (!(opts.max_tau > state0.tau)) {
    throw std::invalid_argument("integrate: max_tau must exceed the initial tau");
  }
  if (!(opts.sample_interval > 0.0)) {
    throw std::invalid_argument("integrate: sample_interval must be > 0");
  }

  Trajectory traj;

  // Enforce the null constraint up front and remember how far off we were.
  RayState start = normalize_null(state0, field);
  traj.null_correction =
      std::abs(start.dt - state0.dt) / std::max(std::abs(start.dt), 1e-300);

  const double tau_start = start.tau;
  constexpr double kPhiBound = std::numbers::pi / 8.0;

  auto record_sample = [&](const RayState& s) {
    const FieldSample fs = field.sample(s.r, s.phi, s.z, s.t);
    traj.samples.push_back({s, fs, conserved_quantities(s, field)});
  };

  auto interp_state = [&](double tau) -> RayState {
    // only called for tau inside already-appended steps
    auto it = std::upper_bound(
        traj.steps.begin(), traj.steps.end(), tau,
        [](double v, const DenseStep& s) { return v < s.tau1; });
    if (it == traj.steps.end()) --it;
    return to_state(tau, it->eval(tau));
  };

  // Keeps consecutive stored samples within pi/8 in phi by inserting
  // interpolated midpoints until every gap is below the bound.
  std::function<void(const RayState&, int)> push_sample =
      [&](const RayState& s, int depth) {
        if (!traj.samples.empty() && depth < 48) {
          const RayState& last = traj.samples.back().state;
          if (std::abs(s.phi - last.phi) >= kPhiBound && s.tau > last.tau) {
            push_sample(interp_state(0.5 * (last.tau + s.tau)), depth + 1);
            push_sample(s, depth + 1);
            return;
          }
        }
        record_sample(s);
      };

  record_sample(start);

  // Degenerate starts: already outside the tracked annulus.
  if (start.r >= opts.escape_r) {
    traj.termination = Termination::Escaped;
    return traj;
  }
  if (start.r <= opts.min_r) {
    traj.termination = Termination::PlungedBelowMinR;
    return traj;
  }

  Vec8 y = to_vec(start);
  Vec8 f;
  if (!rhs_eval(field, y, f)) {
    traj.termination = Termination::StepFailure;
    return traj;
  }

  double tau = tau_start;
  double h = initial_step_size(field, y, f, opts.rel_tol, opts.abs_tol,
                               opts.max_tau - tau_start);
  double next_sample = tau_start + opts.sample_interval;

  StageWork w;
  w.k1 = f;

  constexpr double kSafety = 0.9, kMinScale = 0.2, kMaxScale = 6.0;
  constexpr double kAlpha = 0.17, kBeta = 0.04;
  // Steering the controller toward a fraction of the acceptance threshold
  // buys an order of magnitude in conservation drift for ~1.5x the steps.
  constexpr double kTargetErr = 0.15;
  double err_old = kTargetErr;
  bool rejected_last = false;
  bool done = false;

  auto finish = [&](Termination why) {
    traj.termination = why;
    done = true;
  };

  while (!done) {
    if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps) {
      finish(Termination::StepFailure);
      break;
    }
    bool clamped = false;
    if (tau + h >= opts.max_tau) {
      h = opts.max_tau - tau;
      clamped = true;
    }
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(tau));
    if (h <= h_floor) {
      finish(Termination::StepFailure);
      break;
    }

    double err = 0.0;
    const bool ok =
        try_step(field, y, h, w, opts.rel_tol, opts.abs_tol, err);

    if (!ok) {
      ++traj.rejected_steps;
      rejected_last = true;
      h *= 0.5;
      continue;
    }
    if (err > 1.0) {
      ++traj.rejected_steps;
      rejected_last = true;
      h *= std::max(kSafety * std::pow(err, -kAlpha), kMinScale);
      continue;
    }

    // accepted
    ++traj.accepted_steps;
    const double tau1 = clamped ? opts.max_tau : tau + h;
    DenseStep step{tau, tau1, y, w.k1, w.y1, w.k7};

    // Termination events inside the step, earliest wins. r is monitored on a
    // sub-grid since the crossing may not persist to the endpoint.
    double event_tau = std::numeric_limits<double>::infinity();
    Termination event_kind = Termination::MaxTau;
    const bool watch_escape = std::isfinite(opts.escape_r);
    double prev_tau = step.tau0;
    double prev_r = step.y0[0];
    constexpr int kSub = 8;
    for (int j = 1; j <= kSub; ++j) {
      const double tj =
          step.tau0 + (step.tau1 - step.tau0) * static_cast<double>(j) / kSub;
      const double rj = (j == kSub) ? step.y1[0] : step.eval_component(tj, 0);
      if (watch_escape && prev_r < opts.escape_r && rj >= opts.escape_r) {
        const double tt = bisect(
            [&](double x) { return step.eval_component(x, 0) - opts.escape_r; },
            prev_tau, tj, 1e-13 * std::max(1.0, std::abs(tj)));
        event_tau = tt;
        event_kind = Termination::Escaped;
        break;
      }
      if (prev_r > opts.min_r && rj <= opts.min_r) {
        const double tt = bisect(
            [&](double x) { return step.eval_component(x, 0) - opts.min_r; },
            prev_tau, tj, 1e-13 * std::max(1.0, std::abs(tj)));
        event_tau = tt;
        event_kind = Termination::PlungedBelowMinR;
        break;
      }
      prev_tau = tj;
      prev_r = rj;
    }

    if (std::isfinite(event_tau)) {
      // truncate the step at the event
      Vec8 ye = step.eval(event_tau);
      Vec8 fe;
      if (!rhs_eval(field, ye, fe)) fe = step.f1;
      step.tau1 = event_tau;
      step.y1 = ye;
      step.f1 = fe;
      traj.steps.push_back(step);
      while (next_sample < event_tau - 1e-12 * std::max(1.0, std::abs(event_tau))) {
        push_sample(interp_state(next_sample), 0);
        next_sample += opts.sample_interval;
      }
      push_sample(to_state(event_tau, ye), 0);
      finish(event_kind);
      break;
    }

    traj.steps.push_back(step);
    while (next_sample <= tau1 + 1e-12 * std::max(1.0, std::abs(tau1))) {
      push_sample(interp_state(next_sample), 0);
      next_sample += opts.sample_interval;
    }

    y = w.y1;
    w.k1 = w.k7;  // FSAL
    tau = tau1;

    if (clamped || tau >= opts.max_tau) {
      const double tau_last = traj.samples.back().state.tau;
      if (tau - tau_last > 1e-12 * std::max(1.0, std::abs(tau))) {
        push_sample(to_state(tau, y), 0);
      }
      finish(Termination::MaxTau);
      break;
    }

    // PI step-size controller aimed at kTargetErr
    double scale;
    if (err == 0.0) {
      scale = kMaxScale;
    } else {
      scale = kSafety * std::pow(err / kTargetErr, -kAlpha) *
              std::pow(err_old / kTargetErr, kBeta);
      scale = std::clamp(scale, kMinScale, kMaxScale);
    }
    if (rejected_last) scale = std::min(scale, 1.0);
    h *= scale;
    err_old = std::max(err, 1e-6);
    rejected_last = false;
  }

  // StepFailure: make sure the last accepted point is recorded.
  if (traj.termination == Termination::StepFailure && !traj.samples.empty()) {
    const double tau_last = traj.samples.back().state.tau;
    if (tau - tau_last > 1e-12 * std::max(1.0, std::abs(tau))) {
      push_sample(to_state(tau, y), 0);
    }
  }
  return traj;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "tau,r,phi,z,t,dr,dphi,dz,dt,n,L,C,pz,null_residual\n";
  for (const TrajectorySample& s : traj.samples) {
    const double vals[] = {s.state.tau, s.state.r,  s.state.phi, s.state.z,
                           s.state.t,   s.state.dr, s.state.dphi, s.state.dz,
                           s.state.dt,  s.field.n,  s.conserved.L,
                           s.conserved.C, s.conserved.p_z, s.conserved.N};
    for (int i = 0; i < 14; ++i) {
      if (i) out.push_back(',');
      append_double(out, vals[i]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace lighttrap
