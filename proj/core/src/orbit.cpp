#include "lighttrap/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lighttrap/roots.hpp"

namespace lighttrap {

namespace {

constexpr std::size_t kCriticalGridPoints = 512;
constexpr double kBisectTol = 1e-12;

void require_radial_static(const IndexField& field, const char* who) {
  if (!field.radial_static()) {
    throw std::invalid_argument(std::string(who) +
                                ": field must be radial and static");
  }
}

double resolve_search_max(const IndexField& field, double r_search_max) {
  return (r_search_max > 0.0) ? r_search_max : 30.0 * field.length_scale();
}

}  // namespace

std::string_view to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Trapped: return "Trapped";
    case OrbitClass::Escaping: return "Escaping";
    case OrbitClass::Plunging: return "Plunging";
    case OrbitClass::Circular: return "Circular";
  }
  return "Unknown";
}

double h_profile(const IndexField& field, double r) {
  require_radial_static(field, "h_profile");
  return field.sample(r, 0.0, 0.0, 0.0).n * r;
}

double h_profile_slope(const IndexField& field, double r) {
  require_radial_static(field, "h_profile_slope");
  const FieldSample s = field.sample(r, 0.0, 0.0, 0.0);
  return s.n + r * s.dn_dr;
}

std::optional<CriticalRadii> find_critical_radii(const IndexField& field,
                                                 double r_search_max) {
  require_radial_static(field, "find_critical_radii");
  const double r_hi = resolve_search_max(field, r_search_max);
  const double r_lo = 1e-3 * field.length_scale();
  if (!(r_hi > r_lo)) {
    throw std::invalid_argument("find_critical_radii: search range is empty");
  }
  auto dh = [&](double r) { return h_profile_slope(field, r); };
  const auto brackets =
      scan_sign_changes(dh, log_grid(r_lo, r_hi, kCriticalGridPoints));

  std::optional<double> r_m, r_v;
  for (const Bracket& br : brackets) {
    const double root = bisect(dh, br.lo, br.hi, kBisectTol);
    const bool is_max = br.f_lo > 0.0;  // dh falls through zero at a maximum
    if (is_max && !r_m) {
      r_m = root;
    } else if (!is_max && r_m && !r_v && root > *r_m) {
      r_v = root;
    }
  }
  if (!r_m) return std::nullopt;
  return CriticalRadii{*r_m, r_v};
}

std::optional<TrappedBand> trapped_band(const IndexField& field,
                                        double r_search_max) {
  const auto crit = find_critical_radii(field, r_search_max);
  if (!crit) return std::nullopt;
  const double b_hi = h_profile(field, crit->r_m);
  const double b_lo = crit->r_v ? h_profile(field, *crit->r_v) : 0.0;
  return TrappedBand{b_lo, b_hi};
}

std::optional<TurningRadii> turning_radii(const IndexField& field, double b,
                                          double r_search_max) {
  require_radial_static(field, "turning_radii");
  const auto crit = find_critical_radii(field, r_search_max);
  if (!crit) return std::nullopt;
  const double r_m = crit->r_m;
  const double b_hi = h_profile(field, r_m);
  const double b_lo = crit->r_v ? h_profile(field, *crit->r_v) : 0.0;
  const double babs = std::abs(b);
  if (babs > b_hi) return std::nullopt;
  if (babs == b_hi) return TurningRadii{r_m, r_m};  // tangent circular orbit
  if (babs <= b_lo) return std::nullopt;

  auto g = [&](double r) { return h_profile(field, r) - babs; };

  // Inner root: walk the bracket down until h < |b|.
  double lo = r_m;
  for (int i = 0; i < 300 && g(lo) >= 0.0; ++i) lo *= 0.5;
  const double r_min = bisect(g, lo, r_m, kBisectTol);

  // Outer root: the valley bounds it; without a valley h decays to zero.
  double hi;
  if (crit->r_v) {
    hi = *crit->r_v;
  } else {
    hi = 2.0 * r_m;
    for (int i = 0; i < 300 && g(hi) >= 0.0; ++i) hi *= 2.0;
  }
  const double r_max = bisect(g, r_m, hi, kBisectTol);
  return TurningRadii{r_min, r_max};
}

RegionEdges allowed_region(const IndexField& field, double b, double r_launch,
                           double r_search_max) {
  require_radial_static(field, "allowed_region");
  if (!(r_launch > 0.0)) {
    throw std::invalid_argument("allowed_region: r_launch must be > 0");
  }
  const double babs = std::abs(b);
  const double scale = field.length_scale();
  const double r_hi = std::max(resolve_search_max(field, r_search_max),
                               2.0 * r_launch);
  auto g = [&](double r) { return h_profile(field, r) - babs; };

  const double g0 = g(r_launch);
  const double g_scale = std::max(babs, h_profile(field, r_launch));
  const double boundary_tol = 1e-12 * std::max(1.0, g_scale);

  bool outward_ok, inward_ok;
  if (std::abs(g0) <= boundary_tol) {
    // Tangential launch: r_launch is itself a turning point. Probe which side
    // the ray can move to.
    outward_ok = g(r_launch * (1.0 + 1e-6)) > 0.0;
    inward_ok = g(r_launch * (1.0 - 1e-6)) > 0.0;
    if (!outward_ok && !inward_ok) return {r_launch, r_launch};  // circular
  } else if (g0 > 0.0) {
    outward_ok = inward_ok = true;
  } else {
    throw std::invalid_argument(
        "allowed_region: h(r_launch) < |b|; no ray with this b passes r_launch");
  }

  RegionEdges edges{r_launch, r_launch};

  if (outward_ok) {
    const double start = r_launch * (1.0 + 1e-9);
    auto grid = log_grid(start, r_hi, 4096);
    const auto brs = scan_sign_changes(g, grid);
    edges.hi = std::numeric_limits<double>::infinity();
    for (const Bracket& br : brs) {
      if (br.f_lo > 0.0 && br.f_hi < 0.0) {
        edges.hi = bisect(g, br.lo, br.hi, kBisectTol);
        break;
      }
    }
  }
  if (inward_ok) {
    const double stop = r_launch * (1.0 - 1e-9);
    const double floor = 1e-12 * scale;
    auto grid = log_grid(floor, stop, 4096);
    const auto brs = scan_sign_changes(g, grid);
    edges.lo = 0.0;
    for (auto it = brs.rbegin(); it != brs.rend(); ++it) {
      if (it->f_lo < 0.0 && it->f_hi > 0.0) {
        edges.lo = bisect(g, it->lo, it->hi, kBisectTol);
        break;
      }
    }
  }
  return edges;
}

OrbitClass classify(const IndexField& field, double b, double r_launch,
                    double escape_r) {
  require_radial_static(field, "classify");
  const double babs = std::abs(b);
  double probe_max = 30.0 * field.length_scale();
  if (std::isfinite(escape_r)) probe_max = std::max(probe_max, 2.0 * escape_r);

  const auto crit = find_critical_radii(field, probe_max);
  if (crit) {
    const double b_hi = h_profile(field, crit->r_m);
    if (std::abs(babs - b_hi) <= 1e-9 * b_hi &&
        std::abs(r_launch - crit->r_m) <= 1e-6 * std::max(crit->r_m, 1.0)) {
      return OrbitClass::Circular;
    }
    const double b_lo = crit->r_v ? h_profile(field, *crit->r_v) : 0.0;
    if (babs > b_lo && babs < b_hi) {
      const auto tr = turning_radii(field, b, probe_max);
      if (tr) {
        const double eps = 1e-9 * (1.0 + r_launch);
        if (r_launch >= tr->r_min - eps && r_launch <= tr->r_max + eps) {
          return OrbitClass::Trapped;
        }
      }
    }
  }

  const RegionEdges region = allowed_region(field, b, r_launch, probe_max);
  if (region.hi >= escape_r) return OrbitClass::Escaping;
  if (region.lo <= 0.0) return OrbitClass::Plunging;
  return OrbitClass::Trapped;
}

std::optional<double> circular_orbit_radius(const IndexField& field,
                                            double r_search_max) {
  const auto crit = find_critical_radii(field, r_search_max);
  if (!crit) return std::nullopt;
  return crit->r_m;
}

// ---- trajectory-side analysis ----

std::vector<TurningEvent> turning_events(const Trajectory& traj) {
  std::vector<TurningEvent> events;
  constexpr int kSub = 8;
  auto push_event = [&](const DenseStep& step, double tau, bool is_min) {
    const double dedupe = 1e-9 * (1.0 + std::abs(tau));
    if (!events.empty() && std::abs(tau - events.back().tau) <= dedupe) return;
    events.push_back({tau, step.eval_component(tau, 0),
                      step.eval_component(tau, 1), is_min});
  };

  for (const DenseStep& step : traj.steps) {
    const double span = step.tau1 - step.tau0;
    if (!(span > 0.0)) continue;
    double prev_tau = step.tau0;
    double prev_v = step.y0[4];  // dr at step start
    if (prev_v == 0.0) {
      // exact tangency at the step boundary (tangential launch)
      const double probe = step.eval_component(
          step.tau0 + span / (2.0 * kSub), 4);
      if (probe != 0.0) push_event(step, step.tau0, probe > 0.0);
    }
    for (int j = 1; j <= kSub; ++j) {
      const double tj = step.tau0 + span * static_cast<double>(j) / kSub;
      const double v = (j == kSub) ? step.y1[4] : step.eval_component(tj, 4);
      if (prev_v * v < 0.0) {
        const double tau_root = bisect(
            [&](double x) { return step.eval_component(x, 4); }, prev_tau, tj,
            1e-13 * std::max(1.0, std::abs(tj)));
        push_event(step, tau_root, prev_v < 0.0);
      } else if (v == 0.0 && prev_v != 0.0 && j < kSub) {
        push_event(step, tj, prev_v < 0.0);
      }
      prev_tau = tj;
      prev_v = v;
    }
  }
  return events;
}

std::optional<OrbitSummary> summarize_orbit(const Trajectory& traj) {
  const auto events = turning_events(traj);
  if (events.size() < 3) return std::nullopt;

  double sum_min = 0.0, sum_max = 0.0;
  int n_min = 0, n_max = 0;
  for (const TurningEvent& e : events) {
    if (e.is_min) {
      sum_min += e.r;
      ++n_min;
    } else {
      sum_max += e.r;
      ++n_max;
    }
  }
  if (n_min == 0 || n_max == 0) return std::nullopt;

  OrbitSummary out;
  out.turning_count = static_cast<int>(events.size());
  out.r_min_obs = sum_min / n_min;
  out.r_max_obs = sum_max / n_max;
  out.w_o = out.r_max_obs - out.r_min_obs;

  // period statistics from same-sign event spacings
  std::vector<double> periods;
  std::vector<double> advances;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (events[j].is_min == events[i].is_min) {
        periods.push_back(events[j].tau - events[i].tau);
        advances.push_back(std::abs(events[j].phi - events[i].phi));
        break;
      }
    }
  }
  if (periods.empty()) return std::nullopt;
  double sum_t = 0.0, sum_a = 0.0;
  double t_min = periods.front(), t_max = periods.front();
  for (std::size_t i = 0; i < periods.size(); ++i) {
    sum_t += periods[i];
    sum_a += advances[i];
    t_min = std::min(t_min, periods[i]);
    t_max = std::max(t_max, periods[i]);
  }
  out.T_r = sum_t / static_cast<double>(periods.size());
  out.delta_phi_per_T_r = sum_a / static_cast<double>(advances.size());
  out.periodicity_residual = (t_max - t_min) / out.T_r;

  const TrajectorySample& first = traj.samples.front();
  out.b = first.conserved.L / first.conserved.C;

  switch (traj.termination) {
    case Termination::Escaped:
      out.classification = OrbitClass::Escaping;
      break;
    case Termination::PlungedBelowMinR:
      out.classification = OrbitClass::Plunging;
      break;
    default:
      out.classification = (out.w_o <= 1e-5 * out.r_min_obs)
                               ? OrbitClass::Circular
                               : OrbitClass::Trapped;
      break;
  }
  return out;
}

// ---- quadrature oracles ----

namespace {

/// Integrates f over the turning interval with r = r_min + D sin^2(theta);
/// the Jacobian D sin(2 theta) cancels the inverse square-root singularities
/// at both turning points.
template <class F>
double turning_quadrature(F&& f, double r_min, double r_max) {
  const GaussLegendre& gl = GaussLegendre::order(96);
  const double D = r_max - r_min;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double theta = 0.25 * std::numbers::pi * (gl.nodes[i] + 1.0);
    const double w = 0.25 * std::numbers::pi * gl.weights[i];
    const double r = r_min + D * std::sin(theta) * std::sin(theta);
    acc += w * f(r) * D * std::sin(2.0 * theta);
  }
  return acc;
}

}  // namespace

std::optional<double> radial_period_quadrature(const IndexField& field,
                                               double b, double gauge_C,
                                               double r_search_max) {
  const auto tr = turning_radii(field, b, r_search_max);
  if (!tr) return std::nullopt;
  if (!(tr->r_max - tr->r_min > 0.0)) return std::nullopt;
  const double babs = std::abs(b);
  const double C = std::abs(gauge_C);
  auto f = [&](double r) {
    const double h = h_profile(field, r);
    const double g = std::max(h * h - babs * babs, 0.0);
    return (g > 0.0) ? r / (C * std::sqrt(g)) : 0.0;
  };
  return 2.0 * turning_quadrature(f, tr->r_min, tr->r_max);
}

std::optional<double> azimuthal_advance_quadrature(const IndexField& field,
                                                   double b,
                                                   double r_search_max) {
  const auto tr = turning_radii(field, b, r_search_max);
  if (!tr) return std::nullopt;
  if (!(tr->r_max - tr->r_min > 0.0)) return std::nullopt;
  const double babs = std::abs(b);
  auto f = [&](double r) {
    const double h = h_profile(field, r);
    const double g = std::max(h * h - babs * babs, 0.0);
    return (g > 0.0) ? babs / (r * std::sqrt(g)) : 0.0;
  };
  return 2.0 * turning_quadrature(f, tr->r_min, tr->r_max);
}

}  // namespace lighttrap
