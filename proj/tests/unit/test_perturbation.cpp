#include <doctest.h>

#include <cmath>

#include "lighttrap/perturbation.hpp"
#include "lighttrap/serialize.hpp"
#include "support/oracles.hpp"

using namespace lighttrap;

namespace {

constexpr double kRefRm = 0.9859049992160012;
constexpr double kRefRv = 1.5243207902088796;
constexpr double kRefRmin = 0.8090443663128978;

// Deviation magnitudes for the default dip at r_m, s_p = 0.2, launched
// tangentially at the mid-band inner turning radius; pinned by the
// independent h-root oracle.
constexpr double kDipDw[5] = {0.002595214, 0.005532482, 0.012670754,
                              0.049305085, 0.358566043};

FieldPtr reference_field() { return make_gaussian(3.8, 1.0, 1.0); }

RayState reference_launch(const FieldPtr& f) {
  return launch_tangential(*f, kRefRmin, +1);
}

}  // namespace

TEST_CASE("zero perturbation produces exactly zero deviation") {
  const FieldPtr base = reference_field();
  const FieldPtr same =
      make_bump_perturbed(base, BumpPerturbation{0.0, kRefRm, 0.2});
  const RayState launch = reference_launch(base);

  DeviationOptions opts;
  opts.periods = 5.0;
  const DeviationReport rep = orbit_deviation(*base, *same, launch, opts);
  CHECK(rep.delta_r_min == 0.0);
  CHECK(rep.delta_r_max == 0.0);
  CHECK(rep.delta_w_o == 0.0);
  CHECK_FALSE(rep.classification_changed);
  CHECK_FALSE(rep.escape_tau.has_value());
}

TEST_CASE("preconditions: radial static base and a trapped launch") {
  const FieldPtr base = reference_field();
  const FieldPtr sw = make_switchable(GaussianRadialField(3.8, 1.0, 1.0), 1, 1);
  const RayState launch = reference_launch(base);
  CHECK_THROWS_AS(orbit_deviation(*sw, *base, launch, {}), std::invalid_argument);
  // tangential launch below the band escapes: not a valid reference orbit
  const RayState loose = launch_tangential(*base, 0.7, +1);
  CHECK_THROWS_AS(orbit_deviation(*base, *base, loose, {}), std::invalid_argument);
}

TEST_CASE("axisymmetric deviations: integration matches the h-root oracle") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  const double amp = 0.01;

  ScanShape shape;  // default dip at r_m
  const ScanTable table =
      threshold_scan(base, launch, {amp / 2, amp, 2 * amp}, shape, 11u, 1);
  REQUIRE(table.rows.size() == 3);
  REQUIRE(table.rows[1].ok);
  const DeviationReport& oracle_rep = table.rows[1].report;

  BumpPerturbation bump{-amp, kRefRm, 0.2};
  const FieldPtr pert = make_bump_perturbed(base, bump);
  DeviationOptions opts;
  opts.periods = 20.0;
  const DeviationReport int_rep = orbit_deviation(*base, *pert, launch, opts);

  CHECK(int_rep.pert_r_min ==
        doctest::Approx(oracle_rep.pert_r_min).epsilon(1e-5));
  CHECK(int_rep.pert_r_max ==
        doctest::Approx(oracle_rep.pert_r_max).epsilon(1e-5));
  CHECK(int_rep.base_r_min ==
        doctest::Approx(oracle_rep.base_r_min).epsilon(1e-5));
  CHECK(int_rep.base_r_max ==
        doctest::Approx(oracle_rep.base_r_max).epsilon(1e-5));
  CHECK_FALSE(int_rep.classification_changed);
  CHECK_FALSE(oracle_rep.classification_changed);
}

TEST_CASE("default dip scan: pinned values, monotone growth, threshold") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  const std::vector<double> amps = {0.005, 0.01, 0.02, 0.05, 0.1};

  const ScanTable table = threshold_scan(base, launch, amps, ScanShape{}, 42u);
  REQUIRE(table.rows.size() == 5);
  CHECK(table.resolved_shape.r_p == doctest::Approx(kRefRm).epsilon(1e-9));
  CHECK(table.resolved_shape.s_p == doctest::Approx(0.2).epsilon(1e-12));

  double prev = -1.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    REQUIRE(table.rows[i].ok);
    CHECK(table.rows[i].applied_delta == -amps[i]);
    const double dwo = std::abs(table.rows[i].report.delta_w_o);
    CHECK(dwo == doctest::Approx(kDipDw[i]).epsilon(1e-4));
    CHECK(dwo >= prev);
    prev = dwo;
  }
  // |dw|/w crosses 50% only at the last amplitude: the trap has collapsed
  // into a narrow sliver inside the eroded peak
  REQUIRE(table.threshold_amplitude.has_value());
  CHECK(*table.threshold_amplitude == 0.1);
  CHECK(std::abs(table.rows[4].report.delta_w_o) >
        0.5 * table.rows[4].report.base_w_o);
  CHECK(std::abs(table.rows[1].report.delta_w_o) <
        0.05 * table.rows[1].report.base_w_o);
}

TEST_CASE("raising the barrier valley flips the classification where the band predicts") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  ScanShape shape;
  shape.r_p = kRefRv;      // bump sitting on the barrier valley
  shape.direction = +1.0;  // raising the valley closes the band from below
  const std::vector<double> amps = {0.01, 0.02, 0.05};
  const ScanTable table = threshold_scan(base, launch, amps, shape, 1u);
  REQUIRE(table.rows.size() == 3);

  for (std::size_t i = 0; i < amps.size(); ++i) {
    REQUIRE(table.rows[i].ok);
    // flip exactly when the perturbed band no longer contains the ray's b
    const FieldPtr pert = make_bump_perturbed(
        base, BumpPerturbation{amps[i], kRefRv, 0.2});
    const ConservedSet cs =
        conserved_quantities(normalize_null(launch, *pert), *pert);
    const double b = cs.L / cs.C;
    const auto band = trapped_band(*pert);
    const bool outside = !band || b <= band->b_lo || b >= band->b_hi;
    CHECK(table.rows[i].report.classification_changed == outside);
    if (table.rows[i].report.classification_changed) {
      CHECK(table.rows[i].report.escape_tau.has_value());
      CHECK(table.rows[i].report.perturbed_class == OrbitClass::Escaping);
    }
  }
  REQUIRE(table.threshold_amplitude.has_value());
  CHECK(*table.threshold_amplitude == 0.05);
}

TEST_CASE("scan precondition checks") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  CHECK_THROWS_AS(threshold_scan(base, launch, {0.01, 0.02}, {}, 0u),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold_scan(base, launch, {0.02, 0.01, 0.03}, {}, 0u),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold_scan(base, launch, {-0.01, 0.02, 0.03}, {}, 0u),
                  std::invalid_argument);
  // all-zero grids are legal (sorted) and give all-zero reports
  const ScanTable zeros = threshold_scan(base, launch, {0.0, 0.0, 0.0}, {}, 0u);
  for (const ScanRow& row : zeros.rows) {
    REQUIRE(row.ok);
    CHECK(row.report.delta_r_min == 0.0);
    CHECK(row.report.delta_r_max == 0.0);
    CHECK(row.report.delta_w_o == 0.0);
    CHECK_FALSE(row.report.classification_changed);
  }
  CHECK_FALSE(zeros.threshold_amplitude.has_value());
}

TEST_CASE("scans are deterministic and parallel-order independent") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  const std::vector<double> amps = {0.005, 0.01, 0.02, 0.05, 0.1};
  const ScanTable a = threshold_scan(base, launch, amps, ScanShape{}, 42u, 4);
  const ScanTable b = threshold_scan(base, launch, amps, ScanShape{}, 42u, 1);
  CHECK(scan_to_csv(a) == scan_to_csv(b));
  CHECK(scan_table_to_json(a).dump() == scan_table_to_json(b).dump());
}

TEST_CASE("azimuthal bumps run through the integration route") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  ScanShape shape;
  shape.direction = -1.0;
  shape.randomize_phi = true;
  shape.phi_width = 0.6;
  DeviationOptions opts;

  const ScanTable t1 = threshold_scan(base, launch, {0.0, 0.005, 0.01}, shape, 9u, 2);
  REQUIRE(t1.rows.size() == 3);
  CHECK(t1.resolved_shape.azimuthal());
  for (const ScanRow& row : t1.rows) REQUIRE(row.ok);
  // the zero row is still an exact identity through the integration route
  CHECK(t1.rows[0].report.delta_w_o == 0.0);
  CHECK(std::abs(t1.rows[2].report.delta_w_o) > 0.0);

  // same seed, same placement; different seed, different placement
  const ScanTable t2 = threshold_scan(base, launch, {0.0, 0.005, 0.01}, shape, 9u, 2);
  CHECK(*t1.resolved_shape.phi_p == *t2.resolved_shape.phi_p);
  const ScanTable t3 = threshold_scan(base, launch, {0.0, 0.005, 0.01}, shape, 10u, 2);
  CHECK(*t1.resolved_shape.phi_p != *t3.resolved_shape.phi_p);

  // an azimuthal bump really does break L conservation
  const FieldPtr pert = make_bump_perturbed(
      base, BumpPerturbation{0.01, kRefRm, 0.2, 0.3, 0.6});
  IntegrateOptions io;
  io.max_tau = 30.0;
  const Trajectory traj = integrate(launch, *pert, io);
  double l_drift = 0.0;
  const double l0 = traj.samples.front().conserved.L;
  for (const auto& s : traj.samples) {
    l_drift = std::max(l_drift, std::abs(s.conserved.L - l0));
  }
  CHECK(l_drift > 1e-6);
}

TEST_CASE("scan csv carries the fixed header and one row per amplitude") {
  const FieldPtr base = reference_field();
  const RayState launch = reference_launch(base);
  const ScanTable t = threshold_scan(base, launch, {0.005, 0.01, 0.02}, {}, 7u);
  const std::string csv = scan_to_csv(t);
  CHECK(csv.rfind("delta_n,delta_r_min,delta_r_max,delta_w_o,"
                  "classification_changed,escape_tau\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
