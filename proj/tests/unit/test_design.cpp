#include <doctest.h>

#include <cmath>

#include "lighttrap/design.hpp"
#include "lighttrap/serialize.hpp"

using namespace lighttrap;

namespace {
// mid-band turning radii of the 3.8/1.0/1.0 profile (independent bisection)
constexpr double kRefRmin = 0.8090443663128978;
constexpr double kRefRmax = 1.2393740066911068;
constexpr double kRefBmid = 1.9862754102450875;
}  // namespace

TEST_CASE("round trip: forward targets recover the generating profile") {
  DesignProblem p;
  p.r_min_target = kRefRmin;
  p.r_max_target = kRefRmax;
  const DesignOutcome out = design_gaussian_trap(p);
  REQUIRE(out.feasible());
  const DesignSolution& s = *out.solution;
  CHECK(s.n_a == 3.8);
  CHECK(s.n_c == 1.0);
  CHECK(s.sigma == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.b == doctest::Approx(kRefBmid).epsilon(1e-9));
  CHECK(s.margin_lo > 1e-9);
  CHECK(s.margin_hi > 1e-9);
  CHECK(s.achieved.r_min == doctest::Approx(kRefRmin).epsilon(1e-8));
  CHECK(s.achieved.r_max == doctest::Approx(kRefRmax).epsilon(1e-8));

  const DesignVerification v = verify_design(s, p);
  CHECK(v.classification == OrbitClass::Trapped);
  CHECK(v.rel_dev_r_min <= 1e-3);
  CHECK(v.rel_dev_r_max <= 1e-3);
  CHECK(v.turning_count >= 20);
}

TEST_CASE("malformed problems are rejected up front") {
  DesignProblem p;
  p.r_min_target = 1.0;
  p.r_max_target = 1.0;  // degenerate: strict inequality required
  CHECK_THROWS_AS(design_gaussian_trap(p), std::invalid_argument);
  p.r_max_target = 0.5;
  CHECK_THROWS_AS(design_gaussian_trap(p), std::invalid_argument);
  p.r_min_target = -1.0;
  p.r_max_target = 1.0;
  CHECK_THROWS_AS(design_gaussian_trap(p), std::invalid_argument);
  p = DesignProblem{1.0, 2.0};
  p.n_max_material = 1.0;  // no contrast over the floor
  CHECK_THROWS_AS(design_gaussian_trap(p), std::invalid_argument);
}

TEST_CASE("targets beyond the achievable aspect ratio are infeasible") {
  DesignProblem p;
  p.r_min_target = 1.0;
  p.r_max_target = 3.0;  // ratio 3 > ~2.047 admitted by n in [1.0, 3.8]
  const DesignOutcome out = design_gaussian_trap(p);
  CHECK_FALSE(out.feasible());
  CHECK_FALSE(out.failure_reason.empty());

  // the bound itself comes from the feasibility chart
  const auto region = feasible_target_region(3.8, 1.0, {1.0});
  REQUIRE(region.size() == 1);
  REQUIRE(region[0].has_trap);
  CHECK(region[0].ratio_max == doctest::Approx(2.0467709098378415).epsilon(1e-6));
  CHECK(p.r_max_target / p.r_min_target > region[0].ratio_max);
}

TEST_CASE("feasibility chart brackets the round-trip targets") {
  const auto region = feasible_target_region(3.8, 1.0, {1.0});
  REQUIRE(region.size() == 1);
  const FeasibleRegionEntry& e = region[0];
  REQUIRE(e.has_trap);
  CHECK(e.r_m == doctest::Approx(0.9859049992160012).epsilon(1e-9));
  CHECK(e.r_v == doctest::Approx(1.5243207902088796).epsilon(1e-9));
  CHECK(e.r_min_at_b_lo == doctest::Approx(0.7447442128878244).epsilon(1e-8));
  // the targets used in the round-trip test lie inside the admitted region
  CHECK(e.r_min_at_b_lo < kRefRmin);
  CHECK(kRefRmin < e.r_m);
  CHECK(e.r_m < kRefRmax);
  CHECK(kRefRmax < e.r_v);
}

TEST_CASE("no index contrast admits no targets") {
  const auto region = feasible_target_region(2.0, 2.0, {0.5, 1.0, 2.0});
  REQUIRE(region.size() == 3);
  for (const auto& e : region) CHECK_FALSE(e.has_trap);
}

TEST_CASE("the feasible region scales linearly with sigma") {
  const auto region = feasible_target_region(3.8, 1.0, {1.0, 2.5});
  REQUIRE(region.size() == 2);
  CHECK(region[1].r_m == doctest::Approx(2.5 * region[0].r_m).epsilon(1e-10));
  CHECK(region[1].r_v == doctest::Approx(2.5 * region[0].r_v).epsilon(1e-10));
  CHECK(region[1].r_min_at_b_lo ==
        doctest::Approx(2.5 * region[0].r_min_at_b_lo).epsilon(1e-8));
  CHECK(region[1].ratio_max == doctest::Approx(region[0].ratio_max).epsilon(1e-8));
  CHECK_THROWS_AS(feasible_target_region(3.8, 1.0, {}), std::invalid_argument);
}

TEST_CASE("cladding mode pins n_C to the user value") {
  DesignProblem p;
  p.r_min_target = 0.8;
  p.r_max_target = 1.1;
  p.fixed_n_c = 0.5;
  const DesignOutcome out = design_gaussian_trap(p);
  REQUIRE(out.feasible());
  CHECK(out.solution->n_c == 0.5);
  CHECK(out.solution->n_a == 3.8);
  const DesignVerification v = verify_design(*out.solution, p);
  CHECK(v.rel_dev_r_min <= 1e-3);
  CHECK(v.rel_dev_r_max <= 1e-3);
}

TEST_CASE("a solution with its b pushed out of band verifies as escaping") {
  DesignProblem p;
  p.r_min_target = kRefRmin;
  p.r_max_target = kRefRmax;
  DesignOutcome out = design_gaussian_trap(p);
  REQUIRE(out.feasible());
  DesignSolution bad = *out.solution;
  bad.b = bad.band.b_hi * 1.01;
  const DesignVerification v = verify_design(bad, p);
  CHECK(v.classification == OrbitClass::Escaping);
}

TEST_CASE("design is deterministic") {
  DesignProblem p;
  p.r_min_target = 0.77;
  p.r_max_target = 1.31;
  const DesignOutcome a = design_gaussian_trap(p);
  const DesignOutcome b = design_gaussian_trap(p);
  REQUIRE(a.feasible());
  REQUIRE(b.feasible());
  CHECK(a.solution->sigma == b.solution->sigma);
  CHECK(a.solution->b == b.solution->b);
  CHECK(design_outcome_to_json(a).dump() == design_outcome_to_json(b).dump());
}

TEST_CASE("design json round trip") {
  DesignProblem p;
  p.r_min_target = 0.8;
  p.r_max_target = 1.2;
  const DesignProblem q =
      design_problem_from_json(design_problem_to_json(p));
  CHECK(q.r_min_target == p.r_min_target);
  CHECK(q.n_max_material == p.n_max_material);
  CHECK_FALSE(q.fixed_n_c.has_value());

  CHECK_THROWS_AS(
      design_problem_from_json(json{{"r_min_target", 0.8}}),
      JsonSchemaError);
  CHECK_THROWS_AS(design_problem_from_json(json{{"r_min_target", 0.8},
                                                {"r_max_target", 1.2},
                                                {"bogus", 1}}),
                  JsonSchemaError);
}
