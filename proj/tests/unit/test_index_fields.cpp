#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lighttrap/field.hpp"
#include "lighttrap/roots.hpp"
#include "lighttrap/serialize.hpp"
#include "support/oracles.hpp"

using namespace lighttrap;

namespace {

// The standard sample grid from the module contract: 64 radii on
// [1e-3, 10 sigma], 8 angles, 5 times.
struct GridSpec {
  std::vector<double> radii, angles, times;
};

GridSpec standard_grid(double sigma) {
  GridSpec g;
  g.radii = log_grid(1e-3, 10.0 * sigma, 64);
  for (int i = 0; i < 8; ++i) {
    g.angles.push_back(2.0 * std::numbers::pi * i / 8.0);
  }
  g.times = {0.0, 0.8, 2.1, 3.9, 7.3};
  return g;
}

void check_gradients_on_grid(const IndexField& f, double sigma) {
  const GridSpec g = standard_grid(sigma);
  const double h = 1e-5;
  for (double r : g.radii) {
    for (double phi : g.angles) {
      for (double t : g.times) {
        // library-side check
        REQUIRE(gradient_fd_check(f, r, phi, 0.0, t, h) <= 1e-6);
        // independent check: relative 1e-6 with absolute floor 1e-9
        const FieldSample s = f.sample(r, phi, 0.0, t);
        const double an[4] = {s.dn_dr, s.dn_dphi, s.dn_dz, s.dn_dt};
        for (int c = 0; c < 4; ++c) {
          const double fd = oracles::fd_partial_n(f, r, phi, 0.0, t, c, h);
          const double err = std::abs(an[c] - fd);
          REQUIRE(err <= 1e-6 * std::max(std::abs(an[c]), std::abs(fd)) + 1e-9);
        }
      }
    }
  }
}

}  // namespace

TEST_CASE("gaussian profile closed-form values") {
  const FieldPtr f = make_gaussian(3.8, 1.0, 1.0);

  const FieldSample at0 = f->sample(0.0, 0.3, 0.1, 2.0);
  CHECK(at0.n == doctest::Approx(3.8).epsilon(1e-15));
  CHECK(at0.dn_dr == 0.0);
  CHECK(at0.dn_dphi == 0.0);
  CHECK(at0.dn_dz == 0.0);
  CHECK(at0.dn_dt == 0.0);

  const FieldSample at1 = f->sample(1.0, 0.0, 0.0, 0.0);
  CHECK(at1.n == doctest::Approx(1.0 + 2.8 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(at1.dn_dr == doctest::Approx(-5.6 * std::exp(-1.0)).epsilon(1e-15));

  CHECK(std::abs(f->sample(10.0, 0, 0, 0).n - 1.0) < 1e-40);
}

TEST_CASE("gaussian construction constraints") {
  CHECK_NOTHROW(make_gaussian(3.8, 1.0, 1.0));
  CHECK_NOTHROW(make_gaussian(1.0, 0.0, 1.0));  // the pure profile
  CHECK_THROWS_AS(make_gaussian(4.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian(0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian(3.8, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian(3.8, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian(3.8, 1.0, -2.0), std::invalid_argument);
  // the limit itself is configurable
  CHECK_NOTHROW(make_gaussian(4.0, 1.0, 1.0, 4.5));
}

TEST_CASE("negative radius is a domain error") {
  const FieldPtr f = make_gaussian(3.8, 1.0, 1.0);
  CHECK_THROWS_AS(f->sample(-0.1, 0, 0, 0), std::domain_error);
}

TEST_CASE("gaussian is monotone decreasing with exact endpoints") {
  const double n_a = 3.8, n_c = 1.0, sigma = 1.0;
  const FieldPtr f = make_gaussian(n_a, n_c, sigma);
  CHECK(f->sample(0.0, 0, 0, 0).n == n_a);
  // strictly decreasing until the contrast falls below one ulp of the floor,
  // never increasing anywhere
  double prev = f->sample(1e-3, 0, 0, 0).n;
  for (double r : log_grid(2e-3, 6.0 * sigma, 150)) {
    const double n = f->sample(r, 0, 0, 0).n;
    CHECK(n < prev);
    prev = n;
  }
  for (double r : log_grid(6.0 * sigma, 10.0 * sigma, 50)) {
    const double n = f->sample(r, 0, 0, 0).n;
    CHECK(n <= prev);
    prev = n;
  }
  CHECK(std::abs(f->sample(8.0 * sigma, 0, 0, 0).n - n_c) < 1e-27);
}

TEST_CASE("analytic gradients match central differences on the standard grid") {
  SUBCASE("gaussian 3.8/1.0/1.0") { check_gradients_on_grid(*make_gaussian(3.8, 1.0, 1.0), 1.0); }
  SUBCASE("pure gaussian") { check_gradients_on_grid(*make_gaussian(1.0, 0.0, 1.0), 1.0); }
  SUBCASE("constant") { check_gradients_on_grid(*make_constant(2.0), 1.0); }
  SUBCASE("axisymmetric bump") {
    BumpPerturbation p{0.05, 1.0, 0.2, std::nullopt, 0.5};
    check_gradients_on_grid(*make_bump_perturbed(make_gaussian(3.8, 1.0, 1.0), p), 1.0);
  }
  SUBCASE("azimuthal bump") {
    BumpPerturbation p{0.05, 1.0, 0.2, 0.7, 0.4};
    check_gradients_on_grid(*make_bump_perturbed(make_gaussian(3.8, 1.0, 1.0), p), 1.0);
  }
  SUBCASE("switchable mid-ramp") {
    check_gradients_on_grid(
        *make_switchable(GaussianRadialField(3.8, 1.0, 1.0), 1.0, 2.0), 1.0);
  }
}

TEST_CASE("gradient_fd_check endpoints") {
  CHECK(gradient_fd_check(*make_constant(2.0), 0.5, 0.1, 0.0, 0.0, 1e-5) == 0.0);
  CHECK(gradient_fd_check(*make_gaussian(3.8, 1.0, 1.0), 0.7, 0.0, 0.0, 0.0, 1e-5) <= 1e-6);
  CHECK_THROWS_AS(gradient_fd_check(*make_constant(2.0), 0.5, 0, 0, 0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(gradient_fd_check(*make_constant(2.0), 1e-7, 0, 0, 0, 1e-5),
                  std::domain_error);
}

TEST_CASE("zero-amplitude bump is bit-identical to its base") {
  const FieldPtr base = make_gaussian(3.8, 1.0, 1.0);
  const FieldPtr pert =
      make_bump_perturbed(base, BumpPerturbation{0.0, 1.0, 0.2});
  const GridSpec g = standard_grid(1.0);
  for (double r : g.radii) {
    for (double phi : g.angles) {
      const FieldSample a = base->sample(r, phi, 0.0, 0.0);
      const FieldSample b = pert->sample(r, phi, 0.0, 0.0);
      CHECK(a.n == b.n);
      CHECK(a.dn_dr == b.dn_dr);
      CHECK(a.dn_dphi == b.dn_dphi);
    }
  }
}

TEST_CASE("bump adds its closed-form value") {
  const FieldPtr base = make_gaussian(3.8, 1.0, 1.0);
  const FieldPtr pert =
      make_bump_perturbed(base, BumpPerturbation{0.05, 1.0, 0.2});
  // at the bump center the full amplitude appears
  CHECK(pert->sample(1.0, 0, 0, 0).n ==
        doctest::Approx(1.0 + 2.8 * std::exp(-1.0) + 0.05).epsilon(1e-14));
  CHECK(pert->radial_static());
}

TEST_CASE("azimuthal bump breaks axisymmetry") {
  const FieldPtr base = make_gaussian(3.8, 1.0, 1.0);
  const double phi_p = 0.7, width = 0.4;
  const FieldPtr pert = make_bump_perturbed(
      base, BumpPerturbation{0.05, 1.0, 0.2, phi_p, width});
  CHECK_FALSE(pert->radial_static());
  CHECK(pert->sample(1.0, phi_p + width / 2.0, 0, 0).dn_dphi != 0.0);
  CHECK(pert->sample(1.0, phi_p - width / 2.0, 0, 0).dn_dphi != 0.0);
  // at the window center the angular derivative vanishes by symmetry
  CHECK(pert->sample(1.0, phi_p, 0, 0).dn_dphi == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("a dip that drives n nonpositive is rejected at construction") {
  const FieldPtr base = make_gaussian(1.0, 0.0, 1.0);
  CHECK_THROWS_AS(
      make_bump_perturbed(base, BumpPerturbation{-0.5, 3.0, 0.3}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      make_bump_perturbed(base, BumpPerturbation{0.05, 1.0, 0.0}),
      std::invalid_argument);
}

TEST_CASE("switchable field matches base before and floor after the ramp") {
  const GaussianRadialField base(3.8, 1.0, 1.0);
  const double t_off = 1.0, ramp = 2.0;
  const FieldPtr sw = make_switchable(base, t_off, ramp);
  CHECK_FALSE(sw->radial_static());

  const GridSpec g = standard_grid(1.0);
  for (double r : g.radii) {
    // exact equality before switch-off
    for (double t : {0.0, 0.5, t_off}) {
      const FieldSample a = base.sample(r, 0, 0, t);
      const FieldSample b = sw->sample(r, 0, 0, t);
      CHECK(a.n == b.n);
      CHECK(a.dn_dr == b.dn_dr);
      CHECK(b.dn_dt == 0.0);
    }
    // exact floor after the ramp completes
    for (double t : {t_off + ramp, t_off + ramp + 5.0}) {
      const FieldSample b = sw->sample(r, 0, 0, t);
      CHECK(b.n == 1.0);
      CHECK(b.dn_dr == 0.0);
      CHECK(b.dn_dt == 0.0);
    }
  }
  // mid-ramp the time derivative is live and matches finite differences
  CHECK(sw->sample(0.5, 0, 0, t_off + ramp / 2).dn_dt != 0.0);
  CHECK(gradient_fd_check(*sw, 0.5, 0, 0, t_off + ramp / 2, 1e-5) <= 1e-6);
}

TEST_CASE("field json round trip and strict schema") {
  const FieldPtr g = make_gaussian(3.8, 1.0, 1.25);
  const FieldPtr g2 = field_from_json(field_to_json(*g));
  const auto* gg = dynamic_cast<const GaussianRadialField*>(g2.get());
  REQUIRE(gg != nullptr);
  CHECK(gg->n_a() == 3.8);
  CHECK(gg->sigma() == 1.25);

  const FieldPtr b = make_bump_perturbed(
      make_gaussian(3.8, 1.0, 1.0), BumpPerturbation{-0.02, 0.99, 0.2, 0.3, 0.5});
  const FieldPtr b2 = field_from_json(field_to_json(*b));
  CHECK_FALSE(b2->radial_static());

  const FieldPtr sw = make_switchable(GaussianRadialField(3.8, 1.0, 1.0), 30.0, 10.0);
  const FieldPtr sw2 = field_from_json(field_to_json(*sw));
  CHECK(dynamic_cast<const SwitchableGaussianField*>(sw2.get()) != nullptr);

  // unknown keys are named in the failure
  json bad = {{"type", "gaussian"}, {"n_a", 3.8}, {"n_c", 1.0},
              {"sigma", 1.0}, {"sugma", 2.0}};
  try {
    field_from_json(bad);
    FAIL("expected JsonSchemaError");
  } catch (const JsonSchemaError& e) {
    CHECK(std::string(e.what()).find("sugma") != std::string::npos);
  }
  CHECK_THROWS_AS(field_from_json(json{{"type", "parabolic"}}), JsonSchemaError);
  CHECK_THROWS_AS(field_from_json(json{{"type", "gaussian"}, {"n_a", 3.8}}),
                  JsonSchemaError);  // missing required keys
  // constraint violations surface as schema errors with the config path
  CHECK_THROWS_AS(field_from_json(json{{"type", "gaussian"}, {"n_a", 4.2},
                                       {"n_c", 1.0}, {"sigma", 1.0}}),
                  JsonSchemaError);
}
