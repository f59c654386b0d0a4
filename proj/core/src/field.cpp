#include "lighttrap/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lighttrap {

FieldSample IndexField::sample(double r, double phi, double z, double t) const {
  if (r < 0.0 || !std::isfinite(r)) {
    throw std::domain_error("IndexField::sample: radius must be finite and >= 0, got " +
                            std::to_string(r));
  }
  return eval(r, phi, z, t);
}

// ---- ConstantField ----

ConstantField::ConstantField(double n) : n_(n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("ConstantField: n must be positive and finite");
  }
}

FieldSample ConstantField::eval(double, double, double, double) const {
  return {n_, 0.0, 0.0, 0.0, 0.0};
}

// ---- GaussianRadialField ----

GaussianRadialField::GaussianRadialField(double n_a, double n_c, double sigma,
                                         double n_max_material)
    : n_a_(n_a), n_c_(n_c), sigma_(sigma) {
  if (!std::isfinite(n_a) || !std::isfinite(n_c) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GaussianRadialField: parameters must be finite");
  }
  if (!(n_c >= 0.0)) {
    throw std::invalid_argument("GaussianRadialField: n_C must be >= 0");
  }
  if (!(n_a > n_c)) {
    throw std::invalid_argument("GaussianRadialField: n_A must exceed n_C");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("GaussianRadialField: sigma must be > 0");
  }
  if (n_a > n_max_material) {
    throw std::invalid_argument(
        "GaussianRadialField: n_A = " + std::to_string(n_a) +
        " exceeds the material limit " + std::to_string(n_max_material));
  }
}

FieldSample GaussianRadialField::eval(double r, double, double, double) const {
  const double u = r / sigma_;
  const double g = std::exp(-u * u);
  const double contrast = n_a_ - n_c_;
  return {n_c_ + contrast * g, contrast * g * (-2.0 * r / (sigma_ * sigma_)),
          0.0, 0.0, 0.0};
}

// ---- BumpPerturbedField ----

namespace {

struct BumpTerms {
  double value;
  double d_dr;
  double d_dphi;
};

BumpTerms bump_terms(const BumpPerturbation& p, double r, double phi) {
  const double u = (r - p.r_p) / p.s_p;
  const double g = std::exp(-u * u);
  const double dg = g * (-2.0 * u / p.s_p);
  double a = 1.0, da = 0.0;
  if (p.azimuthal()) {
    const double w2 = p.phi_width * p.phi_width;
    const double d = phi - *p.phi_p;
    a = std::exp((std::cos(d) - 1.0) / w2);
    da = a * (-std::sin(d) / w2);
  }
  return {p.delta_n * g * a, p.delta_n * dg * a, p.delta_n * g * da};
}

}  // namespace

BumpPerturbedField::BumpPerturbedField(FieldPtr base, BumpPerturbation bump)
    : base_(std::move(base)), bump_(bump) {
  if (!base_) throw std::invalid_argument("BumpPerturbedField: null base field");
  if (!(bump_.s_p > 0.0)) {
    throw std::invalid_argument("BumpPerturbedField: s_p must be > 0");
  }
  if (!(bump_.r_p >= 0.0)) {
    throw std::invalid_argument("BumpPerturbedField: r_p must be >= 0");
  }
  if (bump_.azimuthal() && !(bump_.phi_width > 0.0)) {
    throw std::invalid_argument(
        "BumpPerturbedField: phi_width must be > 0 for an azimuthal bump");
  }
  // Positivity scan: the perturbed index must stay > 0 everywhere we can
  // reasonably probe. Radial extent covers both the base scale and the bump.
  const double r_hi = std::max(10.0 * base_->length_scale(),
                               bump_.r_p + 8.0 * bump_.s_p);
  const int nr = 256;
  const int nphi = bump_.azimuthal() ? 32 : 1;
  const double times[] = {0.0, 1e6};
  double n_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= nr; ++i) {
    const double r = r_hi * static_cast<double>(i) / nr;
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / nphi;
      for (double t : times) {
        const double n = base_->sample(r, phi, 0.0, t).n +
                         bump_terms(bump_, r, phi).value;
        n_min = std::min(n_min, n);
      }
    }
  }
  if (!(n_min > 0.0)) {
    throw std::invalid_argument(
        "BumpPerturbedField: perturbed index reaches " + std::to_string(n_min) +
        " <= 0 on the sampling grid");
  }
}

FieldSample BumpPerturbedField::eval(double r, double phi, double z,
                                     double t) const {
  FieldSample s = base_->sample(r, phi, z, t);
  const BumpTerms b = bump_terms(bump_, r, phi);
  s.n += b.value;
  s.dn_dr += b.d_dr;
  s.dn_dphi += b.d_dphi;
  return s;
}

// ---- SwitchableGaussianField ----

SwitchableGaussianField::SwitchableGaussianField(GaussianRadialField base,
                                                 double t_off, double tau_ramp)
    : base_(base), t_off_(t_off), tau_ramp_(tau_ramp) {
  if (!(tau_ramp > 0.0) || !std::isfinite(t_off)) {
    throw std::invalid_argument(
        "SwitchableGaussianField: need finite t_off and tau_ramp > 0");
  }
}

FieldSample SwitchableGaussianField::eval(double r, double phi, double z,
                                          double t) const {
  if (t <= t_off_) return base_.sample(r, phi, z, t);

  const double u = (t - t_off_) / tau_ramp_;
  const double contrast = base_.n_a() - base_.n_c();
  if (u >= 1.0) return {base_.n_c(), 0.0, 0.0, 0.0, 0.0};

  // amplitude a(u) = 1 - smoothstep(u); C^1 at both ramp ends
  const double amp = 1.0 - u * u * (3.0 - 2.0 * u);
  const double damp_dt = -6.0 * u * (1.0 - u) / tau_ramp_;
  const double su = r / base_.sigma();
  const double g = std::exp(-su * su);
  return {base_.n_c() + amp * contrast * g,
          amp * contrast * g * (-2.0 * r / (base_.sigma() * base_.sigma())),
          0.0, 0.0, contrast * g * damp_dt};
}

// ---- factories ----

FieldPtr make_constant(double n) { return std::make_shared<ConstantField>(n); }

FieldPtr make_gaussian(double n_a, double n_c, double sigma,
                       double n_max_material) {
  return std::make_shared<GaussianRadialField>(n_a, n_c, sigma, n_max_material);
}

FieldPtr make_bump_perturbed(FieldPtr base, const BumpPerturbation& bump) {
  return std::make_shared<BumpPerturbedField>(std::move(base), bump);
}

FieldPtr make_switchable(const GaussianRadialField& base, double t_off,
                         double tau_ramp) {
  return std::make_shared<SwitchableGaussianField>(base, t_off, tau_ramp);
}

// ---- finite-difference guard ----

double gradient_fd_check(const IndexField& field, double r, double phi,
                         double z, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient_fd_check: h must be > 0");
  if (r < h) {
    throw std::domain_error("gradient_fd_check: point must be interior (r >= h)");
  }
  const FieldSample s = field.sample(r, phi, z, t);
  const double fd[4] = {
      (field.sample(r + h, phi, z, t).n - field.sample(r - h, phi, z, t).n) / (2.0 * h),
      (field.sample(r, phi + h, z, t).n - field.sample(r, phi - h, z, t).n) / (2.0 * h),
      (field.sample(r, phi, z + h, t).n - field.sample(r, phi, z - h, t).n) / (2.0 * h),
      (field.sample(r, phi, z, t + h).n - field.sample(r, phi, z, t - h).n) / (2.0 * h),
  };
  const double an[4] = {s.dn_dr, s.dn_dphi, s.dn_dz, s.dn_dt};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double scale = std::max(std::abs(an[i]), std::abs(fd[i])) + 1e-3;
    worst = std::max(worst, std::abs(an[i] - fd[i]) / scale);
  }
  return worst;
}

}  // namespace lighttrap
