#pragma once

#include <memory>
#include <optional>

namespace lighttrap {

/// Refractive index and its four partial derivatives at one point.
/// Units are dimensionless geometric units with c = 1; r, z, t share one
/// arbitrary length unit and phi is in radians.
struct FieldSample {
  double n;
  double dn_dr;
  double dn_dphi;
  double dn_dz;
  double dn_dt;
};

/// A refractive-index field n(r, phi, z, t) with analytic gradients.
/// Immutable after construction; evaluation is pure and thread-safe.
class IndexField {
 public:
  virtual ~IndexField() = default;

  /// Value and all four partials at (r, phi, z, t). Throws std::domain_error
  /// for r < 0. No internal finite differencing: every derivative is analytic.
  FieldSample sample(double r, double phi, double z, double t) const;

  /// True when n depends on r only (dn_dphi = dn_dz = dn_dt = 0 identically).
  virtual bool radial_static() const = 0;

  /// Characteristic radial scale (sigma for Gaussian profiles). Used to size
  /// search grids; never affects evaluation.
  virtual double length_scale() const = 0;

 protected:
  virtual FieldSample eval(double r, double phi, double z, double t) const = 0;
};

using FieldPtr = std::shared_ptr<const IndexField>;

/// Homogeneous medium n = const.
class ConstantField final : public IndexField {
 public:
  explicit ConstantField(double n);

  double value() const { return n_; }
  bool radial_static() const override { return true; }
  double length_scale() const override { return 1.0; }

 protected:
  FieldSample eval(double r, double phi, double z, double t) const override;

 private:
  double n_;
};

/// Radial static profile n(r) = n_C + (n_A - n_C) exp(-r^2 / sigma^2).
/// n_A is the peak at r = 0, n_C the asymptotic floor. n_A must respect the
/// material limit (default 3.8).
class GaussianRadialField final : public IndexField {
 public:
  static constexpr double kDefaultMaterialLimit = 3.8;

  GaussianRadialField(double n_a, double n_c, double sigma,
                      double n_max_material = kDefaultMaterialLimit);

  double n_a() const { return n_a_; }
  double n_c() const { return n_c_; }
  double sigma() const { return sigma_; }

  bool radial_static() const override { return true; }
  double length_scale() const override { return sigma_; }

 protected:
  FieldSample eval(double r, double phi, double z, double t) const override;

 private:
  double n_a_, n_c_, sigma_;
};

/// Additive Gaussian bump delta_n * exp(-((r - r_p)/s_p)^2), optionally
/// localized in angle by a smooth periodic window centered at phi_p:
///   A(phi) = exp((cos(phi - phi_p) - 1) / phi_width^2).
/// Without phi_p the bump is axisymmetric. delta_n may be negative (a dip).
struct BumpPerturbation {
  double delta_n = 0.0;
  double r_p = 0.0;
  double s_p = 1.0;
  std::optional<double> phi_p;  // absent => axisymmetric
  double phi_width = 0.5;       // angular width, used only when phi_p is set

  bool azimuthal() const { return phi_p.has_value(); }
};

class BumpPerturbedField final : public IndexField {
 public:
  /// Validates s_p > 0 and that the perturbed index stays positive on a
  /// sampling grid; throws std::invalid_argument otherwise.
  BumpPerturbedField(FieldPtr base, BumpPerturbation bump);

  const IndexField& base() const { return *base_; }
  FieldPtr base_ptr() const { return base_; }
  const BumpPerturbation& bump() const { return bump_; }

  bool radial_static() const override {
    return base_->radial_static() && !bump_.azimuthal();
  }
  double length_scale() const override { return base_->length_scale(); }

 protected:
  FieldSample eval(double r, double phi, double z, double t) const override;

 private:
  FieldPtr base_;
  BumpPerturbation bump_;
};

/// Gaussian profile whose contrast (n_A - n_C) ramps smoothly to zero between
/// t_off and t_off + tau_ramp (cubic smoothstep, C^1 in t). Before the ramp it
/// equals the base profile exactly; after it, the constant field n_C.
class SwitchableGaussianField final : public IndexField {
 public:
  SwitchableGaussianField(GaussianRadialField base, double t_off,
                          double tau_ramp);

  const GaussianRadialField& base() const { return base_; }
  double t_off() const { return t_off_; }
  double tau_ramp() const { return tau_ramp_; }

  bool radial_static() const override { return false; }
  double length_scale() const override { return base_.sigma(); }

 protected:
  FieldSample eval(double r, double phi, double z, double t) const override;

 private:
  GaussianRadialField base_;
  double t_off_, tau_ramp_;
};

// ---- factories ----

FieldPtr make_constant(double n);
FieldPtr make_gaussian(double n_a, double n_c, double sigma,
                       double n_max_material =
                           GaussianRadialField::kDefaultMaterialLimit);
FieldPtr make_bump_perturbed(FieldPtr base, const BumpPerturbation& bump);
FieldPtr make_switchable(const GaussianRadialField& base, double t_off,
                         double tau_ramp);

/// Max scaled mismatch between analytic partials and central differences of
/// step h at one point. The scale max(|analytic|, |fd|) + 1e-3 makes
/// "result <= tol" equivalent to |analytic - fd| <= tol*max(...) + 1e-3*tol,
/// i.e. a relative test with absolute floor 1e-3*tol.
double gradient_fd_check(const IndexField& field, double r, double phi,
                         double z, double t, double h);

}  // namespace lighttrap
