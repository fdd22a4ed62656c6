#pragma once

#include "martin/convexity.hpp"
#include "martin/core.hpp"
#include "martin/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace martin::fields {

using geometry::NamedDomain;
using geometry::WindowBox;

using VecX = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

enum class DerivativeKind { analytic, finite_difference };

/// Value / gradient / Hessian contract on a domain.
///
/// `value` evaluates the defining formula without a membership check so that
/// continuous boundary extensions can be read off directly; `eval` below is the
/// checked entry point. Fields without analytic derivatives fall back to
/// centered differences.
class ScalarField {
 public:
  explicit ScalarField(NamedDomain domain) : domain_(std::move(domain)) {}
  virtual ~ScalarField() = default;

  const NamedDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }

  virtual std::string name() const = 0;
  virtual double value(const Vec& p) const = 0;
  /// Extended-precision evaluation used by stencil residuals.
  virtual long double value_extended(const VecX& p) const;
  virtual Vec gradient(const Vec& p) const;
  virtual Mat hessian(const Vec& p) const;
  virtual DerivativeKind derivative_kind() const { return DerivativeKind::finite_difference; }

 private:
  NamedDomain domain_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

/// Centered-difference derivatives of the value oracle.
/// Gradient step max(1e-5, 1e-5 |p|); Hessian step max(1e-4, 1e-4 |p|).
Vec fd_gradient(const ScalarField& field, const Vec& p);
Mat fd_hessian(const ScalarField& field, const Vec& p);

/// u = Re F on a planar domain, with derivatives from F' and F''.
class HolomorphicField : public ScalarField {
 public:
  using ScalarField::ScalarField;

  virtual Complex F(Complex z) const = 0;
  virtual Complex dF(Complex z) const = 0;
  virtual Complex d2F(Complex z) const = 0;
  virtual std::complex<long double> F_extended(std::complex<long double> z) const;

  double value(const Vec& p) const override;
  long double value_extended(const VecX& p) const override;
  Vec gradient(const Vec& p) const override;
  Mat hessian(const Vec& p) const override;
  DerivativeKind derivative_kind() const override { return DerivativeKind::analytic; }

 protected:
  /// Throws where derivatives are undefined.
  virtual void check_regular(Complex /*z*/) const {}
};

/// sinh(x) cos(y) on the half strip.
class StripMartin final : public HolomorphicField {
 public:
  StripMartin() : HolomorphicField(NamedDomain::strip()) {}
  std::string name() const override { return "strip"; }
  Complex F(Complex z) const override { return std::sinh(z); }
  Complex dF(Complex z) const override { return std::cosh(z); }
  Complex d2F(Complex z) const override { return std::sinh(z); }
  std::complex<long double> F_extended(std::complex<long double> z) const override { return std::sinh(z); }
};

/// x - x/(x^2+y^2) on the right half-plane minus the unit disk.
class ExteriorMartin final : public HolomorphicField {
 public:
  ExteriorMartin() : HolomorphicField(NamedDomain::halfplane_minus_disk()) {}
  std::string name() const override { return "exterior"; }
  Complex F(Complex z) const override { return z - 1.0 / z; }
  Complex dF(Complex z) const override { return 1.0 + 1.0 / (z * z); }
  Complex d2F(Complex z) const override { return -2.0 / (z * z * z); }
  std::complex<long double> F_extended(std::complex<long double> z) const override {
    return z - 1.0L / z;
  }

 protected:
  void check_regular(Complex z) const override;
};

/// Re sqrt(z^4 - 1) on the sector |Im z| < Re z minus the slit [0, 1].
///
/// On the domain z^4 - 1 avoids (-inf, 0], so the principal root is the
/// continuous branch with positive real part.
class SlitSectorMartin final : public HolomorphicField {
 public:
  SlitSectorMartin() : HolomorphicField(NamedDomain::sector_minus_slit()) {}
  std::string name() const override { return "slit_sector"; }
  Complex F(Complex z) const override;
  Complex dF(Complex z) const override;
  Complex d2F(Complex z) const override;
  std::complex<long double> F_extended(std::complex<long double> z) const override;

  /// g(z) = z^2 - sqrt(z^4 - 1) and its derivatives, in cancellation-free form.
  static Complex gap(Complex z);
  static Complex gap_d1(Complex z);
  static Complex gap_d2(Complex z);

 protected:
  void check_regular(Complex z) const override;
};

/// Re(z^2) = x^2 - y^2 on the sector.
class HalfplaneV final : public HolomorphicField {
 public:
  HalfplaneV() : HolomorphicField(NamedDomain::sector()) {}
  std::string name() const override { return "halfplane_v"; }
  Complex F(Complex z) const override { return z * z; }
  Complex dF(Complex z) const override { return 2.0 * z; }
  Complex d2F(Complex) const override { return {2.0, 0.0}; }
  std::complex<long double> F_extended(std::complex<long double> z) const override { return z * z; }
};

/// Principal Dirichlet eigenpair of the unit ball in R^d (d = 1 interval, d = 2 disk).
struct CylinderMode {
  int d = 1;
  double lambda = kPi * kPi / 4.0;
  double A = 1.0;
  double B = 0.0;

  static CylinderMode make(int d, double A, double B);

  double phi(const Vec& Y) const;
  Vec phi_gradient(const Vec& Y) const;
  Mat phi_hessian(const Vec& Y) const;
  /// A e^{sqrt(lambda) t} + B e^{-sqrt(lambda) t}
  double axial(double t) const;
  double axial_d1(double t) const;
  double axial_d2(double t) const;
};

/// First positive zero of J0 by bisection on [2, 3].
double bessel_j0_first_zero();

/// (A e^{sqrt(lambda) t} + B e^{-sqrt(lambda) t}) phi(Y) on R x B_1(0).
class CylinderMartin final : public ScalarField {
 public:
  explicit CylinderMartin(CylinderMode mode);
  std::string name() const override;
  double value(const Vec& p) const override;
  Vec gradient(const Vec& p) const override;
  Mat hessian(const Vec& p) const override;
  DerivativeKind derivative_kind() const override { return DerivativeKind::analytic; }
  const CylinderMode& mode() const { return mode_; }

 private:
  CylinderMode mode_;
};

/// Field given by closures; missing derivative closures fall back to differences.
class FunctionField final : public ScalarField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  FunctionField(std::string name, NamedDomain domain, ValueFn value, GradFn grad = {}, HessFn hess = {});

  std::string name() const override { return name_; }
  double value(const Vec& p) const override { return value_(p); }
  Vec gradient(const Vec& p) const override;
  Mat hessian(const Vec& p) const override;
  DerivativeKind derivative_kind() const override;

 private:
  std::string name_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

/// u = x on the right half-plane.
FieldPtr linear_x();
/// x^2 + y^2 on the plane (not harmonic; a probe).
FieldPtr quadratic_probe();
/// e^t on the plane.
FieldPtr exp_t();

/// Registry: strip, exterior, slit_sector, halfplane_v, linear_x, cylinder:A=..,B=..[,d=..].
FieldPtr make_field(const std::string& spec);

// Checked evaluation.
double eval(const ScalarField& field, const Point& p);
Vec gradient(const ScalarField& field, const Point& p);
Mat hessian(const ScalarField& field, const Point& p);

/// 5-point (2D) or (2n+1)-point discrete Laplacian of the value oracle,
/// evaluated in extended precision. Throws if the stencil leaves the domain.
double harmonicity_residual(const ScalarField& field, const Point& p, double h);

struct BoundaryReport {
  double max_abs = 0.0;
  Vec2 worst{0.0, 0.0};
  int samples = 0;
  bool passed = false;
};

/// Largest |u| over boundary samples inside `window` (n per boundary piece).
BoundaryReport boundary_vanishing(const ScalarField& field, const WindowBox& window, int n_samples,
                                  double tol);

// ---------------------------------------------------------------------------
// Conformal maps

/// psi: Omega -> right half-plane with inverse; composed with the Cayley map
/// zeta -> (1 + zeta)/(1 - zeta) this gives a Riemann map phi: disc -> Omega
/// sending zeta = 1 to the point at infinity along the positive axis.
struct ConformalMap {
  std::string name;
  NamedDomain domain;
  std::function<Complex(Complex)> to_halfplane;
  std::function<Complex(Complex)> to_halfplane_d1;
  std::function<Complex(Complex)> to_halfplane_d2;
  std::function<Complex(Complex)> from_halfplane;

  Complex disc_forward(Complex zeta) const;
  Complex disc_inverse(Complex z) const;
};

ConformalMap identity_map();
/// psi(z) = -i sin(i z); the composition equals sinh z.
ConformalMap strip_map();
ConformalMap slit_sector_map();
ConformalMap exterior_map();
ConformalMap conformal_map_for(const std::string& field_name);

/// u = Re psi(z), validated on a lattice of `window`: psi finite with nonzero
/// derivative and the inverse reproducing z to 1e-10. Throws otherwise.
FieldPtr conformal_pullback(const ConformalMap& map, const WindowBox& window);

/// Convexity of the image under phi of the circle |zeta - center| = radius (>= 256 samples).
levelset::ConvexityReport study_convexity_check(const ConformalMap& map, Complex center, double radius,
                                                int samples = 512);

}  // namespace martin::fields
