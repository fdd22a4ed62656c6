#include "martin/fields.hpp"

#include <cmath>
#include <regex>
#include <sstream>

namespace martin::fields {

using geometry::DomainKind;

// ---------------------------------------------------------------------------
// Finite-difference fallbacks

long double ScalarField::value_extended(const VecX& p) const {
  return value(p.cast<double>());
}

Vec ScalarField::gradient(const Vec& p) const { return fd_gradient(*this, p); }
Mat ScalarField::hessian(const Vec& p) const { return fd_hessian(*this, p); }

Vec fd_gradient(const ScalarField& field, const Vec& p) {
  const double h = std::max(1e-5, 1e-5 * p.norm());
  Vec g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Vec a = p, b = p;
    a[i] += h;
    b[i] -= h;
    g[i] = (field.value(a) - field.value(b)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const ScalarField& field, const Vec& p) {
  const double h = std::max(1e-4, 1e-4 * p.norm());
  const auto n = p.size();
  Mat H(n, n);
  const double u0 = field.value(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec a = p, b = p;
    a[i] += h;
    b[i] -= h;
    H(i, i) = (field.value(a) - 2.0 * u0 + field.value(b)) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vec pp = p, pm = p, mp = p, mm = p;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      H(i, j) = H(j, i) =
          (field.value(pp) - field.value(pm) - field.value(mp) + field.value(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

// ---------------------------------------------------------------------------
// Holomorphic real parts

namespace {

Complex to_z(const Vec& p) {
  if (p.size() != 2) throw std::invalid_argument("planar field evaluated at non-planar point");
  return {p[0], p[1]};
}

}  // namespace

std::complex<long double> HolomorphicField::F_extended(std::complex<long double> z) const {
  const Complex w = F(Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())));
  return {w.real(), w.imag()};
}

double HolomorphicField::value(const Vec& p) const { return F(to_z(p)).real(); }

long double HolomorphicField::value_extended(const VecX& p) const {
  if (p.size() != 2) throw std::invalid_argument("planar field evaluated at non-planar point");
  return F_extended({p[0], p[1]}).real();
}

Vec HolomorphicField::gradient(const Vec& p) const {
  const Complex z = to_z(p);
  check_regular(z);
  const Complex d = dF(z);
  return Vec2(d.real(), -d.imag());
}

Mat HolomorphicField::hessian(const Vec& p) const {
  const Complex z = to_z(p);
  check_regular(z);
  const Complex d2 = d2F(z);
  Mat H(2, 2);
  H << d2.real(), -d2.imag(), -d2.imag(), -d2.real();
  return H;
}

void ExteriorMartin::check_regular(Complex z) const {
  if (std::abs(z) == 0.0) throw std::domain_error("exterior: derivative undefined at the origin");
}

Complex SlitSectorMartin::F(Complex z) const {
  const Complex z2 = z * z;
  return std::sqrt(z2 * z2 - 1.0);
}

std::complex<long double> SlitSectorMartin::F_extended(std::complex<long double> z) const {
  const auto z2 = z * z;
  return std::sqrt(z2 * z2 - 1.0L);
}

Complex SlitSectorMartin::dF(Complex z) const {
  check_regular(z);
  return 2.0 * z * z * z / F(z);
}

Complex SlitSectorMartin::d2F(Complex z) const {
  check_regular(z);
  const Complex w = F(z);
  const Complex z2 = z * z;
  return 6.0 * z2 / w - 4.0 * z2 * z2 * z2 / (w * w * w);
}

void SlitSectorMartin::check_regular(Complex z) const {
  const Complex q = z * z * z * z;
  const double re = q.real();
  const double dist = re < 0.0   ? std::abs(q)
                      : re > 1.0 ? std::abs(q - 1.0)
                                 : std::abs(q.imag());
  if (dist < 1e-8) throw std::domain_error("slit_sector: point on the branch set z^4 in [0, 1]");
}

Complex SlitSectorMartin::gap(Complex z) {
  const Complex z2 = z * z;
  return 1.0 / (z2 + std::sqrt(z2 * z2 - 1.0));
}

Complex SlitSectorMartin::gap_d1(Complex z) {
  const Complex z2 = z * z;
  const Complex w = std::sqrt(z2 * z2 - 1.0);
  return -2.0 * z / (w * (z2 + w));
}

Complex SlitSectorMartin::gap_d2(Complex z) {
  const Complex z2 = z * z;
  const Complex w = std::sqrt(z2 * z2 - 1.0);
  const Complex g = 1.0 / (z2 + w);
  return 2.0 * g * (z2 * z2 + 2.0 * z2 * w + 1.0) / (w * w * w);
}

// ---------------------------------------------------------------------------
// Cylinder modes

double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::cyl_bessel_j(0.0, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CylinderMode CylinderMode::make(int d, double A, double B) {
  if (!(A >= 0.0 && B >= 0.0 && A + B > 0.0))
    throw std::invalid_argument("cylinder mode: need A, B >= 0 and A + B > 0");
  CylinderMode m;
  m.d = d;
  m.A = A;
  m.B = B;
  if (d == 1) {
    m.lambda = kPi * kPi / 4.0;
  } else if (d == 2) {
    const double j0 = bessel_j0_first_zero();
    m.lambda = j0 * j0;
  } else {
    throw std::invalid_argument("cylinder mode: only d = 1 and d = 2 are supported");
  }
  return m;
}

double CylinderMode::phi(const Vec& Y) const {
  if (d == 1) return std::cos(kHalfPi * Y[0]);
  return std::cyl_bessel_j(0.0, std::sqrt(lambda) * Y.norm());
}

Vec CylinderMode::phi_gradient(const Vec& Y) const {
  if (d == 1) return Vec::Constant(1, -kHalfPi * std::sin(kHalfPi * Y[0]));
  const double r = Y.norm();
  if (r == 0.0) return Vec::Zero(Y.size());
  const double k = std::sqrt(lambda);
  return (-k * std::cyl_bessel_j(1.0, k * r) / r) * Y;
}

Mat CylinderMode::phi_hessian(const Vec& Y) const {
  if (d == 1) return Mat::Constant(1, 1, -lambda * std::cos(kHalfPi * Y[0]));
  const double k = std::sqrt(lambda);
  const double r = Y.norm();
  const auto n = Y.size();
  if (r < 1e-8) return Mat::Identity(n, n) * (-lambda / 2.0);
  const double x = k * r;
  const double j0 = std::cyl_bessel_j(0.0, x);
  const double j1 = std::cyl_bessel_j(1.0, x);
  const double phi_rr = lambda * (-j0 + j1 / x);
  const double phi_r_over_r = -k * j1 / r;
  const Vec e = Y / r;
  return phi_rr * e * e.transpose() + phi_r_over_r * (Mat::Identity(n, n) - e * e.transpose());
}

double CylinderMode::axial(double t) const {
  const double k = std::sqrt(lambda);
  return A * std::exp(k * t) + B * std::exp(-k * t);
}

double CylinderMode::axial_d1(double t) const {
  const double k = std::sqrt(lambda);
  return k * (A * std::exp(k * t) - B * std::exp(-k * t));
}

double CylinderMode::axial_d2(double t) const { return lambda * axial(t); }

CylinderMartin::CylinderMartin(CylinderMode mode)
    : ScalarField(NamedDomain::cylinder(mode.d)), mode_(mode) {}

std::string CylinderMartin::name() const {
  std::ostringstream os;
  os << "cylinder:A=" << mode_.A << ",B=" << mode_.B;
  if (mode_.d != 1) os << ",d=" << mode_.d;
  return os.str();
}

double CylinderMartin::value(const Vec& p) const {
  return mode_.axial(p[0]) * mode_.phi(p.tail(p.size() - 1));
}

Vec CylinderMartin::gradient(const Vec& p) const {
  const Vec Y = p.tail(p.size() - 1);
  Vec g(p.size());
  g[0] = mode_.axial_d1(p[0]) * mode_.phi(Y);
  g.tail(Y.size()) = mode_.axial(p[0]) * mode_.phi_gradient(Y);
  return g;
}

Mat CylinderMartin::hessian(const Vec& p) const {
  const Vec Y = p.tail(p.size() - 1);
  const auto n = p.size();
  Mat H(n, n);
  H(0, 0) = mode_.axial_d2(p[0]) * mode_.phi(Y);
  const Vec cross = mode_.axial_d1(p[0]) * mode_.phi_gradient(Y);
  H.block(0, 1, 1, n - 1) = cross.transpose();
  H.block(1, 0, n - 1, 1) = cross;
  H.block(1, 1, n - 1, n - 1) = mode_.axial(p[0]) * mode_.phi_hessian(Y);
  return H;
}

// ---------------------------------------------------------------------------
// Closure-backed fields

FunctionField::FunctionField(std::string name, NamedDomain domain, ValueFn value, GradFn grad,
                             HessFn hess)
    : ScalarField(std::move(domain)),
      name_(std::move(name)),
      value_(std::move(value)),
      grad_(std::move(grad)),
      hess_(std::move(hess)) {}

Vec FunctionField::gradient(const Vec& p) const { return grad_ ? grad_(p) : fd_gradient(*this, p); }
Mat FunctionField::hessian(const Vec& p) const { return hess_ ? hess_(p) : fd_hessian(*this, p); }

DerivativeKind FunctionField::derivative_kind() const {
  return grad_ && hess_ ? DerivativeKind::analytic : DerivativeKind::finite_difference;
}

FieldPtr linear_x() {
  return std::make_shared<FunctionField>(
      "linear_x", NamedDomain::right_halfplane(), [](const Vec& p) { return p[0]; },
      [](const Vec&) -> Vec { return Vec2(1.0, 0.0); }, [](const Vec&) -> Mat { return Mat::Zero(2, 2); });
}

FieldPtr quadratic_probe() {
  return std::make_shared<FunctionField>(
      "quadratic_probe", NamedDomain::whole_space(2), [](const Vec& p) { return p.squaredNorm(); },
      [](const Vec& p) -> Vec { return 2.0 * p; }, [](const Vec&) -> Mat { return 2.0 * Mat::Identity(2, 2); });
}

FieldPtr exp_t() {
  return std::make_shared<FunctionField>(
      "exp_t", NamedDomain::whole_space(2), [](const Vec& p) { return std::exp(p[0]); },
      [](const Vec& p) -> Vec { return Vec2(std::exp(p[0]), 0.0); },
      [](const Vec& p) -> Mat {
        Mat H = Mat::Zero(2, 2);
        H(0, 0) = std::exp(p[0]);
        return H;
      });
}

FieldPtr make_field(const std::string& spec) {
  if (spec == "strip") return std::make_shared<StripMartin>();
  if (spec == "exterior") return std::make_shared<ExteriorMartin>();
  if (spec == "slit_sector") return std::make_shared<SlitSectorMartin>();
  if (spec == "halfplane_v") return std::make_shared<HalfplaneV>();
  if (spec == "linear_x") return linear_x();
  if (spec.rfind("cylinder", 0) == 0) {
    double A = 1.0, B = 0.0;
    int d = 1;
    if (spec.size() > 8) {
      if (spec[8] != ':') throw std::invalid_argument("bad cylinder spec: " + spec);
      static const std::regex kv(R"(\s*([A-Za-z]+)\s*=\s*([-+0-9.eE]+)\s*)");
      std::stringstream ss(spec.substr(9));
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::smatch m;
        if (!std::regex_match(item, m, kv)) throw std::invalid_argument("bad cylinder parameter: " + item);
        const double v = std::stod(m[2]);
        if (m[1] == "A") {
          A = v;
        } else if (m[1] == "B") {
          B = v;
        } else if (m[1] == "d") {
          d = static_cast<int>(v);
        } else {
          throw std::invalid_argument("unknown cylinder parameter: " + std::string(m[1]));
        }
      }
    }
    return std::make_shared<CylinderMartin>(CylinderMode::make(d, A, B));
  }
  throw std::invalid_argument("unknown field: " + spec);
}

// ---------------------------------------------------------------------------
// Checked evaluation and diagnostics

namespace {

void require_inside(const ScalarField& field, const Point& p, const char* op) {
  if (!field.domain().contains(p))
    throw std::domain_error(std::string(op) + ": point outside the domain of " + field.name());
}

}  // namespace

double eval(const ScalarField& field, const Point& p) {
  require_inside(field, p, "eval");
  return field.value(p);
}

Vec gradient(const ScalarField& field, const Point& p) {
  require_inside(field, p, "gradient");
  return field.gradient(p);
}

Mat hessian(const ScalarField& field, const Point& p) {
  require_inside(field, p, "hessian");
  return field.hessian(p);
}

double harmonicity_residual(const ScalarField& field, const Point& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("harmonicity_residual: h must be positive");
  require_inside(field, p, "harmonicity_residual");
  const auto n = p.dim();
  const VecX center = p.coords().cast<long double>();
  const long double hl = h;
  long double sum = -2.0L * n * field.value_extended(center);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const long double sign : {1.0L, -1.0L}) {
      VecX q = center;
      q[i] += sign * hl;
      if (!field.domain().contains(Point(Vec(q.cast<double>()))))
        throw std::domain_error("harmonicity_residual: stencil exits domain");
      sum += field.value_extended(q);
    }
  }
  return static_cast<double>(sum / (hl * hl));
}

BoundaryReport boundary_vanishing(const ScalarField& field, const WindowBox& window, int n_samples,
                                  double tol) {
  BoundaryReport report;
  for (const auto& q : field.domain().boundary_samples(window, n_samples)) {
    const double u = std::abs(field.value(q));
    ++report.samples;
    if (u >= report.max_abs) {
      report.max_abs = u;
      report.worst = q;
    }
  }
  report.passed = report.max_abs <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// Conformal maps

Complex ConformalMap::disc_forward(Complex zeta) const {
  return from_halfplane((1.0 + zeta) / (1.0 - zeta));
}

Complex ConformalMap::disc_inverse(Complex z) const {
  const Complex w = to_halfplane(z);
  return (w - 1.0) / (w + 1.0);
}

ConformalMap identity_map() {
  return {"identity", NamedDomain::right_halfplane(), [](Complex z) { return z; },
          [](Complex) { return Complex(1.0, 0.0); }, [](Complex) { return Complex(0.0, 0.0); },
          [](Complex w) { return w; }};
}

ConformalMap strip_map() {
  const Complex I(0.0, 1.0);
  return {"strip", NamedDomain::strip(), [I](Complex z) { return -I * std::sin(I * z); },
          [I](Complex z) { return std::cos(I * z); }, [I](Complex z) { return -I * std::sin(I * z); },
          [](Complex w) { return std::asinh(w); }};
}

ConformalMap slit_sector_map() {
  return {"slit_sector", NamedDomain::sector_minus_slit(),
          [](Complex z) { return std::sqrt(z * z * z * z - 1.0); },
          [](Complex z) { return 2.0 * z * z * z / std::sqrt(z * z * z * z - 1.0); },
          [](Complex z) {
            const Complex w = std::sqrt(z * z * z * z - 1.0);
            return 6.0 * z * z / w - 4.0 * std::pow(z, 6) / (w * w * w);
          },
          [](Complex w) { return std::sqrt(std::sqrt(w * w + 1.0)); }};
}

ConformalMap exterior_map() {
  return {"exterior", NamedDomain::halfplane_minus_disk(), [](Complex z) { return z - 1.0 / z; },
          [](Complex z) { return 1.0 + 1.0 / (z * z); }, [](Complex z) { return -2.0 / (z * z * z); },
          [](Complex w) { return 0.5 * (w + std::sqrt(w * w + 4.0)); }};
}

ConformalMap conformal_map_for(const std::string& field_name) {
  if (field_name == "strip") return strip_map();
  if (field_name == "slit_sector") return slit_sector_map();
  if (field_name == "exterior") return exterior_map();
  if (field_name == "identity" || field_name == "linear_x") return identity_map();
  throw std::invalid_argument("no conformal map registered for " + field_name);
}

namespace {

class PullbackField final : public HolomorphicField {
 public:
  explicit PullbackField(ConformalMap map) : HolomorphicField(map.domain), map_(std::move(map)) {}
  std::string name() const override { return "pullback:" + map_.name; }
  Complex F(Complex z) const override { return map_.to_halfplane(z); }
  Complex dF(Complex z) const override { return map_.to_halfplane_d1(z); }
  Complex d2F(Complex z) const override { return map_.to_halfplane_d2(z); }

 private:
  ConformalMap map_;
};

}  // namespace

FieldPtr conformal_pullback(const ConformalMap& map, const WindowBox& window) {
  constexpr int n = 40;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double x = window.lower[0] + (window.upper[0] - window.lower[0]) * i / n;
      const double y = window.lower[1] + (window.upper[1] - window.lower[1]) * j / n;
      const Point p(x, y);
      if (!map.domain.contains(p)) continue;
      const Complex z = p.z();
      const Complex w = map.to_halfplane(z);
      const Complex d = map.to_halfplane_d1(z);
      const Complex back = map.from_halfplane(w);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || !(std::abs(d) > 0.0) ||
          !(w.real() > 0.0) || std::abs(back - z) > 1e-10 * (1.0 + std::abs(z))) {
        std::ostringstream os;
        os << "conformal_pullback: map " << map.name << " is not a valid chart at (" << x << ", " << y
           << "); window touches a branch cut";
        throw std::domain_error(os.str());
      }
    }
  }
  return std::make_shared<PullbackField>(map);
}

levelset::ConvexityReport study_convexity_check(const ConformalMap& map, Complex center, double radius,
                                                int samples) {
  if (!(radius > 0.0) || std::abs(center) + radius >= 1.0)
    throw std::invalid_argument("study_convexity_check: disc closure must lie inside the unit disc");
  samples = std::max(samples, 256);
  std::vector<Vec2> image;
  image.reserve(static_cast<size_t>(samples));
  double extent = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double a = 2.0 * kPi * k / samples;
    const Complex z = map.disc_forward(center + radius * Complex(std::cos(a), std::sin(a)));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e8)
      throw std::domain_error("study_convexity_check: image leaves the numeric window");
    image.emplace_back(z.real(), z.imag());
    extent = std::max(extent, std::abs(z));
  }
  const auto inside = [&image](const Vec2& q) { return geometry::polygon_contains(image, q); };
  return levelset::convexity_test(image, 1e-6 * std::max(extent, 1.0), inside);
}

}  // namespace martin::fields
