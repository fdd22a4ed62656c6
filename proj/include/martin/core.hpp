#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace martin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kHalfPi = kPi / 2.0;

/// Raised when an iterative solver exhausts its iteration budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// A location (t, Y) in R^{d+1}. The first coordinate is the axial variable.
class Point {
 public:
  Point(double t, double y) : coords_(2) { coords_ << t, y; }
  explicit Point(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw std::invalid_argument("Point: dimension must be >= 2");
    if (!coords_.allFinite()) throw std::invalid_argument("Point: non-finite coordinate");
  }
  explicit Point(const Vec2& xy) : Point(xy.x(), xy.y()) {}

  const Vec& coords() const { return coords_; }
  operator const Vec&() const { return coords_; }  // NOLINT(google-explicit-constructor)

  Eigen::Index dim() const { return coords_.size(); }
  double t() const { return coords_[0]; }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  /// Transverse part Y.
  Vec transverse() const { return coords_.tail(coords_.size() - 1); }

  Vec2 xy() const {
    if (coords_.size() != 2) throw std::invalid_argument("Point: expected a planar point");
    return {coords_[0], coords_[1]};
  }
  Complex z() const { return {coords_[0], coords_[1]}; }

 private:
  Vec coords_;
};

}  // namespace martin
