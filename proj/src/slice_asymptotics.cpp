#include "martin/slice_asymptotics.hpp"

#include "martin/levelset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace martin::slices {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec at_slice(double t, const Vec& Y) {
  Vec p(Y.size() + 1);
  p[0] = t;
  p.tail(Y.size()) = Y;
  return p;
}

Vec scalar(double y) { return Vec::Constant(1, y); }

int transverse_dim(const ScalarField& field) { return field.dim() - 1; }

// Intervals of a planar slice clipped to |y| <= limit.
std::vector<geometry::Interval> clipped_intervals(const geometry::Slice& s, double limit) {
  std::vector<geometry::Interval> out;
  for (auto iv : s.intervals) {
    iv.lo = std::max(iv.lo, -limit);
    iv.hi = std::min(iv.hi, limit);
    if (iv.lo < iv.hi) out.push_back(iv);
  }
  return out;
}

// Extent of the slice from the centre along a unit transverse direction.
double ray_extent(const ScalarField& field, double t, const Vec& dir, const SliceOptions& opts) {
  const auto s = geometry::slice(field.domain(), t);
  if (!s.intervals.empty()) {
    for (const auto& iv : s.intervals) {
      if (iv.lo < 0.0 && 0.0 < iv.hi) return std::min(dir[0] > 0 ? iv.hi : -iv.lo, opts.half_width_limit);
    }
    throw std::invalid_argument("ray_monotonicity: slice centre is not in the domain");
  }
  double hi = opts.half_width_limit;
  if (s.ball_radius) hi = std::min(hi, *s.ball_radius);
  if (s.body) {
    double r = 0.0;
    for (const auto& v : s.body->vertices()) r = std::max(r, v.norm());
    hi = std::min(hi, r * (1.0 + 1e-9));
  }
  if (field.domain().contains(Point(at_slice(t, hi * dir)))) return hi;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (field.domain().contains(Point(at_slice(t, mid * dir))) ? lo : hi) = mid;
  }
  return lo;
}

// Golden-section maximization of f on (a, b).
double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

struct Candidate {
  Vec Y;
  double u;
};

}  // namespace

SliceReport slice_scan(const ScalarField& field, double t, int n_samples, const SliceOptions& opts) {
  if (n_samples < 3) throw std::invalid_argument("slice_scan: need at least 3 samples");
  const auto& domain = field.domain();
  const auto s = geometry::slice(domain, t);
  SliceReport report;
  report.t = t;
  std::vector<Candidate> candidates;
  auto u_at = [&](const Vec& Y) { return field.value(at_slice(t, Y)); };

  if (transverse_dim(field) == 1) {
    const auto intervals = clipped_intervals(s, opts.half_width_limit);
    if (intervals.empty()) throw std::invalid_argument("slice_scan: empty slice");
    for (const auto& iv : intervals) {
      std::vector<double> ys;
      for (int k = 1; k <= n_samples; ++k) ys.push_back(iv.lo + (iv.hi - iv.lo) * k / (n_samples + 1));
      if (iv.lo < 0.0 && 0.0 < iv.hi) {
        ys.push_back(0.0);
        std::sort(ys.begin(), ys.end());
      }
      std::vector<double> us;
      for (const double y : ys) {
        if (!domain.contains(Point(at_slice(t, scalar(y))))) throw std::invalid_argument("slice_scan: sample outside domain");
        us.push_back(u_at(scalar(y)));
      }
      report.samples += static_cast<int>(ys.size());
      for (size_t k = 0; k < ys.size(); ++k) {
        const double left = k > 0 ? us[k - 1] : -std::numeric_limits<double>::infinity();
        const double right = k + 1 < ys.size() ? us[k + 1] : -std::numeric_limits<double>::infinity();
        if (us[k] < left || us[k] < right) continue;
        candidates.push_back({scalar(ys[k]), us[k]});
        const double a = k > 0 ? ys[k - 1] : iv.lo;
        const double b = k + 1 < ys.size() ? ys[k + 1] : iv.hi;
        const double y = golden_max([&](double v) { return u_at(scalar(v)); }, a, b, opts.position_tol);
        const double uy = u_at(scalar(y));
        if (uy > us[k]) candidates.push_back({scalar(y), uy});
      }
    }
  } else {
    double R = opts.half_width_limit;
    if (s.ball_radius) R = *s.ball_radius;
    if (s.body) {
      R = 0.0;
      for (const auto& v : s.body->vertices()) R = std::max(R, v.norm());
    }
    const int d = transverse_dim(field);
    if (d != 2) throw std::invalid_argument("slice_scan: transverse dimension above 2 is not supported");
    std::vector<Candidate> samples;
    for (int i = 0; i < n_samples; ++i) {
      for (int j = 0; j < n_samples; ++j) {
        const Vec Y = Eigen::Vector2d(-R + 2.0 * R * (i + 0.5) / n_samples, -R + 2.0 * R * (j + 0.5) / n_samples);
        if (!domain.contains(Point(at_slice(t, Y)))) continue;
        samples.push_back({Y, u_at(Y)});
      }
    }
    if (domain.contains(Point(at_slice(t, Vec::Zero(2))))) samples.push_back({Vec::Zero(2), u_at(Vec::Zero(2))});
    if (samples.empty()) throw std::invalid_argument("slice_scan: empty slice");
    report.samples = static_cast<int>(samples.size());
    auto best = *std::max_element(samples.begin(), samples.end(),
                                  [](const Candidate& a, const Candidate& b) { return a.u < b.u; });
    candidates.push_back(best);
    // Compass search from the best sample.
    double step = 2.0 * R / n_samples;
    while (step > opts.position_tol) {
      bool moved = false;
      for (const auto& e : {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(0, -1)}) {
        const Vec Y = best.Y + step * Vec(e);
        if (!domain.contains(Point(at_slice(t, Y)))) continue;
        const double u = u_at(Y);
        if (u > best.u) {
          best = {Y, u};
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (best.u > candidates.front().u) candidates.push_back(best);
  }

  report.M = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) report.M = std::max(report.M, c.u);
  for (const auto& c : candidates) {
    if (c.u < report.M - 1e-12 * std::abs(report.M)) continue;
    const bool duplicate = std::any_of(report.argmax.begin(), report.argmax.end(), [&](const Vec& q) {
      return (q - at_slice(t, c.Y)).norm() <= 10.0 * opts.position_tol;
    });
    if (!duplicate) report.argmax.push_back(at_slice(t, c.Y));
  }

  const Vec centre = Vec::Zero(transverse_dim(field));
  if (domain.contains(Point(at_slice(t, centre)))) {
    report.center_value = u_at(centre);
    std::vector<Vec> dirs;
    if (centre.size() == 1) {
      dirs = {scalar(1.0), scalar(-1.0)};
    } else {
      for (int k = 0; k < 8; ++k) dirs.push_back(Eigen::Vector2d(std::cos(kPi * k / 4), std::sin(kPi * k / 4)));
    }
    for (const auto& dir : dirs) report.rays.push_back(ray_monotonicity(field, t, dir, 512, opts));
  } else {
    report.center_value = kNaN;
  }
  return report;
}

RayVerdict ray_monotonicity(const ScalarField& field, double t, const Vec& direction, int n_steps,
                            const SliceOptions& opts) {
  if (n_steps < 2) throw std::invalid_argument("ray_monotonicity: need at least 2 steps");
  if (direction.size() != transverse_dim(field) || !(direction.norm() > 0.0))
    throw std::invalid_argument("ray_monotonicity: bad direction");
  RayVerdict out;
  out.direction = direction.normalized();
  out.steps = n_steps;
  out.extent = ray_extent(field, t, out.direction, opts);
  std::vector<double> u(static_cast<size_t>(n_steps));
  for (int k = 0; k < n_steps; ++k) u[static_cast<size_t>(k)] = field.value(at_slice(t, (out.extent * k / n_steps) * out.direction));
  double scale = 0.0;
  for (const double v : u) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(scale, std::numeric_limits<double>::min());
  for (int k = 0; k + 1 < n_steps; ++k) {
    if (u[static_cast<size_t>(k + 1)] > u[static_cast<size_t>(k)] - tol) {
      out.strictly_decreasing = false;
      out.first_violation = Vec((out.extent * (k + 1) / n_steps) * out.direction);
      break;
    }
  }
  return out;
}

SuperharmonicityReport slice_superharmonicity(const ScalarField& field, double t, int n_samples,
                                              const SliceOptions& opts) {
  if (transverse_dim(field) != 1) throw std::invalid_argument("slice_superharmonicity: planar fields only");
  if (n_samples < 1) throw std::invalid_argument("slice_superharmonicity: need samples");
  SuperharmonicityReport out;
  out.t = t;
  out.min_dtt = std::numeric_limits<double>::infinity();
  for (const auto& iv : clipped_intervals(geometry::slice(field.domain(), t), opts.half_width_limit)) {
    for (int k = 1; k <= n_samples; ++k) {
      const Vec p = at_slice(t, scalar(iv.lo + (iv.hi - iv.lo) * k / (n_samples + 1)));
      try {
        const double dtt = field.hessian(p)(0, 0);
        if (!std::isfinite(dtt)) throw std::domain_error("non-finite");
        if (dtt < out.min_dtt) {
          out.min_dtt = dtt;
          out.argmin = p;
        }
        ++out.samples;
      } catch (const std::exception&) {
        ++out.skipped;
      }
    }
  }
  if (out.samples == 0) throw std::invalid_argument("slice_superharmonicity: no valid samples");
  return out;
}

std::optional<double> superharmonicity_onset(const ScalarField& field, const std::vector<double>& ts,
                                             int n_samples, const SliceOptions& opts) {
  std::optional<double> onset;
  for (const double t : ts) {
    if (slice_superharmonicity(field, t, n_samples, opts).min_dtt > 0.0) {
      if (!onset) onset = t;
    } else {
      onset.reset();
    }
  }
  return onset;
}

RescaleResult rescale_and_compare(const ScalarField& field, double s, const WindowBox& K, const CylinderMode& mode,
                                  int lattice, const SliceOptions& opts) {
  if (field.dim() != 2 || mode.d != 1) throw std::invalid_argument("rescale_and_compare: planar fields only");
  if (lattice < 3) throw std::invalid_argument("rescale_and_compare: lattice too small");
  const auto rd = geometry::rescaled_domain(field.domain(), s);
  RescaleResult out;
  out.s = s;
  out.M = slice_scan(field, s, 401, opts).M;
  if (!(out.M > 0.0)) throw std::domain_error("rescale_and_compare: M(s) <= 0");
  const double fs = rd.scale;
  auto v_s = [&](double tau, double eta) { return field.value(Vec(Vec2(s + fs * tau, fs * eta))) / out.M; };
  out.v_at_origin = v_s(0.0, 0.0);

  // Axis fit of A e^{k tau} + B e^{-k tau}, A, B >= 0.
  const double k = std::sqrt(mode.lambda);
  double aa = 0, ab = 0, bb = 0, ay = 0, by = 0;
  std::vector<std::array<double, 3>> axis;
  for (int i = 0; i < lattice; ++i) {
    const double tau = K.lower[0] + (K.upper[0] - K.lower[0]) * i / (lattice - 1);
    if (!rd.contains(Point(tau, 0.0))) continue;
    const double a = std::exp(k * tau), b = std::exp(-k * tau), y = v_s(tau, 0.0);
    axis.push_back({a, b, y});
    aa += a * a;
    ab += a * b;
    bb += b * b;
    ay += a * y;
    by += b * y;
  }
  if (axis.size() < 2) throw std::invalid_argument("rescale_and_compare: K misses the rescaled axis");
  auto sse = [&](double A, double B) {
    double e = 0.0;
    for (const auto& [a, b, y] : axis) e += (A * a + B * b - y) * (A * a + B * b - y);
    return e;
  };
  std::vector<std::pair<double, double>> feasible = {{std::max(0.0, ay / aa), 0.0}, {0.0, std::max(0.0, by / bb)}};
  const double det = aa * bb - ab * ab;
  if (det > 0.0) {
    const double A = (ay * bb - by * ab) / det, B = (aa * by - ab * ay) / det;
    if (A >= 0.0 && B >= 0.0) feasible.emplace_back(A, B);
  }
  auto best = *std::min_element(feasible.begin(), feasible.end(),
                                [&](const auto& l, const auto& r) { return sse(l.first, l.second) < sse(r.first, r.second); });
  out.fitted_A = best.first;
  out.fitted_B = best.second;

  for (int i = 0; i < lattice; ++i) {
    for (int j = 0; j < lattice; ++j) {
      const double tau = K.lower[0] + (K.upper[0] - K.lower[0]) * i / (lattice - 1);
      const double eta = K.lower[1] + (K.upper[1] - K.lower[1]) * j / (lattice - 1);
      if (!rd.contains(Point(tau, eta))) continue;
      const double limit =
          std::abs(eta) < 1.0 ? (out.fitted_A * std::exp(k * tau) + out.fitted_B * std::exp(-k * tau)) * mode.phi(scalar(eta)) : 0.0;
      out.sup_error = std::max(out.sup_error, std::abs(v_s(tau, eta) - limit));
      ++out.lattice_points;
    }
  }
  out.hausdorff = rescaled_hausdorff(field.domain(), s, K);
  return out;
}

double rescaled_hausdorff(const NamedDomain& domain, double s, const WindowBox& K, int n) {
  const auto rd = geometry::rescaled_domain(domain, s);
  if (rd.cross_section.dim() != 1) throw std::invalid_argument("rescaled_hausdorff: planar profiles only");
  const double half = std::max(std::abs(rd.cross_section.vertices()[0][0]), std::abs(rd.cross_section.vertices()[1][0]));
  const double w = std::min({-K.lower[0], K.upper[0], rd.axial_half_width});
  const double clip = std::min(-K.lower[1], K.upper[1]);
  const auto tube = geometry::tube_boundary([&](double t) { return half * rd.radius(t); }, w, clip, n);
  const auto cylinder = geometry::tube_boundary([&](double) { return half; }, w, clip, n);
  return geometry::hausdorff_distance(tube, cylinder);
}

DecayFit decay_fit(const std::function<double(double)>& g, const std::vector<double>& radii) {
  if (radii.size() < 4) throw std::invalid_argument("decay_fit: need at least 4 radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || *hi / *lo < 8.0 * (1.0 - 1e-12)) throw std::invalid_argument("decay_fit: radii must span a factor >= 8");
  DecayFit fit;
  fit.radii = radii;
  std::vector<double> lx, ly;
  for (const double r : radii) {
    const double v = g(r);
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("decay_fit: nonpositive sample at r = " + std::to_string(r));
    fit.values.push_back(v);
    lx.push_back(std::log(r));
    ly.push_back(std::log(v));
  }
  const double n = static_cast<double>(radii.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

std::vector<double> geometric_radii(double a, double b, int n) {
  if (!(a > 0.0) || !(b > a) || n < 2) throw std::invalid_argument("geometric_radii: need 0 < a < b and n >= 2");
  std::vector<double> r;
  for (int k = 0; k < n; ++k) r.push_back(a * std::pow(b / a, static_cast<double>(k) / (n - 1)));
  r.back() = b;
  return r;
}

double gap_derivative_magnitude(int order, double r, double angle) {
  const Complex z = std::polar(r, angle);
  switch (order) {
    case 0: return std::abs(fields::SlitSectorMartin::gap(z));
    case 1: return std::abs(fields::SlitSectorMartin::gap_d1(z));
    case 2: return std::abs(fields::SlitSectorMartin::gap_d2(z));
  }
  throw std::invalid_argument("gap_derivative_magnitude: order must be 0, 1 or 2");
}

TangentFormAsymptotic tangent_form_asymptotic(const std::vector<double>& radii, double angle) {
  const fields::SlitSectorMartin u;
  const fields::HalfplaneV v;
  auto point = [&](double r) { return Vec(Vec2(r * std::cos(angle), r * std::sin(angle))); };
  TangentFormAsymptotic out;
  out.fit = decay_fit(
      [&](double r) {
        const Vec p = point(r);
        return std::abs(levelset::tangent_hessian_form(u, p) + 8.0 * v.value(p));
      },
      radii);
  out.last_nonnegative_radius = kNaN;
  const double rmax = *std::max_element(radii.begin(), radii.end());
  for (const double r : geometric_radii(1e-2, rmax, 2000)) {
    try {
      if (levelset::tangent_hessian_form(u, point(r)) >= 0.0) out.last_nonnegative_radius = r;
    } catch (const std::exception&) {
    }
  }
  return out;
}

ThresholdResult convexity_threshold(const ScalarField& field, const std::vector<double>& c_grid,
                                    const ThresholdOptions& opts) {
  if (c_grid.empty()) throw std::invalid_argument("convexity_threshold: empty level grid");
  for (size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > 0.0) || (i > 0 && !(c_grid[i] > c_grid[i - 1])))
      throw std::invalid_argument("convexity_threshold: levels must be positive and increasing");
  }
  ThresholdResult out;
  bool any_decided = false;
  for (const double c : c_grid) {
    const double X = opts.window_scale * std::sqrt(c + 1.0) + opts.window_offset;
    const auto window = WindowBox::planar(0.0, X, -X, X);
    const auto curves = levelset::extract_level_curve(field, c, window, X / opts.cells);
    auto report = levelset::level_set_convexity(field, c, curves);
    any_decided = any_decided || report.verdict != levelset::Verdict::inconclusive;
    if (report.verdict == levelset::Verdict::non_convex) out.c_nonconvex = c;
    out.entries.push_back({c, std::move(report)});
  }
  if (!any_decided) {
    std::string msg = "convexity_threshold: every level inconclusive;";
    for (const auto& e : out.entries)
      msg += " c=" + std::to_string(e.c) + " deviation=" + std::to_string(e.report.hull_deviation);
    throw std::runtime_error(msg);
  }
  for (const auto& e : out.entries) {
    if (e.report.verdict == levelset::Verdict::convex && (!out.c_nonconvex || e.c > *out.c_nonconvex)) {
      out.c_convex = e.c;
      break;
    }
  }
  return out;
}

}  // namespace martin::slices
