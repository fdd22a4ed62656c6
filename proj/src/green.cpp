#include "martin/green.hpp"

#include "martin/parallel.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace martin::green {

using geometry::DomainKind;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int lattice_count(double lo, double hi, double h) {
  return static_cast<int>(std::floor((hi - lo) / h + 1e-9)) + 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid2D::Grid2D(NamedDomain domain, WindowBox window, double h)
    : domain_(std::move(domain)), window_(std::move(window)), h_(h) {
  if (domain_.dim() != 2 || window_.dim() != 2) throw std::invalid_argument("build_grid: planar domains only");
  if (!(h > 0.0)) throw std::invalid_argument("build_grid: h must be positive");
  const double ex = window_.upper[0] - window_.lower[0];
  const double ey = window_.upper[1] - window_.lower[1];
  if (h > std::min(ex, ey) / 16.0 * (1.0 + 1e-12))
    throw std::invalid_argument("build_grid: h exceeds window extent / 16");
  nx_ = lattice_count(window_.lower[0], window_.upper[0], h);
  ny_ = lattice_count(window_.lower[1], window_.upper[1], h);

  mask_.assign(static_cast<size_t>(size()), NodeKind::exterior);
  for (int j = 1; j + 1 < ny_; ++j)
    for (int i = 1; i + 1 < nx_; ++i)
      if (domain_.contains(Point(node(i, j)))) mask_[static_cast<size_t>(flat(i, j))] = NodeKind::interior;

  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  interior_index_.assign(static_cast<size_t>(size()), -1);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const long f = flat(i, j);
      if (mask_[static_cast<size_t>(f)] == NodeKind::interior) {
        interior_index_[static_cast<size_t>(f)] = static_cast<long>(interior_.size());
        interior_.push_back(f);
        continue;
      }
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k], b = j + dj[k];
        if (a < 0 || b < 0 || a >= nx_ || b >= ny_) continue;
        if (mask_[static_cast<size_t>(flat(a, b))] == NodeKind::interior) {
          mask_[static_cast<size_t>(f)] = NodeKind::boundary;
          break;
        }
      }
    }
  }
  for (long f = 0; f < size(); ++f)
    if (mask_[static_cast<size_t>(f)] == NodeKind::boundary) boundary_.push_back(f);

  neighbours_.resize(interior_.size());
  for (size_t k = 0; k < interior_.size(); ++k) {
    const int i = static_cast<int>(interior_[k] % nx_);
    const int j = static_cast<int>(interior_[k] / nx_);
    for (int m = 0; m < 4; ++m) neighbours_[k][m] = interior_index_[static_cast<size_t>(flat(i + di[m], j + dj[m]))];
  }
}

Vec2 Grid2D::node(int i, int j) const {
  return {window_.lower[0] + i * h_, window_.lower[1] + j * h_};
}

std::optional<long> Grid2D::snap(const Vec2& p) const {
  const long i = std::lround((p.x() - window_.lower[0]) / h_);
  const long j = std::lround((p.y() - window_.lower[1]) / h_);
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  return flat(static_cast<int>(i), static_cast<int>(j));
}

std::shared_ptr<const Grid2D> build_grid(const NamedDomain& domain, const WindowBox& window, double h) {
  auto grid = std::make_shared<const Grid2D>(domain, window, h);
  const auto& interior = grid->interior_nodes();
  if (interior.empty()) throw std::invalid_argument("build_grid: no interior nodes");
  std::vector<char> seen(interior.size(), 0);
  std::deque<long> queue{0};
  seen[0] = 1;
  size_t reached = 1;
  while (!queue.empty()) {
    const long k = queue.front();
    queue.pop_front();
    for (const long n : grid->interior_neighbours()[static_cast<size_t>(k)]) {
      if (n < 0 || seen[static_cast<size_t>(n)]) continue;
      seen[static_cast<size_t>(n)] = 1;
      ++reached;
      queue.push_back(n);
    }
  }
  if (reached != interior.size()) throw std::invalid_argument("build_grid: interior is disconnected");
  return grid;
}

// ---------------------------------------------------------------------------
// Grid fields

GridField::GridField(std::shared_ptr<const Grid2D> grid, std::vector<double> values, SolveStats stats)
    : ScalarField(grid->domain()), grid_(std::move(grid)), values_(std::move(values)), stats_(stats) {
  if (static_cast<long>(values_.size()) != grid_->size()) throw std::invalid_argument("GridField: size mismatch");
}

double GridField::value(const Vec& p) const {
  const auto& g = *grid_;
  const double h = g.h();
  const double fx = (p[0] - g.window().lower[0]) / h;
  const double fy = (p[1] - g.window().lower[1]) / h;
  if (fx < -1e-9 || fy < -1e-9 || fx > g.nx() - 1 + 1e-9 || fy > g.ny() - 1 + 1e-9)
    throw std::domain_error("GridField: point outside the grid");
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
  const double ax = std::clamp(fx - i, 0.0, 1.0);
  const double ay = std::clamp(fy - j, 0.0, 1.0);
  const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
  const long f[4] = {g.flat(i, j), g.flat(i + 1, j), g.flat(i, j + 1), g.flat(i + 1, j + 1)};
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (w[k] == 0.0) continue;
    const double v = values_[static_cast<size_t>(f[k])];
    if (std::isnan(v)) throw std::domain_error("GridField: interpolation touches an exterior node");
    sum += w[k] * v;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Solver

GridField solve_dirichlet(std::shared_ptr<const Grid2D> grid, std::span<const double> boundary_data,
                          std::span<const double> source, const SolveOptions& options) {
  const auto& g = *grid;
  const auto& interior = g.interior_nodes();
  const auto& boundary = g.boundary_nodes();
  if (boundary_data.size() != boundary.size() || source.size() != interior.size())
    throw std::invalid_argument("solve_dirichlet: data sizes do not match the grid");

  const long n = static_cast<long>(interior.size());
  const double h2 = g.h() * g.h();
  const double diag = 4.0 / h2;
  const int threads = options.threads > 0 ? options.threads : thread_count();

  std::vector<double> values(static_cast<size_t>(g.size()), kNaN);
  for (size_t k = 0; k < boundary.size(); ++k) values[static_cast<size_t>(boundary[k])] = boundary_data[k];

  // Right-hand side: source plus eliminated Dirichlet neighbours.
  Eigen::VectorXd b(n);
  {
    const int nx = g.nx();
    const long offsets[4] = {1, -1, nx, -nx};
    for (long k = 0; k < n; ++k) {
      double rhs = source[static_cast<size_t>(k)];
      const auto& nb = g.interior_neighbours()[static_cast<size_t>(k)];
      for (int m = 0; m < 4; ++m)
        if (nb[m] < 0) rhs += values[static_cast<size_t>(interior[static_cast<size_t>(k)] + offsets[m])] / h2;
      b[k] = rhs;
    }
  }

  const auto& nbrs = g.interior_neighbours();
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    parallel_for(n, threads, [&](long begin, long end) {
      for (long k = begin; k < end; ++k) {
        double s = 4.0 * x[k];
        for (const long m : nbrs[static_cast<size_t>(k)])
          if (m >= 0) s -= x[m];
        y[k] = s / h2;
      }
    });
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  SolveStats stats;
  const double bnorm = b.norm();
  if (bnorm > 0.0) {
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = r / diag;
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(n);
    double rz = r.dot(z);
    double rel = 1.0;
    long it = 0;
    while (it < options.max_iterations) {
      apply(p, q);
      const double alpha = rz / p.dot(q);
      x += alpha * p;
      r -= alpha * q;
      ++it;
      rel = r.norm() / bnorm;
      if (rel <= options.rel_tol) break;
      z = r / diag;
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    stats = {it, rel};
    if (rel > options.rel_tol) {
      std::ostringstream os;
      os << "solve_dirichlet: no convergence after " << it << " iterations (relative residual " << rel << ")";
      throw SolverError(os.str(), rel, it);
    }
  }
  for (long k = 0; k < n; ++k) values[static_cast<size_t>(interior[static_cast<size_t>(k)])] = x[k];
  return GridField(std::move(grid), std::move(values), stats);
}

GridField green_function(std::shared_ptr<const Grid2D> grid, const Vec2& pole, const SolveOptions& options) {
  const auto node = grid->snap(pole);
  if (!node || grid->kind(*node) != NodeKind::interior)
    throw std::invalid_argument("green_function: pole does not snap to an interior node");
  std::vector<double> source(grid->interior_nodes().size(), 0.0);
  source[static_cast<size_t>(grid->interior_index(*node))] = 1.0 / (grid->h() * grid->h());
  const std::vector<double> zeros(grid->boundary_nodes().size(), 0.0);
  return solve_dirichlet(std::move(grid), zeros, source, options);
}

// ---------------------------------------------------------------------------
// Green ratio

WindowBox truncation_window(const NamedDomain& domain, double s, double h, const MartinApproxConfig& cfg) {
  const double T = cfg.truncation_factor;
  const double x1 = h * std::ceil(T * s / h - 1e-9);
  double x0 = 0.0;
  double lateral = 0.0;
  const double wide = cfg.lateral_half_width > 0.0 ? cfg.lateral_half_width * s : T * s;
  switch (domain.kind()) {
    case DomainKind::strip: lateral = kHalfPi; break;
    case DomainKind::sector:
    case DomainKind::sector_minus_slit: lateral = x1; break;
    case DomainKind::right_halfplane:
    case DomainKind::halfplane_minus_disk: lateral = wide; break;
    case DomainKind::whole_space:
      x0 = -x1;
      lateral = wide;
      break;
    case DomainKind::cylinder:
      x0 = -x1;
      lateral = 1.0;
      break;
    case DomainKind::profile: {
      const auto& pd = domain.profile_domain();
      double r = 0.0;
      for (const auto& v : pd.cross_section.vertices()) r = std::max(r, v.norm());
      lateral = pd.profile.f(x1) * r;
      break;
    }
    case DomainKind::convex_ring:
      throw std::invalid_argument("truncation_window: bounded domain needs no truncation");
  }
  const double y = h * std::ceil(lateral / h - 1e-9);
  return WindowBox::planar(x0, x1, -y, y);
}

MartinResult martin_ratio(const NamedDomain& domain, const MartinApproxConfig& cfg, double h) {
  if (cfg.poles.empty()) throw std::invalid_argument("martin_ratio: no poles");
  for (size_t k = 0; k < cfg.poles.size(); ++k) {
    if (!(cfg.poles[k] > 0.0)) throw std::invalid_argument("martin_ratio: poles must be positive");
    if (k > 0 && !(cfg.poles[k] > cfg.poles[k - 1]))
      throw std::invalid_argument("martin_ratio: poles must be strictly increasing");
  }
  if (!domain.contains(Point(cfg.x0))) throw std::invalid_argument("martin_ratio: x0 is not interior");

  MartinResult result;
  for (size_t k = 0; k < cfg.poles.size(); ++k) {
    const double s = cfg.poles[k];
    const auto window = truncation_window(domain, s, h, cfg);
    if (!cfg.probe.inside(window, 1e-12))
      throw std::invalid_argument("martin_ratio: probe window not inside the truncation for pole " +
                                  std::to_string(s));
    if (!window.contains(cfg.x0)) throw std::invalid_argument("martin_ratio: x0 outside truncation window");
    const auto grid = build_grid(domain, window, h);
    const auto G = green_function(grid, Vec2(s, 0.0), cfg.solver);
    const double norm = G.value(cfg.x0);
    if (!(norm > 0.0)) throw std::runtime_error("martin_ratio: Green function not positive at x0");
    std::vector<double> ratio = G.values();
    for (auto& v : ratio) v /= norm;
    MartinIterate it;
    it.index = static_cast<int>(k);
    it.pole = s;
    it.normalization = norm;
    it.ratio = std::make_shared<const GridField>(grid, std::move(ratio), G.stats());
    result.iterates.push_back(std::move(it));
  }

  // Probe nodes on the shared lattice (origin and spacing agree across truncations).
  const auto& last = *result.iterates.back().ratio;
  const auto& lg = last.grid();
  std::vector<long> probe_nodes;
  int pnx = 0, pny = 0;
  {
    int i0 = lg.nx(), i1 = -1, j0 = lg.ny(), j1 = -1;
    for (int j = 0; j < lg.ny(); ++j) {
      for (int i = 0; i < lg.nx(); ++i) {
        if (!cfg.probe.contains(lg.node(i, j), 1e-9 * h)) continue;
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
        j0 = std::min(j0, j);
        j1 = std::max(j1, j);
      }
    }
    if (i1 < i0 || j1 < j0) throw std::invalid_argument("martin_ratio: probe window contains no nodes");
    pnx = i1 - i0 + 1;
    pny = j1 - j0 + 1;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) probe_nodes.push_back(lg.flat(i, j));
  }
  result.probe_nx = pnx;
  result.probe_ny = pny;
  for (const long f : probe_nodes) result.probe_values.push_back({lg.node(f), last.at(f)});

  for (size_t k = 0; k + 1 < result.iterates.size(); ++k) {
    const auto& a = *result.iterates[k].ratio;
    const auto& b = *result.iterates[k + 1].ratio;
    double eps = 0.0;
    for (const long f : probe_nodes) {
      const Vec2 p = lg.node(f);
      if (std::isnan(last.at(f))) continue;
      eps = std::max(eps, std::abs(b.value(p) - a.value(p)));
    }
    result.cauchy.push_back(eps);
  }
  return result;
}

std::vector<Vec2> superlevel_of_iterate(const MartinIterate& it, double c, const WindowBox& probe) {
  if (!(c > 0.0)) throw std::invalid_argument("superlevel_of_iterate: c must be positive");
  std::vector<Vec2> cloud;
  const auto& g = it.ratio->grid();
  for (const long f : g.interior_nodes()) {
    const Vec2 p = g.node(f);
    if (probe.contains(p, 1e-9 * g.h()) && it.ratio->at(f) > c) cloud.push_back(p);
  }
  return cloud;
}

GridField convex_ring_solution(const NamedDomain& ring, double h, const SolveOptions& options) {
  if (ring.kind() != DomainKind::convex_ring) throw std::invalid_argument("convex_ring_solution: not a ring");
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& v : ring.ring_outer().vertices()) {
    lo = lo.cwiseMin(Vec2(v));
    hi = hi.cwiseMax(Vec2(v));
  }
  const auto grid = build_grid(ring, WindowBox::planar(lo.x(), hi.x(), lo.y(), hi.y()), h);
  std::vector<double> data;
  data.reserve(grid->boundary_nodes().size());
  for (const long f : grid->boundary_nodes())
    data.push_back(ring.ring_inner().contains_closed(grid->node(f)) ? 1.0 : 0.0);
  const std::vector<double> source(grid->interior_nodes().size(), 0.0);
  return solve_dirichlet(grid, data, source, options);
}

}  // namespace martin::green
