#pragma once

#include "martin/core.hpp"
#include "martin/fields.hpp"
#include "martin/geometry.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace martin::green {

using geometry::NamedDomain;
using geometry::WindowBox;

enum class NodeKind : std::uint8_t { exterior, boundary, interior };

/// Uniform lattice on a planar window with a Dirichlet mask.
///
/// Nodes sit at window.lower + (i h, j h); flat index j * nx + i (rows along y).
/// A node is interior when it lies in the open domain and off the outermost
/// lattice rows and columns (the discrete window edge); boundary when it is not
/// interior but has an interior 4-neighbour.
class Grid2D {
 public:
  Grid2D(NamedDomain domain, WindowBox window, double h);

  const NamedDomain& domain() const { return domain_; }
  const WindowBox& window() const { return window_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  long size() const { return static_cast<long>(nx_) * ny_; }

  long flat(int i, int j) const { return static_cast<long>(j) * nx_ + i; }
  Vec2 node(int i, int j) const;
  Vec2 node(long flat_index) const { return node(static_cast<int>(flat_index % nx_), static_cast<int>(flat_index / nx_)); }
  NodeKind kind(long flat_index) const { return mask_[static_cast<size_t>(flat_index)]; }

  const std::vector<long>& interior_nodes() const { return interior_; }
  const std::vector<long>& boundary_nodes() const { return boundary_; }
  /// Position of a node in interior_nodes(), or -1.
  long interior_index(long flat_index) const { return interior_index_[static_cast<size_t>(flat_index)]; }
  /// Interior-index neighbours (E, W, N, S); -1 for non-interior neighbours.
  const std::vector<std::array<long, 4>>& interior_neighbours() const { return neighbours_; }

  /// Nearest node, if inside the lattice.
  std::optional<long> snap(const Vec2& p) const;

 private:
  NamedDomain domain_;
  WindowBox window_;
  double h_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<NodeKind> mask_;
  std::vector<long> interior_;
  std::vector<long> boundary_;
  std::vector<long> interior_index_;
  std::vector<std::array<long, 4>> neighbours_;
};

/// Throws if there are no interior nodes, the interior is disconnected, or h
/// exceeds a sixteenth of the window extent.
std::shared_ptr<const Grid2D> build_grid(const NamedDomain& domain, const WindowBox& window, double h);

struct SolveOptions {
  double rel_tol = 1e-10;
  long max_iterations = 1'000'000;
  int threads = 0;  // 0: MARTIN_THREADS
};

struct SolveStats {
  long iterations = 0;
  double rel_residual = 0.0;
};

/// Node values on a grid; bilinear between nodes. Exterior nodes hold NaN.
class GridField final : public fields::ScalarField {
 public:
  GridField(std::shared_ptr<const Grid2D> grid, std::vector<double> values, SolveStats stats = {});

  std::string name() const override { return "grid"; }
  double value(const Vec& p) const override;

  const Grid2D& grid() const { return *grid_; }
  std::shared_ptr<const Grid2D> grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(long flat_index) const { return values_[static_cast<size_t>(flat_index)]; }
  const SolveStats& stats() const { return stats_; }

 private:
  std::shared_ptr<const Grid2D> grid_;
  std::vector<double> values_;
  SolveStats stats_;
};

/// -Δ_h u = source on interior nodes, u = boundary_data on boundary nodes
/// (aligned with grid.boundary_nodes()). Preconditioned conjugate gradients.
GridField solve_dirichlet(std::shared_ptr<const Grid2D> grid, std::span<const double> boundary_data,
                          std::span<const double> source, const SolveOptions& options = {});

/// Discrete Green function: -Δ_h G = δ_pole / h^2 with zero Dirichlet data.
GridField green_function(std::shared_ptr<const Grid2D> grid, const Vec2& pole,
                         const SolveOptions& options = {.rel_tol = 1e-12});

struct MartinApproxConfig {
  Vec2 x0{0.5, 0.0};
  std::vector<double> poles;          // axial positions s_n; poles at (s_n, 0)
  WindowBox probe = WindowBox::planar(0.5, 2.0, -1.0, 1.0);
  double truncation_factor = 2.0;     // window axial extent = factor * s_n
  double lateral_half_width = 0.0;    // 0: natural width, or factor * s_n for unbounded slices
  SolveOptions solver{.rel_tol = 1e-10};
};

struct MartinIterate {
  int index = 0;
  double pole = 0.0;
  double normalization = 0.0;  // G(x0, x_n) by bilinear interpolation
  std::shared_ptr<const GridField> ratio;
};

struct ProbeSample {
  Vec2 point;
  double value;
};

struct MartinResult {
  std::vector<MartinIterate> iterates;
  /// max over probe nodes of |u_{n+1} - u_n|
  std::vector<double> cauchy;
  /// Final iterate on probe-window nodes, row-major (y outer, x inner).
  std::vector<ProbeSample> probe_values;
  int probe_nx = 0;
  int probe_ny = 0;
};

/// Truncated window for a pole at axial position s.
WindowBox truncation_window(const NamedDomain& domain, double s, double h, const MartinApproxConfig& cfg);

/// u_n = G(., x_n) / G(x0, x_n) for the configured poles; the last iterate is the approximation.
MartinResult martin_ratio(const NamedDomain& domain, const MartinApproxConfig& cfg, double h);

/// Probe-window nodes where the iterate exceeds c (empty when c exceeds its max).
std::vector<Vec2> superlevel_of_iterate(const MartinIterate& it, double c, const WindowBox& probe);

/// Harmonic measure of the inner body in a convex ring: 1 on B, 0 on the outer boundary.
GridField convex_ring_solution(const NamedDomain& ring, double h, const SolveOptions& options = {});

}  // namespace martin::green
