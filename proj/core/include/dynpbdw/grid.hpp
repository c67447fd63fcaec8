#ifndef DYNPBDW_GRID_HPP
#define DYNPBDW_GRID_HPP

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace dynpbdw {

/// Periodic uniform grid on [-L_x, L_x) (times [-L_y, L_y) in 2D). The
/// duplicate periodic endpoint is excluded, so the quadrature weight of
/// every node equals prod(h) and the trapezoid rule coincides with the
/// rectangle rule. 2D fields are stored row-major, y-major then x.
struct SpatialGrid {
  int dim = 1;
  std::array<double, 2> half_extent{1.0, 1.0};
  std::array<int, 2> count{1, 1};

  static SpatialGrid make_1d(double half_extent_x, int n_x);
  static SpatialGrid make_2d(double half_extent_x, double half_extent_y,
                             int n_x, int n_y);

  double spacing(int axis) const {
    return 2.0 * half_extent[axis] / static_cast<double>(count[axis]);
  }
  int num_points() const {
    return dim == 1 ? count[0] : count[0] * count[1];
  }
  /// Uniform quadrature weight, prod(h) over the axes.
  double quad_weight() const;
  double coord(int axis, int index) const {
    return -half_extent[axis] + index * spacing(axis);
  }
  int index(int ix, int iy) const { return iy * count[0] + ix; }

  /// Wraps a coordinate difference into [-L, L) (minimum image).
  double min_image(double delta, int axis) const;
  /// Wraps an absolute coordinate into [-L, L).
  double wrap(double x, int axis) const;

  bool operator==(const SpatialGrid&) const = default;
};

/// A phase-space field (q, p) sampled on a grid; the discrete home of
/// u = (u^q, u^p) in V.
struct GridFunction {
  SpatialGrid grid;
  Eigen::VectorXd q, p;

  static GridFunction zero(const SpatialGrid& g);
};

/// <u, v> = <u^q, v^q> + <u^p, v^p>, each block by grid quadrature.
double inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

/// 3-point (1D) / 5-point (2D) periodic Laplacian stencil, divided by h^2.
Eigen::VectorXd laplacian(const SpatialGrid& grid, const Eigen::VectorXd& f);
/// Centered second-order periodic first derivative along an axis.
Eigen::VectorXd derivative(const SpatialGrid& grid, const Eigen::VectorXd& f,
                           int axis);
/// Adjoint-consistent divergence: sum of centered differences per axis.
Eigen::VectorXd divergence(const SpatialGrid& grid,
                           const std::vector<Eigen::VectorXd>& components);

// Binary format: little-endian, header (dim, N_x[, N_y] as int64,
// h_x[, h_y] as f64), then the q block and the p block as f64.
void write_grid_function(std::ostream& os, const GridFunction& f);
GridFunction read_grid_function(std::istream& is);
void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path);

}  // namespace dynpbdw

#endif
