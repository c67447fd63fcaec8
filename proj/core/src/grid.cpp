#include "dynpbdw/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary grid-function format assumes a little-endian host");

namespace dynpbdw {

SpatialGrid SpatialGrid::make_1d(double half_extent_x, int n_x) {
  if (half_extent_x <= 0.0 || n_x < 1) {
    throw std::invalid_argument("SpatialGrid: need L > 0 and N >= 1");
  }
  SpatialGrid g;
  g.dim = 1;
  g.half_extent = {half_extent_x, 0.0};
  g.count = {n_x, 1};
  return g;
}

SpatialGrid SpatialGrid::make_2d(double half_extent_x, double half_extent_y,
                                 int n_x, int n_y) {
  if (half_extent_x <= 0.0 || half_extent_y <= 0.0 || n_x < 1 || n_y < 1) {
    throw std::invalid_argument("SpatialGrid: need L > 0 and N >= 1");
  }
  SpatialGrid g;
  g.dim = 2;
  g.half_extent = {half_extent_x, half_extent_y};
  g.count = {n_x, n_y};
  return g;
}

double SpatialGrid::quad_weight() const {
  double w = spacing(0);
  if (dim == 2) w *= spacing(1);
  return w;
}

double SpatialGrid::min_image(double delta, int axis) const {
  const double period = 2.0 * half_extent[axis];
  double d = std::remainder(delta, period);
  // std::remainder returns values in [-period/2, period/2]; fold the upper
  // endpoint onto the lower one to keep the convention half-open.
  if (d == half_extent[axis]) d = -half_extent[axis];
  return d;
}

double SpatialGrid::wrap(double x, int axis) const {
  return min_image(x, axis);
}

GridFunction GridFunction::zero(const SpatialGrid& g) {
  GridFunction f;
  f.grid = g;
  f.q = Eigen::VectorXd::Zero(g.num_points());
  f.p = Eigen::VectorXd::Zero(g.num_points());
  return f;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) {
    throw std::invalid_argument("inner_product: grid mismatch");
  }
  return f.grid.quad_weight() * (f.q.dot(g.q) + f.p.dot(g.p));
}

double norm(const GridFunction& f) {
  return std::sqrt(inner_product(f, f));
}

namespace {

inline int wrap_index(int i, int n) {
  return (i % n + n) % n;
}

}  // namespace

Eigen::VectorXd laplacian(const SpatialGrid& grid, const Eigen::VectorXd& f) {
  const int nx = grid.count[0];
  Eigen::VectorXd out(f.size());
  if (grid.dim == 1) {
    const double inv_h2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    for (int i = 0; i < nx; ++i) {
      out[i] = (f[wrap_index(i - 1, nx)] - 2.0 * f[i] +
                f[wrap_index(i + 1, nx)]) * inv_h2;
    }
    return out;
  }
  const int ny = grid.count[1];
  const double inv_hx2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double inv_hy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int c = grid.index(i, j);
      out[c] = (f[grid.index(wrap_index(i - 1, nx), j)] - 2.0 * f[c] +
                f[grid.index(wrap_index(i + 1, nx), j)]) * inv_hx2 +
               (f[grid.index(i, wrap_index(j - 1, ny))] - 2.0 * f[c] +
                f[grid.index(i, wrap_index(j + 1, ny))]) * inv_hy2;
    }
  }
  return out;
}

Eigen::VectorXd derivative(const SpatialGrid& grid, const Eigen::VectorXd& f,
                           int axis) {
  if (axis < 0 || axis >= grid.dim) {
    throw std::invalid_argument("derivative: axis out of range");
  }
  const int nx = grid.count[0];
  Eigen::VectorXd out(f.size());
  if (grid.dim == 1) {
    const double inv_2h = 0.5 / grid.spacing(0);
    for (int i = 0; i < nx; ++i) {
      out[i] = (f[wrap_index(i + 1, nx)] - f[wrap_index(i - 1, nx)]) * inv_2h;
    }
    return out;
  }
  const int ny = grid.count[1];
  const double inv_2h = 0.5 / grid.spacing(axis);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double fwd, bwd;
      if (axis == 0) {
        fwd = f[grid.index(wrap_index(i + 1, nx), j)];
        bwd = f[grid.index(wrap_index(i - 1, nx), j)];
      } else {
        fwd = f[grid.index(i, wrap_index(j + 1, ny))];
        bwd = f[grid.index(i, wrap_index(j - 1, ny))];
      }
      out[grid.index(i, j)] = (fwd - bwd) * inv_2h;
    }
  }
  return out;
}

Eigen::VectorXd divergence(const SpatialGrid& grid,
                           const std::vector<Eigen::VectorXd>& components) {
  if (static_cast<int>(components.size()) != grid.dim) {
    throw std::invalid_argument("divergence: one component per axis required");
  }
  Eigen::VectorXd out = derivative(grid, components[0], 0);
  for (int a = 1; a < grid.dim; ++a) {
    out += derivative(grid, components[a], a);
  }
  return out;
}

namespace {

void write_i64(std::ostream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::int64_t read_i64(std::istream& is) {
  std::int64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw std::runtime_error("grid function stream: truncated header");
  return v;
}

double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw std::runtime_error("grid function stream: truncated header");
  return v;
}

}  // namespace

void write_grid_function(std::ostream& os, const GridFunction& f) {
  write_i64(os, f.grid.dim);
  write_i64(os, f.grid.count[0]);
  if (f.grid.dim == 2) write_i64(os, f.grid.count[1]);
  write_f64(os, f.grid.spacing(0));
  if (f.grid.dim == 2) write_f64(os, f.grid.spacing(1));
  const auto n_bytes =
      static_cast<std::streamsize>(f.q.size() * sizeof(double));
  os.write(reinterpret_cast<const char*>(f.q.data()), n_bytes);
  os.write(reinterpret_cast<const char*>(f.p.data()), n_bytes);
}

GridFunction read_grid_function(std::istream& is) {
  const auto dim = read_i64(is);
  if (dim != 1 && dim != 2) {
    throw std::runtime_error("grid function stream: malformed header (dim)");
  }
  const auto nx = read_i64(is);
  const auto ny = (dim == 2) ? read_i64(is) : 1;
  if (nx < 1 || ny < 1) {
    throw std::runtime_error("grid function stream: malformed header (count)");
  }
  const double hx = read_f64(is);
  const double hy = (dim == 2) ? read_f64(is) : 0.0;
  if (hx <= 0.0 || (dim == 2 && hy <= 0.0)) {
    throw std::runtime_error("grid function stream: malformed header (h)");
  }
  GridFunction f;
  f.grid = (dim == 1)
               ? SpatialGrid::make_1d(0.5 * hx * nx, static_cast<int>(nx))
               : SpatialGrid::make_2d(0.5 * hx * nx, 0.5 * hy * ny,
                                      static_cast<int>(nx),
                                      static_cast<int>(ny));
  const auto n = f.grid.num_points();
  f.q.resize(n);
  f.p.resize(n);
  const auto n_bytes = static_cast<std::streamsize>(n * sizeof(double));
  is.read(reinterpret_cast<char*>(f.q.data()), n_bytes);
  is.read(reinterpret_cast<char*>(f.p.data()), n_bytes);
  if (!is) throw std::runtime_error("grid function stream: truncated payload");
  return f;
}

void save_grid_function(const std::string& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_grid_function(os, f);
}

GridFunction load_grid_function(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_grid_function(is);
}

}  // namespace dynpbdw
