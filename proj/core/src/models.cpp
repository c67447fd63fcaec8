#include "dynpbdw/models.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dynpbdw {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::NLS1D: return "nls1d";
    case ModelKind::SWE1D: return "swe1d";
    case ModelKind::SWE2D: return "swe2d";
    case ModelKind::Oscillator: return "oscillator";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "nls1d") return ModelKind::NLS1D;
  if (name == "swe1d") return ModelKind::SWE1D;
  if (name == "swe2d") return ModelKind::SWE2D;
  if (name == "oscillator") return ModelKind::Oscillator;
  throw std::invalid_argument("unknown model kind: " + name);
}

ModelSpec ModelSpec::make(ModelKind kind, const SpatialGrid& grid) {
  ModelSpec spec;
  spec.kind = kind;
  spec.grid = grid;
  switch (kind) {
    case ModelKind::NLS1D:
      spec.parameter_box = {{{0.98, 1.1}, {0.98, 1.1}}};
      break;
    case ModelKind::SWE1D:
      spec.parameter_box = {{{1.0 / 10.0, 1.0 / 7.0}, {2.0 / 10.0, 15.0 / 10.0}}};
      break;
    case ModelKind::SWE2D:
      spec.parameter_box = {{{1.0 / 5.0, 1.0 / 2.0}, {11.0 / 10.0, 17.0 / 10.0}}};
      break;
    case ModelKind::Oscillator:
      spec.parameter_box = {{{0.0, 1.0}, {0.0, 1.0}}};
      break;
  }
  if ((kind == ModelKind::SWE2D) != (grid.dim == 2)) {
    throw std::invalid_argument("model/grid dimension mismatch");
  }
  return spec;
}

bool ModelSpec::theta_in_box(const Theta& theta) const {
  for (int a = 0; a < 2; ++a) {
    if (theta[a] < parameter_box[a][0] - 1e-14 ||
        theta[a] > parameter_box[a][1] + 1e-14) {
      return false;
    }
  }
  return true;
}

ParameterGrid ParameterGrid::make(const ModelSpec& spec, int train_per_axis,
                                  int test_per_axis) {
  if (train_per_axis < 1 || test_per_axis < 1) {
    throw std::invalid_argument("parameter grid: need >= 1 point per axis");
  }
  ParameterGrid pg;
  auto train_coord = [&](int axis, int i) {
    const double lo = spec.parameter_box[axis][0];
    const double hi = spec.parameter_box[axis][1];
    if (train_per_axis == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / (train_per_axis - 1);
  };
  // Test parameters sit at cell midpoints of the open interior so that
  // Theta_s and Theta_h never coincide.
  auto test_coord = [&](int axis, int i) {
    const double lo = spec.parameter_box[axis][0];
    const double hi = spec.parameter_box[axis][1];
    return lo + (hi - lo) * (i + 0.5) / test_per_axis;
  };
  for (int j = 0; j < train_per_axis; ++j) {
    for (int i = 0; i < train_per_axis; ++i) {
      pg.theta_h.emplace_back(train_coord(0, i), train_coord(1, j));
    }
  }
  for (int j = 0; j < test_per_axis; ++j) {
    for (int i = 0; i < test_per_axis; ++i) {
      pg.theta_s.emplace_back(test_coord(0, i), test_coord(1, j));
    }
  }
  return pg;
}

GridFunction initial_condition(const ModelSpec& spec, const Theta& theta) {
  if (!spec.theta_in_box(theta)) {
    throw std::invalid_argument("initial_condition: theta outside box");
  }
  GridFunction u = GridFunction::zero(spec.grid);
  const auto& g = spec.grid;
  switch (spec.kind) {
    case ModelKind::NLS1D: {
      const double alpha = theta[0];
      for (int i = 0; i < g.count[0]; ++i) {
        const double x = g.coord(0, i);
        const double amp = std::sqrt(2.0) / std::cosh(alpha * x);
        u.q[i] = amp * std::cos(0.5 * x);
        u.p[i] = amp * std::sin(0.5 * x);
      }
      break;
    }
    case ModelKind::SWE1D: {
      const double alpha = theta[0];
      const double beta_ic = theta[1];
      for (int i = 0; i < g.count[0]; ++i) {
        const double x = g.coord(0, i);
        u.q[i] = 1.0 + alpha * std::exp(-beta_ic * x * x);
      }
      break;
    }
    case ModelKind::SWE2D: {
      const double alpha = theta[0];
      const double beta_ic = theta[1];
      for (int j = 0; j < g.count[1]; ++j) {
        for (int i = 0; i < g.count[0]; ++i) {
          const double x = g.coord(0, i);
          const double y = g.coord(1, j);
          u.q[g.index(i, j)] = 1.0 + alpha * std::exp(-beta_ic * (x * x + y * y));
        }
      }
      break;
    }
    case ModelKind::Oscillator:
      u.q.setOnes();
      break;
  }
  return u;
}

GridFunction vector_field(const ModelSpec& spec, const Theta& theta,
                          const GridFunction& u) {
  if (!(u.grid == spec.grid)) {
    throw std::invalid_argument("vector_field: grid mismatch");
  }
  GridFunction f = GridFunction::zero(spec.grid);
  switch (spec.kind) {
    case ModelKind::NLS1D: {
      const double eps = theta[1];
      const Eigen::VectorXd r = u.q.array().square() + u.p.array().square();
      f.q = -laplacian(spec.grid, u.p) - eps * r.cwiseProduct(u.p);
      f.p = laplacian(spec.grid, u.q) + eps * r.cwiseProduct(u.q);
      break;
    }
    case ModelKind::SWE1D: {
      const Eigen::VectorXd dphi = derivative(spec.grid, u.p, 0);
      f.q = -derivative(spec.grid, u.q.cwiseProduct(dphi), 0);
      f.p = -0.5 * dphi.cwiseProduct(dphi) - u.q;
      break;
    }
    case ModelKind::SWE2D: {
      const Eigen::VectorXd dphix = derivative(spec.grid, u.p, 0);
      const Eigen::VectorXd dphiy = derivative(spec.grid, u.p, 1);
      f.q = -divergence(spec.grid,
                        {u.q.cwiseProduct(dphix), u.q.cwiseProduct(dphiy)});
      f.p = -0.5 * (dphix.cwiseProduct(dphix) + dphiy.cwiseProduct(dphiy)) -
            u.q;
      break;
    }
    case ModelKind::Oscillator:
      f.q = u.p;
      f.p = -u.q;
      break;
  }
  return f;
}

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline int wrap_index(int i, int n) { return (i % n + n) % n; }

Sparse laplacian_matrix(const SpatialGrid& g) {
  const int n = g.num_points();
  std::vector<Triplet> trip;
  trip.reserve(5 * n);
  const int nx = g.count[0];
  if (g.dim == 1) {
    const double inv_h2 = 1.0 / (g.spacing(0) * g.spacing(0));
    for (int i = 0; i < nx; ++i) {
      trip.emplace_back(i, wrap_index(i - 1, nx), inv_h2);
      trip.emplace_back(i, i, -2.0 * inv_h2);
      trip.emplace_back(i, wrap_index(i + 1, nx), inv_h2);
    }
  } else {
    const int ny = g.count[1];
    const double ix2 = 1.0 / (g.spacing(0) * g.spacing(0));
    const double iy2 = 1.0 / (g.spacing(1) * g.spacing(1));
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int c = g.index(i, j);
        trip.emplace_back(c, g.index(wrap_index(i - 1, nx), j), ix2);
        trip.emplace_back(c, g.index(wrap_index(i + 1, nx), j), ix2);
        trip.emplace_back(c, g.index(i, wrap_index(j - 1, ny)), iy2);
        trip.emplace_back(c, g.index(i, wrap_index(j + 1, ny)), iy2);
        trip.emplace_back(c, c, -2.0 * (ix2 + iy2));
      }
    }
  }
  Sparse m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Sparse derivative_matrix(const SpatialGrid& g, int axis) {
  const int n = g.num_points();
  std::vector<Triplet> trip;
  trip.reserve(2 * n);
  const int nx = g.count[0];
  const double inv_2h = 0.5 / g.spacing(axis);
  if (g.dim == 1) {
    for (int i = 0; i < nx; ++i) {
      trip.emplace_back(i, wrap_index(i + 1, nx), inv_2h);
      trip.emplace_back(i, wrap_index(i - 1, nx), -inv_2h);
    }
  } else {
    const int ny = g.count[1];
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int c = g.index(i, j);
        if (axis == 0) {
          trip.emplace_back(c, g.index(wrap_index(i + 1, nx), j), inv_2h);
          trip.emplace_back(c, g.index(wrap_index(i - 1, nx), j), -inv_2h);
        } else {
          trip.emplace_back(c, g.index(i, wrap_index(j + 1, ny)), inv_2h);
          trip.emplace_back(c, g.index(i, wrap_index(j - 1, ny)), -inv_2h);
        }
      }
    }
  }
  Sparse m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Sparse diagonal_matrix(const Eigen::VectorXd& d) {
  const int n = static_cast<int>(d.size());
  std::vector<Triplet> trip;
  trip.reserve(n);
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, d[i]);
  Sparse m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// Assembles [[qq, qp], [pq, pp]] into one 2N x 2N sparse matrix.
Sparse assemble_blocks(const Sparse& qq, const Sparse& qp, const Sparse& pq,
                       const Sparse& pp) {
  const int n = static_cast<int>(qq.rows());
  std::vector<Triplet> trip;
  trip.reserve(qq.nonZeros() + qp.nonZeros() + pq.nonZeros() + pp.nonZeros());
  auto append = [&](const Sparse& m, int ro, int co) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (Sparse::InnerIterator it(m, k); it; ++it) {
        trip.emplace_back(ro + static_cast<int>(it.row()),
                          co + static_cast<int>(it.col()), it.value());
      }
    }
  };
  append(qq, 0, 0);
  append(qp, 0, n);
  append(pq, n, 0);
  append(pp, n, n);
  Sparse out(2 * n, 2 * n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

Eigen::SparseMatrix<double> vector_field_jacobian(const ModelSpec& spec,
                                                  const Theta& theta,
                                                  const GridFunction& u) {
  const int n = spec.grid.num_points();
  switch (spec.kind) {
    case ModelKind::NLS1D: {
      const double eps = theta[1];
      const Sparse lap = laplacian_matrix(spec.grid);
      const Eigen::VectorXd qp2 = 2.0 * u.q.cwiseProduct(u.p);
      const Eigen::VectorXd q2 = u.q.array().square();
      const Eigen::VectorXd p2 = u.p.array().square();
      Sparse qq = diagonal_matrix(-eps * qp2);
      Sparse qp = (-lap - diagonal_matrix(eps * (q2 + 3.0 * p2))).pruned();
      Sparse pq = (lap + diagonal_matrix(eps * (3.0 * q2 + p2))).pruned();
      Sparse pp = diagonal_matrix(eps * qp2);
      return assemble_blocks(qq, qp, pq, pp);
    }
    case ModelKind::SWE1D: {
      const Sparse dx = derivative_matrix(spec.grid, 0);
      const Eigen::VectorXd dphi = derivative(spec.grid, u.p, 0);
      Sparse qq = (-dx * diagonal_matrix(dphi)).pruned();
      Sparse qp = (-dx * diagonal_matrix(u.q) * dx).pruned();
      Sparse pq = diagonal_matrix(Eigen::VectorXd::Constant(n, -1.0));
      Sparse pp = (-diagonal_matrix(dphi) * dx).pruned();
      return assemble_blocks(qq, qp, pq, pp);
    }
    case ModelKind::SWE2D: {
      const Sparse dx = derivative_matrix(spec.grid, 0);
      const Sparse dy = derivative_matrix(spec.grid, 1);
      const Eigen::VectorXd dphix = derivative(spec.grid, u.p, 0);
      const Eigen::VectorXd dphiy = derivative(spec.grid, u.p, 1);
      Sparse qq =
          (-dx * diagonal_matrix(dphix) - dy * diagonal_matrix(dphiy)).pruned();
      Sparse hdiag = diagonal_matrix(u.q);
      Sparse qp = (-dx * hdiag * dx - dy * hdiag * dy).pruned();
      Sparse pq = diagonal_matrix(Eigen::VectorXd::Constant(n, -1.0));
      Sparse pp =
          (-diagonal_matrix(dphix) * dx - diagonal_matrix(dphiy) * dy).pruned();
      return assemble_blocks(qq, qp, pq, pp);
    }
    case ModelKind::Oscillator: {
      Sparse zero(n, n);
      Sparse eye = diagonal_matrix(Eigen::VectorXd::Ones(n));
      Sparse neye = diagonal_matrix(Eigen::VectorXd::Constant(n, -1.0));
      return assemble_blocks(zero, eye, neye, zero);
    }
  }
  throw std::logic_error("unreachable");
}

double hamiltonian(const ModelSpec& spec, const Theta& theta,
                   const GridFunction& u) {
  const double w = spec.grid.quad_weight();
  switch (spec.kind) {
    case ModelKind::NLS1D: {
      // Kinetic part uses the same discrete Laplacian as the vector field
      // so that P_theta is the exact J-gradient of the discrete Hamiltonian.
      const double eps = theta[1];
      const double kinetic = -u.q.dot(laplacian(spec.grid, u.q)) -
                             u.p.dot(laplacian(spec.grid, u.p));
      const Eigen::VectorXd r = u.q.array().square() + u.p.array().square();
      return w * (0.5 * kinetic - 0.25 * eps * r.squaredNorm());
    }
    case ModelKind::SWE1D: {
      const Eigen::VectorXd dphi = derivative(spec.grid, u.p, 0);
      return 0.5 * w *
             (u.q.dot(dphi.cwiseProduct(dphi)) + u.q.squaredNorm());
    }
    case ModelKind::SWE2D: {
      const Eigen::VectorXd dphix = derivative(spec.grid, u.p, 0);
      const Eigen::VectorXd dphiy = derivative(spec.grid, u.p, 1);
      return 0.5 * w *
             (u.q.dot(dphix.cwiseProduct(dphix) + dphiy.cwiseProduct(dphiy)) +
              u.q.squaredNorm());
    }
    case ModelKind::Oscillator:
      return 0.5 * w * (u.q.squaredNorm() + u.p.squaredNorm());
  }
  throw std::logic_error("unreachable");
}

GridFunction symplectic_apply(const GridFunction& u) {
  GridFunction v;
  v.grid = u.grid;
  v.q = u.p;
  v.p = -u.q;
  return v;
}

}  // namespace dynpbdw
