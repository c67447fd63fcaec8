#include "dynpbdw/observation.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

namespace dynpbdw {

ObservationOperator build_representers(const SensorArray& sensors,
                                       const SpatialGrid& grid) {
  if (sensors.sigma <= 0.0) {
    throw std::invalid_argument("build_representers: sigma must be positive");
  }
  const int m = sensors.count();
  if (m < 1 || sensors.positions.cols() != grid.dim ||
      !sensors.positions.allFinite()) {
    throw std::invalid_argument("build_representers: bad sensor array");
  }

  ObservationOperator obs;
  obs.grid = grid;
  obs.sensors = sensors;
  for (int i = 0; i < m; ++i) {
    for (int ax = 0; ax < grid.dim; ++ax) {
      obs.sensors.positions(i, ax) = grid.wrap(sensors.positions(i, ax), ax);
    }
  }

  double h_max = grid.spacing(0);
  if (grid.dim == 2) h_max = std::max(h_max, grid.spacing(1));
  if (sensors.sigma < h_max) {
    obs.under_resolved = true;
    std::cerr << "warning: sensor width sigma=" << sensors.sigma
              << " below grid spacing " << h_max
              << "; representers are under-resolved\n";
  }

  const double s2 = sensors.sigma * sensors.sigma;
  const double amp =
      std::pow(2.0 * M_PI * s2, -0.5 * static_cast<double>(grid.dim));
  const int n_pts = grid.num_points();
  obs.windows.resize(n_pts, m);
  for (int i = 0; i < m; ++i) {
    if (grid.dim == 1) {
      for (int ix = 0; ix < grid.count[0]; ++ix) {
        const double dx =
            grid.min_image(grid.coord(0, ix) - obs.sensors.positions(i, 0), 0);
        obs.windows(ix, i) = amp * std::exp(-0.5 * dx * dx / s2);
      }
    } else {
      for (int iy = 0; iy < grid.count[1]; ++iy) {
        const double dy =
            grid.min_image(grid.coord(1, iy) - obs.sensors.positions(i, 1), 1);
        for (int ix = 0; ix < grid.count[0]; ++ix) {
          const double dx = grid.min_image(
              grid.coord(0, ix) - obs.sensors.positions(i, 0), 0);
          obs.windows(grid.index(ix, iy), i) =
              amp * std::exp(-0.5 * (dx * dx + dy * dy) / s2);
        }
      }
    }
  }
  return obs;
}

Eigen::VectorXd measure(const GridFunction& u,
                        const ObservationOperator& obs) {
  if (!(u.grid == obs.grid)) {
    throw std::invalid_argument("measure: grid mismatch");
  }
  const int m = obs.num_sensors();
  Eigen::VectorXd z(2 * m);
  const double w = obs.grid.quad_weight();
  z.head(m) = w * obs.windows.transpose() * u.q;
  z.tail(m) = w * obs.windows.transpose() * u.p;
  return z;
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& z,
                          const Eigen::MatrixXd& gram_a, double eps_noise,
                          std::uint64_t seed) {
  if (eps_noise < 0.0) {
    throw std::invalid_argument("add_noise: eps_noise must be >= 0");
  }
  if (eps_noise == 0.0) return z;
  if (gram_a.rows() != z.size() || gram_a.cols() != z.size()) {
    throw std::invalid_argument("add_noise: Gram matrix shape mismatch");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd g(z.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = gauss(rng);

  // a are the representer-space coefficients of the noise field; its V norm
  // is sqrt(a^T A a), so scaling a to the eps_noise sphere makes the bound
  // tight. The measurement perturbation is then eta = A a.
  const double a_norm = std::sqrt(g.dot(gram_a * g));
  if (a_norm <= 0.0) return z;
  const Eigen::VectorXd a = g * (eps_noise / a_norm);
  return z + gram_a * a;
}

Eigen::MatrixXd gram_A(const ObservationOperator& obs) {
  const int m = obs.num_sensors();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double sep2 = 0.0;
      for (int ax = 0; ax < obs.grid.dim; ++ax) {
        const double d = obs.grid.min_image(
            obs.sensors.positions(i, ax) - obs.sensors.positions(j, ax), ax);
        sep2 += d * d;
      }
      if (sep2 < 1e-20) {
        std::cerr << "warning: sensors " << i << " and " << j
                  << " nearly coincide; Gram matrix is near-singular\n";
      }
    }
  }

  Eigen::MatrixXd a_q =
      obs.grid.quad_weight() * obs.windows.transpose() * obs.windows;
  a_q = 0.5 * (a_q + a_q.transpose()).eval();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  a.topLeftCorner(m, m) = a_q;
  a.bottomRightCorner(m, m) = a_q;
  return a;
}

Eigen::MatrixXd gram_B(const ObservationOperator& obs,
                       const OrthosymplecticBasis& basis) {
  if (!(obs.grid == basis.grid)) {
    throw std::invalid_argument("gram_B: grid mismatch");
  }
  const int m = obs.num_sensors();
  const int two_n = basis.two_n();
  Eigen::MatrixXd b(2 * m, two_n);
  const double w = obs.grid.quad_weight();
  b.topRows(m) = w * obs.windows.transpose() * basis.vq();
  b.bottomRows(m) = w * obs.windows.transpose() * basis.vp();
  return b;
}

Eigen::MatrixXd representer_derivatives(const ObservationOperator& obs,
                                        int axis) {
  if (axis < 0 || axis >= obs.grid.dim) {
    throw std::invalid_argument("representer_derivatives: axis out of range");
  }
  const int m = obs.num_sensors();
  const int n_pts = obs.grid.num_points();
  const double inv_s2 = 1.0 / (obs.sensors.sigma * obs.sensors.sigma);
  Eigen::MatrixXd d(n_pts, m);
  for (int i = 0; i < m; ++i) {
    for (int idx = 0; idx < n_pts; ++idx) {
      const int ic = obs.grid.dim == 1
                         ? idx
                         : (axis == 0 ? idx % obs.grid.count[0]
                                      : idx / obs.grid.count[0]);
      const double dx = obs.grid.min_image(
          obs.grid.coord(axis, ic) - obs.sensors.positions(i, axis), axis);
      d(idx, i) = dx * inv_s2 * obs.windows(idx, i);
    }
  }
  return d;
}

}  // namespace dynpbdw
