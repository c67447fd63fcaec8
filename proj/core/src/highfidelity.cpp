#include "dynpbdw/highfidelity.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace dynpbdw {

GridFunction midpoint_step(const ModelSpec& spec, const Theta& theta,
                           const GridFunction& u, double dt,
                           const NewtonOptions& opts) {
  if (dt == 0.0) throw std::invalid_argument("midpoint_step: dt must be nonzero");
  const int n = spec.grid.num_points();
  const double sqrt_w = std::sqrt(spec.grid.quad_weight());

  GridFunction v = u;  // initial guess: previous state
  GridFunction mid = GridFunction::zero(spec.grid);
  Eigen::SparseMatrix<double> eye(2 * n, 2 * n);
  eye.setIdentity();

  double residual_norm = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    mid.q = 0.5 * (u.q + v.q);
    mid.p = 0.5 * (u.p + v.p);
    const GridFunction f = vector_field(spec, theta, mid);
    Eigen::VectorXd defect(2 * n);
    defect.head(n) = v.q - u.q - dt * f.q;
    defect.tail(n) = v.p - u.p - dt * f.p;
    residual_norm = sqrt_w * defect.norm();
    if (residual_norm <= opts.tolerance) return v;

    Eigen::SparseMatrix<double> jac =
        eye - (0.5 * dt) * vector_field_jacobian(spec, theta, mid);
    jac.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(jac);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("midpoint_step: Newton Jacobian factorization failed");
    }
    const Eigen::VectorXd delta = lu.solve(defect);
    v.q -= delta.head(n);
    v.p -= delta.tail(n);
  }

  // One last residual check: the final correction may have landed us inside
  // the tolerance without a further iteration.
  mid.q = 0.5 * (u.q + v.q);
  mid.p = 0.5 * (u.p + v.p);
  const GridFunction f = vector_field(spec, theta, mid);
  Eigen::VectorXd defect(2 * n);
  defect.head(n) = v.q - u.q - dt * f.q;
  defect.tail(n) = v.p - u.p - dt * f.p;
  residual_norm = sqrt_w * defect.norm();
  if (residual_norm <= opts.tolerance) return v;

  throw std::runtime_error(
      "midpoint_step: Newton did not converge in " +
      std::to_string(opts.max_iterations) +
      " iterations (residual " + std::to_string(residual_norm) + ")");
}

Trajectory solve_trajectory(const ModelSpec& spec, const Theta& theta,
                            const TimeGrid& tg, int stride,
                            const NewtonOptions& opts) {
  if (stride < 1 || tg.n_steps % stride != 0) {
    throw std::invalid_argument("solve_trajectory: stride must divide n_steps");
  }
  Trajectory traj;
  traj.time_grid = tg;
  traj.stride = stride;
  traj.theta = theta;

  GridFunction u = initial_condition(spec, theta);
  traj.times.push_back(0.0);
  traj.hamiltonians.push_back(hamiltonian(spec, theta, u));
  traj.snapshots.push_back(u);

  const double dt = tg.dt();
  for (int step = 1; step <= tg.n_steps; ++step) {
    try {
      u = midpoint_step(spec, theta, u, dt, opts);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("solve_trajectory: step " +
                               std::to_string(step) + ": " + e.what());
    }
    if (step % stride == 0) {
      traj.times.push_back(step * dt);
      traj.hamiltonians.push_back(hamiltonian(spec, theta, u));
      traj.snapshots.push_back(u);
    }
  }
  return traj;
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
  if (!is) throw std::runtime_error("trajectory stream: truncated");
  return v;
}

double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw std::runtime_error("trajectory stream: truncated");
  return v;
}

}  // namespace

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_i64(os, static_cast<std::int64_t>(traj.snapshots.size()));
  write_f64(os, traj.time_grid.t_final);
  write_i64(os, traj.time_grid.n_steps);
  write_i64(os, traj.stride);
  write_f64(os, traj.theta[0]);
  write_f64(os, traj.theta[1]);
  for (const auto& snap : traj.snapshots) write_grid_function(os, snap);
  for (double t : traj.times) write_f64(os, t);
  for (double h : traj.hamiltonians) write_f64(os, h);

  std::ofstream csv(path + ".csv");
  if (!csv) throw std::runtime_error("cannot open for writing: " + path + ".csv");
  csv << "t,H\n";
  csv.precision(17);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    csv << traj.times[i] << ',' << traj.hamiltonians[i] << '\n';
  }
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  const auto count = read_i64(is);
  if (count < 1) throw std::runtime_error("trajectory stream: malformed header");
  Trajectory traj;
  traj.time_grid.t_final = read_f64(is);
  traj.time_grid.n_steps = static_cast<int>(read_i64(is));
  traj.stride = static_cast<int>(read_i64(is));
  traj.theta[0] = read_f64(is);
  traj.theta[1] = read_f64(is);
  traj.snapshots.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    traj.snapshots.push_back(read_grid_function(is));
    if (!(traj.snapshots.back().grid == traj.snapshots.front().grid)) {
      throw std::runtime_error("trajectory stream: inconsistent snapshot grids");
    }
  }
  traj.times.resize(count);
  traj.hamiltonians.resize(count);
  for (auto& t : traj.times) t = read_f64(is);
  for (auto& h : traj.hamiltonians) h = read_f64(is);
  return traj;
}

}  // namespace dynpbdw
