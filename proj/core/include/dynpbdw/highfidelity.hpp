#ifndef DYNPBDW_HIGHFIDELITY_HPP
#define DYNPBDW_HIGHFIDELITY_HPP

#include <string>
#include <vector>

#include "dynpbdw/grid.hpp"
#include "dynpbdw/models.hpp"

namespace dynpbdw {

struct TimeGrid {
  double t_final = 1.0;
  int n_steps = 1;

  double dt() const { return t_final / n_steps; }
};

/// Ground-truth trajectory: snapshots stored every `stride` steps, together
/// with the Hamiltonian value at each stored time.
struct Trajectory {
  TimeGrid time_grid;
  int stride = 1;
  Theta theta{0.0, 0.0};
  std::vector<double> times;
  std::vector<double> hamiltonians;
  std::vector<GridFunction> snapshots;
};

struct NewtonOptions {
  double tolerance = 1e-10;  // V-norm of the nonlinear defect
  int max_iterations = 25;
};

/// One implicit midpoint step: solves u+ = u + dt P_theta((u + u+)/2) by a
/// Newton iteration with the analytic Jacobian of the model.
GridFunction midpoint_step(const ModelSpec& spec, const Theta& theta,
                           const GridFunction& u, double dt,
                           const NewtonOptions& opts = {});

Trajectory solve_trajectory(const ModelSpec& spec, const Theta& theta,
                            const TimeGrid& tg, int stride,
                            const NewtonOptions& opts = {});

// Trajectory file: concatenated grid-function records followed by a trailer
// with the stored times and Hamiltonian values. A companion CSV (t, H) is
// written next to the binary file by save_trajectory.
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

}  // namespace dynpbdw

#endif
