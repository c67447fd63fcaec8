#ifndef DYNPBDW_PLACEMENT_HPP
#define DYNPBDW_PLACEMENT_HPP

#include <Eigen/Core>

#include <string>

#include "dynpbdw/basis.hpp"
#include "dynpbdw/observation.hpp"
#include "dynpbdw/pbdw.hpp"

namespace dynpbdw {

struct PlacementConfig {
  int l_max = 5;             // ascent iterations per assimilation time
  double alpha0 = 0.0;       // 0 requests the sigma-scaled default
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  int max_backtracks = 30;
  double eigengap_warn = 1e-12;
  bool verbose = false;
  std::string trace_path;    // per-iteration CSV log when verbose
};

/// Gradient of beta^2 with respect to the sensor positions (m x d), in the
/// block form that exploits the shared q/p windows: per axis,
///   2 (A_q^{-1} B_q c) o (B_qD c - A_qD A_q^{-1} B_q c)  +  p-block analogue,
/// with the diagonal-derivative matrices built from the analytic window
/// derivatives. Warns when the two smallest eigenvalues of M nearly cross,
/// where the eigenvalue is not differentiable.
Eigen::MatrixXd grad_beta_sq(const ObservationOperator& obs,
                             const OrthosymplecticBasis& basis,
                             const StabilityResult& stab,
                             double eigengap_warn = 1e-12);

struct PlacementOutcome {
  SensorArray sensors;
  double beta_sq_initial = 0.0;
  double beta_sq_final = 0.0;
  double last_step = 0.0;  // last accepted step size, for warm starts
  int iterations = 0;
};

/// Backtracking gradient ascent on beta^2 (at most l_max iterations).
/// Monotone: the returned placement never has smaller beta^2 than the
/// input. warm_step carries the accepted step size across calls; pass 0
/// on the first call.
PlacementOutcome sensors_update(const SensorArray& sensors,
                                const OrthosymplecticBasis& basis,
                                const PlacementConfig& cfg,
                                double warm_step = 0.0,
                                double trace_time = 0.0);

}  // namespace dynpbdw

#endif
