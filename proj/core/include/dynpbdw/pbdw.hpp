#ifndef DYNPBDW_PBDW_HPP
#define DYNPBDW_PBDW_HPP

#include <Eigen/Core>

#include <vector>

#include "dynpbdw/basis.hpp"
#include "dynpbdw/grid.hpp"
#include "dynpbdw/models.hpp"
#include "dynpbdw/observation.hpp"

namespace dynpbdw {

/// Smallest eigenpair of M = B^T A^{-1} B, which measures the worst angle
/// between the approximation space and the observation space.
struct StabilityResult {
  double beta_sq = 0.0;
  double beta = 0.0;
  Eigen::VectorXd eigvec_c;  // unit eigenvector of the smallest eigenvalue
  Eigen::MatrixXd matrix_m;  // 2n x 2n
};

StabilityResult stability_constant(const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b);

struct Reconstruction {
  GridFunction v_star;
  GridFunction u_star;  // equals v_star unless the correction is requested
  Eigen::VectorXd coefficients;
};

/// Solves M c = B^T A^{-1} z and forms v* = V c. With the correction flag,
/// u* = v* + omega - P_W v* where omega = W A^{-1} z reproduces the data.
/// beta below beta_min is an error: the problem is ill posed.
Reconstruction reconstruct(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const OrthosymplecticBasis& basis,
                           const ObservationOperator& obs,
                           const Eigen::VectorXd& z,
                           bool include_w_correction = false,
                           double beta_min = 1e-12);

struct ErrorReport {
  double err = 0.0;        // ||u - v*||
  double proj_err = 0.0;   // ||u - P_V u||
  double bound = 0.0;      // proj_err / beta
  double ham_err = 0.0;    // |H(u) - H(v*)|
  double ham_drift_truth = 0.0;
  double ham_drift_rec = 0.0;
};

/// All state-estimation diagnostics at a single time. The drifts compare
/// the current Hamiltonians against reference values at the initial time.
ErrorReport error_report(const GridFunction& u_truth, const Reconstruction& rec,
                         const OrthosymplecticBasis& basis, double beta,
                         const ModelSpec& spec, const Theta& theta,
                         double ham_truth_initial, double ham_rec_initial);

/// Elementwise maxima over a nonempty set of per-parameter reports.
ErrorReport sweep_max(const std::vector<ErrorReport>& reports);

}  // namespace dynpbdw

#endif
