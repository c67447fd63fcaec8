#include "dynpbdw/pbdw.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dynpbdw {

StabilityResult stability_constant(const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("stability_constant: A/B shape mismatch");
  }
  if (b.cols() > b.rows()) {
    throw std::invalid_argument(
        "stability_constant: approximation dimension 2n=" +
        std::to_string(b.cols()) + " exceeds measurement dimension 2m=" +
        std::to_string(b.rows()));
  }

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    const double cond =
        ev.minCoeff() > 0.0 ? ev.maxCoeff() / ev.minCoeff()
                            : std::numeric_limits<double>::infinity();
    throw std::runtime_error(
        "stability_constant: Gram matrix A is not positive definite "
        "(condition number " +
        std::to_string(cond) + "); sensors are degenerate");
  }

  // M = (L^{-1} B)^T (L^{-1} B) keeps the assembly symmetric by construction.
  const Eigen::MatrixXd linv_b = llt.matrixL().solve(b);
  Eigen::MatrixXd m = linv_b.transpose() * linv_b;
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  StabilityResult out;
  out.matrix_m = std::move(m);
  out.beta_sq = std::max(0.0, eig.eigenvalues()[0]);
  out.beta = std::sqrt(out.beta_sq);
  out.eigvec_c = eig.eigenvectors().col(0);
  return out;
}

Reconstruction reconstruct(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const OrthosymplecticBasis& basis,
                           const ObservationOperator& obs,
                           const Eigen::VectorXd& z,
                           bool include_w_correction, double beta_min) {
  if (z.size() != a.rows()) {
    throw std::invalid_argument("reconstruct: measurement size mismatch");
  }
  const StabilityResult stab = stability_constant(a, b);
  if (stab.beta <= beta_min) {
    throw std::runtime_error(
        "reconstruct: stability constant beta=" + std::to_string(stab.beta) +
        " at or below the floor " + std::to_string(beta_min) +
        "; the reconstruction problem is ill posed");
  }

  Eigen::LLT<Eigen::MatrixXd> llt_a(a);
  const Eigen::VectorXd a_inv_z = llt_a.solve(z);
  const Eigen::VectorXd rhs = b.transpose() * a_inv_z;
  const Eigen::VectorXd c = Eigen::LDLT<Eigen::MatrixXd>(stab.matrix_m).solve(rhs);

  Reconstruction rec;
  rec.coefficients = c;
  rec.v_star = basis.combine(c);
  rec.u_star = rec.v_star;
  if (include_w_correction) {
    // omega - P_W v* = W A^{-1}(z - B c), a pure representer-space field.
    const Eigen::VectorXd d = llt_a.solve(z - b * c);
    const int m_sensors = obs.num_sensors();
    rec.u_star.q += obs.windows * d.head(m_sensors);
    rec.u_star.p += obs.windows * d.tail(m_sensors);
  }
  return rec;
}

ErrorReport error_report(const GridFunction& u_truth, const Reconstruction& rec,
                         const OrthosymplecticBasis& basis, double beta,
                         const ModelSpec& spec, const Theta& theta,
                         double ham_truth_initial, double ham_rec_initial) {
  if (beta <= 0.0) {
    throw std::invalid_argument("error_report: beta must be positive");
  }
  ErrorReport out;
  GridFunction diff = u_truth;
  diff.q -= rec.v_star.q;
  diff.p -= rec.v_star.p;
  out.err = norm(diff);

  const GridFunction proj =
      basis.combine(basis.project_coefficients(u_truth));
  GridFunction perp = u_truth;
  perp.q -= proj.q;
  perp.p -= proj.p;
  out.proj_err = norm(perp);
  out.bound = out.proj_err / beta;

  const double ham_truth = hamiltonian(spec, theta, u_truth);
  const double ham_rec = hamiltonian(spec, theta, rec.v_star);
  out.ham_err = std::abs(ham_truth - ham_rec);
  out.ham_drift_truth = std::abs(ham_truth - ham_truth_initial);
  out.ham_drift_rec = std::abs(ham_rec - ham_rec_initial);
  return out;
}

ErrorReport sweep_max(const std::vector<ErrorReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("sweep_max: empty report set");
  }
  ErrorReport out = reports.front();
  for (const ErrorReport& r : reports) {
    out.err = std::max(out.err, r.err);
    out.proj_err = std::max(out.proj_err, r.proj_err);
    out.bound = std::max(out.bound, r.bound);
    out.ham_err = std::max(out.ham_err, r.ham_err);
    out.ham_drift_truth = std::max(out.ham_drift_truth, r.ham_drift_truth);
    out.ham_drift_rec = std::max(out.ham_drift_rec, r.ham_drift_rec);
  }
  return out;
}

}  // namespace dynpbdw
