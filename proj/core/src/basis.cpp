#include "dynpbdw/basis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace dynpbdw {

Eigen::MatrixXd OrthosymplecticBasis::vq() const {
  Eigen::MatrixXd out(phi.rows(), two_n());
  out << phi, -psi;
  return out;
}

Eigen::MatrixXd OrthosymplecticBasis::vp() const {
  Eigen::MatrixXd out(phi.rows(), two_n());
  out << psi, phi;
  return out;
}

GridFunction OrthosymplecticBasis::column(int s) const {
  const int n = half_rank();
  GridFunction f = GridFunction::zero(grid);
  if (s < n) {
    f.q = phi.col(s);
    f.p = psi.col(s);
  } else {
    f.q = -psi.col(s - n);
    f.p = phi.col(s - n);
  }
  return f;
}

Eigen::VectorXd OrthosymplecticBasis::project_coefficients(
    const GridFunction& u) const {
  if (!(u.grid == grid)) {
    throw std::invalid_argument("project_coefficients: grid mismatch");
  }
  const double w = grid.quad_weight();
  return w * (vq().transpose() * u.q + vp().transpose() * u.p);
}

GridFunction OrthosymplecticBasis::combine(
    const Eigen::VectorXd& coefficients) const {
  if (coefficients.size() != two_n()) {
    throw std::invalid_argument("combine: coefficient size mismatch");
  }
  GridFunction f = GridFunction::zero(grid);
  f.q = vq() * coefficients;
  f.p = vp() * coefficients;
  return f;
}

double OrthosymplecticBasis::orthonormality_error() const {
  const double w = grid.quad_weight();
  const Eigen::MatrixXd vq_ = vq();
  const Eigen::MatrixXd vp_ = vp();
  Eigen::MatrixXd gram = w * (vq_.transpose() * vq_ + vp_.transpose() * vp_);
  gram -= Eigen::MatrixXd::Identity(two_n(), two_n());
  return gram.cwiseAbs().maxCoeff();
}

double OrthosymplecticBasis::symplecticity_error() const {
  const double w = grid.quad_weight();
  const Eigen::MatrixXd vq_ = vq();
  const Eigen::MatrixXd vp_ = vp();
  const int n = half_rank();
  // V^T M_w J_2N V with J(q, p) = (p, -q).
  Eigen::MatrixXd form = w * (vq_.transpose() * vp_ - vp_.transpose() * vq_);
  Eigen::MatrixXd j2n = Eigen::MatrixXd::Zero(two_n(), two_n());
  j2n.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j2n.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return (form - j2n).cwiseAbs().maxCoeff();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> retract(const Eigen::MatrixXd& phi,
                                                    const Eigen::MatrixXd& psi,
                                                    double quad_weight) {
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  Eigen::MatrixXcd z(rows, cols);
  z.real() = phi;
  z.imag() = psi;
  z *= std::sqrt(quad_weight);

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q =
      qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
  const Eigen::MatrixXcd r =
      qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  double diag_max = 0.0;
  for (int j = 0; j < cols; ++j) diag_max = std::max(diag_max, std::abs(r(j, j)));
  for (int j = 0; j < cols; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    if (mag <= 1e-12 * diag_max || diag_max == 0.0) {
      throw std::runtime_error("retract: rank-deficient basis factor");
    }
    q.col(j) *= d / mag;  // force the R diagonal real positive
  }
  q /= std::sqrt(quad_weight);
  return {q.real(), q.imag()};
}

}  // namespace dynpbdw
