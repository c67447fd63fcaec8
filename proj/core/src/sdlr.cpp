#include "dynpbdw/sdlr.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace dynpbdw {

std::pair<OrthosymplecticBasis, CoefficientEnsemble> initialize(
    const ModelSpec& spec, const std::vector<Theta>& theta_h, int half_rank) {
  if (theta_h.empty() || half_rank < 1) {
    throw std::invalid_argument("initialize: need >= 1 parameter and n >= 1");
  }
  const int n_pts = spec.grid.num_points();
  const int n_snap = static_cast<int>(theta_h.size());

  std::vector<GridFunction> snapshots;
  snapshots.reserve(n_snap);
  Eigen::MatrixXcd z(n_pts, n_snap);
  for (int k = 0; k < n_snap; ++k) {
    snapshots.push_back(initial_condition(spec, theta_h[k]));
    z.col(k).real() = snapshots.back().q;
    z.col(k).imag() = snapshots.back().p;
  }

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(z, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const int max_rank = static_cast<int>(sv.size());
  if (half_rank > max_rank || sv[half_rank - 1] <= 1e-12 * sv[0]) {
    throw std::runtime_error(
        "initialize: requested rank exceeds the effective complex rank of "
        "the snapshot ensemble");
  }

  OrthosymplecticBasis basis;
  basis.grid = spec.grid;
  const double inv_sqrt_w = 1.0 / std::sqrt(spec.grid.quad_weight());
  const Eigen::MatrixXcd u = svd.matrixU().leftCols(half_rank) * inv_sqrt_w;
  basis.phi = u.real();
  basis.psi = u.imag();

  CoefficientEnsemble ensemble;
  ensemble.coeffs.resize(n_snap, 2 * half_rank);
  for (int k = 0; k < n_snap; ++k) {
    ensemble.coeffs.row(k) = basis.project_coefficients(snapshots[k]);
  }
  return {std::move(basis), std::move(ensemble)};
}

Eigen::MatrixXd s_matrix(const CoefficientEnsemble& ensemble) {
  const int two_n = static_cast<int>(ensemble.coeffs.cols());
  const int n = two_n / 2;
  const Eigen::MatrixXd cw =
      ensemble.weight() * ensemble.coeffs.transpose() * ensemble.coeffs;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(two_n, two_n);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return cw + j.transpose() * cw * j;
}

namespace {

// Solves X S = G for X, i.e. X = G S^{-1}, with a Tikhonov shift guarding
// near-rank-deficient coefficient ensembles.
Eigen::MatrixXd apply_s_inverse(const Eigen::MatrixXd& g,
                                const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const auto& ev = eig.eigenvalues();
  const double ev_max = ev.maxCoeff();
  double shift = 0.0;
  if (ev_max <= 0.0) {
    throw std::runtime_error(
        "dlr_rhs: S(C) has collapsed; use a smaller approximation rank");
  }
  if (ev.minCoeff() <= ev_max * 1e-12) {
    shift = 1e-12 * s.trace() / static_cast<double>(s.rows());
  }
  Eigen::VectorXd inv = (ev.array() + shift).inverse();
  if (!inv.allFinite()) {
    throw std::runtime_error(
        "dlr_rhs: S(C) numerically singular even after regularization; use a "
        "smaller approximation rank");
  }
  return g * eig.eigenvectors() * inv.asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

DlrVelocity dlr_rhs(const ModelSpec& spec, const OrthosymplecticBasis& basis,
                    const CoefficientEnsemble& ensemble,
                    const std::vector<Theta>& theta_h) {
  const int n_param = static_cast<int>(theta_h.size());
  if (ensemble.size() != n_param) {
    throw std::invalid_argument("dlr_rhs: ensemble/parameter size mismatch");
  }
  const int n_pts = spec.grid.num_points();
  const int two_n = basis.two_n();
  const double w_param = ensemble.weight();
  const double w_quad = spec.grid.quad_weight();

  const Eigen::MatrixXd vq = basis.vq();
  const Eigen::MatrixXd vp = basis.vp();

  Eigen::MatrixXd f1q = Eigen::MatrixXd::Zero(n_pts, two_n);
  Eigen::MatrixXd f1p = Eigen::MatrixXd::Zero(n_pts, two_n);
  Eigen::MatrixXd dcoeffs(n_param, two_n);

  GridFunction u = GridFunction::zero(spec.grid);
  for (int k = 0; k < n_param; ++k) {
    const Eigen::VectorXd c = ensemble.coeffs.row(k).transpose();
    u.q = vq * c;
    u.p = vp * c;
    const GridFunction f = vector_field(spec, theta_h[k], u);
    f1q.noalias() += w_param * f.q * c.transpose();
    f1p.noalias() += w_param * f.p * c.transpose();
    dcoeffs.row(k) =
        (w_quad * (vq.transpose() * f.q + vp.transpose() * f.p)).transpose();
  }

  // G = F + J_2N F J_2n^T with F = sum_k w_k f_k c_k^T. Right-multiplying by
  // J_2n^T swaps the column blocks: X J_2n^T = [X_2, -X_1].
  const int n = two_n / 2;
  Eigen::MatrixXd gq(n_pts, two_n), gp(n_pts, two_n);
  gq << f1q.leftCols(n) + f1p.rightCols(n), f1q.rightCols(n) - f1p.leftCols(n);
  gp << f1p.leftCols(n) - f1q.rightCols(n), f1p.rightCols(n) + f1q.leftCols(n);

  // A vanishing vector field needs no S solve (and S may be singular then).
  if (gq.isZero(0.0) && gp.isZero(0.0)) {
    DlrVelocity vel;
    vel.dphi = Eigen::MatrixXd::Zero(n_pts, two_n / 2);
    vel.dpsi = Eigen::MatrixXd::Zero(n_pts, two_n / 2);
    vel.dcoeffs = std::move(dcoeffs);
    return vel;
  }

  const Eigen::MatrixXd s = s_matrix(ensemble);
  Eigen::MatrixXd xq = apply_s_inverse(gq, s);
  Eigen::MatrixXd xp = apply_s_inverse(gp, s);

  // Project onto the orthogonal complement of span(V).
  const Eigen::MatrixXd k_proj =
      w_quad * (vq.transpose() * xq + vp.transpose() * xp);
  xq.noalias() -= vq * k_proj;
  xp.noalias() -= vp * k_proj;

  // The velocity inherits the block form [dPhi, -dPsi; dPsi, dPhi] exactly in
  // exact arithmetic; symmetrize the two copies to keep it exact in floating
  // point as well.
  DlrVelocity vel;
  vel.dphi = 0.5 * (xq.leftCols(n) + xp.rightCols(n));
  vel.dpsi = 0.5 * (xp.leftCols(n) - xq.rightCols(n));
  vel.dcoeffs = std::move(dcoeffs);
  return vel;
}

void dlr_step(const ModelSpec& spec, OrthosymplecticBasis& basis,
              CoefficientEnsemble& ensemble, const std::vector<Theta>& theta_h,
              double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dlr_step: dt must be positive");

  const DlrVelocity k1 = dlr_rhs(spec, basis, ensemble, theta_h);

  OrthosymplecticBasis half = basis;
  half.phi += 0.5 * dt * k1.dphi;
  half.psi += 0.5 * dt * k1.dpsi;
  CoefficientEnsemble half_ens = ensemble;
  half_ens.coeffs += 0.5 * dt * k1.dcoeffs;

  const DlrVelocity k2 = dlr_rhs(spec, half, half_ens, theta_h);

  OrthosymplecticBasis raw = basis;
  raw.phi += dt * k2.dphi;
  raw.psi += dt * k2.dpsi;
  Eigen::MatrixXd raw_coeffs = ensemble.coeffs + dt * k2.dcoeffs;

  auto [phi_new, psi_new] = retract(raw.phi, raw.psi, spec.grid.quad_weight());
  OrthosymplecticBasis retracted;
  retracted.grid = spec.grid;
  retracted.phi = std::move(phi_new);
  retracted.psi = std::move(psi_new);

  // Re-express the raw reconstruction in the retracted basis.
  const double w_quad = spec.grid.quad_weight();
  const Eigen::MatrixXd t =
      w_quad * (retracted.vq().transpose() * raw.vq() +
                retracted.vp().transpose() * raw.vp());
  ensemble.coeffs = raw_coeffs * t.transpose();
  basis = std::move(retracted);
}

}  // namespace dynpbdw
