#include "dynpbdw/placement.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace dynpbdw {

Eigen::MatrixXd grad_beta_sq(const ObservationOperator& obs,
                             const OrthosymplecticBasis& basis,
                             const StabilityResult& stab,
                             double eigengap_warn) {
  const int m = obs.num_sensors();
  const int d = obs.grid.dim;
  const double w = obs.grid.quad_weight();
  const Eigen::VectorXd& c = stab.eigvec_c;

  if (stab.matrix_m.rows() >= 2) {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(stab.matrix_m)
            .eigenvalues();
    if (ev[1] - ev[0] < eigengap_warn) {
      std::cerr << "warning: near-crossing of the two smallest eigenvalues "
                   "(gap "
                << ev[1] - ev[0]
                << "); the beta^2 gradient may be unreliable here\n";
    }
  }

  const Eigen::MatrixXd vq = basis.vq();
  const Eigen::MatrixXd vp = basis.vp();
  Eigen::MatrixXd a_q = w * obs.windows.transpose() * obs.windows;
  a_q = 0.5 * (a_q + a_q.transpose()).eval();
  const Eigen::LLT<Eigen::MatrixXd> llt(a_q);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("grad_beta_sq: singular sensor Gram matrix");
  }

  // y = A_q^{-1} B c per block; derivative matrices carry the sensor
  // derivative on the row index only.
  const Eigen::VectorXd bq_c = w * obs.windows.transpose() * (vq * c);
  const Eigen::VectorXd bp_c = w * obs.windows.transpose() * (vp * c);
  const Eigen::VectorXd y_q = llt.solve(bq_c);
  const Eigen::VectorXd y_p = llt.solve(bp_c);

  Eigen::MatrixXd grad(m, d);
  for (int ax = 0; ax < d; ++ax) {
    const Eigen::MatrixXd dw = representer_derivatives(obs, ax);
    const Eigen::MatrixXd a_d = w * dw.transpose() * obs.windows;  // m x m
    const Eigen::VectorXd bd_q_c = w * dw.transpose() * (vq * c);
    const Eigen::VectorXd bd_p_c = w * dw.transpose() * (vp * c);
    grad.col(ax) = 2.0 * y_q.cwiseProduct(bd_q_c - a_d * y_q) +
                   2.0 * y_p.cwiseProduct(bd_p_c - a_d * y_p);
  }
  return grad;
}

namespace {

double beta_sq_at(const SensorArray& sensors, const OrthosymplecticBasis& basis,
                  ObservationOperator* obs_out, StabilityResult* stab_out) {
  ObservationOperator obs = build_representers(sensors, basis.grid);
  StabilityResult stab = stability_constant(gram_A(obs), gram_B(obs, basis));
  const double v = stab.beta_sq;
  if (obs_out) *obs_out = std::move(obs);
  if (stab_out) *stab_out = std::move(stab);
  return v;
}

}  // namespace

PlacementOutcome sensors_update(const SensorArray& sensors,
                                const OrthosymplecticBasis& basis,
                                const PlacementConfig& cfg, double warm_step,
                                double trace_time) {
  PlacementOutcome out;
  out.sensors = sensors;
  ObservationOperator obs;
  StabilityResult stab;
  double beta_sq = beta_sq_at(out.sensors, basis, &obs, &stab);
  out.beta_sq_initial = beta_sq;
  out.last_step = warm_step;

  std::ofstream trace;
  if (cfg.verbose && !cfg.trace_path.empty()) {
    trace.open(cfg.trace_path, std::ios::app);
  }

  const int m = sensors.count();
  const int d = basis.grid.dim;
  for (int l = 0; l < cfg.l_max; ++l) {
    const Eigen::MatrixXd grad =
        grad_beta_sq(obs, basis, stab, cfg.eigengap_warn);
    const double g_inf = grad.cwiseAbs().maxCoeff();
    const double g_sq = grad.squaredNorm();
    if (g_inf < 1e-14) break;

    double alpha = out.last_step > 0.0
                       ? out.last_step
                       : (cfg.alpha0 > 0.0 ? cfg.alpha0
                                           : 0.1 * sensors.sigma / g_inf);
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      SensorArray cand = out.sensors;
      cand.positions += alpha * grad;
      for (int i = 0; i < m; ++i) {
        for (int ax = 0; ax < d; ++ax) {
          cand.positions(i, ax) = basis.grid.wrap(cand.positions(i, ax), ax);
        }
      }
      ObservationOperator cand_obs;
      StabilityResult cand_stab;
      // A candidate that collapses two sensors makes A singular; treat it as
      // a rejected step rather than aborting the ascent.
      double cand_beta_sq = -1.0;
      try {
        cand_beta_sq = beta_sq_at(cand, basis, &cand_obs, &cand_stab);
      } catch (const std::runtime_error&) {
      }
      if (cand_beta_sq >= beta_sq + cfg.armijo_slope * alpha * g_sq) {
        out.sensors = std::move(cand);
        obs = std::move(cand_obs);
        stab = std::move(cand_stab);
        beta_sq = cand_beta_sq;
        // Let the warm-started step regrow so the search is not trapped at
        // ever-smaller steps.
        out.last_step = alpha / cfg.armijo_shrink;
        accepted = true;
        break;
      }
      alpha *= cfg.armijo_shrink;
    }

    if (trace.is_open()) {
      trace << trace_time << ',' << l << ',' << beta_sq << ','
            << (accepted ? out.last_step * cfg.armijo_shrink : 0.0) << ','
            << std::sqrt(g_sq) << '\n';
    }
    if (!accepted) break;
    ++out.iterations;
  }

  out.beta_sq_final = beta_sq;
  return out;
}

}  // namespace dynpbdw
