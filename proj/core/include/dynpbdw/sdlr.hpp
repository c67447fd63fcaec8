#ifndef DYNPBDW_SDLR_HPP
#define DYNPBDW_SDLR_HPP

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "dynpbdw/basis.hpp"
#include "dynpbdw/models.hpp"

namespace dynpbdw {

/// Coefficients of the parametric ensemble in the current basis: row k holds
/// the 2n coefficients of the trajectory for theta_k. Parameter integrals
/// use uniform weights 1/|Theta_h|.
struct CoefficientEnsemble {
  Eigen::MatrixXd coeffs;  // |Theta_h| x 2n

  int size() const { return static_cast<int>(coeffs.rows()); }
  double weight() const { return 1.0 / static_cast<double>(coeffs.rows()); }
};

/// Rank-n projection of the initial parametric ensemble: complexified
/// snapshots q + i p are truncated by a complex SVD, which lands exactly in
/// the block orthosymplectic subclass.
std::pair<OrthosymplecticBasis, CoefficientEnsemble> initialize(
    const ModelSpec& spec, const std::vector<Theta>& theta_h, int half_rank);

/// S(C) = sum_k w_k c_k c_k^T + J_2n^T (sum_k w_k c_k c_k^T) J_2n.
Eigen::MatrixXd s_matrix(const CoefficientEnsemble& ensemble);

struct DlrVelocity {
  Eigen::MatrixXd dphi, dpsi;   // N x n blocks of the basis velocity
  Eigen::MatrixXd dcoeffs;      // |Theta_h| x 2n
};

/// Right-hand side of the coupled basis/coefficient evolution. The basis
/// velocity is projected onto the orthogonal complement of the span and the
/// S solve uses a Tikhonov shift of 1e-12 tr(S)/2n past condition 1e12.
DlrVelocity dlr_rhs(const ModelSpec& spec, const OrthosymplecticBasis& basis,
                    const CoefficientEnsemble& ensemble,
                    const std::vector<Theta>& theta_h);

/// One explicit midpoint step of the coupled system followed by retraction;
/// the coefficients are re-expressed in the retracted basis so that the
/// reconstruction V C^T is continuous across the retraction.
void dlr_step(const ModelSpec& spec, OrthosymplecticBasis& basis,
              CoefficientEnsemble& ensemble, const std::vector<Theta>& theta_h,
              double dt);

}  // namespace dynpbdw

#endif
