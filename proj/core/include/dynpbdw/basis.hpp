#ifndef DYNPBDW_BASIS_HPP
#define DYNPBDW_BASIS_HPP

#include <Eigen/Core>

#include <utility>

#include "dynpbdw/grid.hpp"

namespace dynpbdw {

/// Orthosymplectic basis of the 2n-dimensional approximation space, stored
/// in the complexifiable block form
///   V = [ Phi  -Psi ]
///       [ Psi   Phi ]
/// with Phi, Psi of size N x n. Storing only the blocks enforces the block
/// structure exactly; V-orthonormality and symplecticity then reduce to the
/// single complex condition w (Phi + i Psi)^H (Phi + i Psi) = I.
struct OrthosymplecticBasis {
  SpatialGrid grid;
  Eigen::MatrixXd phi, psi;  // N x n each

  int half_rank() const { return static_cast<int>(phi.cols()); }
  int two_n() const { return 2 * half_rank(); }

  /// q rows of the 2N x 2n matrix: [Phi, -Psi].
  Eigen::MatrixXd vq() const;
  /// p rows of the 2N x 2n matrix: [Psi, Phi].
  Eigen::MatrixXd vp() const;

  /// Column s as a grid function.
  GridFunction column(int s) const;

  /// Coefficients of u in this basis: V^T M_w u (length 2n).
  Eigen::VectorXd project_coefficients(const GridFunction& u) const;
  /// Linear combination V c of the basis columns.
  GridFunction combine(const Eigen::VectorXd& coefficients) const;

  /// max-norm of V^T M_w V - I.
  double orthonormality_error() const;
  /// max-norm of V^T M_w J V - J_2n.
  double symplecticity_error() const;
};

/// Restores w (Phi + i Psi)^H (Phi + i Psi) = I by a thin complex QR in the
/// quadrature-weighted metric, with the R diagonal forced real positive so
/// the map is idempotent on already-orthonormal input.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> retract(const Eigen::MatrixXd& phi,
                                                    const Eigen::MatrixXd& psi,
                                                    double quad_weight);

}  // namespace dynpbdw

#endif
