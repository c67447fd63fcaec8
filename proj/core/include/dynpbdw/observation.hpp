#ifndef DYNPBDW_OBSERVATION_HPP
#define DYNPBDW_OBSERVATION_HPP

#include <Eigen/Core>

#include <cstdint>

#include "dynpbdw/basis.hpp"
#include "dynpbdw/grid.hpp"

namespace dynpbdw {

/// m Gaussian local-average sensors of common width sigma. Row i of
/// positions is the location of sensor i; each sensor produces one q and
/// one p measurement with the same window.
struct SensorArray {
  Eigen::MatrixXd positions;  // m x d
  double sigma = 0.1;

  int count() const { return static_cast<int>(positions.rows()); }
};

/// Sampled Riesz representers of the 2m measurement functionals. The q and
/// p windows of a sensor coincide, so one N x m matrix per block suffices.
struct ObservationOperator {
  SpatialGrid grid;
  SensorArray sensors;
  Eigen::MatrixXd windows;  // N x m, column i = Gaussian around sensor i

  int num_sensors() const { return static_cast<int>(windows.cols()); }
  /// Set when sigma < max grid spacing: the window is under-resolved and
  /// quadrature Gram matrices lose accuracy.
  bool under_resolved = false;
};

/// Samples the normalized Gaussian (2 pi sigma^2)^{-d/2} exp(-r^2 / 2sigma^2)
/// around each sensor with periodic minimum-image distance. Positions are
/// wrapped into the domain.
ObservationOperator build_representers(const SensorArray& sensors,
                                       const SpatialGrid& grid);

/// z_i = <window_i, u.q> for i < m, z_{m+i} = <window_i, u.p>, by quadrature.
Eigen::VectorXd measure(const GridFunction& u, const ObservationOperator& obs);

/// Adds a perturbation drawn uniformly on the sphere of radius eps_noise in
/// the representer-space metric, so the induced V-norm of the noise field is
/// exactly eps_noise. Deterministic in the seed.
Eigen::VectorXd add_noise(const Eigen::VectorXd& z,
                          const Eigen::MatrixXd& gram_a, double eps_noise,
                          std::uint64_t seed);

/// 2m x 2m block-diagonal [A_q 0; 0 A_p] with (A_q)_{ij} = <w_i, w_j> by
/// quadrature; A_q = A_p since the windows coincide.
/// Emits a near-singular warning on stderr when two sensors are closer
/// than 1e-10.
Eigen::MatrixXd gram_A(const ObservationOperator& obs);

/// 2m x 2n stacked [B_q; B_p] with B_{is} = <omega_i, v_s> by quadrature.
Eigen::MatrixXd gram_B(const ObservationOperator& obs,
                       const OrthosymplecticBasis& basis);

/// Analytic derivative of the windows in the given sensor coordinate:
/// column j = ((x^(axis) - x_sj^(axis)) / sigma^2) * w_j, minimum image.
Eigen::MatrixXd representer_derivatives(const ObservationOperator& obs,
                                        int axis);

}  // namespace dynpbdw

#endif
