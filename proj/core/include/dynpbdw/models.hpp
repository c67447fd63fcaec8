#ifndef DYNPBDW_MODELS_HPP
#define DYNPBDW_MODELS_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <string>
#include <vector>

#include "dynpbdw/grid.hpp"

namespace dynpbdw {

using Theta = Eigen::Vector2d;

enum class ModelKind {
  NLS1D,       // cubic Schroedinger, psi = q + i p
  SWE1D,       // shallow water, (q, p) = (h, Phi)
  SWE2D,
  Oscillator,  // qdot = p, pdot = -q on any grid; test/diagnostic system
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// One of the parameterized Hamiltonian PDEs with its grid and the
/// admissible parameter box.
struct ModelSpec {
  ModelKind kind = ModelKind::NLS1D;
  SpatialGrid grid;
  std::array<std::array<double, 2>, 2> parameter_box{};  // per-axis [lo, hi]

  static ModelSpec make(ModelKind kind, const SpatialGrid& grid);
  bool theta_in_box(const Theta& theta) const;
};

/// Training set Theta_h (uniform tensor grid including the box corners) and
/// test set Theta_s (cell midpoints, disjoint from Theta_h).
struct ParameterGrid {
  std::vector<Theta> theta_h;
  std::vector<Theta> theta_s;

  static ParameterGrid make(const ModelSpec& spec, int train_per_axis,
                            int test_per_axis);
};

GridFunction initial_condition(const ModelSpec& spec, const Theta& theta);

/// The discrete Hamiltonian vector field P_theta(u) = J dH_theta(u), built
/// from the periodic stencils of the grid module.
GridFunction vector_field(const ModelSpec& spec, const Theta& theta,
                          const GridFunction& u);

/// Jacobian of vector_field at u, as a sparse 2N x 2N matrix in [q; p]
/// ordering. Used by the implicit midpoint Newton solve.
Eigen::SparseMatrix<double> vector_field_jacobian(const ModelSpec& spec,
                                                  const Theta& theta,
                                                  const GridFunction& u);

double hamiltonian(const ModelSpec& spec, const Theta& theta,
                   const GridFunction& u);

/// The canonical operator J(q, p) = (p, -q).
GridFunction symplectic_apply(const GridFunction& u);

}  // namespace dynpbdw

#endif
