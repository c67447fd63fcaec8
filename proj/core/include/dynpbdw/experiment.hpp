#ifndef DYNPBDW_EXPERIMENT_HPP
#define DYNPBDW_EXPERIMENT_HPP

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynpbdw/models.hpp"
#include "dynpbdw/placement.hpp"

namespace dynpbdw {

enum class RunMode { Static, Dynamic };

RunMode run_mode_from_string(const std::string& name);
std::string to_string(RunMode mode);

/// Full description of one assimilation experiment. Desk-scale presets are
/// provided for every model; the paper-* presets reproduce the full-scale
/// figures and are meant for overnight runs.
struct ExperimentConfig {
  ModelKind kind = ModelKind::NLS1D;
  double half_extent_x = 1.0;
  double half_extent_y = 1.0;
  int count_x = 1;
  int count_y = 1;

  double t_final = 1.0;
  int n_steps = 1;
  int stride = 1;  // assimilation every `stride` high-fidelity steps

  int half_rank = 1;     // n; the approximation space has dimension 2n
  int train_per_axis = 2;
  int test_per_axis = 1;

  int num_sensors = 1;
  double sigma = 0.1;
  Eigen::MatrixXd initial_sensors;  // m x d; empty requests the preset layout

  PlacementConfig placement;
  double eps_noise = 0.0;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::Dynamic;
  bool include_w_correction = false;
  double beta_min = 1e-12;
  std::vector<Theta> true_thetas;  // overrides the test grid when nonempty
  std::string out_dir = ".";

  SpatialGrid make_grid() const;
  ModelSpec make_model() const;
  /// The test parameters actually assimilated: true_thetas if given, the
  /// midpoint test grid otherwise.
  std::vector<Theta> test_set() const;
};

/// Named configurations: nls1d, swe1d, swe2d (desk scale) and paper-nls1d,
/// paper-swe1d, paper-swe2d (full scale). Unknown names throw.
ExperimentConfig preset(const std::string& name);

/// Applies key=value overrides from a sectioned text file onto `base`.
/// Unknown keys throw; a `preset` key in the leading unsectioned block
/// replaces the base before anything else is applied.
ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& base);

struct RunRecord {
  double t = 0.0;
  double beta = 0.0;
  ErrorReport maxima;
  Eigen::MatrixXd sensor_positions;  // m x d
  int ascent_iterations = 0;
  bool beta_floor_failure = false;
};

struct RunResult {
  std::vector<RunRecord> records;
  bool any_failure = false;
  // Worst-case basis invariant violations observed after every dlr_step.
  double max_orthonormality_error = 0.0;
  double max_symplecticity_error = 0.0;
};

/// File name under which `truth` stores the trajectory of test parameter k.
std::string truth_path(const ExperimentConfig& cfg, int k);

/// Computes and stores the ground-truth trajectories for the test set.
void generate_truths(const ExperimentConfig& cfg);

/// The assimilation loop: per assimilation time, optionally re-place the
/// sensors (dynamic mode), measure every test trajectory, reconstruct, and
/// aggregate error maxima; between assimilation times the approximation
/// space advances by one dlr_step per high-fidelity step. Truths are loaded
/// from out_dir when present and consistent, recomputed otherwise. A beta
/// below the floor is recorded as a failure row and the run continues.
RunResult run(const ExperimentConfig& cfg);

/// Analytic transport solution: q(x) = exp(-(x - t theta2)^2 / (2 theta1^2))
/// / (sqrt(2 pi) theta1), p = 0.
GridFunction transport_case(double theta1, double theta2, double t,
                            const SpatialGrid& grid);

struct TransportDemoConfig {
  double half_extent = 50.0;
  int count = 1024;
  double sigma = 0.5;
  double t_final = 40.0;
  int n_times = 80;
  std::vector<double> theta1{0.8, 1.0, 1.2};
  std::vector<double> theta2{0.98, 1.0, 1.02};
  RunMode mode = RunMode::Static;
};

/// Moving-packet illustration: the prior space is spanned by analytic
/// snapshots orthonormalized per time; sensors start centered on the
/// packets and either stay put (static) or advect with them (dynamic).
/// Emits beta(t); the error fields of the records are zero.
RunResult transport_beta_decay_demo(const TransportDemoConfig& cfg);

/// Fixed column order: t, beta, err_max, err_proj_max, err_bound_max,
/// ham_err_max, ham_drift_truth, ham_drift_rec, then one column per sensor
/// coordinate; 17 significant digits.
void emit_csv(const std::vector<RunRecord>& records, std::ostream& os);
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);

}  // namespace dynpbdw

#endif
