#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dynpbdw/experiment.hpp"
#include "dynpbdw/highfidelity.hpp"

using namespace dynpbdw;

namespace {

// Small but fully featured configuration for integration-level checks.
ExperimentConfig smoke_config(const std::string& out_dir) {
  ExperimentConfig cfg = preset("nls1d");
  cfg.count_x = 128;
  cfg.t_final = 0.5;
  cfg.n_steps = 50;
  cfg.stride = 10;
  cfg.half_rank = 2;
  cfg.train_per_axis = 2;
  cfg.test_per_axis = 1;
  cfg.num_sensors = 5;
  cfg.sigma = 1.0;
  cfg.initial_sensors.resize(0, 0);
  cfg.placement.l_max = 2;
  cfg.out_dir = out_dir;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("presets cover all models at desk and paper scale") {
  for (const char* name : {"nls1d", "swe1d", "swe2d"}) {
    const ExperimentConfig cfg = preset(name);
    CHECK(cfg.n_steps % cfg.stride == 0);
    CHECK(cfg.num_sensors >= cfg.half_rank);
    CHECK(cfg.make_grid().num_points() == cfg.count_x * cfg.count_y);
    CHECK_FALSE(cfg.test_set().empty());
    // Test parameters are strictly inside the training box.
    const ModelSpec spec = cfg.make_model();
    for (const Theta& th : cfg.test_set()) CHECK(spec.theta_in_box(th));
  }
  CHECK(preset("paper-nls1d").count_x == 1000);
  CHECK(preset("paper-swe2d").count_x == 50);
  CHECK_THROWS(preset("no-such-preset"));

  const ExperimentConfig nls = preset("nls1d");
  CHECK(nls.kind == ModelKind::NLS1D);
  CHECK(nls.half_extent_x == doctest::Approx(20.0 * M_PI));
  CHECK(nls.initial_sensors.rows() == nls.num_sensors);
}

TEST_CASE("config files override presets key by key") {
  const std::string path = "/tmp/dynpbdw_test_config.ini";
  {
    std::ofstream out(path);
    out << "preset = swe1d\n"
        << "\n"
        << "[model]\n"
        << "t_final = 2.5\n"
        << "n_steps = 500\n"
        << "\n"
        << "[sensors]\n"
        << "count = 7\n"
        << "sigma = 0.4\n"
        << "\n"
        << "[noise]\n"
        << "seed = 99\n"
        << "\n"
        << "[run]\n"
        << "mode = static\n";
  }
  const ExperimentConfig cfg = load_config(path, preset("nls1d"));
  // The preset key replaces the base before overrides apply.
  CHECK(cfg.kind == ModelKind::SWE1D);
  CHECK(cfg.t_final == 2.5);
  CHECK(cfg.n_steps == 500);
  CHECK(cfg.num_sensors == 7);
  CHECK(cfg.sigma == 0.4);
  CHECK(cfg.seed == 99);
  CHECK(cfg.mode == RunMode::Static);
  // Unmentioned keys keep the swe1d preset values.
  CHECK(cfg.half_extent_x == preset("swe1d").half_extent_x);

  {
    std::ofstream out(path);
    out << "[model]\nno_such_key = 1\n";
  }
  CHECK_THROWS(load_config(path, preset("nls1d")));
  CHECK_THROWS(load_config("/tmp/definitely-missing-file.ini", preset("nls1d")));
  std::remove(path.c_str());
}

TEST_CASE("run mode round-trips through its names") {
  CHECK(run_mode_from_string("static") == RunMode::Static);
  CHECK(run_mode_from_string("dynamic") == RunMode::Dynamic);
  CHECK(to_string(RunMode::Static) == "static");
  CHECK(to_string(RunMode::Dynamic) == "dynamic");
  CHECK_THROWS(run_mode_from_string("hybrid"));
}

TEST_CASE("transport_case is a normalized moving Gaussian") {
  const SpatialGrid g = SpatialGrid::make_1d(50.0, 2000);
  const GridFunction u = transport_case(1.0, 0.5, 4.0, g);
  // Peak 1 / (sqrt(2 pi) theta1) at x = t theta2 = 2, a grid node.
  const double peak = 1.0 / std::sqrt(2.0 * M_PI);
  int i0 = 0;
  for (int i = 0; i < g.num_points(); ++i)
    if (std::abs(g.coord(0, i) - 2.0) < 1e-9) i0 = i;
  CHECK(u.q[i0] == doctest::Approx(peak).epsilon(1e-12));
  CHECK(u.p.cwiseAbs().maxCoeff() == 0.0);
  // Unit mass by quadrature.
  CHECK(g.quad_weight() * u.q.sum() == doctest::Approx(1.0).epsilon(1e-10));
  // Pure translation in time: q(x, t) = q(x - dt theta2, 0).
  const GridFunction u0 = transport_case(1.0, 0.5, 0.0, g);
  const int shift = static_cast<int>(std::round(2.0 / (100.0 / 2000.0)));
  for (int i = 0; i < g.num_points(); ++i) {
    const int k = (i + shift) % g.num_points();
    CHECK(u.q[k] == doctest::Approx(u0.q[i]).epsilon(1e-10));
  }
}

TEST_CASE("emit_csv writes the fixed column order at full precision") {
  RunRecord rec;
  rec.t = 0.125;
  rec.beta = 1.0 / 3.0;
  rec.maxima.err = 1e-17;
  rec.maxima.proj_err = 2.0;
  rec.maxima.bound = 3.0;
  rec.maxima.ham_err = 4.0;
  rec.maxima.ham_drift_truth = 5.0;
  rec.maxima.ham_drift_rec = 6.0;
  rec.sensor_positions.resize(2, 1);
  rec.sensor_positions << -1.5, 2.5;

  std::ostringstream os;
  emit_csv({rec}, os);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header ==
        "t,beta,err_max,err_proj_max,err_bound_max,ham_err_max,"
        "ham_drift_truth,ham_drift_rec,s1_x,s2_x");

  // Round-trip: parsing the row recovers every value bitwise.
  std::istringstream cells(row);
  std::string cell;
  std::vector<double> vals;
  while (std::getline(cells, cell, ',')) vals.push_back(std::stod(cell));
  REQUIRE(vals.size() == 10);
  CHECK(vals[0] == 0.125);
  CHECK(vals[1] == 1.0 / 3.0);
  CHECK(vals[2] == 1e-17);
  CHECK(vals[8] == -1.5);
  CHECK(vals[9] == 2.5);

  // Empty record list still emits the header.
  std::ostringstream empty;
  emit_csv({}, empty);
  CHECK(empty.str().rfind("t,beta,", 0) == 0);
}

TEST_CASE("truth trajectories are stored once and reloaded when consistent") {
  const std::string out_dir = "/tmp/dynpbdw_truths";
  std::filesystem::remove_all(out_dir);
  ExperimentConfig cfg = smoke_config(out_dir);
  generate_truths(cfg);
  const std::string p0 = truth_path(cfg, 0);
  CHECK(std::filesystem::exists(p0));
  const Trajectory traj = load_trajectory(p0);
  CHECK(traj.stride == cfg.stride);
  CHECK(static_cast<int>(traj.snapshots.size()) ==
        cfg.n_steps / cfg.stride + 1);

  // A second call must not modify the stored files.
  const auto stamp = std::filesystem::last_write_time(p0);
  generate_truths(cfg);
  CHECK(std::filesystem::last_write_time(p0) == stamp);
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("static mode equals dynamic mode with zero ascent iterations") {
  const std::string out_dir = "/tmp/dynpbdw_modes";
  std::filesystem::remove_all(out_dir);
  ExperimentConfig stat = smoke_config(out_dir);
  stat.mode = RunMode::Static;
  ExperimentConfig dyn0 = stat;
  dyn0.mode = RunMode::Dynamic;
  dyn0.placement.l_max = 0;

  const RunResult a = run(stat);
  const RunResult b = run(dyn0);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].beta == b.records[i].beta);
    CHECK(a.records[i].maxima.err == b.records[i].maxima.err);
    CHECK((a.records[i].sensor_positions - b.records[i].sensor_positions)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("runs are deterministic and well ordered row by row") {
  const std::string out_dir = "/tmp/dynpbdw_determinism";
  std::filesystem::remove_all(out_dir);
  ExperimentConfig cfg = smoke_config(out_dir);
  cfg.eps_noise = 1e-3;
  cfg.seed = 7;

  const RunResult r1 = run(cfg);
  const RunResult r2 = run(cfg);
  std::ostringstream s1, s2;
  emit_csv(r1.records, s1);
  emit_csv(r2.records, s2);
  CHECK(s1.str() == s2.str());

  CHECK_FALSE(r1.any_failure);
  CHECK(r1.records.size() ==
        static_cast<std::size_t>(cfg.n_steps / cfg.stride + 1));
  CHECK(r1.max_orthonormality_error < 1e-10);
  CHECK(r1.max_symplecticity_error < 1e-10);

  // The certified ordering proj_err <= err <= bound holds for noiseless
  // data; noise can push err slightly past the bound.
  ExperimentConfig clean = cfg;
  clean.eps_noise = 0.0;
  const RunResult r0 = run(clean);
  for (const RunRecord& rec : r0.records) {
    CHECK(rec.beta > 0.0);
    CHECK(rec.maxima.proj_err <= rec.maxima.err * (1.0 + 1e-10) + 1e-13);
    CHECK(rec.maxima.err <= rec.maxima.bound * (1.0 + 1e-10) + 1e-13);
  }

  // Time column is the assimilation grid.
  const double dt = cfg.t_final / cfg.n_steps;
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(r1.records[i].t ==
          doctest::Approx(static_cast<double>(i) * cfg.stride * dt));
  }
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("reconstruction degrades monotonically in the noise amplitude") {
  const std::string out_dir = "/tmp/dynpbdw_noise";
  std::filesystem::remove_all(out_dir);
  ExperimentConfig cfg = smoke_config(out_dir);
  cfg.n_steps = 10;
  cfg.t_final = 0.1;

  // Average the final-time error over seeds to suppress direction noise.
  auto mean_err = [&](double eps) {
    double acc = 0.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
      ExperimentConfig c = cfg;
      c.eps_noise = eps;
      c.seed = seed;
      const RunResult r = run(c);
      acc += r.records.back().maxima.err;
    }
    return acc / 5.0;
  };
  const double e0 = mean_err(0.0);
  const double e1 = mean_err(1e-3);
  const double e2 = mean_err(1e-1);
  CHECK(e1 >= e0 * 0.5);
  CHECK(e2 > e1);
  CHECK(e2 > e0 * 2.0);
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("transport demo: static sensors lose the packets, moving ones do not") {
  TransportDemoConfig cfg;
  cfg.count = 512;
  cfg.half_extent = 25.0;
  cfg.t_final = 16.0;
  cfg.n_times = 32;

  cfg.mode = RunMode::Static;
  const RunResult stat = transport_beta_decay_demo(cfg);
  cfg.mode = RunMode::Dynamic;
  const RunResult dyn = transport_beta_decay_demo(cfg);
  REQUIRE(stat.records.size() == static_cast<std::size_t>(cfg.n_times + 1));
  REQUIRE(dyn.records.size() == stat.records.size());

  // Same starting placement, very different fates.
  CHECK(stat.records.front().beta ==
        doctest::Approx(dyn.records.front().beta).epsilon(1e-12));
  CHECK(stat.records.back().beta < 1e-6);
  CHECK(dyn.records.back().beta > 0.5 * dyn.records.front().beta);

  // Static sensors never move; dynamic sensors advect with mean speed 1.
  CHECK((stat.records.back().sensor_positions -
         stat.records.front().sensor_positions)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  const double moved = (dyn.records.back().sensor_positions -
                        dyn.records.front().sensor_positions)
                           .col(0)
                           .mean();
  CHECK(moved == doctest::Approx(cfg.t_final).epsilon(1e-10));
}
