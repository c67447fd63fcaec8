#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dynpbdw/highfidelity.hpp"

using namespace dynpbdw;

TEST_CASE("midpoint conserves the quadratic oscillator energy per step") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::Oscillator, SpatialGrid::make_1d(1.0, 2));
  const Theta theta{0.5, 0.5};
  GridFunction u = GridFunction::zero(spec.grid);
  u.q << 1.0, -0.3;
  u.p << 0.2, 0.7;
  const double h0 = hamiltonian(spec, theta, u);
  for (int s = 0; s < 100; ++s) {
    u = midpoint_step(spec, theta, u, 0.05);
    CHECK(std::abs(hamiltonian(spec, theta, u) - h0) <= 1e-13 * std::abs(h0));
  }
}

TEST_CASE("stationary state stays fixed") {
  // SWE with h = 0, Phi = 0 has a vanishing vector field.
  const ModelSpec spec =
      ModelSpec::make(ModelKind::SWE1D, SpatialGrid::make_1d(30.0, 32));
  const GridFunction z = GridFunction::zero(spec.grid);
  const GridFunction u = midpoint_step(spec, Theta{0.12, 0.8}, z, 0.01);
  CHECK(u.q.cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.p.cwiseAbs().maxCoeff() == 0.0);
}

namespace {

double solve_final_error(const ModelSpec& spec, const Theta& theta, double T,
                         int n_steps, const GridFunction& ref) {
  GridFunction u = initial_condition(spec, theta);
  const double dt = T / n_steps;
  for (int s = 0; s < n_steps; ++s) u = midpoint_step(spec, theta, u, dt);
  GridFunction d = u;
  d.q -= ref.q;
  d.p -= ref.p;
  return norm(d);
}

double convergence_slope(const ModelSpec& spec, const Theta& theta, double T,
                         int n_ref) {
  GridFunction ref = initial_condition(spec, theta);
  const double dt_ref = T / n_ref;
  for (int s = 0; s < n_ref; ++s) ref = midpoint_step(spec, theta, ref, dt_ref);
  const double e1 = solve_final_error(spec, theta, T, n_ref / 16, ref);
  const double e2 = solve_final_error(spec, theta, T, n_ref / 8, ref);
  const double e4 = solve_final_error(spec, theta, T, n_ref / 4, ref);
  const double s1 = std::log2(e1 / e2);
  const double s2 = std::log2(e2 / e4);
  return 0.5 * (s1 + s2);
}

}  // namespace

TEST_CASE("self-convergence of order two on NLS and SWE1D") {
  const ModelSpec nls =
      ModelSpec::make(ModelKind::NLS1D, SpatialGrid::make_1d(20.0 * M_PI, 128));
  CHECK(convergence_slope(nls, Theta{1.04, 1.04}, 1.0, 1024) ==
        doctest::Approx(2.0).epsilon(0.1));

  const ModelSpec swe =
      ModelSpec::make(ModelKind::SWE1D, SpatialGrid::make_1d(30.0, 128));
  CHECK(convergence_slope(swe, Theta{0.12, 0.8}, 1.0, 1024) ==
        doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("midpoint is time reversible") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::NLS1D, SpatialGrid::make_1d(20.0 * M_PI, 128));
  const Theta theta{1.05, 1.0};
  const GridFunction u0 = initial_condition(spec, theta);
  GridFunction u = u0;
  for (int s = 0; s < 20; ++s) u = midpoint_step(spec, theta, u, 0.01);
  for (int s = 0; s < 20; ++s) u = midpoint_step(spec, theta, u, -0.01);
  GridFunction d = u;
  d.q -= u0.q;
  d.p -= u0.p;
  CHECK(norm(d) < 1e-9);
}

TEST_CASE("solve_trajectory: snapshot bookkeeping and determinism") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::NLS1D, SpatialGrid::make_1d(20.0 * M_PI, 64));
  const Theta theta{1.0, 1.0};
  const TimeGrid tg{0.5, 50};
  const Trajectory a = solve_trajectory(spec, theta, tg, 10);
  CHECK(a.snapshots.size() == 6);
  CHECK(a.times.size() == 6);
  CHECK(a.times.front() == 0.0);
  CHECK(a.times.back() == doctest::Approx(0.5));
  CHECK(a.hamiltonians.size() == 6);

  const Trajectory b = solve_trajectory(spec, theta, tg, 10);
  for (size_t i = 0; i < a.snapshots.size(); ++i) {
    CHECK(a.snapshots[i].q == b.snapshots[i].q);
    CHECK(a.snapshots[i].p == b.snapshots[i].p);
  }
  CHECK_THROWS(solve_trajectory(spec, theta, tg, 7));  // stride must divide
}

TEST_CASE("hamiltonian drift stays bounded on a short NLS run") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::NLS1D, SpatialGrid::make_1d(20.0 * M_PI, 128));
  const Theta theta{1.04, 1.04};
  const Trajectory t = solve_trajectory(spec, theta, TimeGrid{2.0, 1200}, 60);
  const double h0 = t.hamiltonians.front();
  for (double h : t.hamiltonians) {
    CHECK(std::abs(h - h0) <= 1e-6 * std::abs(h0));
  }
}

TEST_CASE("trajectory persistence round-trips and rejects bad files") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::SWE1D, SpatialGrid::make_1d(30.0, 32));
  const Trajectory t =
      solve_trajectory(spec, Theta{0.12, 0.8}, TimeGrid{0.2, 20}, 5);
  const auto path =
      (std::filesystem::temp_directory_path() / "traj_test.bin").string();
  save_trajectory(path, t);

  const Trajectory r = load_trajectory(path);
  CHECK(r.time_grid.t_final == t.time_grid.t_final);
  CHECK(r.time_grid.n_steps == t.time_grid.n_steps);
  CHECK(r.stride == t.stride);
  CHECK(r.theta == t.theta);
  CHECK(r.times == t.times);
  CHECK(r.hamiltonians == t.hamiltonians);
  REQUIRE(r.snapshots.size() == t.snapshots.size());
  for (size_t i = 0; i < r.snapshots.size(); ++i) {
    CHECK(r.snapshots[i].q == t.snapshots[i].q);
    CHECK(r.snapshots[i].p == t.snapshots[i].p);
  }
  CHECK(std::filesystem::exists(path + ".csv"));  // companion (t, H) file

  // truncation is detected
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 16);
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS(load_trajectory(path));
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".csv");
}

TEST_CASE("newton divergence reports the failing step") {
  const ModelSpec spec =
      ModelSpec::make(ModelKind::NLS1D, SpatialGrid::make_1d(20.0 * M_PI, 64));
  // An absurdly large dt makes the midpoint system unsolvable by Newton.
  CHECK_THROWS(midpoint_step(spec, Theta{1.1, 1.1},
                             initial_condition(spec, Theta{1.1, 1.1}), 1e6));
}
