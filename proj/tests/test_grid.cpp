#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dynpbdw/grid.hpp"

using namespace dynpbdw;

namespace {

GridFunction random_field(const SpatialGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  GridFunction f = GridFunction::zero(g);
  for (int i = 0; i < g.num_points(); ++i) {
    f.q[i] = uni(rng);
    f.p[i] = uni(rng);
  }
  return f;
}

}  // namespace

TEST_CASE("inner product: constant-function quadrature") {
  const SpatialGrid g = SpatialGrid::make_1d(1.0, 4);  // h = 0.5
  GridFunction f = GridFunction::zero(g);
  f.q.setOnes();
  CHECK(inner_product(f, f) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("inner product: symmetry and positivity") {
  const SpatialGrid g = SpatialGrid::make_1d(3.0, 17);
  const GridFunction f = random_field(g, 1);
  const GridFunction h = random_field(g, 2);
  CHECK(inner_product(f, h) == inner_product(h, f));
  CHECK(inner_product(f, f) > 0.0);
}

TEST_CASE("inner product: Gaussian self-overlap oracle") {
  // Oracle: integral of (2 pi s^2)^{-1} exp(-x^2/s^2) = 1/(2 sqrt(pi) s).
  const double s = 0.1;
  const double oracle = 1.0 / (2.0 * std::sqrt(M_PI) * s);
  // Resolve the width-s/sqrt(2) product Gaussian: h = 0.0126 << s.
  const SpatialGrid g = SpatialGrid::make_1d(20.0 * M_PI, 10000);
  GridFunction f = GridFunction::zero(g);
  const double amp = 1.0 / std::sqrt(2.0 * M_PI * s * s);
  for (int i = 0; i < g.count[0]; ++i) {
    const double x = g.coord(0, i);
    f.q[i] = amp * std::exp(-0.5 * x * x / (s * s));
  }
  CHECK(inner_product(f, f) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("norm: independent summation oracle and homogeneity") {
  const SpatialGrid g = SpatialGrid::make_2d(2.0, 1.0, 8, 6);
  GridFunction f = random_field(g, 3);
  double acc = 0.0;
  for (int i = 0; i < g.num_points(); ++i) {
    acc += f.q[i] * f.q[i] + f.p[i] * f.p[i];
  }
  const double oracle = std::sqrt(g.quad_weight() * acc);
  CHECK(norm(f) == doctest::Approx(oracle).epsilon(1e-14));

  GridFunction f2 = f;
  f2.q *= 2.0;
  f2.p *= 2.0;
  CHECK(norm(f2) == doctest::Approx(2.0 * norm(f)).epsilon(1e-14));
  CHECK(norm(GridFunction::zero(g)) == 0.0);
}

TEST_CASE("inner product: grid mismatch throws") {
  const GridFunction a = GridFunction::zero(SpatialGrid::make_1d(1.0, 4));
  const GridFunction b = GridFunction::zero(SpatialGrid::make_1d(1.0, 8));
  CHECK_THROWS(inner_product(a, b));
}

TEST_CASE("laplacian: constants, eigenfunction, Richardson") {
  const SpatialGrid g = SpatialGrid::make_1d(2.0, 128);
  CHECK(laplacian(g, Eigen::VectorXd::Ones(128)).cwiseAbs().maxCoeff() == 0.0);

  // sin(pi x / L) is an eigenfunction with eigenvalue -(pi/L)^2 + O(h^2).
  const double k = M_PI / g.half_extent[0];
  Eigen::VectorXd f(g.count[0]), lap_exact(g.count[0]);
  for (int i = 0; i < g.count[0]; ++i) {
    f[i] = std::sin(k * g.coord(0, i));
    lap_exact[i] = -k * k * f[i];
  }
  const double err_c =
      (laplacian(g, f) - lap_exact).cwiseAbs().maxCoeff();
  CHECK(err_c < 1e-3);

  const SpatialGrid g2 = SpatialGrid::make_1d(2.0, 256);
  Eigen::VectorXd f2(g2.count[0]), lap2(g2.count[0]);
  for (int i = 0; i < g2.count[0]; ++i) {
    f2[i] = std::sin(k * g2.coord(0, i));
    lap2[i] = -k * k * f2[i];
  }
  const double err_f = (laplacian(g2, f2) - lap2).cwiseAbs().maxCoeff();
  CHECK(err_c / err_f == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("derivative: sine to cosine, constants, summation by parts") {
  const SpatialGrid g = SpatialGrid::make_1d(1.0, 200);
  CHECK(derivative(g, Eigen::VectorXd::Ones(200), 0).cwiseAbs().maxCoeff() ==
        0.0);

  const double k = 2.0 * M_PI;  // one full period on [-1, 1)
  Eigen::VectorXd f(200), df(200);
  for (int i = 0; i < 200; ++i) {
    f[i] = std::sin(k * g.coord(0, i));
    df[i] = k * std::cos(k * g.coord(0, i));
  }
  CHECK((derivative(g, f, 0) - df).cwiseAbs().maxCoeff() < k * k * k / 6.0 *
                                                               0.01 * 0.01 *
                                                               1.5);

  const GridFunction a = random_field(g, 5);
  const GridFunction b = random_field(g, 6);
  const double lhs = g.quad_weight() * derivative(g, a.q, 0).dot(b.q);
  const double rhs = -g.quad_weight() * a.q.dot(derivative(g, b.q, 0));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("divergence matches the sum of axis derivatives") {
  const SpatialGrid g = SpatialGrid::make_2d(1.0, 1.0, 12, 10);
  const GridFunction f = random_field(g, 7);
  const Eigen::VectorXd div = divergence(g, {f.q, f.p});
  const Eigen::VectorXd expect =
      derivative(g, f.q, 0) + derivative(g, f.p, 1);
  CHECK((div - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary IO: round-trip, file size, malformed input") {
  const SpatialGrid g = SpatialGrid::make_2d(2.0, 3.0, 6, 4);
  const GridFunction f = random_field(g, 11);
  const auto path = std::filesystem::temp_directory_path() / "gf_test.bin";
  save_grid_function(path.string(), f);

  const GridFunction r = load_grid_function(path.string());
  CHECK(r.grid == f.grid);
  CHECK(r.q == f.q);
  CHECK(r.p == f.p);

  // header: dim, N_x, N_y (i64), h_x, h_y (f64); payload: q then p.
  const std::uintmax_t expect_size =
      3 * 8 + 2 * 8 + 2ull * g.num_points() * 8;
  CHECK(std::filesystem::file_size(path) == expect_size);

  std::stringstream truncated;
  write_grid_function(truncated, f);
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() / 2);
  std::stringstream half(bytes);
  CHECK_THROWS(read_grid_function(half));

  std::stringstream garbage("not a grid function");
  CHECK_THROWS(read_grid_function(garbage));
  std::filesystem::remove(path);
}

TEST_CASE("minimum image wrapping") {
  const SpatialGrid g = SpatialGrid::make_1d(5.0, 10);
  CHECK(g.min_image(11.0, 0) == doctest::Approx(1.0));
  CHECK(g.min_image(-11.0, 0) == doctest::Approx(-1.0));
  CHECK(g.min_image(5.0, 0) == -5.0);  // half-open convention
  CHECK(g.wrap(7.0, 0) == doctest::Approx(-3.0));
}
