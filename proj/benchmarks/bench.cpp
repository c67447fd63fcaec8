#include <benchmark/benchmark.h>

#include "dynpbdw/experiment.hpp"
#include "dynpbdw/highfidelity.hpp"
#include "dynpbdw/observation.hpp"
#include "dynpbdw/pbdw.hpp"
#include "dynpbdw/sdlr.hpp"

namespace {

using namespace dynpbdw;

struct NlsSetup {
  ModelSpec spec;
  std::vector<Theta> theta_h;
  OrthosymplecticBasis basis;
  CoefficientEnsemble ensemble;
  SensorArray sensors;

  explicit NlsSetup(int n_x) {
    const ExperimentConfig cfg = preset("nls1d");
    spec = ModelSpec::make(ModelKind::NLS1D,
                           SpatialGrid::make_1d(cfg.half_extent_x, n_x));
    theta_h =
        ParameterGrid::make(spec, cfg.train_per_axis, cfg.test_per_axis)
            .theta_h;
    std::tie(basis, ensemble) = initialize(spec, theta_h, cfg.half_rank);
    sensors.sigma = cfg.sigma;
    sensors.positions = cfg.initial_sensors;
  }
};

void bm_gram_assembly(benchmark::State& state) {
  const NlsSetup s(static_cast<int>(state.range(0)));
  const ObservationOperator obs = build_representers(s.sensors, s.spec.grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_A(obs));
    benchmark::DoNotOptimize(gram_B(obs, s.basis));
  }
}
BENCHMARK(bm_gram_assembly)->Arg(256)->Arg(1024);

void bm_dlr_step(benchmark::State& state) {
  NlsSetup s(static_cast<int>(state.range(0)));
  const double dt = 20.0 / 4000.0;
  for (auto _ : state) {
    dlr_step(s.spec, s.basis, s.ensemble, s.theta_h, dt);
  }
}
BENCHMARK(bm_dlr_step)->Arg(256)->Arg(1024);

void bm_midpoint_step(benchmark::State& state) {
  const NlsSetup s(static_cast<int>(state.range(0)));
  const Theta theta{1.04, 1.04};
  GridFunction u = initial_condition(s.spec, theta);
  const double dt = 20.0 / 4000.0;
  for (auto _ : state) {
    u = midpoint_step(s.spec, theta, u, dt);
  }
}
BENCHMARK(bm_midpoint_step)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
