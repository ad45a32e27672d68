// Parallel kernels vs. their serial straight-line references on a
// mid-size configuration. Run manually: build/benchmarks/locsim_bench
#include <benchmark/benchmark.h>

#include "locsim/estimators.hpp"
#include "locsim/reference.hpp"

namespace {

using namespace locsim;

struct Fixture {
  Scenario scenario;
  SteeringSet steering;
  SampleBatch batch;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture fx;
    fx.scenario.nodes = {
        {{5.0, 0.0, 6.0}, {1.0, 0.0, 0.0}, 32, 0.5},
        {{15.0, 0.0, 6.0}, {1.0, 0.0, 0.0}, 32, 0.5},
    };
    for (double x : {3.0, 8.0, 12.5}) {
      TargetSource t;
      t.position = Vec3(x, 0.0, 0.0);
      t.channel_variances = {1.0, 1.0};
      t.waveform.tone_index = static_cast<int>(fx.scenario.targets.size()) + 1;
      fx.scenario.targets.push_back(t);
    }
    fx.scenario.grid = SearchGrid::line({0, 0, 0}, {20, 0, 0}, 0.1);
    fx.scenario.noise_power = 1.0;
    fx.scenario.num_samples = 4;
    fx.scenario.seed = 7;
    fx.steering = build_steering_set(fx.scenario.nodes, fx.scenario.grid);
    fx.batch = synthesize(fx.scenario);
    return fx;
  }();
  return f;
}

void bm_mvdr_parallel(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    auto spectrum = mvdr_spectrum(fx.batch, fx.steering, fx.scenario.grid, 1.0);
    benchmark::DoNotOptimize(spectrum.values.data());
  }
}

void bm_mvdr_reference(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    auto values = ref::mvdr_spectrum(fx.batch, fx.steering, 1.0);
    benchmark::DoNotOptimize(values.data());
  }
}

void bm_bs_parallel(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    auto spectrum = bs_spectrum(fx.batch, fx.steering, fx.scenario.grid, 3);
    benchmark::DoNotOptimize(spectrum.values.data());
  }
}

void bm_bs_reference(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    auto values = ref::bs_spectrum(fx.batch, fx.steering, 3);
    benchmark::DoNotOptimize(values.data());
  }
}

void bm_isr_parallel(benchmark::State& state) {
  const Fixture& fx = fixture();
  TerminationRule rule;
  rule.max_iterations = static_cast<int>(state.range(0));
  rule.tol = 0.0;  // fixed iteration count
  for (auto _ : state) {
    auto [spectrum, isr] = isr_spectrum(fx.batch, fx.steering, fx.scenario.grid,
                                        fx.scenario.noise_power, rule);
    benchmark::DoNotOptimize(spectrum.values.data());
  }
}

void bm_isr_reference(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    auto trace = ref::isr_run(fx.batch, fx.steering, fx.scenario.noise_power,
                              static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(trace.power.data());
  }
}

BENCHMARK(bm_mvdr_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mvdr_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_bs_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_bs_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_isr_parallel)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_isr_reference)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
