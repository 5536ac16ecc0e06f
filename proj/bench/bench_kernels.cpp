#include <benchmark/benchmark.h>

#include "nhad/kernels.hpp"

using namespace nhad;

namespace {

const std::vector<double>& reference_grid() {
  static const auto grid = kernels::uniform_grid(1.5 * kPi, 4001);
  return grid;
}

DesignModel reference_model() { return DesignModel{}; }

struct PropagatorInputs {
  FrameTrace frames;
  PhaseTrace phases;
  std::vector<std::size_t> indices;
};

const PropagatorInputs& propagator_inputs() {
  static const PropagatorInputs inputs = [] {
    DesignModel m;
    m.lambda_mode = LambdaMode::Constant;
    const auto& g = reference_grid();
    return PropagatorInputs{kernels::build_frame_trace(m, g), kernels::converged_phases(m, g).phases,
                            subgrid_indices(g.size(), 50)};
  }();
  return inputs;
}

void BM_SynthesizeParallel(benchmark::State& state) {
  const auto m = reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::synthesize_trace(m, reference_grid()));
}

void BM_SynthesizeSerial(benchmark::State& state) {
  const auto m = reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::synthesize_trace(m, reference_grid()));
}

void BM_FrameTraceParallel(benchmark::State& state) {
  const auto m = reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::build_frame_trace(m, reference_grid()));
}

void BM_FrameTraceSerial(benchmark::State& state) {
  const auto m = reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::build_frame_trace(m, reference_grid()));
}

void BM_PropagatorParallel(benchmark::State& state) {
  const auto& in = propagator_inputs();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::propagator_grid(in.frames, in.phases, 0, in.indices));
}

void BM_PropagatorSerial(benchmark::State& state) {
  const auto& in = propagator_inputs();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::propagator_grid(in.frames, in.phases, 0, in.indices));
}

}  // namespace

BENCHMARK(BM_SynthesizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrameTraceParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrameTraceSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagatorParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PropagatorSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
