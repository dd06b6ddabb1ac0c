#include <benchmark/benchmark.h>

#include "nlsplit/mfe/modulation.hpp"
#include "nlsplit/splitting.hpp"

using namespace nlsplit;

namespace {

const SplittingScheme& scheme_at(int index) {
  static const auto all = builtin_schemes();
  return all.at(static_cast<std::size_t>(index));
}

void BM_StepperAdvance(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto& s = scheme_at(static_cast<int>(state.range(1)));
  Stepper stepper(s, max_cfl_step(K, 2, 6.0), K);
  ModeVector u = make_initial(K, 0.1, InitialProfile::named("random", 1));
  for (auto _ : state) {
    stepper.advance(u);
    benchmark::DoNotOptimize(u.dft_order().data());
  }
  state.SetLabel(s.name);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepperAdvance)->ArgsProduct({{16, 64, 256}, {2, 4, 6}});

void BM_FlowB(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const ModeVector u = make_initial(K, 0.1, InitialProfile::named("random", 2));
  for (auto _ : state) benchmark::DoNotOptimize(flow_B(u, 0.01));
}
BENCHMARK(BM_FlowB)->Arg(16)->Arg(256);

void BM_Energy(benchmark::State& state) {
  const ModeVector u = make_initial(64, 0.1, InitialProfile::named("random", 3));
  const auto p = state.range(0) ? Precision::compensated : Precision::plain;
  for (auto _ : state) benchmark::DoNotOptimize(energy(u, p));
}
BENCHMARK(BM_Energy)->Arg(0)->Arg(1);

void BM_BuildModulation(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int K = 8;
  const ModeVector psi0 = make_initial(K, 0.1, InitialProfile::named("default"));
  const auto& s = scheme_at(4);
  const double h = max_cfl_step(K, N, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(mfe::build_modulation(psi0, 0.1, N, s, h).entry_count());
}
BENCHMARK(BM_BuildModulation)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_DefectResidual(benchmark::State& state) {
  const int K = 8, N = static_cast<int>(state.range(0));
  const ModeVector psi0 = make_initial(K, 0.1, InitialProfile::named("default"));
  const auto T = mfe::build_modulation(psi0, 0.1, N, scheme_at(2), max_cfl_step(K, N, 6.0));
  for (auto _ : state) benchmark::DoNotOptimize(mfe::defect_residual(T, 0.5).size());
}
BENCHMARK(BM_DefectResidual)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
