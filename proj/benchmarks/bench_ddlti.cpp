#include <benchmark/benchmark.h>

#include <ddlti/ddlti.hpp>

using namespace ddlti;

namespace {

const LQRWeights& pendulum_weights() {
  static const LQRWeights w{Matrix::Constant(1, 1, 100.0), Matrix::Identity(1, 1)};
  return w;
}

const std::vector<Trajectory>& pendulum_data() {
  static const auto data = generate_data(inverted_pendulum().discrete(), DataSetup{50, 7, 1, 1.0, {}});
  return data;
}

void BM_Fit(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const DataBlocks blocks = build_blocks(generate_data(msd().discrete(), DataSetup{200, 1, 1, 1.0, {}}).front(), N);
  for (auto _ : state) benchmark::DoNotOptimize(fit(blocks));
}
BENCHMARK(BM_Fit)->Arg(6)->Arg(12)->Arg(24);

void BM_PinvTruncated(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const DataBlocks blocks = build_blocks(generate_data(msd().discrete(), DataSetup{200, 1, 1, 1.0, {}}).front(), N);
  const Matrix H = blocks.H_i(0);
  const double tol = default_tolerance(H);
  for (auto _ : state) benchmark::DoNotOptimize(pinv_truncated(H, tol));
}
BENCHMARK(BM_PinvTruncated)->Arg(6)->Arg(12)->Arg(24);

void BM_Dare(benchmark::State& state, DareMethod method) {
  const int N = static_cast<int>(state.range(0));
  const NonMinimalRealization r = build(fit_trajectories(pendulum_data(), N));
  DareOptions opts;
  opts.method = method;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dare(r, pendulum_weights(), opts));
}
BENCHMARK_CAPTURE(BM_Dare, doubling, DareMethod::Doubling)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Dare, fixed_point, DareMethod::FixedPoint)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_H2Point(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const StateSpace plant = inverted_pendulum().discrete();
  const Representation rep = fit_trajectories(pendulum_data(), N);
  for (auto _ : state) benchmark::DoNotOptimize(h2_point(plant, rep, pendulum_weights()));
}
BENCHMARK(BM_H2Point)->DenseRange(4, 16, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
