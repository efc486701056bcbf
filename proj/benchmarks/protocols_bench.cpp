#include <benchmark/benchmark.h>

#include <chrono>
#include <vector>

#include "ab3/arith.hpp"
#include "ab3/boolean.hpp"
#include "ab3/dataset.hpp"
#include "ab3/piecewise.hpp"
#include "ab3/session.hpp"
#include "ab3/trainer.hpp"

namespace {

using namespace ab3;

// Runs `setup` then `op` in the simulator and reports only party 0's time
// spent in `op`, so thread start-up and key setup stay out of the numbers.
template <typename Setup, typename Op>
void run_timed(benchmark::State& state, Setup setup, Op op) {
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    auto run = simulate_parties([&](Party& p) {
      auto in = setup(p);
      const auto before = p.net().stats();
      const auto t0 = std::chrono::steady_clock::now();
      benchmark::DoNotOptimize(op(p, in));
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return std::make_pair(s, (p.net().stats() - before).total_bytes());
    });
    state.SetIterationTime(run.outputs[0].first);
    bytes = run.outputs[0].second;
  }
  state.counters["bytes_p0"] = static_cast<double>(bytes);
}

ArithShare random_vector(Party& p, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i % 17) * 0.25 - 2.0;
  RingTensor t(Shape{n}, true);
  if (p.id() == PartyId(0)) t = RingTensor::encode(Shape{n}, v, p.codec());
  return share(p, PartyId(0), t);
}

void BM_Mul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  run_timed(
      state, [&](Party& p) { return random_vector(p, n); },
      [](Party& p, const ArithShare& x) { return mul(p, x, x); });
}
BENCHMARK(BM_Mul)->RangeMultiplier(16)->Range(16, 65536)->UseManualTime();

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  run_timed(
      state, [&](Party& p) { return random_vector(p, n * n).reshaped(Shape{n, n}); },
      [](Party& p, const ArithShare& x) { return matmul(p, x, x); });
}
BENCHMARK(BM_Matmul)->RangeMultiplier(4)->Range(16, 256)->UseManualTime();

void BM_Msb(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  run_timed(
      state, [&](Party& p) { return random_vector(p, n); },
      [](Party& p, const ArithShare& x) { return msb(p, x); });
}
BENCHMARK(BM_Msb)->RangeMultiplier(16)->Range(16, 65536)->UseManualTime();

void BM_Sigmoid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kind = state.range(1) == 3 ? SigmoidKind::kThreePiece : SigmoidKind::kFivePiece;
  run_timed(
      state, [&](Party& p) { return random_vector(p, n); },
      [kind](Party& p, const ArithShare& x) { return sigmoid(p, x, kind); });
}
BENCHMARK(BM_Sigmoid)->ArgsProduct({{64, 1024, 16384}, {3, 5}})->UseManualTime();

void BM_TrainStep(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  const Dataset d = make_gaussian_classes(b, f, 0.5, 2.0, 0.0, 3);
  TrainConfig cfg;
  cfg.batch_size = b;
  run_timed(
      state, [&](Party& p) { return share_dataset(p, &d, PartitionMode::kDealer); },
      [&](Party& p, const SharedData& data) {
        const ModelState m = init_model(p, f, cfg);
        return train_step(p, data.x, data.y, m, cfg, ClassWeights{}, b).w;
      });
}
BENCHMARK(BM_TrainStep)->ArgsProduct({{64, 1024, 4096}, {64, 256}})->UseManualTime();

}  // namespace

BENCHMARK_MAIN();
