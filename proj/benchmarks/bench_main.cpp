#include "tlearn/loss.hpp"
#include "tlearn/penalty.hpp"
#include "tlearn/solver.hpp"
#include "tlearn/tasks.hpp"
#include "tlearn/tsvd.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tlearn;

namespace {

Tensor3 gaussian(Dims d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Tensor3 x(d);
  for (double& v : x.data()) v = normal(rng);
  return x;
}

void BM_TSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Tensor3 x = gaussian({n, n, 10}, 1);
  const OrthogonalTransform u = dct_transform(10);
  for (auto _ : state) benchmark::DoNotOptimize(t_svd(x, u));
}
BENCHMARK(BM_TSvd)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ProxS1(benchmark::State& state) {
  const Index n = state.range(0);
  const Tensor3 x = gaussian({n, n, 10}, 2);
  const OrthogonalTransform u = dct_transform(10);
  const PenaltyParams p(PenaltyKind::Mcp, 1.0, 2.7);
  for (auto _ : state) benchmark::DoNotOptimize(prox_s1(x, 0.1, u, p));
}
BENCHMARK(BM_ProxS1)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_AdmmSubproblem(benchmark::State& state) {
  const Dims d{30, 30, 10};
  const OrthogonalTransform u = dct_transform(10);
  const Tensor3 truth = synth_low_multirank(d, 2, u, 3);
  const CompletionData data = observe({truth, 0.4, 0.01, 4});
  const PenaltyParams p(PenaltyKind::Mcp, 5.0, 2.7);
  PmmConfig pmm;
  pmm.rho = 3.2;
  pmm.box_c = default_completion_box(data.loss);
  AdmmConfig admm;
  admm.max_inner = static_cast<int>(state.range(0));
  admm.tol_inner = 1e-300;  // run exactly max_inner steps
  const Tensor3& x = data.loss.observed();
  const Tensor3 gf = data.loss.gradient(x);
  const Tensor3 gs = grad_s2(x, u, p);
  for (auto _ : state) benchmark::DoNotOptimize(admm_subproblem(x, gf, gs, p, u, pmm, admm));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdmmSubproblem)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_CompletionSolve(benchmark::State& state) {
  const Dims d{30, 30, 10};
  const OrthogonalTransform u = dct_transform(10);
  const Tensor3 truth = synth_low_multirank(d, 2, u, 5);
  const CompletionData data = observe({truth, 0.4, 0.01, 6});
  SolverSettings s;
  s.penalty = PenaltyParams(PenaltyKind::Mcp, 5.0, 2.7);
  s.pmm.rho = 3.2;
  s.pmm.box_c = default_completion_box(data.loss);
  for (auto _ : state) benchmark::DoNotOptimize(run_completion(data.loss, s));
}
BENCHMARK(BM_CompletionSolve)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_LogisticGradient(benchmark::State& state) {
  const ClassificationProblem p = synth_logistic({10, 10, 3}, 1, 500, 0, dct_transform(3), 7);
  const LogisticLoss loss(p.train_samples, p.train_labels);
  const Tensor3 w = gaussian({10, 10, 3}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(loss.gradient(w));
}
BENCHMARK(BM_LogisticGradient)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
