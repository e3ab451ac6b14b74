// Microbenchmarks for the hot paths: matrix assembly, the two solvers, and
// the random number generator that drives the simulation harness.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rbmest/adjustment.hpp"
#include "rbmest/glm.hpp"
#include "rbmest/matrix.hpp"
#include "rbmest/model.hpp"
#include "rbmest/quasi.hpp"
#include "rbmest/rng.hpp"
#include "rbmest/solver.hpp"

namespace {

using namespace rbm;

GlmSpec poisson_spec(int n) {
  Philox4x32 rng(17, 0);
  GlmSpec s;
  s.family = Family::Poisson;
  s.link = Link::Log;
  s.x = DenseMatrix(n, 3);
  for (int i = 0; i < n; ++i) {
    s.x(i, 0) = 1.0;
    s.x(i, 1) = rng.normal();
    s.x(i, 2) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    s.y.push_back(static_cast<double>(
        rng.poisson(std::exp(0.8 + 0.4 * s.x(i, 1) - 0.3 * s.x(i, 2)))));
  }
  return s;
}

QuasiSpec quasi_spec(int n) {
  Philox4x32 rng(29, 0);
  QuasiSpec s;
  s.link = Link::Log;
  s.varfun = VarianceFunction::Mu;
  s.mode = QuasiMode::AdjustedJointPhi;
  s.x = DenseMatrix(n, 2);
  for (int i = 0; i < n; ++i) {
    s.x(i, 0) = 1.0;
    s.x(i, 1) = rng.uniform();
    s.y.push_back(std::floor(4.0 * std::exp(0.5 * s.x(i, 1)) * (0.5 + rng.uniform())));
  }
  return s;
}

void BM_AssembleFirstOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EstimatingModel m = glm_model(poisson_spec(n));
  const std::vector<double> theta = {0.8, 0.4, -0.3};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, theta, false));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AssembleFirstOrder)->Arg(50)->Arg(200)->Arg(800);

void BM_AssembleSecondOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EstimatingModel m = glm_model(poisson_spec(n));
  const std::vector<double> theta = {0.8, 0.4, -0.3};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, theta, true));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AssembleSecondOrder)->Arg(50)->Arg(200)->Arg(800);

void BM_AssembleQuasiJoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EstimatingModel m = quasi_model(quasi_spec(n));
  const std::vector<double> theta = {1.4, 0.5, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, theta, true));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AssembleQuasiJoint)->Arg(50)->Arg(200);

void BM_SolveM(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EstimatingModel m = glm_model(poisson_spec(n));
  SolverConfig cfg;
  cfg.keep_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_m(m, cfg));
}
BENCHMARK(BM_SolveM)->Arg(50)->Arg(200);

void BM_SolveRbm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EstimatingModel m = glm_model(poisson_spec(n));
  SolverConfig cfg;
  cfg.keep_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_rbm(m, cfg));
}
BENCHMARK(BM_SolveRbm)->Arg(50)->Arg(200);

void BM_EmpiricalAdjustment(benchmark::State& state) {
  const EstimatingModel m = glm_model(poisson_spec(200));
  const AdjustmentMatrices mats = assemble(m, {0.8, 0.4, -0.3}, true);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_adjustment(mats));
}
BENCHMARK(BM_EmpiricalAdjustment);

void BM_LuSolve(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  Philox4x32 rng(31, 0);
  DenseMatrix a(p, p);
  std::vector<double> b(p);
  for (int i = 0; i < p; ++i) {
    b[i] = rng.normal();
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal() + (i == j ? p : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve(lu_factor(a), b));
}
BENCHMARK(BM_LuSolve)->Arg(3)->Arg(6)->Arg(12);

void BM_PhiloxNormal(benchmark::State& state) {
  Philox4x32 rng(7, 0);
  double acc = 0.0;
  for (auto _ : state) acc += rng.normal();
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxNormal);

}  // namespace

BENCHMARK_MAIN();
