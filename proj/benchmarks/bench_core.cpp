#include <benchmark/benchmark.h>

#include "pgnn/forecast.hpp"
#include "pgnn/integrator.hpp"
#include "pgnn/network.hpp"
#include "pgnn/rng.hpp"
#include "pgnn/trainer.hpp"

using namespace pgnn;

namespace {

void BM_Dp45StepLorenz(benchmark::State& state) {
  const SystemSpec& spec = system_spec(SystemId::Lorenz);
  const RhsFn f = [&spec](double, const Vec& x) { return rhs(spec, x); };
  Vec x(3);
  x << 1.0, 1.0, 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dp45_step(f, x, 0.0, 0.01));
  }
}
BENCHMARK(BM_Dp45StepLorenz);

void BM_IntegrateLotkaVolterra(benchmark::State& state) {
  const SystemSpec& spec = system_spec(SystemId::LotkaVolterra);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(spec, spec.defaults.test_ic, 200.0, 0.05));
  }
}
BENCHMARK(BM_IntegrateLotkaVolterra)->Unit(benchmark::kMillisecond);

void BM_LossAndGradBatch32(benchmark::State& state) {
  const int dim = 2;
  const NetParams params =
      init_params(benchmark_sizes(dim), Activation::Relu, inject(InjectionTerm::LvXY, 1), 1);
  Rng rng(2);
  Eigen::MatrixXd X(dim, 32), Y(dim, 32), F(1, 32);
  for (int j = 0; j < 32; ++j) {
    for (int i = 0; i < dim; ++i) {
      X(i, j) = rng.uniform(-1, 1);
      Y(i, j) = rng.uniform(-1, 1);
    }
    F(0, j) = X(0, j) * X(1, j);
  }
  Gradients grads;
  NetWorkspace ws;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(params, X, Y, F, grads, ws));
  }
}
BENCHMARK(BM_LossAndGradBatch32);

void BM_EulerRollout500(benchmark::State& state) {
  const SystemSpec& spec = system_spec(SystemId::LotkaVolterra);
  const NetParams params =
      init_params(benchmark_sizes(2), Activation::Relu, inject(InjectionTerm::LvXY, 1), 1);
  const DerivModel model = [&](const Vec& x) { return predict_derivative(params, spec, x); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(euler_rollout(model, spec.defaults.test_ic, 0.05, 500));
  }
}
BENCHMARK(BM_EulerRollout500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
