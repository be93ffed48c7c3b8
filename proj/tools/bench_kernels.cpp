// Compares the OpenMP batch kernels against the serial reference paths on
// representative workloads: batch forward evaluation, CT loss + gradient
// accumulation, and the quadratic-time metrics.

#include <benchmark/benchmark.h>

#include "cmlab/consistency/loss.hpp"
#include "cmlab/consistency/model.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/diffusion/time_grid.hpp"
#include "cmlab/eval/metrics.hpp"
#include "cmlab/ref/reference.hpp"

namespace {

using namespace cmlab;

struct Fixture {
  MlpConfig cfg;
  ConsistencyModel model;
  TimeGrid grid;
  Batch xs, zs;
  std::vector<int> ns;

  explicit Fixture(int batch)
      : cfg{2, {64, 64}, 16, Activation::silu, 0.25, 16.0},
        model(cfg, 0.5, 0.002, 80.0),
        grid(karras_grid(0.002, 80.0, 7.0, 18)) {
    model.backbone().init_dense(11);
    RandomStream rng(5);
    xs.resize(batch);
    zs.resize(batch);
    ns.resize(batch);
    for (int i = 0; i < batch; ++i) {
      xs[i] = {rng.normal(), rng.normal()};
      zs[i] = {rng.normal(), rng.normal()};
      ns[i] = static_cast<int>(rng.uniform_int(1, grid.steps - 1));
    }
  }
};

void bm_forward_parallel(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double acc = 0.0;
    Batch out(fx.xs.size());
    parallel_for(fx.xs.size(), [&](std::size_t i) {
      out[i] = fx.model.apply(fx.xs[i], fx.grid.boundaries[fx.ns[i]]);
    });
    for (const Vec& y : out) acc += y[0];
    benchmark::DoNotOptimize(acc);
  }
}

void bm_forward_serial(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fx.xs.size(); ++i) {
      const Vec y =
          ref::forward(fx.cfg, fx.model.params().values, fx.xs[i], fx.grid.boundaries[fx.ns[i]]);
      acc += fx.model.c_skip(fx.grid.boundaries[fx.ns[i]]) * fx.xs[i][0] +
             fx.model.c_out(fx.grid.boundaries[fx.ns[i]]) * y[0];
    }
    benchmark::DoNotOptimize(acc);
  }
}

void bm_ct_loss_grad(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  CtBatch batch{fx.xs, fx.zs, fx.ns};
  LossConfig loss;
  Vec grad;
  for (auto _ : state) {
    const double value = ct_loss_batch(fx.model, fx.model.params().values,
                                       fx.model.params().values, batch, fx.grid, loss, &grad);
    benchmark::DoNotOptimize(value);
  }
}

void bm_mmd_parallel(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double v = mmd_rbf(fx.xs, fx.zs, 1.0);
    benchmark::DoNotOptimize(v);
  }
}

void bm_mmd_serial(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double v = ref::mmd_rbf(fx.xs, fx.zs, 1.0);
    benchmark::DoNotOptimize(v);
  }
}

}  // namespace

BENCHMARK(bm_forward_parallel)->Arg(1024)->Arg(8192);
BENCHMARK(bm_forward_serial)->Arg(1024)->Arg(8192);
BENCHMARK(bm_ct_loss_grad)->Arg(256)->Arg(1024);
BENCHMARK(bm_mmd_parallel)->Arg(512)->Arg(2048);
BENCHMARK(bm_mmd_serial)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
