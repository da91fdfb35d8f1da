// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "clcrn/clcrn.hpp"
#include "clcrn/rng.hpp"

using namespace clcrn;

namespace {

void BM_knn_graph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<SpherePoint> pts = fibonacci_lattice(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_graph(pts, 8));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_knn_graph)->Range(64, 2048)->Complexity(benchmark::oNSquared);

struct ConvFixture {
  EdgeSet edges;
  CondLocalKernel kernel;
  ad::Tensor signals;

  explicit ConvFixture(int n) {
    const SphericalGraph g = knn_graph(fibonacci_lattice(n), 8);
    edges = build_edge_set(neighborhood_geometry(g, MapKind::kHorizon));
    kernel = CondLocalKernel::init(6, {}, 7, 0.1);
    signals = ad::Tensor::zeros({n, 1});
    Rng rng(11);
    for (double& v : signals.data) v = rng.uniform(-1.0, 1.0);
  }
};

void BM_kernel_weights(benchmark::State& state) {
  const ConvFixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ad::Tape tape;
    const KernelLeaves leaves = kernel_leaves(tape, fx.kernel);
    benchmark::DoNotOptimize(
        kernel_weights_var(tape, leaves, fx.kernel.components, 6, fx.edges));
  }
}
BENCHMARK(BM_kernel_weights)->Range(64, 1024);

void BM_clc_conv_forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ConvFixture fx(n);
  Rng rng(12);
  ad::Tensor lw = ad::Tensor::zeros({6, 32});
  for (double& v : lw.data) v = rng.uniform(-0.2, 0.2);
  const ad::Tensor lb = ad::Tensor::zeros({1, 32});
  for (auto _ : state) {
    ad::Tape tape;
    const KernelLeaves leaves = kernel_leaves(tape, fx.kernel);
    const ad::Var w =
        kernel_weights_var(tape, leaves, fx.kernel.components, 6, fx.edges);
    benchmark::DoNotOptimize(clc_conv(tape.constant(fx.signals), w, fx.edges,
                                      tape.constant(lw), tape.constant(lb),
                                      Activation::kTanh));
  }
}
BENCHMARK(BM_clc_conv_forward)->Range(64, 1024);

void BM_gru_step_with_backward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ModelConfig cfg;
  cfg.hidden = 32;
  cfg.input_len = 1;
  cfg.horizon = 1;
  const Seq2SeqModel model(cfg, fibonacci_lattice(n), 7);
  Rng rng(13);
  ad::Tensor input = ad::Tensor::zeros({n, 1});
  ad::Tensor target = ad::Tensor::zeros({n, 1});
  for (double& v : input.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : target.data) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    ad::Tape tape;
    const Seq2SeqModel::Bound bound = model.bind(tape);
    const ad::Var loss =
        model.training_loss(bound, {input}, {target}, {false});
    tape.backward(loss);
    benchmark::DoNotOptimize(tape.grad(bound.vars[0]));
  }
}
BENCHMARK(BM_gru_step_with_backward)->Range(64, 512);

}  // namespace

BENCHMARK_MAIN();
