#include <benchmark/benchmark.h>

#include "mhfit/learners.hpp"
#include "mhfit/preprocess.hpp"
#include "mhfit/synth.hpp"

using namespace mhfit;

namespace {

LabeledDataset bench_data(std::size_t rows_per_class, std::size_t classes = 12) {
  SyntheticSpec spec;
  spec.n_classes = classes;
  spec.samples_per_class = rows_per_class;
  spec.cluster_separation = 4.0;
  spec.noise_std = 2.0;
  spec.seed = 1;
  return generate_synthetic(spec);
}

void BM_SortColumns(benchmark::State& state) {
  const auto ds = bench_data(static_cast<std::size_t>(state.range(0)));
  const MatrixView x(ds);
  for (auto _ : state) benchmark::DoNotOptimize(SortedColumns(x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_SortColumns)->Arg(100)->Arg(1000);

void BM_FitClassificationTree(benchmark::State& state) {
  const auto ds = bench_data(static_cast<std::size_t>(state.range(0)));
  const MatrixView x(ds);
  const SortedColumns sorted(x);
  const auto enc = encode_labels(ds.labels());
  TreeParams p;
  p.max_depth = 12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_classification_tree(x, sorted, enc.index, enc.codes.size(), {}, p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_FitClassificationTree)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitGradientTree(benchmark::State& state) {
  const auto ds = bench_data(static_cast<std::size_t>(state.range(0)));
  const MatrixView x(ds);
  const SortedColumns sorted(x);
  std::vector<double> g(ds.n_rows()), h(ds.n_rows(), 0.25);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = ds.labels()[i].code() % 2 ? -0.5 : 0.5;
  TreeParams p;
  p.max_depth = 6;
  p.min_child_hessian = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_gradient_tree(x, sorted, g, h, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_FitGradientTree)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MovingAverage(benchmark::State& state) {
  const auto ds = bench_data(1000);
  const FilterSpec spec{FilterKind::MovingAverage, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(filter_signals(ds, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_MovingAverage)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_Median(benchmark::State& state) {
  const auto ds = bench_data(1000);
  const FilterSpec spec{FilterKind::Median, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(filter_signals(ds, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_Median)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_HoldoutSplit(benchmark::State& state) {
  const auto ds = bench_data(1000);
  for (auto _ : state) benchmark::DoNotOptimize(holdout_split(ds, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.n_rows()));
}
BENCHMARK(BM_HoldoutSplit)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto ds = bench_data(200);
  const auto kind = static_cast<ModelKind>(state.range(0));
  auto spec = ModelSpec::defaults(kind, 3);
  if (kind == ModelKind::RandomForest) std::get<RandomForestParams>(spec.params).n_trees = 50;
  if (kind == ModelKind::GradientBoost) std::get<BoostParams>(spec.params).n_rounds = 20;
  const auto model = train(spec, ds);
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_scores(model, ds.row(r)));
    r = (r + 1) % ds.n_rows();
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Predict)->DenseRange(0, 4);

}  // namespace

BENCHMARK_MAIN();
