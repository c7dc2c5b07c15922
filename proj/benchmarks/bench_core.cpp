#include <benchmark/benchmark.h>

#include "fairens/decision_tree.hpp"
#include "fairens/di_remover.hpp"
#include "fairens/estimator.hpp"
#include "fairens/metrics.hpp"
#include "fairens/splits.hpp"
#include "fairens/synthetic.hpp"

namespace {

const fairens::SyntheticDataset& corpus() {
  static const fairens::SyntheticDataset d = [] {
    fairens::SyntheticSpec spec;
    spec.rows = 2000;
    spec.features = 6;
    spec.seed = 11;
    return fairens::make_planted_bias(spec);
  }();
  return d;
}

void bm_tree_fit(benchmark::State& state) {
  const auto& c = corpus();
  fairens::Matrix X = c.data.feature_matrix();
  std::vector<int> y = c.data.binary_labels();
  std::vector<double> w = fairens::uniform_weights(y.size());
  for (auto _ : state) {
    fairens::DecisionTree tree;
    tree.fit(X, y, w);
    benchmark::DoNotOptimize(tree.trained());
  }
}
BENCHMARK(bm_tree_fit)->Unit(benchmark::kMillisecond);

void bm_metric_report(benchmark::State& state) {
  const auto& c = corpus();
  std::vector<int> y = c.data.binary_labels();
  std::vector<int> pred = y;
  for (std::size_t i = 0; i < pred.size(); i += 7) pred[i] = 1 - pred[i];
  fairens::GroupEncoding enc = fairens::bind_groups(c.data, c.fairness_info);
  for (auto _ : state) {
    auto report = fairens::metric_report(y, pred, enc, c.data.weights);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(bm_metric_report);

void bm_di_remover_transform(benchmark::State& state) {
  const auto& c = corpus();
  fairens::DisparateImpactRemover repairer(c.fairness_info, 1.0);
  repairer.fit(c.data, 1);
  for (auto _ : state) {
    fairens::Dataset repaired = repairer.transform(c.data);
    benchmark::DoNotOptimize(repaired.n_rows());
  }
}
BENCHMARK(bm_di_remover_transform)->Unit(benchmark::kMillisecond);

void bm_stratified_kfold(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) {
    auto folds = fairens::stratified_kfold(c.data, c.fairness_info, 3, 42);
    benchmark::DoNotOptimize(folds.folds.size());
  }
}
BENCHMARK(bm_stratified_kfold);

}  // namespace

BENCHMARK_MAIN();
