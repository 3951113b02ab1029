#include <cmath>

#include "mhfit/learners.hpp"
#include "mhfit/parallel.hpp"
#include "mhfit/rng.hpp"

namespace mhfit {

ForestState train_random_forest(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const RandomForestParams& params,
                                std::uint64_t seed) {
  const SortedColumns sorted(x);
  const std::size_t n = x.rows;

  ForestState forest;
  forest.trees.resize(params.n_trees);
  forest.tree_seeds.resize(params.n_trees);
  // Seeds depend only on (seed, tree index): growing the forest never
  // reshuffles the trees already in it.
  for (std::size_t t = 0; t < params.n_trees; ++t) forest.tree_seeds[t] = derive_seed(seed, t);

  TreeParams base;
  base.max_depth = params.max_depth;
  base.min_samples_leaf = static_cast<double>(params.min_samples_leaf);
  if (params.feature_subsampling) {
    base.max_features =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));
  }

  parallel_for(params.n_trees, [&](std::size_t t) {
    TreeParams tp = base;
    tp.seed = derive_seed(forest.tree_seeds[t], 1);
    std::vector<double> weights;
    if (params.bootstrap) {
      Rng rng(forest.tree_seeds[t]);
      weights.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) weights[rng.uniform_index(n)] += 1.0;
    }
    forest.trees[t] = fit_classification_tree(x, sorted, y, n_classes, weights, tp);
  });
  return forest;
}

}  // namespace mhfit
