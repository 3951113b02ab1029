#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mhfit/matrix.hpp"

namespace mhfit {

/// Internal nodes send x to `left` iff x[feature] <= threshold. Leaves point
/// into the owning tree's value pool.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double gain = 0.0;  // impurity reduction / boosting gain of the split
  std::uint32_t value_offset = 0;

  bool is_leaf() const noexcept { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat node array (node 0 is the root, children after their parent) plus a
/// pool of leaf values, `value_size` per leaf: a class distribution for
/// classification trees, the single Newton weight for gradient trees.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<double> values;
  std::uint32_t value_size = 0;

  std::span<const double> value(const TreeNode& leaf) const noexcept {
    return {values.data() + leaf.value_offset, value_size};
  }
  std::span<const double> leaf_value(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

/// Row order of every column sorted by value (ties by row index). Built once
/// per training matrix and shared by all trees fitted on it.
class SortedColumns {
 public:
  SortedColumns() = default;
  explicit SortedColumns(MatrixView x);

  std::span<const std::uint32_t> column(std::size_t f) const noexcept {
    return order_[f];
  }
  /// Column f's values in sorted order, aligned with column(f).
  std::span<const double> values(std::size_t f) const noexcept { return values_[f]; }
  std::size_t cols() const noexcept { return order_.size(); }

 private:
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::vector<double>> values_;
};

struct TreeParams {
  std::size_t max_depth = 12;
  double min_samples_leaf = 1.0;   // weighted row count per child
  double min_child_hessian = 0.0;  // gradient mode only
  double lambda = 1.0;             // gradient mode only
  double gamma = 0.0;              // gradient mode only
  std::size_t max_features = 0;    // features drawn per node; 0 = all
  std::uint64_t seed = 0;          // drives feature draws
};

/// Gini impurity 1 - sum_c p_c^2 of a weighted class-count vector.
double gini(std::span<const double> class_weights);

/// CART classification tree minimizing weighted child Gini impurity.
/// `classes[i]` in [0, n_classes); `weights` empty means unit weights, zero
/// weight excludes a row. Leaves hold the weighted class distribution.
Tree fit_classification_tree(MatrixView x, const SortedColumns& sorted,
                             std::span<const std::int32_t> classes,
                             std::size_t n_classes,
                             std::span<const double> weights,
                             const TreeParams& params);

/// Second-order regression tree on gradient/Hessian pairs. Leaves hold the
/// single weight -G/(H + lambda); splits need positive gain.
Tree fit_gradient_tree(MatrixView x, const SortedColumns& sorted,
                       std::span<const double> gradients,
                       std::span<const double> hessians,
                       const TreeParams& params);

/// Leaf weight of a gradient node.
inline double newton_leaf_weight(double g_sum, double h_sum, double lambda) {
  return -g_sum / (h_sum + lambda);
}

/// Gain of splitting a gradient node into (G_L, H_L) and (G_R, H_R).
double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma);

}  // namespace mhfit
