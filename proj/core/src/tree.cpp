#include "mhfit/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "mhfit/error.hpp"
#include "mhfit/rng.hpp"

namespace mhfit {

std::span<const double> Tree::leaf_value(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(
        x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return value(nodes[i]);
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  // Children always follow their parent in the array.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

SortedColumns::SortedColumns(MatrixView x) : order_(x.cols), values_(x.cols) {
  for (std::size_t f = 0; f < x.cols; ++f) {
    auto& order = order_[f];
    order.resize(x.rows);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x.at(a, f) < x.at(b, f);
    });
    values_[f].reserve(x.rows);
    for (std::uint32_t r : order) values_[f].push_back(x.at(r, f));
  }
}

double gini(std::span<const double> class_weights) {
  double total = 0.0;
  double sumsq = 0.0;
  for (double w : class_weights) {
    total += w;
    sumsq += w * w;
  }
  if (total <= 0.0) return 0.0;
  return 1.0 - sumsq / (total * total);
}

double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) +
                g_right * g_right / (h_right + lambda) - g * g / (h + lambda)) -
         gamma;
}

namespace {

// -- split statistics policies -----------------------------------------------

class GiniPolicy {
 public:
  struct Stats {
    std::vector<double> counts;
    double weight = 0.0;
    double sumsq = 0.0;
  };

  GiniPolicy(std::span<const std::int32_t> classes, std::size_t n_classes,
             std::span<const double> weights, const TreeParams& params)
      : classes_(classes), k_(n_classes), weights_(weights), params_(params) {}

  double weight_of(std::uint32_t r) const {
    return weights_.empty() ? 1.0 : weights_[r];
  }

  Stats make_stats(std::span<const std::int32_t> node_of) const {
    Stats s{std::vector<double>(k_, 0.0), 0.0, 0.0};
    for (std::size_t r = 0; r < node_of.size(); ++r) {
      if (node_of[r] < 0) continue;
      const double w = weight_of(static_cast<std::uint32_t>(r));
      s.counts[static_cast<std::size_t>(classes_[r])] += w;
      s.weight += w;
    }
    s.sumsq = sum_squares(s.counts);
    return s;
  }

  bool can_split(const Stats& s) const {
    if (s.weight < 2.0 * params_.min_samples_leaf) return false;
    std::size_t nonzero = 0;
    for (double c : s.counts) nonzero += c > 0.0;
    return nonzero > 1;
  }

  void begin_scan(std::span<const Stats* const> totals) {
    totals_ = totals;
    const std::size_t n = totals.size();
    left_counts_.assign(n * k_, 0.0);
    left_weight_.assign(n, 0.0);
    left_sumsq_.assign(n, 0.0);
    right_sumsq_.resize(n);
    for (std::size_t i = 0; i < n; ++i) right_sumsq_[i] = totals[i]->sumsq;
  }

  void add(std::size_t node, std::uint32_t r) {
    const double w = weight_of(r);
    const auto c = static_cast<std::size_t>(classes_[r]);
    double& left = left_counts_[node * k_ + c];
    const double right = totals_[node]->counts[c] - left;
    left_sumsq_[node] += w * (2.0 * left + w);
    right_sumsq_[node] -= w * (2.0 * right - w);
    left += w;
    left_weight_[node] += w;
  }

  bool evaluate(std::size_t node, double& gain) const {
    const Stats& t = *totals_[node];
    const double wl = left_weight_[node];
    const double wr = t.weight - wl;
    if (wl < params_.min_samples_leaf || wr < params_.min_samples_leaf) return false;
    const double parent = 1.0 - t.sumsq / (t.weight * t.weight);
    const double children =
        ((wl - left_sumsq_[node] / wl) + (wr - right_sumsq_[node] / wr)) / t.weight;
    gain = parent - children;
    return true;
  }

  Stats left_stats(std::size_t node) const {
    Stats s;
    s.counts.assign(left_counts_.begin() + static_cast<std::ptrdiff_t>(node * k_),
                    left_counts_.begin() + static_cast<std::ptrdiff_t>((node + 1) * k_));
    s.weight = left_weight_[node];
    s.sumsq = sum_squares(s.counts);
    return s;
  }

  Stats right_stats(const Stats& total, const Stats& left) const {
    Stats s;
    s.counts.resize(k_);
    for (std::size_t c = 0; c < k_; ++c) s.counts[c] = total.counts[c] - left.counts[c];
    s.weight = total.weight - left.weight;
    s.sumsq = sum_squares(s.counts);
    return s;
  }

  // Gini reduction is never negative, so any admissible split of an impure
  // node is taken (zero-gain splits such as the XOR root included).
  bool accept(double) const { return true; }

  std::size_t value_size() const { return k_; }

  void leaf(const Stats& s, std::vector<double>& pool) const {
    for (std::size_t c = 0; c < k_; ++c) {
      pool.push_back(s.weight > 0.0 ? s.counts[c] / s.weight : 0.0);
    }
  }

 private:
  static double sum_squares(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  }

  std::span<const std::int32_t> classes_;
  std::size_t k_;
  std::span<const double> weights_;
  const TreeParams& params_;
  std::span<const Stats* const> totals_;
  std::vector<double> left_counts_;
  std::vector<double> left_weight_;
  std::vector<double> left_sumsq_;
  std::vector<double> right_sumsq_;
};

class NewtonPolicy {
 public:
  struct Stats {
    double g = 0.0;
    double h = 0.0;
    double n = 0.0;
  };

  NewtonPolicy(std::span<const double> grad, std::span<const double> hess,
               const TreeParams& params)
      : gh_(grad.size()), params_(params) {
    for (std::size_t r = 0; r < grad.size(); ++r) gh_[r] = {grad[r], hess[r]};
  }

  Stats make_stats(std::span<const std::int32_t> node_of) const {
    Stats s;
    for (std::size_t r = 0; r < node_of.size(); ++r) {
      if (node_of[r] < 0) continue;
      s.g += gh_[r][0];
      s.h += gh_[r][1];
      s.n += 1.0;
    }
    return s;
  }

  bool can_split(const Stats& s) const {
    return s.n >= 2.0 * params_.min_samples_leaf &&
           s.h >= 2.0 * params_.min_child_hessian;
  }

  void begin_scan(std::span<const Stats* const> totals) {
    totals_ = totals;
    left_.assign(totals.size(), Stats{});
    parent_.resize(totals.size());
    for (std::size_t i = 0; i < totals.size(); ++i) {
      parent_[i] = totals[i]->g * totals[i]->g / (totals[i]->h + params_.lambda);
    }
  }

  void add(std::size_t node, std::uint32_t r) {
    left_[node].g += gh_[r][0];
    left_[node].h += gh_[r][1];
    left_[node].n += 1.0;
  }

  bool evaluate(std::size_t node, double& gain) const {
    const Stats& t = *totals_[node];
    const Stats& l = left_[node];
    const double nr = t.n - l.n;
    const double hr = t.h - l.h;
    if (l.n < params_.min_samples_leaf || nr < params_.min_samples_leaf) return false;
    if (l.h < params_.min_child_hessian || hr < params_.min_child_hessian) return false;
    const double gr = t.g - l.g;
    gain = 0.5 * (l.g * l.g / (l.h + params_.lambda) + gr * gr / (hr + params_.lambda) -
                  parent_[node]) -
           params_.gamma;
    return true;
  }

  Stats left_stats(std::size_t node) const { return left_[node]; }

  Stats right_stats(const Stats& total, const Stats& left) const {
    return {total.g - left.g, total.h - left.h, total.n - left.n};
  }

  bool accept(double gain) const { return gain > 0.0; }

  std::size_t value_size() const { return 1; }

  void leaf(const Stats& s, std::vector<double>& pool) const {
    pool.push_back(newton_leaf_weight(s.g, s.h, params_.lambda));
  }

 private:
  std::vector<std::array<double, 2>> gh_;
  const TreeParams& params_;
  std::span<const Stats* const> totals_;
  std::vector<Stats> left_;
  std::vector<double> parent_;
};

// -- level-wise exact greedy builder -----------------------------------------

template <typename Policy>
Tree build_tree(MatrixView x, const SortedColumns& sorted, Policy& policy,
                std::vector<std::int32_t> node_of, const TreeParams& params) {
  using Stats = typename Policy::Stats;
  struct Open {
    std::int32_t tree_node;
    std::size_t depth;
    Stats total;
  };
  struct Best {
    double gain = -std::numeric_limits<double>::infinity();
    std::int32_t feature = -1;
    double threshold = 0.0;
    Stats left;
  };

  const std::size_t d = x.cols;
  const std::size_t draw =
      (params.max_features == 0 || params.max_features >= d) ? d : params.max_features;
  Rng rng(params.seed);

  Tree tree;
  tree.value_size = static_cast<std::uint32_t>(policy.value_size());
  tree.nodes.emplace_back();
  std::vector<Open> open;
  open.push_back({0, 0, policy.make_stats(node_of)});

  std::vector<std::size_t> feature_pool(d);
  while (!open.empty()) {
    const std::size_t n_open = open.size();
    std::vector<char> active(n_open * d, 0);
    std::vector<char> feature_used(d, 0);
    std::vector<char> splittable(n_open, 0);
    for (std::size_t k = 0; k < n_open; ++k) {
      if (open[k].depth >= params.max_depth || !policy.can_split(open[k].total)) continue;
      splittable[k] = 1;
      std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
      if (draw < d) {
        for (std::size_t i = 0; i < draw; ++i) {
          const auto j = i + rng.uniform_index(d - i);
          std::swap(feature_pool[i], feature_pool[j]);
        }
      }
      for (std::size_t i = 0; i < draw; ++i) {
        active[k * d + feature_pool[i]] = 1;
        feature_used[feature_pool[i]] = 1;
      }
    }

    std::vector<Best> best(n_open);
    if (std::any_of(splittable.begin(), splittable.end(), [](char c) { return c; })) {
      std::vector<const Stats*> totals(n_open);
      for (std::size_t k = 0; k < n_open; ++k) totals[k] = &open[k].total;
      std::vector<double> last(n_open);
      std::vector<char> seen(n_open);

      for (std::size_t f = 0; f < d; ++f) {
        if (!feature_used[f]) continue;
        policy.begin_scan(totals);
        std::fill(seen.begin(), seen.end(), 0);
        const auto order = sorted.column(f);
        const auto values = sorted.values(f);
        for (std::size_t i = 0; i < order.size(); ++i) {
          const std::uint32_t r = order[i];
          const std::int32_t node = node_of[r];
          if (node < 0) continue;
          const auto k = static_cast<std::size_t>(node);
          if (!active[k * d + f]) continue;
          const double v = values[i];
          if (seen[k] && v > last[k]) {
            double gain;
            if (policy.evaluate(k, gain) && gain > best[k].gain) {
              double mid = last[k] + (v - last[k]) * 0.5;
              if (!(mid < v)) mid = last[k];
              best[k].gain = gain;
              best[k].feature = static_cast<std::int32_t>(f);
              best[k].threshold = mid;
              best[k].left = policy.left_stats(k);
            }
          }
          policy.add(k, r);
          last[k] = v;
          seen[k] = 1;
        }
      }
    }

    // Grow children; remember each open node's routing for the row pass.
    std::vector<Open> next;
    std::vector<std::int32_t> left_slot(n_open, -1);
    for (std::size_t k = 0; k < n_open; ++k) {
      auto& node = tree.nodes[static_cast<std::size_t>(open[k].tree_node)];
      if (splittable[k] && best[k].feature >= 0 && policy.accept(best[k].gain)) {
        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        node.feature = best[k].feature;
        node.threshold = best[k].threshold;
        node.gain = best[k].gain;
        node.left = left_id;
        node.right = left_id + 1;
        Stats right = policy.right_stats(open[k].total, best[k].left);
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        left_slot[k] = static_cast<std::int32_t>(next.size());
        next.push_back({left_id, open[k].depth + 1, std::move(best[k].left)});
        next.push_back({left_id + 1, open[k].depth + 1, std::move(right)});
      } else {
        node.value_offset = static_cast<std::uint32_t>(tree.values.size());
        policy.leaf(open[k].total, tree.values);
      }
    }
    if (next.empty()) break;

    for (std::size_t r = 0; r < node_of.size(); ++r) {
      const std::int32_t node = node_of[r];
      if (node < 0) continue;
      const auto k = static_cast<std::size_t>(node);
      if (left_slot[k] < 0) {
        node_of[r] = -1;
        continue;
      }
      const auto& split = tree.nodes[static_cast<std::size_t>(open[k].tree_node)];
      const bool go_left = x.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold;
      node_of[r] = left_slot[k] + (go_left ? 0 : 1);
    }
    open = std::move(next);
  }
  return tree;
}

void check_shapes(MatrixView x, const SortedColumns& sorted, std::size_t n) {
  if (n != x.rows) throw Error(ErrorKind::LengthMismatch, "fit_tree: target length != rows");
  if (sorted.cols() != x.cols) {
    throw Error(ErrorKind::Dimension, "fit_tree: presorted columns do not match matrix");
  }
  if (x.rows == 0) throw Error(ErrorKind::EmptyInput, "fit_tree: no rows");
}

}  // namespace

Tree fit_classification_tree(MatrixView x, const SortedColumns& sorted,
                             std::span<const std::int32_t> classes,
                             std::size_t n_classes,
                             std::span<const double> weights,
                             const TreeParams& params) {
  check_shapes(x, sorted, classes.size());
  if (!weights.empty() && weights.size() != x.rows) {
    throw Error(ErrorKind::LengthMismatch, "fit_tree: weight length != rows");
  }
  std::vector<std::int32_t> node_of(x.rows, 0);
  if (!weights.empty()) {
    for (std::size_t r = 0; r < x.rows; ++r) {
      if (weights[r] <= 0.0) node_of[r] = -1;
    }
  }
  GiniPolicy policy(classes, n_classes, weights, params);
  return build_tree(x, sorted, policy, std::move(node_of), params);
}

Tree fit_gradient_tree(MatrixView x, const SortedColumns& sorted,
                       std::span<const double> gradients,
                       std::span<const double> hessians,
                       const TreeParams& params) {
  check_shapes(x, sorted, gradients.size());
  if (hessians.size() != gradients.size()) {
    throw Error(ErrorKind::LengthMismatch, "fit_tree: hessian length != gradient length");
  }
  NewtonPolicy policy(gradients, hessians, params);
  return build_tree(x, sorted, policy, std::vector<std::int32_t>(x.rows, 0), params);
}

}  // namespace mhfit
