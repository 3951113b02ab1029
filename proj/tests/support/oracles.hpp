#pragma once

// Reference computations written independently of the library, used to
// derive expected values in tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace oracle {

inline double gini_of(const std::map<int, double>& counts) {
  double total = 0.0;
  for (const auto& [c, w] : counts) total += w;
  if (total == 0.0) return 0.0;
  double impurity = 1.0;
  for (const auto& [c, w] : counts) impurity -= (w / total) * (w / total);
  return impurity;
}

struct StumpResult {
  double reduction = -1.0;
  int feature = -1;
  double threshold = 0.0;
};

/// Best Gini reduction over every (feature, midpoint) stump, recounting both
/// sides from scratch for each candidate.
inline StumpResult best_gini_stump(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& y) {
  StumpResult best;
  if (rows.empty()) return best;
  const double n = static_cast<double>(rows.size());
  std::map<int, double> all;
  for (int c : y) all[c] += 1.0;
  const double parent = gini_of(all);
  for (std::size_t f = 0; f < rows[0].size(); ++f) {
    std::set<double> distinct;
    for (const auto& r : rows) distinct.insert(r[f]);
    std::vector<double> v(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = (v[i] + v[i + 1]) / 2.0;
      std::map<int, double> left, right;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        (rows[r][f] <= t ? left : right)[y[r]] += 1.0;
      }
      double nl = 0.0, nr = 0.0;
      for (const auto& [c, w] : left) nl += w;
      for (const auto& [c, w] : right) nr += w;
      const double reduction = parent - (nl / n) * gini_of(left) - (nr / n) * gini_of(right);
      if (reduction > best.reduction) best = {reduction, static_cast<int>(f), t};
    }
  }
  return best;
}

struct ClassCounts {
  double tp, fn, fp, tn;
};

inline ClassCounts class_counts(const std::vector<std::vector<std::uint64_t>>& cm, std::size_t c) {
  double total = 0.0, row = 0.0, col = 0.0;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    for (std::size_t j = 0; j < cm.size(); ++j) total += static_cast<double>(cm[i][j]);
    row += static_cast<double>(cm[c][i]);
    col += static_cast<double>(cm[i][c]);
  }
  const double tp = static_cast<double>(cm[c][c]);
  return {tp, row - tp, col - tp, total - row - col + tp};
}

inline double safe_ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

/// Central finite-difference gradient of f at w.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> w, double h = 1e-6) {
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double keep = w[i];
    w[i] = keep + h;
    const double up = f(w);
    w[i] = keep - h;
    const double down = f(w);
    w[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Softmax cross-entropy + (l2/2)||W without bias||^2 evaluated directly.
inline double logistic_objective(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                 std::size_t k, const std::vector<double>& w, double l2) {
  const std::size_t d = x[0].size();
  double loss = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
      z[c] = w[c * (d + 1) + d];
      for (std::size_t j = 0; j < d; ++j) z[c] += w[c * (d + 1) + j] * x[r][j];
    }
    double denom = 0.0;
    for (double v : z) denom += std::exp(v);
    loss += std::log(denom) - z[static_cast<std::size_t>(y[r])];
  }
  loss /= static_cast<double>(x.size());
  double reg = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) reg += w[c * (d + 1) + j] * w[c * (d + 1) + j];
  }
  return loss + 0.5 * l2 * reg;
}

/// Monte Carlo accuracy of the Bayes-optimal rule for equal-prior isotropic
/// Gaussian classes with the given centers: nearest center wins.
inline double bayes_accuracy(const std::vector<std::vector<double>>& centers, double noise,
                             std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, noise);
  std::size_t correct = 0;
  const std::size_t k = centers.size();
  const std::size_t d = centers[0].size();
  std::vector<double> point(d);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t c = i % k;
    for (std::size_t j = 0; j < d; ++j) point[j] = centers[c][j] + normal(gen);
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < k; ++q) {
      double dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) dist += (point[j] - centers[q][j]) * (point[j] - centers[q][j]);
      if (dist < best) {
        best = dist;
        nearest = q;
      }
    }
    correct += nearest == c;
  }
  return static_cast<double>(correct) / static_cast<double>(draws);
}

}  // namespace oracle
