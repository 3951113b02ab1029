#include <cmath>
#include <numbers>

#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"

namespace mhfit {

GaussianState train_naive_bayes(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const NaiveBayesParams& params) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (n == 0) throw Error(ErrorKind::EmptyInput, "naive bayes: no rows");

  std::vector<double> count(n_classes, 0.0);
  std::vector<double> mean(n_classes * d, 0.0);
  std::vector<double> var(n_classes * d, 0.0);
  std::vector<double> global_mean(d, 0.0);
  std::vector<double> global_var(d, 0.0);

  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      mean[c * d + j] += x.at(r, j);
      global_mean[j] += x.at(r, j);
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) mean[c * d + j] /= count[c];
  }
  for (auto& m : global_mean) m /= static_cast<double>(n);

  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t j = 0; j < d; ++j) {
      const double dc = x.at(r, j) - mean[c * d + j];
      const double dg = x.at(r, j) - global_mean[j];
      var[c * d + j] += dc * dc;
      global_var[j] += dg * dg;
    }
  }

  GaussianState state;
  state.log_prior.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    state.log_prior[c] = std::log(count[c] / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
      const double floor =
          params.var_smoothing * (global_var[j] / static_cast<double>(n) + 1e-12);
      var[c * d + j] = std::max(var[c * d + j] / count[c], floor);
    }
  }
  state.mean = std::move(mean);
  state.variance = std::move(var);
  return state;
}

std::vector<double> naive_bayes_log_joint(const GaussianState& state,
                                          std::span<const double> x) {
  const std::size_t k = state.log_prior.size();
  const std::size_t d = x.size();
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    double acc = state.log_prior[c];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = state.variance[c * d + j];
      const double dx = x[j] - state.mean[c * d + j];
      acc -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + dx * dx / v);
    }
    out[c] = acc;
  }
  return out;
}

}  // namespace mhfit
