#include <cmath>

#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"

namespace mhfit {

void linear_logits(const LinearState& state, std::size_t n_classes,
                   std::span<const double> x, std::span<double> logits) {
  const std::size_t d = x.size();
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double* w = state.weights.data() + c * (d + 1);
    double z = w[d];
    for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
    logits[c] = z;
  }
}

double logistic_loss(MatrixView x, std::span<const std::int32_t> y,
                     std::size_t n_classes, std::span<const double> weights,
                     double l2, std::span<double> gradient) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const std::size_t stride = d + 1;
  const bool want_grad = !gradient.empty();
  if (weights.size() != n_classes * stride) {
    throw Error(ErrorKind::Dimension, "logistic: weight matrix has wrong size");
  }
  if (want_grad) std::fill(gradient.begin(), gradient.end(), 0.0);

  LinearState view{std::vector<double>(weights.begin(), weights.end())};
  std::vector<double> z(n_classes);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto xr = x.row(r);
    linear_logits(view, n_classes, xr, z);
    const auto yr = static_cast<std::size_t>(y[r]);
    double top = z[0];
    for (double v : z) top = std::max(top, v);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    const double log_norm = top + std::log(sum);
    loss -= z[yr] - log_norm;
    if (!want_grad) continue;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double residual = std::exp(z[c] - log_norm) - (c == yr ? 1.0 : 0.0);
      double* g = gradient.data() + c * stride;
      for (std::size_t j = 0; j < d; ++j) g[j] += residual * xr[j];
      g[d] += residual;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  double penalty = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double w = weights[c * stride + j];
      penalty += w * w;
      if (want_grad) gradient[c * stride + j] = gradient[c * stride + j] * inv_n + l2 * w;
    }
    if (want_grad) gradient[c * stride + d] *= inv_n;
  }
  return loss + 0.5 * l2 * penalty;
}

LinearState train_logistic(MatrixView x, std::span<const std::int32_t> y,
                           std::size_t n_classes, const LogisticParams& params) {
  if (n_classes < 2) {
    throw Error(ErrorKind::Precondition, "logistic regression needs at least 2 classes");
  }
  if (x.rows == 0) throw Error(ErrorKind::EmptyInput, "logistic regression: no rows");
  LinearState state{std::vector<double>(n_classes * (x.cols + 1), 0.0)};
  std::vector<double> grad(state.weights.size());
  for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
    const double loss = logistic_loss(x, y, n_classes, state.weights, params.l2, grad);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::Divergence,
                  "logistic regression diverged at epoch " + std::to_string(epoch) +
                      " (learning rate too high?)");
    }
    if (params.grad_tolerance > 0.0) {
      double norm = 0.0;
      for (double g : grad) norm += g * g;
      if (std::sqrt(norm) < params.grad_tolerance) break;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
      state.weights[i] -= params.learning_rate * grad[i];
    }
  }
  for (double w : state.weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorKind::Divergence,
                  "logistic regression diverged at epoch " + std::to_string(params.epochs));
    }
  }
  return state;
}

}  // namespace mhfit
