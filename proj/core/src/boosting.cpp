#include <cmath>

#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"
#include "mhfit/parallel.hpp"

namespace mhfit {

double mean_log_loss(std::span<const double> probs, std::span<const std::int32_t> y,
                     std::size_t n_classes) {
  double loss = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double p = probs[r * n_classes + static_cast<std::size_t>(y[r])];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(y.size());
}

std::vector<double> boost_logits(const BoostState& state, std::span<const double> x) {
  std::vector<double> logits = state.base_logits;
  for (const auto& round : state.rounds) {
    for (std::size_t c = 0; c < round.size(); ++c) {
      logits[c] += state.learning_rate * round[c].leaf_value(x)[0];
    }
  }
  return logits;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Row-major n x K class probabilities of the current additive logits
// (n x 1 when binary).
void probabilities(std::span<const double> logits, std::size_t n, std::size_t n_out,
                   std::size_t n_classes, std::vector<double>& probs) {
  probs.resize(n * n_classes);
  for (std::size_t r = 0; r < n; ++r) {
    if (n_out == 1) {
      const double p = sigmoid(logits[r]);
      probs[r * 2] = 1.0 - p;
      probs[r * 2 + 1] = p;
    } else {
      std::copy_n(logits.begin() + static_cast<std::ptrdiff_t>(r * n_classes), n_classes,
                  probs.begin() + static_cast<std::ptrdiff_t>(r * n_classes));
      softmax_inplace(std::span<double>(probs.data() + r * n_classes, n_classes));
    }
  }
}

}  // namespace

BoostState train_gradient_boost(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const BoostParams& params) {
  if (n_classes < 2) {
    throw Error(ErrorKind::Precondition, "gradient boosting needs at least 2 classes");
  }
  const std::size_t n = x.rows;
  if (n == 0) throw Error(ErrorKind::EmptyInput, "gradient boosting: no rows");
  const std::size_t n_out = n_classes == 2 ? 1 : n_classes;

  BoostState state;
  state.base_logits.assign(n_out, 0.0);
  state.learning_rate = params.learning_rate;

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_leaf = 1.0;
  tp.min_child_hessian = params.min_child_hessian;
  tp.lambda = params.lambda;
  tp.gamma = params.gamma;

  const SortedColumns sorted(x);
  std::vector<double> logits(n * n_out, 0.0);
  std::vector<double> probs;
  probabilities(logits, n, n_out, n_classes, probs);
  state.train_loss.push_back(mean_log_loss(probs, y, n_classes));

  std::vector<std::vector<double>> grad(n_out, std::vector<double>(n));
  std::vector<std::vector<double>> hess(n_out, std::vector<double>(n));
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto yr = static_cast<std::size_t>(y[r]);
      for (std::size_t c = 0; c < n_out; ++c) {
        // Binary: the single output models the second class.
        const std::size_t cls = n_out == 1 ? 1 : c;
        const double p = probs[r * n_classes + cls];
        grad[c][r] = p - (yr == cls ? 1.0 : 0.0);
        hess[c][r] = p * (1.0 - p);
      }
    }

    std::vector<Tree> trees(n_out);
    parallel_for(n_out, [&](std::size_t c) {
      trees[c] = fit_gradient_tree(x, sorted, grad[c], hess[c], tp);
    });

    for (std::size_t r = 0; r < n; ++r) {
      const auto xr = x.row(r);
      for (std::size_t c = 0; c < n_out; ++c) {
        logits[r * n_out + c] += params.learning_rate * trees[c].leaf_value(xr)[0];
      }
    }
    state.rounds.push_back(std::move(trees));
    probabilities(logits, n, n_out, n_classes, probs);
    state.train_loss.push_back(mean_log_loss(probs, y, n_classes));
  }
  return state;
}

}  // namespace mhfit
