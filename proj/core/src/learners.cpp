#include "mhfit/learners.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mhfit/error.hpp"

namespace mhfit {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree: return "decision_tree";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::NaiveBayes: return "naive_bayes";
    case ModelKind::LogisticRegression: return "logistic_regression";
    case ModelKind::GradientBoost: return "gradient_boost";
  }
  return "unknown";
}

std::string_view display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree: return "Decision Tree";
    case ModelKind::RandomForest: return "Random Forest";
    case ModelKind::NaiveBayes: return "Naive Bayes";
    case ModelKind::LogisticRegression: return "Logistic Regression";
    case ModelKind::GradientBoost: return "XGBoost";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : kAllModelKinds) {
    if (text == to_string(k)) return k;
  }
  if (text == "dt" || text == "tree") return ModelKind::DecisionTree;
  if (text == "rf" || text == "forest") return ModelKind::RandomForest;
  if (text == "nb") return ModelKind::NaiveBayes;
  if (text == "lr" || text == "logistic") return ModelKind::LogisticRegression;
  if (text == "gb" || text == "xgboost" || text == "boost") return ModelKind::GradientBoost;
  throw Error(ErrorKind::InvalidSpec, "unknown model kind '" + std::string(text) + "'");
}

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
  ModelSpec spec;
  spec.seed = seed;
  switch (kind) {
    case ModelKind::DecisionTree: spec.params = DecisionTreeParams{}; break;
    case ModelKind::RandomForest: spec.params = RandomForestParams{}; break;
    case ModelKind::NaiveBayes: spec.params = NaiveBayesParams{}; break;
    case ModelKind::LogisticRegression:
      spec.params = LogisticParams{};
      spec.standardize = true;
      break;
    case ModelKind::GradientBoost: spec.params = BoostParams{}; break;
  }
  return spec;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, std::string("model spec: ") + what);
}

}  // namespace

void ModelSpec::validate() const {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DecisionTreeParams>) {
          require(p.max_depth >= 1, "max_depth must be >= 1");
          require(p.min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
        } else if constexpr (std::is_same_v<P, RandomForestParams>) {
          require(p.n_trees >= 1, "n_trees must be >= 1");
          require(p.max_depth >= 1, "max_depth must be >= 1");
          require(p.min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
        } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
          require(std::isfinite(p.var_smoothing) && p.var_smoothing >= 0.0,
                  "var_smoothing must be finite and >= 0");
        } else if constexpr (std::is_same_v<P, LogisticParams>) {
          require(std::isfinite(p.learning_rate) && p.learning_rate > 0.0,
                  "learning_rate must be > 0");
          require(std::isfinite(p.l2) && p.l2 >= 0.0, "l2 must be >= 0");
          require(std::isfinite(p.grad_tolerance) && p.grad_tolerance >= 0.0,
                  "grad_tolerance must be >= 0");
        } else {
          // Zero rounds / zero learning rate / depth 0 are admitted: they are
          // the degenerate constant models used as reference points.
          require(std::isfinite(p.learning_rate) && p.learning_rate >= 0.0,
                  "learning_rate must be >= 0");
          require(std::isfinite(p.lambda) && p.lambda > 0.0, "lambda must be > 0");
          require(std::isfinite(p.gamma) && p.gamma >= 0.0, "gamma must be >= 0");
          require(std::isfinite(p.min_child_hessian) && p.min_child_hessian >= 0.0,
                  "min_child_hessian must be >= 0");
        }
      },
      params);
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

void softmax_inplace(std::span<double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& v : logits) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : logits) v /= sum;
}

EncodedLabels encode_labels(std::span<const ActivityLabel> labels) {
  std::array<std::int32_t, kActivityCodeCount> slot;
  slot.fill(-1);
  for (auto l : labels) slot[l.code()] = 0;
  EncodedLabels out;
  for (int c = 0; c < kActivityCodeCount; ++c) {
    if (slot[static_cast<std::size_t>(c)] == 0) {
      slot[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(out.codes.size());
      out.codes.emplace_back(c);
    }
  }
  out.index.reserve(labels.size());
  for (auto l : labels) out.index.push_back(slot[l.code()]);
  return out;
}

TrainedModel train(const ModelSpec& spec, const LabeledDataset& data) {
  spec.validate();
  if (data.empty()) throw Error(ErrorKind::EmptyInput, "train: empty training set");
  for (double v : data.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "train: non-finite feature value");
  }

  TrainedModel model;
  model.spec = spec;
  model.n_features = data.n_channels();
  auto encoded = encode_labels(data.labels());
  model.class_codes = encoded.codes;
  const std::size_t k = encoded.codes.size();

  const auto kind = spec.kind();
  if (k < 2 && (kind == ModelKind::LogisticRegression || kind == ModelKind::GradientBoost)) {
    throw Error(ErrorKind::Precondition,
                std::string(to_string(kind)) + " needs at least 2 classes");
  }

  LabeledDataset scaled;
  const LabeledDataset* input = &data;
  if (spec.standardize) {
    model.standardization = fit_standardization(data);
    scaled = model.standardization.apply(data);
    input = &scaled;
  }
  const MatrixView x(*input);
  const auto& y = encoded.index;

  switch (kind) {
    case ModelKind::DecisionTree: {
      const auto& p = std::get<DecisionTreeParams>(spec.params);
      TreeParams tp;
      tp.max_depth = p.max_depth;
      tp.min_samples_leaf = static_cast<double>(p.min_samples_leaf);
      tp.seed = spec.seed;
      const SortedColumns sorted(x);
      model.state = SingleTreeState{fit_classification_tree(x, sorted, y, k, {}, tp)};
      break;
    }
    case ModelKind::RandomForest:
      model.state = train_random_forest(x, y, k, std::get<RandomForestParams>(spec.params),
                                        spec.seed);
      break;
    case ModelKind::NaiveBayes:
      model.state = train_naive_bayes(x, y, k, std::get<NaiveBayesParams>(spec.params));
      break;
    case ModelKind::LogisticRegression:
      model.state = train_logistic(x, y, k, std::get<LogisticParams>(spec.params));
      break;
    case ModelKind::GradientBoost:
      model.state = train_gradient_boost(x, y, k, std::get<BoostParams>(spec.params));
      break;
  }
  return model;
}

namespace {

std::vector<double> raw_scores(const TrainedModel& model, std::span<const double> x) {
  const std::size_t k = model.n_classes();
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SingleTreeState>) {
          const auto leaf = s.tree.leaf_value(x);
          return {leaf.begin(), leaf.end()};
        } else if constexpr (std::is_same_v<S, ForestState>) {
          std::vector<double> acc(k, 0.0);
          for (const auto& t : s.trees) {
            const auto leaf = t.leaf_value(x);
            for (std::size_t c = 0; c < k; ++c) acc[c] += leaf[c];
          }
          for (auto& v : acc) v /= static_cast<double>(s.trees.size());
          return acc;
        } else if constexpr (std::is_same_v<S, GaussianState>) {
          auto logits = naive_bayes_log_joint(s, x);
          softmax_inplace(logits);
          return logits;
        } else if constexpr (std::is_same_v<S, LinearState>) {
          std::vector<double> logits(k);
          linear_logits(s, k, x, logits);
          softmax_inplace(logits);
          return logits;
        } else {
          auto logits = boost_logits(s, x);
          if (k == 2) {
            const double p = 1.0 / (1.0 + std::exp(-logits[0]));
            return {1.0 - p, p};
          }
          softmax_inplace(logits);
          return logits;
        }
      },
      model.state);
}

}  // namespace

std::vector<double> predict_scores(const TrainedModel& model,
                                   std::span<const double> features) {
  if (features.size() != model.n_features) {
    throw Error(ErrorKind::Dimension,
                "predict: expected " + std::to_string(model.n_features) +
                    " features, got " + std::to_string(features.size()));
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "predict: non-finite feature");
  }
  if (model.standardization.empty()) return raw_scores(model, features);
  std::vector<double> scaled(features.begin(), features.end());
  model.standardization.apply_inplace(scaled);
  return raw_scores(model, scaled);
}

ActivityLabel predict(const TrainedModel& model, std::span<const double> features) {
  const auto scores = predict_scores(model, features);
  return model.class_codes[argmax(scores)];
}

std::vector<ActivityLabel> predict_all(const TrainedModel& model,
                                       const LabeledDataset& ds) {
  if (ds.n_channels() != model.n_features) {
    throw Error(ErrorKind::Dimension,
                "predict: model expects " + std::to_string(model.n_features) +
                    " features, dataset has " + std::to_string(ds.n_channels()));
  }
  std::vector<ActivityLabel> out;
  out.reserve(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) out.push_back(predict(model, ds.row(r)));
  return out;
}

}  // namespace mhfit
