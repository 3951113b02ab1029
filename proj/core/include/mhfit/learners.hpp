#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mhfit/dataset.hpp"
#include "mhfit/matrix.hpp"
#include "mhfit/preprocess.hpp"
#include "mhfit/tree.hpp"

namespace mhfit {

enum class ModelKind {
  DecisionTree,
  RandomForest,
  NaiveBayes,
  LogisticRegression,
  GradientBoost,
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::GradientBoost, ModelKind::DecisionTree,
    ModelKind::LogisticRegression, ModelKind::RandomForest,
    ModelKind::NaiveBayes,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
/// Name used in reports ("XGBoost", "Decision Tree", ...).
std::string_view display_name(ModelKind kind);

struct DecisionTreeParams {
  std::size_t max_depth = 12;
  std::size_t min_samples_leaf = 5;
  friend bool operator==(const DecisionTreeParams&, const DecisionTreeParams&) = default;
};

struct RandomForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 14;
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;
  bool feature_subsampling = true;  // ceil(sqrt(d)) features per split
  friend bool operator==(const RandomForestParams&, const RandomForestParams&) = default;
};

struct NaiveBayesParams {
  double var_smoothing = 1e-9;
  friend bool operator==(const NaiveBayesParams&, const NaiveBayesParams&) = default;
};

struct LogisticParams {
  double learning_rate = 0.1;
  std::size_t epochs = 300;
  double l2 = 1e-4;
  double grad_tolerance = 0.0;  // stop early when the gradient norm drops below
  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

struct BoostParams {
  std::size_t n_rounds = 100;
  std::size_t max_depth = 6;
  double learning_rate = 0.3;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_hessian = 1.0;
  friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

using Hyperparameters = std::variant<DecisionTreeParams, RandomForestParams,
                                     NaiveBayesParams, LogisticParams, BoostParams>;

struct ModelSpec {
  Hyperparameters params;
  std::uint64_t seed = 0;
  bool standardize = false;

  ModelKind kind() const noexcept { return static_cast<ModelKind>(params.index()); }

  /// Documented defaults; standardization is on for logistic regression only.
  static ModelSpec defaults(ModelKind kind, std::uint64_t seed = 0);

  /// Throws Error{InvalidSpec} on out-of-range hyperparameters.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// -- fitted state ------------------------------------------------------------

struct SingleTreeState {
  Tree tree;
  friend bool operator==(const SingleTreeState&, const SingleTreeState&) = default;
};

struct ForestState {
  std::vector<Tree> trees;
  std::vector<std::uint64_t> tree_seeds;
  friend bool operator==(const ForestState&, const ForestState&) = default;
};

struct GaussianState {
  std::vector<double> log_prior;  // per class
  std::vector<double> mean;       // class-major, K x d
  std::vector<double> variance;   // class-major, K x d
  friend bool operator==(const GaussianState&, const GaussianState&) = default;
};

struct LinearState {
  std::vector<double> weights;  // K x (d + 1), bias in the last column
  friend bool operator==(const LinearState&, const LinearState&) = default;
};

/// K == 2 is a single logistic model (one tree per round, score of the second
/// class = sigmoid(base + lr * sum)); K > 2 is softmax with K trees per round.
struct BoostState {
  std::vector<std::vector<Tree>> rounds;
  std::vector<double> base_logits;
  double learning_rate = 0.0;
  std::vector<double> train_loss;  // mean log-loss before round 1, after each round
  friend bool operator==(const BoostState&, const BoostState&) = default;
};

using ModelState =
    std::variant<SingleTreeState, ForestState, GaussianState, LinearState, BoostState>;

struct TrainedModel {
  ModelSpec spec;
  std::vector<ActivityLabel> class_codes;  // ascending
  std::size_t n_features = 0;
  StandardizationParams standardization;   // empty unless spec.standardize
  ModelState state;

  std::size_t n_classes() const noexcept { return class_codes.size(); }

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Deterministic in (spec, train). Throws Error{EmptyInput|Precondition|NonFinite}.
TrainedModel train(const ModelSpec& spec, const LabeledDataset& train);

/// Probabilities (or vote / leaf fractions) over model.class_codes.
std::vector<double> predict_scores(const TrainedModel& model,
                                   std::span<const double> features);

/// Argmax of predict_scores; ties go to the lowest class code.
ActivityLabel predict(const TrainedModel& model, std::span<const double> features);

std::vector<ActivityLabel> predict_all(const TrainedModel& model,
                                       const LabeledDataset& ds);

/// Index of the largest value; first index on ties.
std::size_t argmax(std::span<const double> scores);

/// In-place max-subtracted softmax.
void softmax_inplace(std::span<double> logits);

// -- algorithm entry points (exposed for tests and oracles) -------------------

/// Class index per row in [0, K) and the ascending code list it refers to.
struct EncodedLabels {
  std::vector<std::int32_t> index;
  std::vector<ActivityLabel> codes;
};
EncodedLabels encode_labels(std::span<const ActivityLabel> labels);

GaussianState train_naive_bayes(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const NaiveBayesParams& params);
std::vector<double> naive_bayes_log_joint(const GaussianState& state,
                                          std::span<const double> x);

/// Mean cross-entropy + (l2/2)||W without bias||^2, and its gradient
/// X^T(P - Y)/n + l2 * W (bias column unpenalized). W is K x (d + 1).
double logistic_loss(MatrixView x, std::span<const std::int32_t> y,
                     std::size_t n_classes, std::span<const double> weights,
                     double l2, std::span<double> gradient = {});

LinearState train_logistic(MatrixView x, std::span<const std::int32_t> y,
                           std::size_t n_classes, const LogisticParams& params);

void linear_logits(const LinearState& state, std::size_t n_classes,
                   std::span<const double> x, std::span<double> logits);

ForestState train_random_forest(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const RandomForestParams& params,
                                std::uint64_t seed);

BoostState train_gradient_boost(MatrixView x, std::span<const std::int32_t> y,
                                std::size_t n_classes, const BoostParams& params);

/// Raw additive logits of a boosted ensemble (length 1 when K == 2).
std::vector<double> boost_logits(const BoostState& state, std::span<const double> x);

/// Mean multiclass log-loss of class probabilities `probs` (row-major n x K).
double mean_log_loss(std::span<const double> probs, std::span<const std::int32_t> y,
                     std::size_t n_classes);

// -- persistence -------------------------------------------------------------

inline constexpr std::uint32_t kModelFileVersion = 1;

std::vector<std::uint8_t> encode_model(const TrainedModel& model);
TrainedModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace mhfit
