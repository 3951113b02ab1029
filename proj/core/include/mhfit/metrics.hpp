#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mhfit/activity.hpp"
#include "mhfit/dataset.hpp"

namespace mhfit {

struct TrainedModel;

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<ActivityLabel> class_codes;
  std::vector<std::uint64_t> counts;  // K x K row-major

  std::size_t size() const noexcept { return class_codes.size(); }
  std::uint64_t at(std::size_t truth, std::size_t pred) const noexcept {
    return counts[truth * size() + pred];
  }
  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  ActivityLabel code;
  std::uint64_t support = 0;  // true count
  std::uint64_t tp = 0, fn = 0, fp = 0, tn = 0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  // Set when the metric's denominator was zero (value reported as 0).
  bool sensitivity_undefined = false;
  bool specificity_undefined = false;
  bool precision_undefined = false;
  bool f1_undefined = false;
};

struct AveragedMetrics {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::string model_name;
  double accuracy = 0.0;
  AveragedMetrics macro;     // unweighted over classes with support > 0
  AveragedMetrics micro;     // pooled counts
  AveragedMetrics weighted;  // support-weighted
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;

  // Provenance carried into the detail export.
  std::string model_spec;
  std::string preprocess_spec;
  std::uint64_t seed = 0;
};

/// Throws Error{LengthMismatch|EmptyInput|UnknownLabel}.
ConfusionMatrix build_confusion(std::span<const ActivityLabel> truth,
                                std::span<const ActivityLabel> predicted,
                                std::span<const ActivityLabel> class_codes);

/// Throws Error{EmptyInput} when the matrix is all zeros.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

/// Predicts every test row and scores it over the union of the model's and
/// the test set's class codes.
MetricsReport evaluate(const TrainedModel& model, const LabeledDataset& test,
                       const std::string& preprocess_spec = {});

/// "95.92": percent with two decimals, half-up.
std::string format_percent(double fraction);

/// Header plus one row per report, Table I column order.
std::string table_csv(std::span<const MetricsReport> reports);
std::string confusion_csv(const ConfusionMatrix& cm);
/// Full-precision structured detail (JSON).
std::string report_json(const MetricsReport& report);

}  // namespace mhfit
