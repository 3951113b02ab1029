#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mhfit/activity.hpp"

namespace mhfit {

using SubjectId = std::uint8_t;

/// One 50 Hz reading after column mapping.
struct SampleRecord {
  std::vector<double> features;
  ActivityLabel label;
  SubjectId subject_id = 1;
  std::uint64_t sample_index = 0;
};

/// Which raw columns become features and which one holds the label.
struct ColumnMap {
  std::size_t source_column_count = 0;
  std::vector<std::size_t> feature_columns;
  std::size_t label_column = 0;
  std::vector<std::string> channel_names;

  /// Throws Error{InvalidSpec} on out-of-range, duplicate or overlapping
  /// indices, or a channel name list of the wrong length.
  void validate() const;

  /// 24-column MHEALTH subject logs: chest acc, left-ankle acc, right-arm acc,
  /// left-ankle gyro (12 channels) plus the label column.
  static ColumnMap mhealth_default();

  /// `n_features` leading columns as features, the next one as label.
  static ColumnMap identity(std::size_t n_features);
};

/// Row-major feature matrix with aligned labels and subject ids.
/// Immutable once constructed; every transformation returns a new dataset.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  /// Throws Error{LengthMismatch} if the value/label/subject sizes disagree
  /// with the channel count.
  LabeledDataset(std::vector<std::string> channels, std::vector<double> values,
                 std::vector<ActivityLabel> labels,
                 std::vector<SubjectId> subjects);

  std::size_t n_rows() const noexcept { return labels_.size(); }
  std::size_t n_channels() const noexcept { return channels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  const std::vector<std::string>& channel_names() const noexcept {
    return channels_;
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * channels_.size(), channels_.size()};
  }
  double at(std::size_t r, std::size_t c) const noexcept {
    return values_[r * channels_.size() + c];
  }
  const std::vector<ActivityLabel>& labels() const noexcept { return labels_; }
  const std::vector<SubjectId>& subjects() const noexcept { return subjects_; }

  /// Copy of the listed rows, in the listed order.
  LabeledDataset select_rows(std::span<const std::size_t> rows) const;

  LabeledDataset with_values(std::vector<double> values) const;
  LabeledDataset with_labels(std::vector<ActivityLabel> labels) const;

  /// Distinct label codes present, ascending.
  std::vector<ActivityLabel> label_set() const;

  /// Half-open [begin, end) row ranges of consecutive rows sharing a subject.
  std::vector<std::pair<std::size_t, std::size_t>> subject_runs() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::vector<std::string> channels_;
  std::vector<double> values_;
  std::vector<ActivityLabel> labels_;
  std::vector<SubjectId> subjects_;
};

/// Appends rows of `parts` in order. All parts must share channel names.
LabeledDataset concat(std::span<const LabeledDataset> parts);

}  // namespace mhfit
