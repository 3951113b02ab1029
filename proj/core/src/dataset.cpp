#include "mhfit/dataset.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "mhfit/error.hpp"

namespace mhfit {

void ColumnMap::validate() const {
  if (source_column_count == 0) {
    throw Error(ErrorKind::InvalidSpec, "column map: source column count is 0");
  }
  if (feature_columns.empty()) {
    throw Error(ErrorKind::InvalidSpec, "column map: no feature columns");
  }
  if (label_column >= source_column_count) {
    throw Error(ErrorKind::InvalidSpec, "column map: label column out of range");
  }
  std::set<std::size_t> seen;
  for (std::size_t c : feature_columns) {
    if (c >= source_column_count) {
      throw Error(ErrorKind::InvalidSpec,
                  "column map: feature column " + std::to_string(c) +
                      " out of range");
    }
    if (c == label_column) {
      throw Error(ErrorKind::InvalidSpec,
                  "column map: feature column overlaps label column");
    }
    if (!seen.insert(c).second) {
      throw Error(ErrorKind::InvalidSpec,
                  "column map: duplicate feature column " + std::to_string(c));
    }
  }
  if (channel_names.size() != feature_columns.size()) {
    throw Error(ErrorKind::InvalidSpec,
                "column map: channel name count differs from feature count");
  }
}

ColumnMap ColumnMap::mhealth_default() {
  // Raw layout (0-based): 0-2 chest acc, 3-4 ECG, 5-7 ankle acc,
  // 8-10 ankle gyro, 11-13 ankle mag, 14-16 arm acc, 17-19 arm gyro,
  // 20-22 arm mag, 23 label.
  ColumnMap map;
  map.source_column_count = 24;
  map.feature_columns = {0, 1, 2, 5, 6, 7, 14, 15, 16, 8, 9, 10};
  map.label_column = 23;
  map.channel_names = {
      "chest_acc_x",  "chest_acc_y",  "chest_acc_z",
      "ankle_acc_x",  "ankle_acc_y",  "ankle_acc_z",
      "arm_acc_x",    "arm_acc_y",    "arm_acc_z",
      "ankle_gyro_x", "ankle_gyro_y", "ankle_gyro_z",
  };
  return map;
}

ColumnMap ColumnMap::identity(std::size_t n_features) {
  ColumnMap map;
  map.source_column_count = n_features + 1;
  map.label_column = n_features;
  for (std::size_t i = 0; i < n_features; ++i) {
    map.feature_columns.push_back(i);
    map.channel_names.push_back("f" + std::to_string(i));
  }
  return map;
}

LabeledDataset::LabeledDataset(std::vector<std::string> channels,
                               std::vector<double> values,
                               std::vector<ActivityLabel> labels,
                               std::vector<SubjectId> subjects)
    : channels_(std::move(channels)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      subjects_(std::move(subjects)) {
  if (subjects_.size() != labels_.size() ||
      values_.size() != labels_.size() * channels_.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "dataset: matrix, label and subject lengths disagree");
  }
}

LabeledDataset LabeledDataset::select_rows(
    std::span<const std::size_t> rows) const {
  const std::size_t d = n_channels();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  std::vector<ActivityLabel> labels;
  labels.reserve(rows.size());
  std::vector<SubjectId> subjects;
  subjects.reserve(rows.size());
  for (std::size_t r : rows) {
    auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
    subjects.push_back(subjects_[r]);
  }
  return LabeledDataset(channels_, std::move(values), std::move(labels),
                        std::move(subjects));
}

LabeledDataset LabeledDataset::with_values(std::vector<double> values) const {
  return LabeledDataset(channels_, std::move(values), labels_, subjects_);
}

LabeledDataset LabeledDataset::with_labels(
    std::vector<ActivityLabel> labels) const {
  return LabeledDataset(channels_, values_, std::move(labels), subjects_);
}

std::vector<ActivityLabel> LabeledDataset::label_set() const {
  std::array<bool, kActivityCodeCount> present{};
  for (auto l : labels_) present[l.code()] = true;
  std::vector<ActivityLabel> out;
  for (int c = 0; c < kActivityCodeCount; ++c) {
    if (present[static_cast<std::size_t>(c)]) out.emplace_back(c);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> LabeledDataset::subject_runs()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= n_rows(); ++i) {
    if (i == n_rows() || subjects_[i] != subjects_[begin]) {
      runs.emplace_back(begin, i);
      begin = i;
    }
  }
  return runs;
}

LabeledDataset concat(std::span<const LabeledDataset> parts) {
  if (parts.empty()) return {};
  const auto& channels = parts.front().channel_names();
  std::vector<double> values;
  std::vector<ActivityLabel> labels;
  std::vector<SubjectId> subjects;
  for (const auto& p : parts) {
    if (p.channel_names() != channels) {
      throw Error(ErrorKind::Schema, "concat: channel names differ");
    }
    values.insert(values.end(), p.values().begin(), p.values().end());
    labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    subjects.insert(subjects.end(), p.subjects().begin(), p.subjects().end());
  }
  return LabeledDataset(channels, std::move(values), std::move(labels),
                        std::move(subjects));
}

}  // namespace mhfit
