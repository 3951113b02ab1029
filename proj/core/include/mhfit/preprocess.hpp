#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhfit/dataset.hpp"

namespace mhfit {

enum class FilterKind { MovingAverage, Median, None };

struct FilterSpec {
  FilterKind kind = FilterKind::MovingAverage;
  std::size_t window = 25;  // 0.5 s at 50 Hz

  void validate(std::size_t n_rows) const;
};

/// `shift` > 0 moves labels earlier in time; vacated positions become 0.
/// `trim_radius` samples on each side of every label transition become 0.
struct LabelAlignmentSpec {
  std::int64_t shift = 0;
  std::size_t trim_radius = 50;

  void validate(std::size_t n_rows) const;
};

enum class SplitMode { StratifiedRandom, SubjectHoldout };

struct SplitSpec {
  double train_fraction = 0.70;
  SplitMode mode = SplitMode::StratifiedRandom;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Fixed statistics per channel: mean, std, min, max (in that order).
struct WindowSpec {
  std::size_t length = 100;
  std::size_t stride = 50;

  void validate(std::size_t n_rows) const;
};

inline constexpr std::size_t kWindowStatsPerChannel = 4;

/// The whole preprocessing chain as it is configured for a run.
struct PreprocessSpec {
  FilterSpec filter;
  LabelAlignmentSpec alignment;
  bool drop_null = true;
  std::optional<WindowSpec> windows;
  SplitSpec split;
};

/// Smooths each channel within each contiguous subject run; edges are
/// replicated so the output has the input's shape.
LabeledDataset filter_signals(const LabeledDataset& ds, const FilterSpec& spec);

/// Shift and transition trimming, applied within each subject run.
LabeledDataset align_labels(const LabeledDataset& ds,
                            const LabelAlignmentSpec& spec);

/// Labeled segments (label != 0) that trimming would erase entirely.
std::size_t count_vanishing_segments(const LabeledDataset& ds,
                                     const LabelAlignmentSpec& spec);

/// Rows with label != 0 in order. Throws Error{EmptyAfterFilter} if none.
LabeledDataset drop_null_class(const LabeledDataset& ds);

/// One row per window lying entirely inside one label and one subject.
/// Throws Error{NoWindows} if nothing survives.
LabeledDataset extract_windows(const LabeledDataset& ds, const WindowSpec& spec);

struct HoldoutSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_rows;  // source row indices, ascending
  std::vector<std::size_t> test_rows;
};

HoldoutSplit holdout_split(const LabeledDataset& ds, const SplitSpec& spec);

/// Rows per class that go to train in stratified mode: round-half-up of
/// fraction * n, moved by one when that would leave either side empty.
std::size_t stratified_train_count(std::size_t class_rows, double fraction);

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> scale;

  LabeledDataset apply(const LabeledDataset& ds) const;
  void apply_inplace(std::span<double> row) const;
  bool empty() const noexcept { return mean.empty(); }

  friend bool operator==(const StandardizationParams&,
                         const StandardizationParams&) = default;
};

inline constexpr double kStdFloor = 1e-12;

/// Population mean/std per channel of `train`; std floored at 1e-12.
StandardizationParams fit_standardization(const LabeledDataset& train);

struct StandardizedPair {
  LabeledDataset train;
  LabeledDataset test;
  StandardizationParams params;
};

StandardizedPair standardize(const LabeledDataset& train,
                             const LabeledDataset& test);

/// filter -> align -> (windows) -> drop null, without the split.
LabeledDataset prepare(const LabeledDataset& raw, const PreprocessSpec& spec);

std::string to_string(FilterKind kind);
std::string to_string(SplitMode mode);
FilterKind parse_filter_kind(std::string_view text);
SplitMode parse_split_mode(std::string_view text);

}  // namespace mhfit
