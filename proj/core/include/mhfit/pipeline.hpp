#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mhfit/config.hpp"
#include "mhfit/dataset.hpp"
#include "mhfit/learners.hpp"
#include "mhfit/metrics.hpp"
#include "mhfit/plot.hpp"
#include "mhfit/preprocess.hpp"

namespace mhfit {

/// Everything one `compare` run needs. Built from a KeyValueConfig; CLI flags
/// are applied to that config before conversion.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;  // raw subject logs
  std::vector<SubjectId> subjects;            // one per input; default 1..n
  ColumnMap columns = ColumnMap::mhealth_default();
  std::optional<std::filesystem::path> dataset;  // canonical file instead of inputs
  PreprocessSpec preprocess;
  std::vector<ModelSpec> models;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  bool save_models = false;
  KeyValueConfig source;  // the resolved configuration, embedded in outputs

  /// Keys (besides the preprocess and per-model keys): inputs, subjects,
  /// columns, dataset, models, out, seed, save_models. split.seed defaults to
  /// seed; each model's seed is derived from (seed, model name).
  static RunConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

/// Loads either the canonical dataset or the raw logs of `cfg`.
LabeledDataset load_run_dataset(const RunConfig& cfg);

struct CompareResult {
  std::vector<MetricsReport> reports;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::filesystem::path> files;
};

/// ingest -> preprocess -> one shared split -> train/evaluate each model ->
/// Table-I CSV, per-model JSON + confusion CSV, grouped bar chart (SVG + CSV)
/// and the resolved run configuration. Errors carry the failing stage name.
CompareResult run_compare(const RunConfig& cfg);

struct InspectRequest {
  LabeledDataset dataset;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive; 0 means the dataset end
  std::vector<std::size_t> channels;
  FilterSpec filter;
  std::optional<std::size_t> reference_change;  // true activity change index
  std::filesystem::path out_dir = "inspect";
};

struct InspectResult {
  std::vector<Series> raw;
  std::vector<Series> filtered;
  Series labels;
  std::optional<std::size_t> label_change;  // first label change at/after reference
  std::optional<std::int64_t> lag;          // label_change - reference_change
  std::vector<std::filesystem::path> files;
};

/// Raw, filtered and label-trace plots (SVG + series CSV) of a row range.
/// Throws Error{Usage} for an empty channel list or out-of-range selection.
InspectResult run_inspect(const InspectRequest& req);

/// `row,predicted_code,predicted_name,score_<code>...`; header only for an
/// empty dataset. Throws Error{Dimension} on a channel-count mismatch.
std::string predictions_csv(const TrainedModel& model, const LabeledDataset& ds);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mhfit
