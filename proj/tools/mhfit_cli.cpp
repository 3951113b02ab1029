#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mhfit/config.hpp"
#include "mhfit/error.hpp"
#include "mhfit/ingest.hpp"
#include "mhfit/learners.hpp"
#include "mhfit/metrics.hpp"
#include "mhfit/pipeline.hpp"
#include "mhfit/preprocess.hpp"
#include "mhfit/rng.hpp"
#include "mhfit/synth.hpp"

namespace fs = std::filesystem;
using namespace mhfit;

namespace {

int verbosity() {
  const char* v = std::getenv("MHFIT_VERBOSE");
  return v ? std::atoi(v) : 1;
}

void info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << msg << '\n';
}

void debug(const std::string& msg) {
  if (verbosity() >= 2) std::cerr << msg << '\n';
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

// Flags shared by the commands that read a config file. Values given on the
// command line override the file.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> subjects;
  std::optional<std::string> columns;
  std::optional<std::string> dataset;
  std::optional<std::string> split_mode;
  std::optional<double> train_fraction;
  std::optional<std::string> filter;
  std::optional<std::size_t> filter_window;
  std::optional<std::int64_t> label_shift;
  std::optional<std::size_t> trim_radius;
  bool windowed = false;
  std::optional<std::size_t> window_len;
  std::optional<std::size_t> window_stride;
  bool keep_null = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "global seed");
    app->add_option("--input", inputs, "raw subject log (repeatable)")->check(CLI::ExistingFile);
    app->add_option("--subjects", subjects, "subject id per --input (default 1..n)");
    app->add_option("--columns", columns, "column map: mhealth | identity:N | cols:N:f0,f1:label");
    app->add_option("--dataset", dataset, "canonical dataset instead of --input")
        ->check(CLI::ExistingFile);
    app->add_option("--split-mode", split_mode, "stratified | subject");
    app->add_option("--train-fraction", train_fraction, "hold-out train fraction");
    app->add_option("--filter", filter, "mavg | median | none");
    app->add_option("--filter-window", filter_window, "filter window (samples)");
    app->add_option("--label-shift", label_shift, "label shift (samples)");
    app->add_option("--trim-radius", trim_radius, "rows dropped around label changes");
    app->add_flag("--windowed", windowed, "classify windows instead of samples");
    app->add_option("--window-len", window_len, "window length (samples)");
    app->add_option("--window-stride", window_stride, "window stride (samples)");
    app->add_flag("--keep-null", keep_null, "keep null-class rows");
  }

  KeyValueConfig resolve() const {
    KeyValueConfig cfg = config.empty() ? KeyValueConfig{} : KeyValueConfig::load(config);
    if (seed) cfg.set("seed", std::to_string(*seed));
    if (!inputs.empty()) cfg.set("inputs", join(inputs));
    if (!subjects.empty()) cfg.set("subjects", join(subjects));
    if (columns) cfg.set("columns", *columns);
    if (dataset) cfg.set("dataset", *dataset);
    if (split_mode) cfg.set("split.mode", *split_mode);
    if (train_fraction) cfg.set("split.train_fraction", std::to_string(*train_fraction));
    if (filter) cfg.set("filter.kind", *filter);
    if (filter_window) cfg.set("filter.window", std::to_string(*filter_window));
    if (label_shift) cfg.set("align.shift", std::to_string(*label_shift));
    if (trim_radius) cfg.set("align.trim_radius", std::to_string(*trim_radius));
    if (windowed) cfg.set("window.enabled", "true");
    if (window_len) cfg.set("window.length", std::to_string(*window_len));
    if (window_stride) cfg.set("window.stride", std::to_string(*window_stride));
    if (keep_null) cfg.set("drop_null", "false");
    return cfg;
  }
};

LabeledDataset load_input(const std::optional<std::string>& dataset,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& subjects,
                          const std::optional<std::string>& columns) {
  KeyValueConfig cfg;
  if (dataset) cfg.set("dataset", *dataset);
  if (!inputs.empty()) cfg.set("inputs", join(inputs));
  if (!subjects.empty()) cfg.set("subjects", join(subjects));
  if (columns) cfg.set("columns", *columns);
  cfg.set("models", "decision_tree");
  return load_run_dataset(RunConfig::from_config(cfg));
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mhfit: wearable-sensor activity recognition toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse raw subject logs into a canonical dataset");
  std::vector<std::string> ingest_inputs, ingest_subjects;
  std::optional<std::string> ingest_columns, ingest_csv;
  std::string ingest_out;
  ingest->add_option("--input", ingest_inputs, "raw subject log (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--subjects", ingest_subjects, "subject id per --input (default 1..n)");
  ingest->add_option("--columns", ingest_columns, "column map");
  ingest->add_option("--out", ingest_out, "canonical dataset path")->required();
  ingest->add_option("--csv", ingest_csv, "also export CSV");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic Gaussian-cluster dataset");
  SyntheticSpec synth_spec;
  std::string synth_out;
  synth->add_option("--classes", synth_spec.n_classes, "number of classes (1..12)");
  synth->add_option("--features", synth_spec.n_features, "number of features");
  synth->add_option("--samples-per-class", synth_spec.samples_per_class, "rows per class");
  synth->add_option("--separation", synth_spec.cluster_separation, "pairwise center distance");
  synth->add_option("--noise", synth_spec.noise_std, "isotropic noise std");
  synth->add_option("--seed", synth_spec.seed, "seed");
  synth->add_option("--out", synth_out, "canonical dataset path")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "plot raw, filtered and label traces");
  std::optional<std::string> insp_dataset, insp_columns;
  std::vector<std::string> insp_inputs, insp_subjects, insp_channels;
  std::size_t insp_begin = 0, insp_end = 0;
  std::string insp_filter = "mavg";
  std::size_t insp_window = FilterSpec{}.window;
  std::optional<std::size_t> insp_reference;
  std::string insp_out = "inspect";
  inspect->add_option("--dataset", insp_dataset, "canonical dataset")->check(CLI::ExistingFile);
  inspect->add_option("--input", insp_inputs, "raw subject log")->check(CLI::ExistingFile);
  inspect->add_option("--subjects", insp_subjects, "subject id per --input");
  inspect->add_option("--columns", insp_columns, "column map");
  inspect->add_option("--channels", insp_channels, "channel names or indices")->delimiter(',');
  inspect->add_option("--begin", insp_begin, "first row");
  inspect->add_option("--end", insp_end, "one past the last row (0 = end)");
  inspect->add_option("--filter", insp_filter, "mavg | median | none");
  inspect->add_option("--filter-window", insp_window, "filter window");
  inspect->add_option("--reference", insp_reference, "true activity change index");
  inspect->add_option("--out", insp_out, "output directory");

  // compare
  auto* compare = app.add_subcommand("compare", "train and evaluate models on one shared split");
  CommonFlags cmp_flags;
  cmp_flags.attach(compare);
  std::vector<std::string> cmp_models;
  std::optional<std::string> cmp_out;
  bool cmp_save = false;
  compare->add_option("--models", cmp_models, "model list")->delimiter(',');
  compare->add_option("--out", cmp_out, "output directory");
  compare->add_flag("--save-models", cmp_save, "write trained model files");

  // train
  auto* trn = app.add_subcommand("train", "train one model on the hold-out train split");
  CommonFlags trn_flags;
  trn_flags.attach(trn);
  std::string trn_model = "gradient_boost";
  std::string trn_out;
  std::optional<std::string> trn_test_out;
  bool trn_full = false;
  trn->add_option("--model", trn_model, "model kind");
  trn->add_option("--out", trn_out, "model file")->required();
  trn->add_option("--test-out", trn_test_out, "write the held-out test split (canonical)");
  trn->add_flag("--full", trn_full, "train on every prepared row (no hold-out)");

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "evaluate a model file on a canonical dataset");
  std::string evl_model, evl_dataset, evl_out = "evaluation";
  evl->add_option("--model", evl_model, "model file")->required()->check(CLI::ExistingFile);
  evl->add_option("--dataset", evl_dataset, "canonical dataset")->required()->check(CLI::ExistingFile);
  evl->add_option("--out", evl_out, "output directory");

  // predict
  auto* prd = app.add_subcommand("predict", "batch-score a canonical dataset");
  std::string prd_model, prd_dataset, prd_out;
  prd->add_option("--model", prd_model, "model file")->required()->check(CLI::ExistingFile);
  prd->add_option("--dataset", prd_dataset, "canonical dataset")->required()->check(CLI::ExistingFile);
  prd->add_option("--out", prd_out, "predictions CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto ds = load_input(std::nullopt, ingest_inputs, ingest_subjects, ingest_columns);
      ensure_parent(ingest_out);
      save_canonical(ds, ingest_out);
      if (ingest_csv) export_csv(ds, *ingest_csv);
      info("ingested " + std::to_string(ds.n_rows()) + " rows x " +
           std::to_string(ds.n_channels()) + " channels -> " + ingest_out);
    } else if (*synth) {
      const auto ds = generate_synthetic(synth_spec);
      ensure_parent(synth_out);
      save_canonical(ds, synth_out);
      info("wrote " + std::to_string(ds.n_rows()) + " synthetic rows -> " + synth_out);
    } else if (*inspect) {
      if (!insp_dataset && insp_inputs.empty()) {
        throw Error(ErrorKind::Usage, "inspect: give --dataset or --input");
      }
      InspectRequest req;
      req.dataset = load_input(insp_dataset, insp_inputs, insp_subjects, insp_columns);
      req.begin = insp_begin;
      req.end = insp_end;
      for (const auto& ch : insp_channels) {
        const auto& names = req.dataset.channel_names();
        auto it = std::find(names.begin(), names.end(), ch);
        if (it != names.end()) {
          req.channels.push_back(static_cast<std::size_t>(it - names.begin()));
        } else {
          std::size_t index = 0;
          auto [ptr, ec] = std::from_chars(ch.data(), ch.data() + ch.size(), index);
          if (ec != std::errc{} || ptr != ch.data() + ch.size()) {
            throw Error(ErrorKind::Usage, "inspect: unknown channel '" + ch + "'");
          }
          req.channels.push_back(index);
        }
      }
      req.filter = {parse_filter_kind(insp_filter), insp_window};
      req.reference_change = insp_reference;
      req.out_dir = insp_out;
      const auto res = run_inspect(req);
      if (res.lag) info("label change lags the reference by " + std::to_string(*res.lag) + " samples");
      for (const auto& f : res.files) debug("wrote " + f.string());
    } else if (*compare) {
      auto cfg = cmp_flags.resolve();
      if (!cmp_models.empty()) cfg.set("models", join(cmp_models));
      if (cmp_out) cfg.set("out", *cmp_out);
      if (cmp_save) cfg.set("save_models", "true");
      const auto run = RunConfig::from_config(cfg);
      const auto res = run_compare(run);
      info("train rows " + std::to_string(res.train_rows) + ", test rows " +
           std::to_string(res.test_rows));
      for (const auto& r : res.reports) {
        info(r.model_name + ": accuracy " + format_percent(r.accuracy) + "%");
      }
      for (const auto& f : res.files) debug("wrote " + f.string());
    } else if (*trn) {
      auto cfg = trn_flags.resolve();
      cfg.set("models", trn_model);
      const auto run = RunConfig::from_config(cfg);
      const auto raw = load_run_dataset(run);
      const auto prepared = prepare(raw, run.preprocess);
      LabeledDataset train_set = prepared;
      if (!trn_full) {
        auto split = holdout_split(prepared, run.preprocess.split);
        train_set = std::move(split.train);
        if (trn_test_out) {
          ensure_parent(*trn_test_out);
          save_canonical(split.test, *trn_test_out);
        }
      }
      const auto model = train(run.models.front(), train_set);
      ensure_parent(trn_out);
      save_model(model, trn_out);
      info("trained " + std::string(to_string(run.models.front().kind())) + " on " +
           std::to_string(train_set.n_rows()) + " rows -> " + trn_out);
    } else if (*evl) {
      const auto model = load_model(evl_model);
      const auto ds = load_canonical(evl_dataset);
      const auto report = evaluate(model, ds, "as stored in " + evl_dataset);
      fs::create_directories(evl_out);
      const std::string name(to_string(model.spec.kind()));
      write_text(fs::path(evl_out) / (name + ".report.json"), report_json(report));
      write_text(fs::path(evl_out) / (name + ".confusion.csv"), confusion_csv(report.confusion));
      write_text(fs::path(evl_out) / "table1.csv", table_csv(std::span(&report, 1)));
      info(report.model_name + ": accuracy " + format_percent(report.accuracy) + "%");
    } else if (*prd) {
      const auto model = load_model(prd_model);
      const auto ds = load_canonical(prd_dataset);
      const auto csv = predictions_csv(model, ds);
      ensure_parent(prd_out);
      write_text(prd_out, csv);
      info("scored " + std::to_string(ds.n_rows()) + " rows -> " + prd_out);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
