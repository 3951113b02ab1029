#include "mhfit/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "format.hpp"
#include "mhfit/error.hpp"
#include "mhfit/ingest.hpp"
#include "mhfit/plot.hpp"
#include "mhfit/rng.hpp"

namespace mhfit {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig rc;
  rc.source = cfg;
  rc.seed = cfg.get_uint("seed", rc.seed);
  for (const auto& p : cfg.get_list("inputs")) rc.inputs.emplace_back(p);
  const auto subjects = cfg.get_list("subjects");
  if (subjects.empty()) {
    for (std::size_t i = 0; i < rc.inputs.size(); ++i) {
      rc.subjects.push_back(static_cast<SubjectId>(i + 1));
    }
  } else {
    KeyValueConfig scratch;
    for (const auto& s : subjects) {
      scratch.set("subject", s);
      const auto id = scratch.get_uint("subject", 0);
      if (id < 1 || id > 255) throw Error(ErrorKind::InvalidSpec, "subject ids must be in 1..255");
      rc.subjects.push_back(static_cast<SubjectId>(id));
    }
  }
  if (auto cols = cfg.get("columns")) rc.columns = column_map_from_text(*cols);
  if (auto ds = cfg.get("dataset")) rc.dataset = *ds;
  rc.out_dir = cfg.get_string("out", rc.out_dir.string());
  rc.save_models = cfg.get_bool("save_models", false);

  KeyValueConfig with_seed = cfg;
  if (!cfg.contains("split.seed")) with_seed.set("split.seed", std::to_string(rc.seed));
  rc.preprocess = preprocess_from_config(with_seed);
  preprocess_to_config(rc.preprocess, rc.source);
  rc.source.set("seed", std::to_string(rc.seed));

  auto names = cfg.get_list("models");
  if (names.empty()) {
    for (ModelKind k : kAllModelKinds) names.emplace_back(to_string(k));
  }
  for (const auto& name : names) {
    const ModelKind kind = parse_model_kind(name);
    rc.models.push_back(model_spec_from_config(kind, cfg, derive_seed(rc.seed, to_string(kind))));
  }
  rc.validate();
  return rc;
}

void RunConfig::validate() const {
  if (models.empty()) throw Error(ErrorKind::InvalidSpec, "run config: no models selected");
  if (!dataset && inputs.empty()) {
    throw Error(ErrorKind::InvalidSpec, "run config: give either 'dataset' or 'inputs'");
  }
  if (!dataset && inputs.size() != subjects.size()) {
    throw Error(ErrorKind::InvalidSpec, "run config: need one subject id per input file");
  }
  for (const auto& m : models) m.validate();
  preprocess.split.validate();
}

LabeledDataset load_run_dataset(const RunConfig& cfg) {
  if (cfg.dataset) return load_canonical(*cfg.dataset);
  return load_dataset(cfg.inputs, cfg.columns, cfg.subjects);
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + name + "] " + e.what());
  }
}

}  // namespace

CompareResult run_compare(const RunConfig& cfg) {
  cfg.validate();
  const auto raw = stage("ingest", [&] { return load_run_dataset(cfg); });
  const auto prepared = stage("preprocess", [&] { return prepare(raw, cfg.preprocess); });
  const auto split = stage("split", [&] { return holdout_split(prepared, cfg.preprocess.split); });

  stage("output", [&] {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + cfg.out_dir.string() + ": " + ec.message());
    return 0;
  });

  CompareResult result;
  result.train_rows = split.train.n_rows();
  result.test_rows = split.test.n_rows();
  const std::string pre_text = preprocess_to_text(cfg.preprocess);

  for (const auto& spec : cfg.models) {
    const std::string name(to_string(spec.kind()));
    const auto model = stage(("train " + name).c_str(), [&] { return train(spec, split.train); });
    auto report = stage(("evaluate " + name).c_str(),
                        [&] { return evaluate(model, split.test, pre_text); });
    stage("output", [&] {
      const auto json_path = cfg.out_dir / (name + ".report.json");
      const auto cm_path = cfg.out_dir / (name + ".confusion.csv");
      write_text(json_path, report_json(report));
      write_text(cm_path, confusion_csv(report.confusion));
      result.files.push_back(json_path);
      result.files.push_back(cm_path);
      if (cfg.save_models) {
        const auto model_path = cfg.out_dir / (name + ".model");
        save_model(model, model_path);
        result.files.push_back(model_path);
      }
      return 0;
    });
    result.reports.push_back(std::move(report));
  }

  stage("output", [&] {
    const auto table = cfg.out_dir / "table1.csv";
    write_text(table, table_csv(result.reports));

    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    std::ostringstream series;
    series << "model,metric,value\n";
    for (const auto& r : result.reports) {
      groups.push_back(r.model_name);
      values.push_back({r.accuracy, r.macro.sensitivity, r.macro.specificity, r.macro.f1});
      series << r.model_name << ",accuracy," << format_double(r.accuracy) << '\n'
             << r.model_name << ",sensitivity," << format_double(r.macro.sensitivity) << '\n'
             << r.model_name << ",specificity," << format_double(r.macro.specificity) << '\n'
             << r.model_name << ",f1," << format_double(r.macro.f1) << '\n';
    }
    const std::vector<std::string> metrics = {"Accuracy", "Sensitivity", "Specificity", "F-1 Score"};
    const auto svg = cfg.out_dir / "performance.svg";
    const auto csv = cfg.out_dir / "performance.csv";
    write_text(svg, bar_chart_svg("Performance of machine learning models", groups, metrics, values));
    write_text(csv, series.str());

    const auto cfg_path = cfg.out_dir / "run_config.txt";
    write_text(cfg_path, cfg.source.to_text());
    result.files.insert(result.files.end(), {table, svg, csv, cfg_path});
    return 0;
  });
  return result;
}

InspectResult run_inspect(const InspectRequest& req) {
  const auto& ds = req.dataset;
  const std::size_t end = req.end == 0 ? ds.n_rows() : req.end;
  if (req.channels.empty()) throw Error(ErrorKind::Usage, "inspect: no channels selected");
  if (req.begin >= end || end > ds.n_rows()) {
    throw Error(ErrorKind::Usage, "inspect: row range [" + std::to_string(req.begin) + ", " +
                                      std::to_string(end) + ") outside dataset of " +
                                      std::to_string(ds.n_rows()) + " rows");
  }
  for (std::size_t c : req.channels) {
    if (c >= ds.n_channels()) {
      throw Error(ErrorKind::Usage, "inspect: channel " + std::to_string(c) + " out of range");
    }
  }
  if (req.reference_change && *req.reference_change >= ds.n_rows()) {
    throw Error(ErrorKind::Usage, "inspect: reference index outside dataset");
  }

  const auto filtered = filter_signals(ds, req.filter);
  InspectResult res;
  for (std::size_t c : req.channels) {
    Series raw{ds.channel_names()[c], {}, {}};
    Series smooth{ds.channel_names()[c], {}, {}};
    for (std::size_t i = req.begin; i < end; ++i) {
      raw.x.push_back(static_cast<double>(i));
      raw.y.push_back(ds.at(i, c));
      smooth.x.push_back(static_cast<double>(i));
      smooth.y.push_back(filtered.at(i, c));
    }
    res.raw.push_back(std::move(raw));
    res.filtered.push_back(std::move(smooth));
  }
  res.labels.name = "label";
  for (std::size_t i = req.begin; i < end; ++i) {
    res.labels.x.push_back(static_cast<double>(i));
    res.labels.y.push_back(ds.labels()[i].code());
  }

  std::vector<Marker> markers;
  std::vector<Series> label_series = {res.labels};
  if (req.reference_change) {
    const std::size_t ref = *req.reference_change;
    for (std::size_t i = std::max<std::size_t>(ref, 1); i < ds.n_rows(); ++i) {
      if (ds.labels()[i] != ds.labels()[i - 1]) {
        res.label_change = i;
        break;
      }
    }
    markers.push_back({static_cast<double>(ref), "activity change"});
    label_series.push_back({"reference_change", {double(ref), double(ref)}, {0.0, double(kMaxActivityCode)}});
    if (res.label_change) {
      res.lag = static_cast<std::int64_t>(*res.label_change) - static_cast<std::int64_t>(ref);
      markers.push_back({static_cast<double>(*res.label_change),
                         "label change (lag " + std::to_string(*res.lag) + ")"});
      label_series.push_back({"label_change",
                              {double(*res.label_change), double(*res.label_change)},
                              {0.0, double(kMaxActivityCode)}});
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(req.out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + req.out_dir.string());
  const std::string filter_name =
      to_string(req.filter.kind) + " filter, window " + std::to_string(req.filter.window);
  auto emit = [&](const std::string& stem, const std::string& title, const std::string& y_label,
                  std::span<const Series> series, std::span<const Marker> marks) {
    const auto svg = req.out_dir / (stem + ".svg");
    const auto csv = req.out_dir / (stem + ".csv");
    write_text(svg, line_plot_svg(title, "sample index (50 Hz)", y_label, series, marks));
    write_text(csv, series_csv(series));
    res.files.push_back(svg);
    res.files.push_back(csv);
  };
  emit("raw", "Raw data", "sensor value", res.raw, {});
  emit("filtered", "Filtered data (" + filter_name + ")", "sensor value", res.filtered, {});
  emit("labels", "Label activity and real activity change", "activity code", label_series, markers);

  std::ostringstream summary;
  summary << "rows = " << req.begin << ".." << end << '\n' << "filter = " << filter_name << '\n';
  if (req.reference_change) summary << "reference_change = " << *req.reference_change << '\n';
  if (res.label_change) summary << "label_change = " << *res.label_change << '\n';
  if (res.lag) summary << "lag_samples = " << *res.lag << '\n';
  const auto summary_path = req.out_dir / "inspect_summary.txt";
  write_text(summary_path, summary.str());
  res.files.push_back(summary_path);
  return res;
}

std::string predictions_csv(const TrainedModel& model, const LabeledDataset& ds) {
  if (ds.n_channels() != model.n_features) {
    throw Error(ErrorKind::Dimension,
                "predict: model expects " + std::to_string(model.n_features) +
                    " features, dataset has " + std::to_string(ds.n_channels()));
  }
  std::ostringstream out;
  out << "row,predicted_code,predicted_name";
  for (auto c : model.class_codes) out << ",score_" << int{c.code()};
  out << '\n';
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const auto scores = predict_scores(model, ds.row(r));
    const auto label = model.class_codes[argmax(scores)];
    out << r << ',' << int{label.code()} << ',' << label.name();
    for (double s : scores) out << ',' << format_double(s);
    out << '\n';
  }
  return out.str();
}

}  // namespace mhfit
