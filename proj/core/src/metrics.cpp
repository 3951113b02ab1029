#include "mhfit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mhfit/error.hpp"
#include "mhfit/learners.hpp"

namespace mhfit {

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
  return t;
}

ConfusionMatrix build_confusion(std::span<const ActivityLabel> truth,
                                std::span<const ActivityLabel> predicted,
                                std::span<const ActivityLabel> class_codes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::LengthMismatch, "confusion: true and predicted lengths differ");
  }
  if (truth.empty()) {
    throw Error(ErrorKind::EmptyInput, "confusion: metrics are undefined on zero samples");
  }
  std::array<std::int32_t, kActivityCodeCount> slot;
  slot.fill(-1);
  for (std::size_t i = 0; i < class_codes.size(); ++i) {
    if (slot[class_codes[i].code()] >= 0) {
      throw Error(ErrorKind::InvalidSpec, "confusion: duplicate class code");
    }
    slot[class_codes[i].code()] = static_cast<std::int32_t>(i);
  }
  ConfusionMatrix cm;
  cm.class_codes.assign(class_codes.begin(), class_codes.end());
  const std::size_t k = class_codes.size();
  cm.counts.assign(k * k, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::int32_t t = slot[truth[i].code()];
    const std::int32_t p = slot[predicted[i].code()];
    if (t < 0 || p < 0) {
      throw Error(ErrorKind::UnknownLabel,
                  "confusion: label " + std::to_string(t < 0 ? truth[i].code() : predicted[i].code()) +
                      " not among the class codes");
    }
    ++cm.counts[static_cast<std::size_t>(t) * k + static_cast<std::size_t>(p)];
  }
  return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double a, double b, bool& undefined) {
  undefined = a + b == 0.0;
  return undefined ? 0.0 : 2.0 * a * b / (a + b);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t k = cm.size();
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorKind::EmptyInput, "metrics: confusion matrix is empty");

  MetricsReport rep;
  rep.confusion = cm;
  rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

  std::uint64_t sum_tp = 0, sum_fn = 0, sum_fp = 0, sum_tn = 0;
  std::size_t supported = 0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    m.code = cm.class_codes[c];
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    m.support = row;
    m.tp = cm.at(c, c);
    m.fn = row - m.tp;
    m.fp = col - m.tp;
    m.tn = total - m.tp - m.fn - m.fp;
    m.sensitivity = ratio(m.tp, m.tp + m.fn, m.sensitivity_undefined);
    m.specificity = ratio(m.tn, m.tn + m.fp, m.specificity_undefined);
    m.precision = ratio(m.tp, m.tp + m.fp, m.precision_undefined);
    m.f1 = harmonic(m.precision, m.sensitivity, m.f1_undefined);

    sum_tp += m.tp;
    sum_fn += m.fn;
    sum_fp += m.fp;
    sum_tn += m.tn;
    if (m.support > 0) {
      ++supported;
      rep.macro.sensitivity += m.sensitivity;
      rep.macro.specificity += m.specificity;
      rep.macro.precision += m.precision;
      rep.macro.f1 += m.f1;
      const double w = static_cast<double>(m.support) / static_cast<double>(total);
      rep.weighted.sensitivity += w * m.sensitivity;
      rep.weighted.specificity += w * m.specificity;
      rep.weighted.precision += w * m.precision;
      rep.weighted.f1 += w * m.f1;
    }
    rep.per_class.push_back(m);
  }
  const auto n = static_cast<double>(supported);
  rep.macro.sensitivity /= n;
  rep.macro.specificity /= n;
  rep.macro.precision /= n;
  rep.macro.f1 /= n;

  bool ignored;
  rep.micro.sensitivity = ratio(sum_tp, sum_tp + sum_fn, ignored);
  rep.micro.specificity = ratio(sum_tn, sum_tn + sum_fp, ignored);
  rep.micro.precision = ratio(sum_tp, sum_tp + sum_fp, ignored);
  rep.micro.f1 = harmonic(rep.micro.precision, rep.micro.sensitivity, ignored);
  return rep;
}

namespace {

std::string describe(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(spec.kind());
  j["seed"] = spec.seed;
  j["standardize"] = spec.standardize;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        auto& h = j["hyperparameters"];
        if constexpr (std::is_same_v<P, DecisionTreeParams>) {
          h["max_depth"] = p.max_depth;
          h["min_samples_leaf"] = p.min_samples_leaf;
        } else if constexpr (std::is_same_v<P, RandomForestParams>) {
          h["n_trees"] = p.n_trees;
          h["max_depth"] = p.max_depth;
          h["min_samples_leaf"] = p.min_samples_leaf;
          h["bootstrap"] = p.bootstrap;
          h["feature_subsampling"] = p.feature_subsampling;
        } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
          h["var_smoothing"] = p.var_smoothing;
        } else if constexpr (std::is_same_v<P, LogisticParams>) {
          h["learning_rate"] = p.learning_rate;
          h["epochs"] = p.epochs;
          h["l2"] = p.l2;
          h["grad_tolerance"] = p.grad_tolerance;
        } else {
          h["n_rounds"] = p.n_rounds;
          h["max_depth"] = p.max_depth;
          h["learning_rate"] = p.learning_rate;
          h["lambda"] = p.lambda;
          h["gamma"] = p.gamma;
          h["min_child_hessian"] = p.min_child_hessian;
        }
      },
      spec.params);
  return j.dump();
}

}  // namespace

MetricsReport evaluate(const TrainedModel& model, const LabeledDataset& test,
                       const std::string& preprocess_spec) {
  if (test.empty()) throw Error(ErrorKind::EmptyInput, "evaluate: empty test set");
  const auto predicted = predict_all(model, test);

  std::array<bool, kActivityCodeCount> present{};
  for (auto c : model.class_codes) present[c.code()] = true;
  for (auto c : test.labels()) present[c.code()] = true;
  std::vector<ActivityLabel> codes;
  for (int c = 0; c < kActivityCodeCount; ++c) {
    if (present[static_cast<std::size_t>(c)]) codes.emplace_back(c);
  }

  auto rep = compute_metrics(build_confusion(test.labels(), predicted, codes));
  rep.model_name = std::string(display_name(model.spec.kind()));
  rep.model_spec = describe(model.spec);
  rep.preprocess_spec = preprocess_spec;
  rep.seed = model.spec.seed;
  return rep;
}

std::string format_percent(double fraction) {
  // Nudge by a few ulps so 0.95925 renders as 95.93 despite binary rounding.
  const double hundredths = std::floor(fraction * 10000.0 + 0.5 + 1e-9);
  const auto cents = static_cast<long long>(hundredths);
  std::ostringstream out;
  out << cents / 100 << '.' << (cents % 100 < 10 ? "0" : "") << cents % 100;
  return out.str();
}

std::string table_csv(std::span<const MetricsReport> reports) {
  std::ostringstream out;
  out << "Model,Accuracy (%),Sensitivity (%),Specificity (%),F-1 Score (%)\n";
  for (const auto& r : reports) {
    out << r.model_name << ',' << format_percent(r.accuracy) << ','
        << format_percent(r.macro.sensitivity) << ',' << format_percent(r.macro.specificity)
        << ',' << format_percent(r.macro.f1) << '\n';
  }
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "true\\predicted";
  for (auto c : cm.class_codes) out << ',' << int{c.code()};
  out << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    out << int{cm.class_codes[i].code()};
    for (std::size_t j = 0; j < cm.size(); ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  return out.str();
}

std::string report_json(const MetricsReport& r) {
  using nlohmann::ordered_json;
  auto averaged = [](const AveragedMetrics& a) {
    return ordered_json{{"sensitivity", a.sensitivity},
                        {"specificity", a.specificity},
                        {"precision", a.precision},
                        {"f1", a.f1}};
  };
  ordered_json j;
  j["model"] = r.model_name;
  j["seed"] = r.seed;
  j["accuracy"] = r.accuracy;
  j["macro"] = averaged(r.macro);
  j["micro"] = averaged(r.micro);
  j["weighted"] = averaged(r.weighted);
  ordered_json classes = ordered_json::array();
  for (const auto& m : r.per_class) {
    classes.push_back({{"code", m.code.code()},
                       {"name", m.code.name()},
                       {"support", m.support},
                       {"tp", m.tp},
                       {"fn", m.fn},
                       {"fp", m.fp},
                       {"tn", m.tn},
                       {"sensitivity", m.sensitivity},
                       {"specificity", m.specificity},
                       {"precision", m.precision},
                       {"f1", m.f1},
                       {"undefined",
                        {{"sensitivity", m.sensitivity_undefined},
                         {"specificity", m.specificity_undefined},
                         {"precision", m.precision_undefined},
                         {"f1", m.f1_undefined}}}});
  }
  j["per_class"] = classes;
  ordered_json codes = ordered_json::array();
  for (auto c : r.confusion.class_codes) codes.push_back(c.code());
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < r.confusion.size(); ++k) row.push_back(r.confusion.at(i, k));
    rows.push_back(row);
  }
  j["confusion"] = {{"class_codes", codes}, {"counts", rows}};
  j["model_spec"] = r.model_spec.empty() ? ordered_json() : ordered_json::parse(r.model_spec);
  j["preprocess_spec"] = r.preprocess_spec;
  return j.dump(2) + "\n";
}

}  // namespace mhfit
