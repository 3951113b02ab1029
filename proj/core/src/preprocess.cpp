#include "mhfit/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "mhfit/error.hpp"
#include "mhfit/rng.hpp"

namespace mhfit {

void FilterSpec::validate(std::size_t n_rows) const {
  if (kind == FilterKind::None) return;
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidSpec, "filter window must be odd and >= 1");
  }
  if (window > n_rows) {
    throw Error(ErrorKind::InvalidSpec,
                "filter window " + std::to_string(window) +
                    " exceeds dataset length " + std::to_string(n_rows));
  }
}

void LabelAlignmentSpec::validate(std::size_t n_rows) const {
  const auto magnitude = static_cast<std::size_t>(shift < 0 ? -shift : shift);
  if (shift != 0 && magnitude >= n_rows) {
    throw Error(ErrorKind::InvalidSpec,
                "label shift " + std::to_string(shift) +
                    " is not smaller than dataset length");
  }
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidSpec, "train fraction must lie in (0, 1)");
  }
}

void WindowSpec::validate(std::size_t n_rows) const {
  if (length == 0 || stride == 0) {
    throw Error(ErrorKind::InvalidSpec, "window length and stride must be >= 1");
  }
  if (stride > length) {
    throw Error(ErrorKind::InvalidSpec, "window stride exceeds window length");
  }
  if (length > n_rows) {
    throw Error(ErrorKind::InvalidSpec, "window length exceeds dataset length");
  }
}

// -- filtering ---------------------------------------------------------------

namespace {

void smooth_run(const LabeledDataset& ds, std::size_t begin, std::size_t end,
                const FilterSpec& spec, std::vector<double>& out) {
  const std::size_t d = ds.n_channels();
  const auto half = static_cast<std::ptrdiff_t>(spec.window / 2);
  const auto lo = static_cast<std::ptrdiff_t>(begin);
  const auto hi = static_cast<std::ptrdiff_t>(end) - 1;
  std::vector<double> buf(spec.window);

  for (std::size_t c = 0; c < d; ++c) {
    for (auto i = lo; i <= hi; ++i) {
      for (std::ptrdiff_t k = -half; k <= half; ++k) {
        const auto j = std::clamp(i + k, lo, hi);
        buf[static_cast<std::size_t>(k + half)] =
            ds.at(static_cast<std::size_t>(j), c);
      }
      double y;
      if (spec.kind == FilterKind::MovingAverage) {
        double sum = 0.0;
        for (double v : buf) sum += v;
        y = sum / static_cast<double>(spec.window);
      } else {
        auto mid = buf.begin() + half;
        std::nth_element(buf.begin(), mid, buf.end());
        y = *mid;
      }
      out[static_cast<std::size_t>(i) * d + c] = y;
    }
  }
}

}  // namespace

LabeledDataset filter_signals(const LabeledDataset& ds, const FilterSpec& spec) {
  spec.validate(ds.n_rows());
  if (spec.kind == FilterKind::None || spec.window == 1) return ds;

  std::vector<double> out(ds.values().begin(), ds.values().end());
  for (auto [begin, end] : ds.subject_runs()) smooth_run(ds, begin, end, spec, out);
  return ds.with_values(std::move(out));
}

// -- label alignment ---------------------------------------------------------

namespace {

std::vector<ActivityLabel> shift_and_trim(std::span<const ActivityLabel> in,
                                          const LabelAlignmentSpec& spec) {
  const auto n = static_cast<std::int64_t>(in.size());
  std::vector<ActivityLabel> shifted(in.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t src = i + spec.shift;
    if (src >= 0 && src < n) shifted[static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(src)];
  }
  if (spec.trim_radius == 0) return shifted;

  std::vector<ActivityLabel> out = shifted;
  const auto r = static_cast<std::int64_t>(spec.trim_radius);
  for (std::int64_t i = 1; i < n; ++i) {
    if (shifted[static_cast<std::size_t>(i)] == shifted[static_cast<std::size_t>(i - 1)]) continue;
    const std::int64_t lo = std::max<std::int64_t>(0, i - r);
    const std::int64_t hi = std::min<std::int64_t>(n, i + r);
    for (std::int64_t j = lo; j < hi; ++j) out[static_cast<std::size_t>(j)] = ActivityLabel{};
  }
  return out;
}

}  // namespace

LabeledDataset align_labels(const LabeledDataset& ds,
                            const LabelAlignmentSpec& spec) {
  spec.validate(ds.n_rows());
  if (spec.shift == 0 && spec.trim_radius == 0) return ds;

  std::vector<ActivityLabel> labels;
  labels.reserve(ds.n_rows());
  const std::span<const ActivityLabel> all(ds.labels());
  for (auto [begin, end] : ds.subject_runs()) {
    auto part = shift_and_trim(all.subspan(begin, end - begin), spec);
    labels.insert(labels.end(), part.begin(), part.end());
  }
  return ds.with_labels(std::move(labels));
}

std::size_t count_vanishing_segments(const LabeledDataset& ds,
                                     const LabelAlignmentSpec& spec) {
  const auto after = align_labels(ds, LabelAlignmentSpec{spec.shift, 0});
  const auto trimmed = align_labels(ds, spec);
  std::size_t vanished = 0;
  for (auto [begin, end] : ds.subject_runs()) {
    std::size_t i = begin;
    while (i < end) {
      std::size_t j = i;
      while (j < end && after.labels()[j] == after.labels()[i]) ++j;
      if (!after.labels()[i].is_null()) {
        bool survives = false;
        for (std::size_t k = i; k < j && !survives; ++k) {
          survives = !trimmed.labels()[k].is_null();
        }
        if (!survives) ++vanished;
      }
      i = j;
    }
  }
  return vanished;
}

LabeledDataset drop_null_class(const LabeledDataset& ds) {
  std::vector<std::size_t> keep;
  keep.reserve(ds.n_rows());
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    if (!ds.labels()[i].is_null()) keep.push_back(i);
  }
  if (keep.empty()) {
    throw Error(ErrorKind::EmptyAfterFilter,
                "no labeled rows remain after dropping the null class");
  }
  if (keep.size() == ds.n_rows()) return ds;
  return ds.select_rows(keep);
}

// -- windows -----------------------------------------------------------------

LabeledDataset extract_windows(const LabeledDataset& ds, const WindowSpec& spec) {
  spec.validate(ds.n_rows());
  const std::size_t d = ds.n_channels();

  std::vector<std::string> names;
  for (const auto& ch : ds.channel_names()) {
    for (const char* stat : {"_mean", "_std", "_min", "_max"}) names.push_back(ch + stat);
  }

  std::vector<double> values;
  std::vector<ActivityLabel> labels;
  std::vector<SubjectId> subjects;
  for (std::size_t s = 0; s + spec.length <= ds.n_rows(); s += spec.stride) {
    const std::size_t e = s + spec.length;
    bool uniform = true;
    for (std::size_t i = s + 1; i < e && uniform; ++i) {
      uniform = ds.labels()[i] == ds.labels()[s] &&
                ds.subjects()[i] == ds.subjects()[s];
    }
    if (!uniform) continue;

    for (std::size_t c = 0; c < d; ++c) {
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = s; i < e; ++i) {
        const double v = ds.at(i, c);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / static_cast<double>(spec.length);
      double ss = 0.0;
      for (std::size_t i = s; i < e; ++i) {
        const double dv = ds.at(i, c) - mean;
        ss += dv * dv;
      }
      values.insert(values.end(),
                    {mean, std::sqrt(ss / static_cast<double>(spec.length)), lo, hi});
    }
    labels.push_back(ds.labels()[s]);
    subjects.push_back(ds.subjects()[s]);
  }
  if (labels.empty()) {
    throw Error(ErrorKind::NoWindows,
                "no window lies within a single label and subject");
  }
  return LabeledDataset(std::move(names), std::move(values), std::move(labels),
                        std::move(subjects));
}

// -- hold-out split ----------------------------------------------------------

std::size_t stratified_train_count(std::size_t class_rows, double fraction) {
  auto n = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(class_rows) + 0.5));
  if (class_rows >= 2) {
    if (n >= class_rows) n = class_rows - 1;
    if (n == 0) n = 1;
  }
  return n;
}

namespace {

void stratified_rows(const LabeledDataset& ds, const SplitSpec& spec,
                     std::vector<std::size_t>& train,
                     std::vector<std::size_t>& test) {
  std::array<std::vector<std::size_t>, kActivityCodeCount> by_class;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    by_class[ds.labels()[i].code()].push_back(i);
  }
  Rng rng(spec.seed);
  std::vector<bool> in_train(ds.n_rows(), false);
  for (int code = 0; code < kActivityCodeCount; ++code) {
    auto& rows = by_class[static_cast<std::size_t>(code)];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw Error(ErrorKind::Precondition,
                  "stratified split: class " + std::to_string(code) +
                      " has fewer than 2 rows");
    }
    const std::size_t n_train = stratified_train_count(rows.size(), spec.train_fraction);
    rng.shuffle(rows.begin(), rows.end());
    for (std::size_t k = 0; k < n_train; ++k) in_train[rows[k]] = true;
  }
  for (std::size_t i = 0; i < ds.n_rows(); ++i) (in_train[i] ? train : test).push_back(i);
}

void subject_rows(const LabeledDataset& ds, const SplitSpec& spec,
                  std::vector<std::size_t>& train,
                  std::vector<std::size_t>& test) {
  std::map<SubjectId, std::size_t> counts;
  for (auto s : ds.subjects()) ++counts[s];
  if (counts.size() < 2) {
    throw Error(ErrorKind::Precondition,
                "subject split needs at least 2 subjects");
  }
  std::vector<SubjectId> ids;
  std::vector<std::size_t> sizes;
  for (auto [id, n] : counts) {
    ids.push_back(id);
    sizes.push_back(n);
  }
  const double target = spec.train_fraction * static_cast<double>(ds.n_rows());

  std::vector<bool> chosen(ids.size(), false);
  if (ids.size() <= 20) {
    const std::uint32_t full = (1u << ids.size()) - 1;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      std::size_t rows = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (mask & (1u << k)) rows += sizes[k];
      }
      const double err = std::abs(static_cast<double>(rows) - target);
      if (err < best) {
        best = err;
        best_mask = mask;
      }
    }
    for (std::size_t k = 0; k < ids.size(); ++k) chosen[k] = (best_mask >> k) & 1u;
  } else {
    std::vector<std::size_t> order(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    Rng rng(spec.seed);
    rng.shuffle(order.begin(), order.end());
    std::size_t rows = 0;
    for (std::size_t k : order) {
      const double now = std::abs(static_cast<double>(rows) - target);
      const double next = std::abs(static_cast<double>(rows + sizes[k]) - target);
      if (next < now) {
        chosen[k] = true;
        rows += sizes[k];
      }
    }
    // Never leave a side empty.
    if (std::none_of(chosen.begin(), chosen.end(), [](bool b) { return b; })) {
      chosen[order.front()] = true;
    }
    if (std::all_of(chosen.begin(), chosen.end(), [](bool b) { return b; })) {
      chosen[order.back()] = false;
    }
  }

  std::map<SubjectId, bool> to_train;
  for (std::size_t k = 0; k < ids.size(); ++k) to_train[ids[k]] = chosen[k];
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    (to_train[ds.subjects()[i]] ? train : test).push_back(i);
  }
}

}  // namespace

HoldoutSplit holdout_split(const LabeledDataset& ds, const SplitSpec& spec) {
  spec.validate();
  HoldoutSplit out;
  if (spec.mode == SplitMode::StratifiedRandom) {
    stratified_rows(ds, spec, out.train_rows, out.test_rows);
  } else {
    subject_rows(ds, spec, out.train_rows, out.test_rows);
  }
  if (out.train_rows.empty() || out.test_rows.empty()) {
    throw Error(ErrorKind::Precondition,
                "hold-out split leaves the train or test side empty");
  }
  out.train = ds.select_rows(out.train_rows);
  out.test = ds.select_rows(out.test_rows);
  return out;
}

// -- standardization ---------------------------------------------------------

StandardizationParams fit_standardization(const LabeledDataset& train) {
  if (train.empty()) {
    throw Error(ErrorKind::EmptyInput, "standardize: empty training set");
  }
  const std::size_t d = train.n_channels();
  const auto n = static_cast<double>(train.n_rows());
  StandardizationParams p;
  p.mean.assign(d, 0.0);
  p.scale.assign(d, 0.0);
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) p.mean[c] += train.at(r, c);
  }
  for (auto& m : p.mean) m /= n;
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = train.at(r, c) - p.mean[c];
      p.scale[c] += dv * dv;
    }
  }
  for (auto& s : p.scale) s = std::max(std::sqrt(s / n), kStdFloor);
  return p;
}

void StandardizationParams::apply_inplace(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
}

LabeledDataset StandardizationParams::apply(const LabeledDataset& ds) const {
  if (ds.n_channels() != mean.size()) {
    throw Error(ErrorKind::Dimension, "standardization: channel count mismatch");
  }
  std::vector<double> values(ds.values().begin(), ds.values().end());
  const std::size_t d = ds.n_channels();
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    apply_inplace(std::span<double>(values.data() + r * d, d));
  }
  return ds.with_values(std::move(values));
}

StandardizedPair standardize(const LabeledDataset& train,
                             const LabeledDataset& test) {
  auto params = fit_standardization(train);
  return {params.apply(train), params.apply(test), std::move(params)};
}

// -- chain -------------------------------------------------------------------

LabeledDataset prepare(const LabeledDataset& raw, const PreprocessSpec& spec) {
  auto ds = filter_signals(raw, spec.filter);
  ds = align_labels(ds, spec.alignment);
  if (spec.windows) ds = extract_windows(ds, *spec.windows);
  if (spec.drop_null) ds = drop_null_class(ds);
  return ds;
}

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::MovingAverage: return "mavg";
    case FilterKind::Median: return "median";
    case FilterKind::None: return "none";
  }
  return "none";
}

std::string to_string(SplitMode mode) {
  return mode == SplitMode::StratifiedRandom ? "stratified" : "subject";
}

FilterKind parse_filter_kind(std::string_view text) {
  if (text == "mavg" || text == "moving_average") return FilterKind::MovingAverage;
  if (text == "median") return FilterKind::Median;
  if (text == "none") return FilterKind::None;
  throw Error(ErrorKind::InvalidSpec, "unknown filter kind '" + std::string(text) + "'");
}

SplitMode parse_split_mode(std::string_view text) {
  if (text == "stratified" || text == "stratified_random") return SplitMode::StratifiedRandom;
  if (text == "subject" || text == "subject_holdout") return SplitMode::SubjectHoldout;
  throw Error(ErrorKind::InvalidSpec, "unknown split mode '" + std::string(text) + "'");
}

}  // namespace mhfit
