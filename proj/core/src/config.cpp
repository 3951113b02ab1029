#include "mhfit/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "format.hpp"
#include "mhfit/error.hpp"

namespace mhfit {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* type) {
  throw Error(ErrorKind::InvalidSpec, "config: '" + std::string(key) + "' = '" +
                                          std::string(value) + "' is not a valid " + type);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, const char* type) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, type);
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Parse,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

std::int64_t KeyValueConfig::get_int(std::string_view key, std::int64_t fallback) const {
  auto v = get(key);
  return v ? parse_number<std::int64_t>(key, *v, "integer") : fallback;
}

std::uint64_t KeyValueConfig::get_uint(std::string_view key, std::uint64_t fallback) const {
  auto v = get(key);
  return v ? parse_number<std::uint64_t>(key, *v, "non-negative integer") : fallback;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  return v ? parse_number<double>(key, *v, "number") : fallback;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  bad_value(key, *v, "boolean");
}

std::vector<std::string> KeyValueConfig::get_list(std::string_view key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::string_view rest = *v;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return out;
}

std::string KeyValueConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

PreprocessSpec preprocess_from_config(const KeyValueConfig& cfg) {
  PreprocessSpec spec;
  if (auto kind = cfg.get("filter.kind")) spec.filter.kind = parse_filter_kind(*kind);
  spec.filter.window = cfg.get_uint("filter.window", spec.filter.window);
  spec.alignment.shift = cfg.get_int("align.shift", spec.alignment.shift);
  spec.alignment.trim_radius = cfg.get_uint("align.trim_radius", spec.alignment.trim_radius);
  spec.drop_null = cfg.get_bool("drop_null", spec.drop_null);
  if (cfg.get_bool("window.enabled", false)) {
    WindowSpec w;
    w.length = cfg.get_uint("window.length", w.length);
    w.stride = cfg.get_uint("window.stride", w.stride);
    spec.windows = w;
  }
  if (auto mode = cfg.get("split.mode")) spec.split.mode = parse_split_mode(*mode);
  spec.split.train_fraction = cfg.get_double("split.train_fraction", spec.split.train_fraction);
  spec.split.seed = cfg.get_uint("split.seed", spec.split.seed);
  spec.split.validate();
  return spec;
}

void preprocess_to_config(const PreprocessSpec& spec, KeyValueConfig& cfg) {
  cfg.set("filter.kind", to_string(spec.filter.kind));
  cfg.set("filter.window", std::to_string(spec.filter.window));
  cfg.set("align.shift", std::to_string(spec.alignment.shift));
  cfg.set("align.trim_radius", std::to_string(spec.alignment.trim_radius));
  cfg.set("drop_null", spec.drop_null ? "true" : "false");
  cfg.set("window.enabled", spec.windows ? "true" : "false");
  if (spec.windows) {
    cfg.set("window.length", std::to_string(spec.windows->length));
    cfg.set("window.stride", std::to_string(spec.windows->stride));
  }
  cfg.set("split.mode", to_string(spec.split.mode));
  cfg.set("split.train_fraction", format_double(spec.split.train_fraction));
  cfg.set("split.seed", std::to_string(spec.split.seed));
}

std::string preprocess_to_text(const PreprocessSpec& spec) {
  KeyValueConfig cfg;
  preprocess_to_config(spec, cfg);
  return cfg.to_text();
}

ModelSpec model_spec_from_config(ModelKind kind, const KeyValueConfig& cfg,
                                 std::uint64_t seed) {
  ModelSpec spec = ModelSpec::defaults(kind, seed);
  const std::string p = std::string(to_string(kind)) + ".";
  spec.standardize = cfg.get_bool(p + "standardize", spec.standardize);
  std::visit(
      [&](auto& h) {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, DecisionTreeParams>) {
          h.max_depth = cfg.get_uint(p + "max_depth", h.max_depth);
          h.min_samples_leaf = cfg.get_uint(p + "min_samples_leaf", h.min_samples_leaf);
        } else if constexpr (std::is_same_v<H, RandomForestParams>) {
          h.n_trees = cfg.get_uint(p + "n_trees", h.n_trees);
          h.max_depth = cfg.get_uint(p + "max_depth", h.max_depth);
          h.min_samples_leaf = cfg.get_uint(p + "min_samples_leaf", h.min_samples_leaf);
          h.bootstrap = cfg.get_bool(p + "bootstrap", h.bootstrap);
          h.feature_subsampling = cfg.get_bool(p + "feature_subsampling", h.feature_subsampling);
        } else if constexpr (std::is_same_v<H, NaiveBayesParams>) {
          h.var_smoothing = cfg.get_double(p + "var_smoothing", h.var_smoothing);
        } else if constexpr (std::is_same_v<H, LogisticParams>) {
          h.learning_rate = cfg.get_double(p + "learning_rate", h.learning_rate);
          h.epochs = cfg.get_uint(p + "epochs", h.epochs);
          h.l2 = cfg.get_double(p + "l2", h.l2);
          h.grad_tolerance = cfg.get_double(p + "grad_tolerance", h.grad_tolerance);
        } else {
          h.n_rounds = cfg.get_uint(p + "n_rounds", h.n_rounds);
          h.max_depth = cfg.get_uint(p + "max_depth", h.max_depth);
          h.learning_rate = cfg.get_double(p + "learning_rate", h.learning_rate);
          h.lambda = cfg.get_double(p + "lambda", h.lambda);
          h.gamma = cfg.get_double(p + "gamma", h.gamma);
          h.min_child_hessian = cfg.get_double(p + "min_child_hessian", h.min_child_hessian);
        }
      },
      spec.params);
  spec.validate();
  return spec;
}

ColumnMap column_map_from_text(std::string_view text) {
  text = trim(text);
  if (text == "mhealth") return ColumnMap::mhealth_default();
  auto parse_size = [&](std::string_view s) {
    return parse_number<std::size_t>("columns", trim(s), "column index");
  };
  if (text.starts_with("identity:")) return ColumnMap::identity(parse_size(text.substr(9)));
  if (text.starts_with("cols:")) {
    // cols:<source_count>:<f0,f1,...>:<label>
    auto rest = text.substr(5);
    const auto a = rest.find(':');
    const auto b = rest.rfind(':');
    if (a == std::string_view::npos || a == b) {
      throw Error(ErrorKind::InvalidSpec, "column map: expected cols:<n>:<features>:<label>");
    }
    ColumnMap map;
    map.source_column_count = parse_size(rest.substr(0, a));
    map.label_column = parse_size(rest.substr(b + 1));
    auto feats = rest.substr(a + 1, b - a - 1);
    while (!feats.empty()) {
      const auto comma = feats.find(',');
      const auto col = parse_size(feats.substr(0, comma));
      map.feature_columns.push_back(col);
      map.channel_names.push_back("col" + std::to_string(col));
      feats = comma == std::string_view::npos ? std::string_view{} : feats.substr(comma + 1);
    }
    map.validate();
    return map;
  }
  throw Error(ErrorKind::InvalidSpec, "unknown column map '" + std::string(text) + "'");
}

}  // namespace mhfit
