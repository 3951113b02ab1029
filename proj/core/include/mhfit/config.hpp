#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhfit/learners.hpp"
#include "mhfit/preprocess.hpp"

namespace mhfit {

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; later assignments override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }
  bool contains(std::string_view key) const { return entries_.find(std::string(key)) != entries_.end(); }
  std::optional<std::string> get(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<std::string> get_list(std::string_view key) const;

  /// Canonical text: sorted `key = value` lines.
  std::string to_text() const;

  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

/// Keys: filter.kind, filter.window, align.shift, align.trim_radius,
/// drop_null, window.enabled, window.length, window.stride, split.mode,
/// split.train_fraction, split.seed.
PreprocessSpec preprocess_from_config(const KeyValueConfig& cfg);
void preprocess_to_config(const PreprocessSpec& spec, KeyValueConfig& cfg);
std::string preprocess_to_text(const PreprocessSpec& spec);

/// Defaults overridden by `<kind>.<param>` keys, e.g. gradient_boost.n_rounds.
ModelSpec model_spec_from_config(ModelKind kind, const KeyValueConfig& cfg,
                                 std::uint64_t seed);

/// "mhealth" or "identity:<n>" or explicit "cols:<src>:<f0,f1,...>:<label>".
ColumnMap column_map_from_text(std::string_view text);

}  // namespace mhfit
