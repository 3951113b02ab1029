#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mhfit/dataset.hpp"
#include "mhfit/rng.hpp"

namespace fixtures {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mhfit_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> channel_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

inline mhfit::LabeledDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                          const std::vector<int>& labels,
                                          std::vector<mhfit::SubjectId> subjects = {}) {
  const std::size_t d = rows.empty() ? 1 : rows[0].size();
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  std::vector<mhfit::ActivityLabel> ls;
  for (int l : labels) ls.emplace_back(l);
  if (subjects.empty()) subjects.assign(labels.size(), 1);
  return mhfit::LabeledDataset(channel_names(d), std::move(values), std::move(ls),
                               std::move(subjects));
}

/// Single-channel dataset from a label vector; values are the row index.
inline mhfit::LabeledDataset from_labels(const std::vector<int>& labels) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) rows.push_back({static_cast<double>(i)});
  return make_dataset(rows, labels);
}

inline std::vector<int> codes(const mhfit::LabeledDataset& ds) {
  std::vector<int> out;
  for (auto l : ds.labels()) out.push_back(l.code());
  return out;
}

/// n rows, d standard-normal features, labels in 1..k.
inline mhfit::LabeledDataset random_dataset(mhfit::Rng& rng, std::size_t n, std::size_t d,
                                            int k, int n_subjects = 1) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<int> labels(n);
  std::vector<mhfit::SubjectId> subjects(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i]) v = rng.normal();
    labels[i] = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)));
    subjects[i] = static_cast<mhfit::SubjectId>(
        1 + i * static_cast<std::size_t>(n_subjects) / std::max<std::size_t>(n, 1));
  }
  return make_dataset(rows, labels, subjects);
}

inline void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace fixtures
