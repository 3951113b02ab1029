#include "mhfit/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <string>

#include "binary_io.hpp"
#include "format.hpp"
#include "mhfit/error.hpp"

namespace mhfit {

namespace {

constexpr std::string_view kDatasetMagic{"MHFITDS\0", 8};

std::string where(std::size_t line_number) {
  return line_number > 0 ? "line " + std::to_string(line_number) + ": " : "";
}

bool is_separator(char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

SampleRecord parse_log_line(std::string_view line, const ColumnMap& map,
                            std::size_t line_number) {
  std::vector<double> columns;
  columns.reserve(map.source_column_count);

  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_separator(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j])) ++j;
    const std::string_view token = line.substr(i, j - i);
    const std::size_t token_index = columns.size() + 1;

    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      throw Error(ErrorKind::Parse,
                  where(line_number) + "malformed token " +
                      std::to_string(token_index) + " '" + std::string(token) +
                      "'");
    }
    columns.push_back(value);
    i = j;
  }

  if (columns.size() != map.source_column_count) {
    throw Error(ErrorKind::Schema,
                where(line_number) + "expected " +
                    std::to_string(map.source_column_count) + " columns, got " +
                    std::to_string(columns.size()));
  }

  const double raw_label = columns[map.label_column];
  const double rounded = std::round(raw_label);
  if (std::abs(raw_label - rounded) > 1e-6) {
    throw Error(ErrorKind::LabelRange,
                where(line_number) + "non-integral label " +
                    format_double(raw_label));
  }
  if (rounded < 0.0 || rounded > kMaxActivityCode) {
    throw Error(ErrorKind::LabelRange,
                where(line_number) + "label " + format_double(rounded) +
                    " outside [0, 12]");
  }

  SampleRecord rec;
  rec.features.reserve(map.feature_columns.size());
  for (std::size_t c : map.feature_columns) rec.features.push_back(columns[c]);
  rec.label = ActivityLabel(static_cast<int>(rounded));
  rec.sample_index = line_number > 0 ? line_number - 1 : 0;
  return rec;
}

namespace {

LabeledDataset load_one(const std::filesystem::path& path, const ColumnMap& map,
                        SubjectId subject) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

  std::vector<double> values;
  std::vector<ActivityLabel> labels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    try {
      SampleRecord rec = parse_log_line(line, map, line_number);
      values.insert(values.end(), rec.features.begin(), rec.features.end());
      labels.push_back(rec.label);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
  }
  std::vector<SubjectId> subjects(labels.size(), subject);
  return LabeledDataset(map.channel_names, std::move(values), std::move(labels),
                        std::move(subjects));
}

}  // namespace

LabeledDataset load_dataset(std::span<const std::filesystem::path> paths,
                            const ColumnMap& map,
                            std::span<const SubjectId> subject_ids) {
  if (paths.empty()) throw Error(ErrorKind::EmptyInput, "no input files given");
  if (paths.size() != subject_ids.size()) {
    throw Error(ErrorKind::Precondition,
                "need exactly one subject id per input file");
  }
  map.validate();
  for (SubjectId s : subject_ids) {
    if (s < 1) throw Error(ErrorKind::Precondition, "subject ids must be >= 1");
  }

  std::vector<std::future<LabeledDataset>> jobs;
  jobs.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, load_one, std::cref(paths[i]),
                              std::cref(map), subject_ids[i]));
  }
  std::vector<LabeledDataset> parts;
  parts.reserve(jobs.size());
  // get() in declared order: the first failing file (in that order) reports.
  for (auto& job : jobs) parts.push_back(job.get());
  return concat(parts);
}

std::vector<std::uint8_t> encode_canonical(const LabeledDataset& ds) {
  io::ByteWriter w;
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(kDatasetMagic.data()),
               kDatasetMagic.size()});
  w.put_u32(kCanonicalDatasetVersion);
  w.put_u32(static_cast<std::uint32_t>(ds.n_channels()));
  for (const auto& name : ds.channel_names()) w.put_string(name);
  w.put_u64(ds.n_rows());
  for (double v : ds.values()) w.put_f64(v);
  for (auto l : ds.labels()) w.put_u8(l.code());
  for (auto s : ds.subjects()) w.put_u8(s);
  w.seal();
  return w.bytes();
}

LabeledDataset decode_canonical(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.expect_magic(kDatasetMagic, "canonical dataset");
  const std::uint32_t version = r.get_u32();
  if (version != kCanonicalDatasetVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "canonical dataset version " + std::to_string(version) +
                    ", expected " + std::to_string(kCanonicalDatasetVersion));
  }
  const std::uint32_t n_channels = r.get_u32();
  std::vector<std::string> channels;
  for (std::uint32_t i = 0; i < n_channels; ++i) channels.push_back(r.get_string());
  const std::uint64_t n_rows = r.get_u64();
  if (n_rows > r.remaining() / (8ULL * n_channels + 2ULL)) {
    throw Error(ErrorKind::Truncated,
                "canonical dataset: file truncated, header declares " +
                    std::to_string(n_rows) + " rows");
  }

  std::vector<double> values(n_rows * n_channels);
  for (auto& v : values) v = r.get_f64();
  std::vector<std::uint8_t> label_codes(n_rows);
  for (auto& l : label_codes) l = r.get_u8();
  std::vector<SubjectId> subjects(n_rows);
  for (auto& s : subjects) s = r.get_u8();
  r.verify_seal("canonical dataset");

  std::vector<ActivityLabel> labels;
  labels.reserve(n_rows);
  for (auto code : label_codes) {
    if (code > kMaxActivityCode) {
      throw Error(ErrorKind::Corrupt, "canonical dataset: label out of range");
    }
    labels.emplace_back(code);
  }
  return LabeledDataset(std::move(channels), std::move(values),
                        std::move(labels), std::move(subjects));
}

void save_canonical(const LabeledDataset& ds, const std::filesystem::path& path) {
  io::write_file(path, encode_canonical(ds));
}

LabeledDataset load_canonical(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_canonical(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void export_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  for (const auto& name : ds.channel_names()) out << name << ',';
  out << "label,subject\n";
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (double v : ds.row(r)) out << format_double(v) << ',';
    out << int{ds.labels()[r].code()} << ',' << int{ds.subjects()[r]} << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace mhfit
