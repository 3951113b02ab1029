#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "mhfit/dataset.hpp"

namespace mhfit {

/// Parses one whitespace-separated log line. `line_number` (1-based) is only
/// used to locate errors. Throws Error{Parse|LabelRange|Schema}.
SampleRecord parse_log_line(std::string_view line, const ColumnMap& map,
                            std::size_t line_number = 0);

/// Reads one subject log per path, in order; each path's rows are tagged with
/// the matching subject id. Files are parsed concurrently but rows keep the
/// declared file order.
LabeledDataset load_dataset(std::span<const std::filesystem::path> paths,
                            const ColumnMap& map,
                            std::span<const SubjectId> subject_ids);

/// Canonical binary form:
///   "MHFITDS\0" | u32 version | u32 n_channels | n_channels x (u32 len, bytes)
///   | u64 n_rows | n_rows*n_channels f64 (row-major) | n_rows u8 labels
///   | n_rows u8 subjects | u64 FNV-1a of all preceding bytes.
/// All integers and floats little-endian.
inline constexpr std::uint32_t kCanonicalDatasetVersion = 1;

void save_canonical(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset load_canonical(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_canonical(const LabeledDataset& ds);
LabeledDataset decode_canonical(std::span<const std::uint8_t> bytes);

/// CSV with header `<channels...>,label,subject`; values use shortest
/// round-trip formatting.
void export_csv(const LabeledDataset& ds, const std::filesystem::path& path);

}  // namespace mhfit
