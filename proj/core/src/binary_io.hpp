#pragma once

// Little-endian byte encoding shared by the dataset and model file formats.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mhfit::io {

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

class ByteWriter {
 public:
  void put_bytes(std::span<const std::uint8_t> bytes);
  void put_u8(std::uint8_t v) { buf_.push_back(v); }
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_i32(std::int32_t v) { put_u32(static_cast<std::uint32_t>(v)); }
  void put_f64(double v);
  void put_string(std::string_view s);

  /// Appends the FNV-1a checksum of everything written so far.
  void seal();

  const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked cursor; running past the end raises Error{Truncated}.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : buf_(bytes) {}

  void expect_magic(std::string_view magic, std::string_view what);
  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  std::int32_t get_i32() { return static_cast<std::int32_t>(get_u32()); }
  double get_f64();
  std::string get_string();
  void require(std::size_t n) const;

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return buf_.size() - pos_; }

  /// Consumes the trailing checksum and verifies it against everything
  /// before it; also rejects trailing garbage.
  void verify_seal(std::string_view what);

 private:
  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

}  // namespace mhfit::io
