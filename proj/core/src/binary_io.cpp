#include "binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mhfit/error.hpp"

namespace mhfit::io {

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ByteWriter::put_bytes(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_string(std::string_view s) {
  put_u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::seal() { put_u64(fnv1a64(buf_)); }

void ByteWriter::write_file(const std::filesystem::path& path) const {
  io::write_file(path, buf_);
}

void ByteReader::require(std::size_t n) const {
  if (n > remaining()) {
    throw Error(ErrorKind::Truncated,
                "file truncated at byte " + std::to_string(pos_) + " (needed " +
                    std::to_string(n) + " more bytes)");
  }
}

void ByteReader::expect_magic(std::string_view magic, std::string_view what) {
  if (remaining() < magic.size() ||
      std::memcmp(buf_.data() + pos_, magic.data(), magic.size()) != 0) {
    if (remaining() < magic.size() &&
        std::memcmp(buf_.data() + pos_, magic.data(), remaining()) == 0) {
      throw Error(ErrorKind::Truncated,
                  std::string(what) + ": file truncated inside header");
    }
    throw Error(ErrorKind::Corrupt,
                std::string(what) + ": bad magic, not a " + std::string(what));
  }
  pos_ += magic.size();
}

std::uint8_t ByteReader::get_u8() {
  require(1);
  return buf_[pos_++];
}

std::uint32_t ByteReader::get_u32() {
  require(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{buf_[pos_ + i]} << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  require(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf_[pos_ + i]} << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string ByteReader::get_string() {
  const std::uint32_t n = get_u32();
  require(n);
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

void ByteReader::verify_seal(std::string_view what) {
  const std::size_t body = pos_;
  const std::uint64_t stored = get_u64();
  if (remaining() != 0) {
    throw Error(ErrorKind::Corrupt,
                std::string(what) + ": unexpected trailing bytes");
  }
  if (stored != fnv1a64(buf_.first(body))) {
    throw Error(ErrorKind::Checksum, std::string(what) + ": checksum mismatch");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace mhfit::io
