#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "mhfit/error.hpp"
#include "mhfit/ingest.hpp"

using namespace mhfit;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mhfit::Error");
  return ErrorKind::Usage;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string identity_line(int label, double base = 0.0) {
  std::string line;
  for (int i = 0; i < 12; ++i) line += std::to_string(base + i) + " ";
  return line + std::to_string(label);
}

}  // namespace

TEST_CASE("activity labels") {
  CHECK(ActivityLabel(0).is_null());
  CHECK(ActivityLabel(1).name() == "standing still");
  CHECK(ActivityLabel(12).name() == "jump front & back");
  CHECK(kind_of([] { ActivityLabel(13); }) == ErrorKind::LabelRange);
  CHECK(kind_of([] { ActivityLabel(-1); }) == ErrorKind::LabelRange);
}

TEST_CASE("column maps validate") {
  const auto m = ColumnMap::mhealth_default();
  CHECK(m.source_column_count == 24);
  CHECK(m.feature_columns.size() == 12);
  CHECK(m.label_column == 23);
  CHECK_NOTHROW(m.validate());

  ColumnMap bad = ColumnMap::identity(3);
  bad.feature_columns = {0, 1, 1};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidSpec);
  bad.feature_columns = {0, 1, 3};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidSpec);
  bad.feature_columns = {0, 1, 5};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("parse_log_line on the identity map") {
  const auto map = ColumnMap::identity(12);
  const auto rec =
      parse_log_line("1.0 2.0 3.0 0.5 0.5 0.5 9.8 0.0 0.0 0.1 0.1 0.1 4", map);
  CHECK(rec.features == std::vector<double>{1.0, 2.0, 3.0, 0.5, 0.5, 0.5, 9.8, 0.0, 0.0, 0.1, 0.1, 0.1});
  CHECK(rec.label.code() == 4);

  SUBCASE("tabs, repeated spaces and CRLF") {
    const auto r = parse_log_line("1\t2  3 4 5 6 7 8 9 10 11 12\t4.0\r", map);
    CHECK(r.features.back() == 12.0);
    CHECK(r.label.code() == 4);
  }
  SUBCASE("malformed token is located") {
    const auto line = "1.0 2.0 x 0.5 0.5 0.5 9.8 0.0 0.0 0.1 0.1 0.1 4";
    CHECK(kind_of([&] { parse_log_line(line, map, 7); }) == ErrorKind::Parse);
    const auto msg = message_of([&] { parse_log_line(line, map, 7); });
    CHECK(msg.find("token 3") != std::string::npos);
    CHECK(msg.find("line 7") != std::string::npos);
  }
  SUBCASE("label range") {
    CHECK(kind_of([&] { parse_log_line(identity_line(13), map); }) == ErrorKind::LabelRange);
    CHECK(kind_of([&] { parse_log_line("0 0 0 0 0 0 0 0 0 0 0 0 4.5", map); }) ==
          ErrorKind::LabelRange);
    CHECK(kind_of([&] { parse_log_line("0 0 0 0 0 0 0 0 0 0 0 0 -1", map); }) ==
          ErrorKind::LabelRange);
  }
  SUBCASE("column count") {
    CHECK(kind_of([&] { parse_log_line("1 2 3 4", map); }) == ErrorKind::Schema);
    CHECK(kind_of([&] { parse_log_line(identity_line(1) + " 5", map); }) == ErrorKind::Schema);
  }
  SUBCASE("non-finite values are malformed") {
    CHECK(kind_of([&] { parse_log_line("nan 0 0 0 0 0 0 0 0 0 0 0 1", map); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { parse_log_line("inf 0 0 0 0 0 0 0 0 0 0 0 1", map); }) == ErrorKind::Parse);
  }
}

TEST_CASE("parse_log_line on the MHEALTH layout") {
  std::string line;
  for (int i = 0; i < 23; ++i) line += std::to_string(i) + " ";
  line += "6";
  const auto rec = parse_log_line(line, ColumnMap::mhealth_default());
  CHECK(rec.features == std::vector<double>{0, 1, 2, 5, 6, 7, 14, 15, 16, 8, 9, 10});
  CHECK(rec.label.code() == 6);
}

TEST_CASE("load_dataset concatenates in file order") {
  fixtures::TempDir dir("ingest");
  std::vector<std::string> a, b;
  for (int i = 0; i < 100; ++i) a.push_back(identity_line(1 + i % 3, i));
  for (int i = 0; i < 50; ++i) b.push_back(identity_line(5, 1000 + i));
  fixtures::write_lines(dir / "a.log", a);
  fixtures::write_lines(dir / "b.log", b);
  fixtures::write_lines(dir / "empty.log", {});

  const std::vector<std::filesystem::path> paths = {dir / "a.log", dir / "empty.log", dir / "b.log"};
  const std::vector<SubjectId> ids = {3, 9, 7};
  const auto ds = load_dataset(paths, ColumnMap::identity(12), ids);
  REQUIRE(ds.n_rows() == 150);
  CHECK(ds.n_channels() == 12);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(ds.subjects()[i] == 3);
    CHECK(ds.at(i, 0) == static_cast<double>(i));
  }
  for (std::size_t i = 100; i < 150; ++i) {
    CHECK(ds.subjects()[i] == 7);
    CHECK(ds.at(i, 0) == 1000.0 + static_cast<double>(i - 100));
  }

  SUBCASE("errors name file and line") {
    fixtures::write_lines(dir / "bad.log", {identity_line(1), "1 2 oops"});
    const std::vector<std::filesystem::path> bad = {dir / "bad.log"};
    const std::vector<SubjectId> one = {1};
    const auto msg = message_of([&] { load_dataset(bad, ColumnMap::identity(12), one); });
    CHECK(msg.find("bad.log") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  SUBCASE("preconditions") {
    CHECK(kind_of([&] { load_dataset({}, ColumnMap::identity(12), {}); }) == ErrorKind::EmptyInput);
    const std::vector<SubjectId> one = {1};
    CHECK(kind_of([&] { load_dataset(paths, ColumnMap::identity(12), one); }) ==
          ErrorKind::Precondition);
    const std::vector<std::filesystem::path> missing = {dir / "nope.log"};
    CHECK(kind_of([&] { load_dataset(missing, ColumnMap::identity(12), one); }) == ErrorKind::Io);
  }
}

TEST_CASE("canonical round trip") {
  fixtures::TempDir dir("canon");
  Rng rng(5);
  const auto ds = fixtures::random_dataset(rng, 37, 4, 5, 3);
  save_canonical(ds, dir / "d.mhd");
  const auto back = load_canonical(dir / "d.mhd");
  CHECK(back == ds);

  SUBCASE("empty dataset") {
    const LabeledDataset empty(fixtures::channel_names(3), {}, {}, {});
    CHECK(decode_canonical(encode_canonical(empty)) == empty);
  }
  SUBCASE("extreme values survive bit-exactly") {
    const auto odd = fixtures::make_dataset({{-0.0, 1e-308, 1.7976931348623157e308, 0.1}}, {12});
    const auto again = decode_canonical(encode_canonical(odd));
    CHECK(again == odd);
    CHECK(std::signbit(again.at(0, 0)));
  }
  SUBCASE("truncation, corruption and version are distinct") {
    auto bytes = encode_canonical(ds);
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 2));
    CHECK(kind_of([&] { decode_canonical(cut); }) == ErrorKind::Truncated);
    const std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 5);
    CHECK(kind_of([&] { decode_canonical(tiny); }) == ErrorKind::Truncated);

    auto flipped = bytes;
    flipped[bytes.size() - 20] ^= 0x40;
    CHECK(kind_of([&] { decode_canonical(flipped); }) == ErrorKind::Checksum);

    auto versioned = bytes;
    versioned[8] = 99;
    CHECK(kind_of([&] { decode_canonical(versioned); }) == ErrorKind::VersionMismatch);

    auto magic = bytes;
    magic[0] = 'X';
    CHECK(kind_of([&] { decode_canonical(magic); }) == ErrorKind::Corrupt);
  }
}

TEST_CASE("csv export") {
  fixtures::TempDir dir("csv");
  const auto ds = fixtures::make_dataset({{1.5, -2.0}, {0.1, 3.0}}, {4, 0}, {2, 2});
  export_csv(ds, dir / "d.csv");
  std::ifstream in(dir / "d.csv");
  std::string header, r1, r2;
  std::getline(in, header);
  std::getline(in, r1);
  std::getline(in, r2);
  CHECK(header == "f0,f1,label,subject");
  CHECK(r1 == "1.5,-2,4,2");
  CHECK(r2 == "0.1,3,0,2");
}

TEST_CASE("dataset helpers") {
  const auto ds = fixtures::make_dataset({{1}, {2}, {3}, {4}}, {2, 1, 2, 3}, {1, 1, 2, 2});
  CHECK(ds.label_set() == std::vector<ActivityLabel>{ActivityLabel(1), ActivityLabel(2), ActivityLabel(3)});
  const auto runs = ds.subject_runs();
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(runs[1] == std::pair<std::size_t, std::size_t>{2, 4});
  const std::vector<std::size_t> pick = {3, 0};
  const auto sub = ds.select_rows(pick);
  CHECK(sub.at(0, 0) == 4.0);
  CHECK(sub.labels()[1].code() == 2);
  CHECK_THROWS_AS(LabeledDataset(fixtures::channel_names(2), {1.0}, {ActivityLabel(1)}, {1}), Error);
  const std::vector<LabeledDataset> parts = {ds, ds};
  CHECK(concat(parts).n_rows() == 8);
}
