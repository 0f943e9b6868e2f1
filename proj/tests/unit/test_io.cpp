#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "stochlog/io.hpp"

using namespace stochlog;

namespace {

std::string expect_parse_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e.location();
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return {};
}

}  // namespace

TEST(ParseMatrix, RealAndComplexEntries) {
  const auto m = parse_matrix(R"({"rows":2,"cols":2,"data":[1, [2, -3], -4.5, [0, 1]]})");
  EXPECT_EQ(m, ComplexMatrix::from_rows({{1, cplx(2, -3)}, {-4.5, cplx(0, 1)}}));
}

TEST(ParseSystem, FullDocument) {
  const auto f = parse_system(R"({
    "name": "case c",
    "source": "hand typed",
    "A": {"rows": 2, "cols": 2, "data": [-100, 20, 0, -200]},
    "B": [{"rows": 2, "cols": 2, "data": [5, 2, 0, 6]}]
  })");
  EXPECT_EQ(f.name, "case c");
  EXPECT_EQ(f.source, "hand typed");
  EXPECT_EQ(f.system.channels(), 1u);
  EXPECT_EQ(f.system.drift()(0, 1), cplx(20, 0));
}

TEST(ParseSystem, MissingOrEmptyDiffusions) {
  EXPECT_TRUE(parse_system(R"({"A":{"rows":1,"cols":1,"data":[1]}})").system.deterministic());
  EXPECT_TRUE(parse_system(R"({"A":{"rows":1,"cols":1,"data":[1]},"B":[]})").system.deterministic());
}

TEST(ParseSystem, FieldLocatedDiagnostics) {
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[1]},
    "B":[{"rows":1,"cols":1,"data":[1]},{"rows":2,"cols":2,"data":[1,2,3,"x"]}]})"),
            "B[1].data[3]");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":2,"cols":2,"data":[1,2,3]}})"), "A.data");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":0,"cols":2,"data":[]}})"), "A.rows");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[[1,2,3]]}})"), "A.data[0]");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[[1,"i"]]}})"), "A.data[0][1]");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[1],"extra":0}})"), "A");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[1]},"C":1})"), "");
  EXPECT_EQ(expect_parse_error(R"({"B":[]})"), "");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":2,"data":[1,2]}})"), "A");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[1]},
    "B":[{"rows":2,"cols":2,"data":[1,2,3,4]}]})"),
            "B[0]");
  EXPECT_EQ(expect_parse_error(R"({"A":{"rows":1,"cols":1,"data":[1]},"name":3})"), "name");
}

TEST(ParseSystem, SyntaxErrorsCarryLineAndColumn) {
  EXPECT_EQ(expect_parse_error("{\n  \"A\": {\"rows\": 1,,}\n}"), "line 2, column 19");
  EXPECT_EQ(expect_parse_error(""), "line 1, column 1");
}

TEST(ParseSystem, ErrorsAreInputErrors) {
  EXPECT_THROW(parse_system("[1,2]"), InputError);
  EXPECT_THROW(parse_matrix(R"({"rows":1,"cols":1,"data":[1e999]})"), InputError);
}

TEST(LoadSystem, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "stochlog_io_roundtrip.json").string();
  const SdeSystem sys(ComplexMatrix::from_rows({{cplx(-1, 2), 3}, {0, -4}}),
                      {ComplexMatrix::identity(2), ComplexMatrix::from_rows({{0, 1}, {-1, 0}})});
  {
    std::ofstream out(path);
    out << system_to_json(sys, "roundtrip").dump(2);
  }
  const auto f = load_system(path);
  EXPECT_EQ(f.name, "roundtrip");
  EXPECT_EQ(f.system.drift(), sys.drift());
  ASSERT_EQ(f.system.channels(), 2u);
  EXPECT_EQ(f.system.diffusions()[1], sys.diffusions()[1]);
  std::remove(path.c_str());
}

TEST(LoadSystem, LocationIncludesPath) {
  const auto path =
      (std::filesystem::temp_directory_path() / "stochlog_io_bad.json").string();
  {
    std::ofstream out(path);
    out << R"({"A":{"rows":1,"cols":1,"data":[true]}})";
  }
  try {
    load_system(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), path + ": A.data[0]");
    EXPECT_EQ(e.message(), "expected a number or a [re, im] pair");
  }
  std::remove(path.c_str());
  EXPECT_THROW(load_system(path), ParseError);
}
