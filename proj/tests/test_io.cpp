#include <gtest/gtest.h>

#include <sstream>

#include "geproci/io.hpp"
#include "geproci/spreads.hpp"

using namespace geproci;

namespace {

std::string fixture(const std::string& name) { return std::string(GEPROCI_FIXTURES) + "/" + name; }

ErrorKind kind_of(const std::string& text, int which) {
  std::istringstream in(text);
  try {
    if (which == 0) parse_point_set(in);
    if (which == 1) parse_spread(in);
    if (which == 2) parse_scheme(in);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::InvalidArgument;
}

TEST(Io, PointSetFixturesRoundTrip) {
  auto Z = read_point_set(fixture("pg3_f7_40pt.txt"));
  EXPECT_EQ(Z.size(), 40u);
  EXPECT_EQ(Z.field->size(), 7u);
  std::istringstream in(format_point_set(Z));
  auto W = parse_point_set(in);
  EXPECT_EQ(W.points, Z.points);
  EXPECT_EQ(W.field->spec(), Z.field->spec());
  EXPECT_EQ(format_point_set(W), format_point_set(Z));
}

TEST(Io, ExtensionFieldPointsRoundTrip) {
  auto Z = enumerate_projective_space(field_of_order(4), 3);
  std::istringstream in(format_point_set(Z));
  auto W = parse_point_set(in);
  EXPECT_EQ(W.points, Z.points);
}

TEST(Io, SpreadFixturesRoundTrip) {
  for (const char* f : {"pg3_f3_mps7.txt", "pg3_f4_regular_spread.txt"}) {
    auto S = read_spread(fixture(f));
    std::istringstream in(format_spread(S));
    auto T = parse_spread(in);
    EXPECT_EQ(T.lines, S.lines) << f;
    EXPECT_EQ(format_spread(T), format_spread(S));
    EXPECT_TRUE(verify_spread(S).clean()) << f;
  }
  EXPECT_EQ(read_spread(fixture("pg3_f3_mps7.txt")).size(), 7u);
  EXPECT_EQ(read_spread(fixture("pg3_f4_regular_spread.txt")).size(), 17u);
}

TEST(Io, SchemeFixturesRoundTrip) {
  for (int ex : {7, 8, 9}) {
    auto S = read_scheme(fixture("example" + std::to_string(ex) + "_scheme.txt"));
    std::istringstream in(format_scheme(S));
    auto T = parse_scheme(in);
    EXPECT_EQ(T.simple, S.simple);
    EXPECT_EQ(T.doubled, S.doubled);
    EXPECT_EQ(format_scheme(T), format_scheme(S));
  }
}

TEST(Io, ParseErrors) {
  EXPECT_EQ(kind_of("", 0), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("field: p=2\n1,0,0,0\n", 0), ErrorKind::ParseError);  // no dim
  EXPECT_EQ(kind_of("field: p=2; dim: 3\n1,0,0\n", 0), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("field: p=2; dim: 3\n1,0,x,0\n", 0), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("field: p=4; dim: 3\n1,0,0,0\n", 0), ErrorKind::NonPrimeModulus);
  EXPECT_EQ(kind_of("field: p=3; dim: 3\n5,0,0,0\n", 0), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("field: p=3; dim: 3\n0,0,0,0\n", 0), ErrorKind::ZeroInput);
  EXPECT_EQ(kind_of("field: p=2\n1,0,0,0 | 1,0,0,0\n", 1), ErrorKind::EqualPoints);
  EXPECT_EQ(kind_of("field: p=2\n1,0,0,0\n", 1), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("field: p=2; dim: 3\ntriple: 1,0,0,0\n", 2), ErrorKind::ParseError);
  EXPECT_THROW(read_point_set(fixture("does_not_exist.txt")), Error);
}

TEST(Io, CommentsAndBlankLinesAreIgnored) {
  std::istringstream in("# header\n\nfield: p=3; dim: 3\n  1,2,0,1  # a point\n\n0,0,0,1\n");
  auto Z = parse_point_set(in);
  EXPECT_EQ(Z.size(), 2u);
}

TEST(Io, JsonCarriesTheVerdictAndCertificate) {
  auto Z = enumerate_projective_space(field_of_order(2), 3);
  CheckOptions o;
  o.mode = Mode::Random;
  o.seed = 3;
  auto v = geproci_check(Z, 3, 5, o);
  auto j = to_json(*Z.field, v);
  EXPECT_EQ(j["verdict"], "geproci");
  EXPECT_EQ(j["mode"], "random");
  EXPECT_EQ(j["degrees"], json({3, 5}));
  EXPECT_EQ(j["length"], 15);
  EXPECT_TRUE(j.contains("failure_bound"));
  ASSERT_FALSE(j["certificates"].empty());
  const auto& c = j["certificates"][0];
  for (const char* k : {"forms", "coprimality", "kernel_dims", "sources", "point", "field"}) EXPECT_TRUE(c.contains(k)) << k;
  EXPECT_TRUE(c["coprimality"]["coprime"].get<bool>());
  EXPECT_TRUE(j.contains("flags"));
  auto back = json::parse(j.dump());
  EXPECT_EQ(back, j);

  auto s = to_json(build_regular_spread(field_of_order(3)));
  EXPECT_EQ(s["size"], 10);
  EXPECT_EQ(s["deficiency"], 0);
  EXPECT_EQ(s["lines"].size(), 10u);
  EXPECT_EQ(to_json(Z)["size"], 15);
}

}  // namespace
