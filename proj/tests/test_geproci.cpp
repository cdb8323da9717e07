#include <gtest/gtest.h>

#include <random>

#include "geproci/io.hpp"
#include "geproci/spreads.hpp"
#include "oracles.hpp"

using namespace geproci;

namespace {

PointSet projective_space(std::uint64_t q) { return enumerate_projective_space(field_of_order(q), 3); }

PointSet minus_line_q2() {
  auto F = field_of_order(2);
  auto L = line_from_rows(*F, {1, 0, 0, 0}, {0, 1, 0, 0});
  return set_difference(projective_space(2), make_point_set(F, 3, line_points(*F, L)));
}

PointSet d4_q3() {
  auto S = read_spread(std::string(GEPROCI_FIXTURES) + "/pg3_f3_mps7.txt");
  return complement_points(S);
}

/// Points of a 2 x 3 grid: two skew lines met by three transversals.
PointSet grid_2x3(std::uint64_t q) {
  auto F = field_of_order(q);
  auto L1 = line_from_rows(*F, {1, 0, 0, 0}, {0, 1, 0, 0});
  auto L2 = line_from_rows(*F, {0, 0, 1, 0}, {0, 0, 0, 1});
  auto a = line_points(*F, L1), b = line_points(*F, L2);
  return make_point_set(F, 3, {a[0], a[1], a[2], b[0], b[1], b[2]});
}

Coords apply(const FiniteField& F, const std::vector<Coords>& M, const Coords& x) {
  Coords y(4, 0);
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = 0; j < 4; ++j) y[i] = F.add(y[i], F.mul(M[i][j], x[j]));
  return y;
}

std::vector<Coords> random_gl4(const FiniteField& F, std::mt19937_64& rng) {
  for (;;) {
    std::vector<Coords> M(4, Coords(4));
    for (auto& r : M)
      for (auto& e : r) e = F.random(rng);
    if (rank(F, std::vector<Row<FiniteField>>(M.begin(), M.end()), 4) == 4) return M;
  }
}

PointSet transform(const PointSet& Z, const std::vector<Coords>& M) {
  std::vector<ProjectivePoint> pts;
  for (const auto& p : Z.points) pts.push_back(normalize_point(*Z.field, apply(*Z.field, M, p.x)));
  return make_point_set(Z.field, Z.dim, pts);
}

GeprociVerdict check(const PointSet& Z, unsigned a, unsigned b, Mode m, std::uint64_t seed = 1) {
  CheckOptions o;
  o.mode = m;
  o.seed = seed;
  o.classify = false;
  return geproci_check(Z, a, b, o);
}

TEST(Geproci, Theorem1AtQ2) {
  auto v = check(projective_space(2), 3, 5, Mode::Generic);
  ASSERT_EQ(v.status, Status::Geproci) << v.reason;
  ASSERT_EQ(v.certificates.size(), 1u);
  const auto& c = v.certificates[0];
  EXPECT_EQ(c.alpha, 3u);
  EXPECT_EQ(c.beta, 5u);
  EXPECT_EQ(c.length, 15u);
  EXPECT_TRUE(c.reverified);
  EXPECT_TRUE(c.witness.coprime);
  EXPECT_FALSE(v.probabilistic);
}

TEST(Geproci, Theorem1AtQ3) {
  auto v = check(projective_space(3), 4, 10, Mode::Generic);
  ASSERT_EQ(v.status, Status::Geproci) << v.reason;
  EXPECT_EQ(v.length, 40u);
  EXPECT_TRUE(v.certificates.at(0).reverified);
  for (std::uint64_t s = 1; s <= 3; ++s) EXPECT_EQ(check(projective_space(3), 4, 10, Mode::Random, s).status, Status::Geproci);
}

TEST(Geproci, RandomModeParameters) {
  auto v = check(projective_space(2), 3, 5, Mode::Random, 7);
  ASSERT_EQ(v.status, Status::Geproci);
  EXPECT_TRUE(v.probabilistic);
  EXPECT_EQ(v.certificates.size(), v.trials);
  const double D = v.degree_bound;
  EXPECT_GT(std::pow(2.0, v.m), 1e6 * D);
  EXPECT_GE(v.m, 31u);
  EXPECT_LE(v.failure_bound, v.trials * D / std::pow(2.0, v.m) * 1.0000001);
}

TEST(Geproci, NegativeVerdicts) {
  auto Z = minus_line_q2();
  auto v = check(Z, 2, 6, Mode::Generic);
  EXPECT_EQ(v.status, Status::NotGeproci);
  EXPECT_EQ(v.missing_degree, 2u);
  EXPECT_EQ(check(Z, 2, 6, Mode::Random).status, Status::NotGeproci);
  EXPECT_THROW(check(Z, 3, 5, Mode::Generic), Error);  // 12 != 15
}

TEST(Geproci, GridInstance) {
  for (std::uint64_t q : {2, 3}) {
    auto Z = grid_2x3(q);
    auto c = classify(Z, 2, 3);
    EXPECT_TRUE(c.grid) << q;
    EXPECT_FALSE(c.nontrivial);
    EXPECT_EQ(check(Z, 2, 3, Mode::Generic).status, Status::Geproci);
  }
}

TEST(Geproci, ProjectiveSpaceIsANontrivialHalfGrid) {
  for (std::uint64_t q : {2, 3}) {
    auto c = classify(projective_space(q), static_cast<unsigned>(q + 1), static_cast<unsigned>(q * q + 1));
    EXPECT_FALSE(c.degenerate);
    EXPECT_FALSE(c.grid);
    EXPECT_TRUE(c.nontrivial);
    EXPECT_TRUE(c.cover_beta.has_value());  // a spread
    EXPECT_FALSE(c.cover_alpha.has_value());
  }
}

TEST(Geproci, Example4ComplementOfALine) {
  auto Z = minus_line_q2();
  EXPECT_EQ(Z.size(), 12u);
  EXPECT_EQ(check(Z, 3, 4, Mode::Generic).status, Status::Geproci);
  auto c = classify(Z, 3, 4);
  EXPECT_TRUE(c.half_grid_cover);
  EXPECT_TRUE(c.nontrivial);
  std::size_t triples = 0;
  for (const auto& s : collinear_subsets(Z, 3)) triples += s.points.size() == 3;
  EXPECT_EQ(triples, 16u);
}

TEST(Geproci, D4ConfigurationAtQ3) {
  auto Z = d4_q3();
  EXPECT_EQ(Z.size(), 12u);
  EXPECT_EQ(check(Z, 3, 4, Mode::Generic).status, Status::Geproci);
  auto c = classify(Z, 3, 4);
  EXPECT_FALSE(c.degenerate);
  EXPECT_FALSE(c.grid);
  ASSERT_TRUE(c.cover_beta.has_value());
  EXPECT_EQ(c.cover_beta->size(), 4u);
  std::size_t triples = 0, fours = 0;
  for (const auto& s : collinear_subsets(Z, 3)) (s.points.size() == 3 ? triples : fours)++;
  EXPECT_EQ(triples, 16u);
  EXPECT_EQ(fours, 0u);
}

TEST(Geproci, ResidualOfALineInProjectiveSpace) {
  auto F = field_of_order(2);
  auto Z = projective_space(2);
  auto L = line_from_rows(*F, {1, 0, 0, 0}, {0, 1, 0, 0});
  auto Zp = make_point_set(F, 3, line_points(*F, L));
  auto r = residual_check(Z, Zp, 5, 1, 3);
  EXPECT_TRUE(r.shared_generator);
  EXPECT_EQ(r.residual_size, 12u);
  EXPECT_EQ(r.residual.status, Status::Geproci);
  // Z' = Z: empty residual
  auto all = residual_check(Z, Z, 5, 5, 3);
  EXPECT_EQ(all.residual_size, 0u);
  EXPECT_EQ(all.residual.status, Status::Geproci);
}

TEST(Geproci, ResidualOfASevenLinePartialSpread) {
  auto S = read_spread(std::string(GEPROCI_FIXTURES) + "/pg3_f3_mps7.txt");
  auto Z = projective_space(3);
  auto r = residual_check(Z, covered_points(S), 10, 7, 4);
  EXPECT_TRUE(r.shared_generator);
  EXPECT_EQ(r.residual_size, 12u);
  EXPECT_EQ(r.residual.status, Status::Geproci);
}

TEST(Geproci, ProjectionSendsLinesToLines) {
  auto F = field_of_order(3);
  RFF K = generic_field(F);
  auto P = generic_point(K);
  auto S = build_regular_spread(F);
  for (const auto& l : S.lines) {
    std::vector<std::vector<RFF::Element>> img;
    for (const auto& p : line_points(*F, l)) img.push_back(project_coords(K, P.coords, embed_coords(K, p.x)));
    std::vector<Row<RFF>> rows(img.begin(), img.end());
    EXPECT_EQ(rank(K, rows, 3), 2u);
  }
}

TEST(Geproci, ProjectionCollisionIsDetected) {
  // projecting from a point of Z is not allowed; a rational centre collides
  auto F = field_of_order(2);
  auto Z = projective_space(2);
  GeneralPoint<FiniteField> P{Mode::Random, {1, 0, 0, 1}, 0, 1};
  EXPECT_THROW(project(*F, scheme_of(Z), P), Error);
}

class Fixture : public ::testing::TestWithParam<int> {
 protected:
  struct Case {
    PointSet Z;
    unsigned a, b;
  };
  Case get() const {
    switch (GetParam()) {
      case 0: return {projective_space(2), 3, 5};
      case 1: return {minus_line_q2(), 3, 4};
      case 2: return {d4_q3(), 3, 4};
      default: return {read_point_set(std::string(GEPROCI_FIXTURES) + "/pg3_f7_40pt.txt"), 5, 8};
    }
  }
};

TEST_P(Fixture, InvariantUnderCoordinateChanges) {
  auto [Z, a, b] = get();
  const Mode m = Z.field->size() <= 3 ? Mode::Generic : Mode::Random;
  const auto base = check(Z, a, b, m).status;
  const auto cl = classify(Z, a, b);
  std::mt19937_64 rng(100 + GetParam());
  for (int t = 0; t < 5; ++t) {
    auto W = transform(Z, random_gl4(*Z.field, rng));
    ASSERT_EQ(W.size(), Z.size());
    EXPECT_EQ(check(W, a, b, m, 1 + t).status, base);
    auto c = classify(W, a, b);
    EXPECT_EQ(c.grid, cl.grid);
    EXPECT_EQ(c.nontrivial, cl.nontrivial);
    EXPECT_EQ(c.cover_alpha.has_value(), cl.cover_alpha.has_value());
    EXPECT_EQ(c.cover_beta.has_value(), cl.cover_beta.has_value());
    EXPECT_EQ(c.collinear_alpha, cl.collinear_alpha);
  }
}

TEST_P(Fixture, GenericAndRandomAgree) {
  auto [Z, a, b] = get();
  std::vector<Status> random;
  for (std::uint64_t s = 1; s <= 3; ++s) random.push_back(check(Z, a, b, Mode::Random, s).status);
  for (auto r : random) EXPECT_EQ(r, random[0]);
  const auto g = check(Z, a, b, Mode::Generic);
  EXPECT_EQ(g.status, random[0]) << g.reason;
  for (const auto& c : g.certificates) EXPECT_TRUE(c.witness.coprime);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, Fixture, ::testing::Values(0, 1, 2, 3));

}  // namespace
