#include <gtest/gtest.h>

#include "geproci/fatpoints.hpp"
#include "geproci/io.hpp"
#include "oracles.hpp"

using namespace geproci;

namespace {

FatPointScheme example(int ex) {
  auto F2 = field_of_order(2);
  return ex == 7 ? example7_scheme(F2) : ex == 8 ? example8_scheme(F2) : example9_scheme(F2);
}

std::size_t oracle_hilbert(const FatPointScheme& S, unsigned d) {
  std::vector<std::vector<std::uint64_t>> simple;
  std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> doubled;
  for (const auto& p : S.simple) simple.push_back(p.x);
  for (const auto& q : S.doubled) doubled.push_back({q.support.x, q.toward.x});
  return oracle::hilbert_fat_mod_p(simple, doubled, 4, d, 2);
}

/// f vanishes at P with zero gradient there.
bool singular_at(const RFF& K, const HomogeneousForm<RFF>& f, const std::vector<RFF::Element>& P) {
  if (!K.is_zero(evaluate(K, f, std::span<const RFF::Element>(P)))) return false;
  for (unsigned i = 0; i < 4; ++i) {
    std::vector<RFF::Element> e(4, K.zero());
    e[i] = K.one();
    if (!K.is_zero(directional_derivative(K, f, std::span<const RFF::Element>(P), std::span<const RFF::Element>(e))))
      return false;
  }
  return true;
}

TEST(FatPoints, ExamplesAreGeprociInBothModes) {
  for (int ex : {7, 8, 9}) {
    auto S = example(ex);
    const unsigned a = ex == 8 ? 2 : 3;
    EXPECT_EQ(S.length(), ex == 8 ? 6u : 9u);
    for (Mode m : {Mode::Generic, Mode::Random}) {
      CheckOptions o;
      o.mode = m;
      o.classify = false;
      auto v = scheme_geproci_check(S, a, 3, o);
      EXPECT_EQ(v.status, Status::Geproci) << ex << " " << mode_name(m) << " " << v.reason;
      for (const auto& c : v.certificates) EXPECT_TRUE(c.witness.coprime);
    }
  }
}

TEST(FatPoints, HilbertValuesMatchTheOracle) {
  for (int ex : {7, 8, 9})
    for (unsigned d = 1; d <= 4; ++d) EXPECT_EQ(hilbert_value(example(ex), d), oracle_hilbert(example(ex), d)) << ex << " " << d;
  EXPECT_EQ(hilbert_value(example(7), 3), 11u);
  EXPECT_THROW(hilbert_value(example(7), 0), Error);
}

TEST(FatPoints, ProjectionKeepsTheLength) {
  auto F2 = field_of_order(2);
  RFF K = generic_field(F2);
  auto P = generic_point(K);
  for (int ex : {7, 8, 9}) {
    auto img = project(K, example(ex), P);
    EXPECT_EQ(img.length(), example(ex).length());
    for (const auto& p : img.points) EXPECT_EQ(p.coords.size(), 3u);
  }
}

TEST(FatPoints, Example7NormalizedCubics) {
  auto F2 = field_of_order(2);
  RFF K = generic_field(F2);
  auto P = generic_point(K);
  auto e7 = example7_normalized(K, example7_scheme(F2), P);
  auto [a, b, c] = e7.params;
  auto model = example7_model(K, a, b, c);
  EXPECT_EQ(model.length(), 9u);
  const auto conds = conditions_of(e7.normalized);
  auto [C1, C2] = example7_cubics(K, a, b, c);
  EXPECT_TRUE(vanishes_on(K, C1, conds));
  EXPECT_TRUE(vanishes_on(K, C2, conds));
  EXPECT_TRUE(vanishes_on(K, C1, conditions_of(model)));
  EXPECT_TRUE(vanishes_on(K, C2, conditions_of(model)));
  EXPECT_TRUE(certify_given(K, e7.normalized, C1, C2).witness.coprime);
  // the conic cxy + bxz + ayz + (a+b+c)y^2 times the line through (1,0,0)
  // and (1,1,1) does not pass through the scheme
  auto printed = product(K, example7_printed_conic(K, a, b, c), line_form(K, plane(K, {1, 0, 0}), plane(K, {1, 1, 1})));
  EXPECT_FALSE(vanishes_on(K, printed, conditions_of(model)));
}

TEST(FatPoints, Example8QuadricsAndTangents) {
  auto F2 = field_of_order(2);
  RFF K = generic_field(F2);
  auto P = generic_point(K);
  const auto conds = scheme_condition_list(K, example8_scheme(F2));
  auto printed = example8_printed_quadric(K);
  auto cone = example8_cone(K);
  EXPECT_TRUE(vanishes_on(K, printed, conds));
  EXPECT_TRUE(vanishes_on(K, cone, conds));
  EXPECT_TRUE(singular_at(K, cone, P.coords));
  EXPECT_FALSE(singular_at(K, printed, P.coords));

  auto [A, B] = example8_forms(*F2);
  EXPECT_TRUE(concurrent_tangents_check(*F2, A, example8_model(*F2), plane(*F2, {1, 1, 1})));
  EXPECT_TRUE(certify_given(*F2, example8_model(*F2), A, B).witness.coprime);
  auto F3 = field_of_order(3);
  auto [A3, B3] = example8_forms(*F3);
  EXPECT_FALSE(concurrent_tangents_check(*F3, A3, example8_model(*F3), plane(*F3, {1, 1, 1})));
}

TEST(FatPoints, Example9Specializations) {
  auto F2 = field_of_order(2);
  RFF Ka(F2, 1, {"a"});
  const auto a = Ka.variable(0);
  auto [f, g] = example9_forms(Ka, a);
  EXPECT_TRUE(certify_given(Ka, example9_model(Ka, a), f, g).witness.coprime);
  // at a = 1 both forms contain x + z
  auto [f1, g1] = example9_forms(*F2, Elem(1));
  EXPECT_FALSE(certify_given(*F2, example9_model(*F2, Elem(1)), f1, g1).witness.coprime);
  try {
    example9_model(*F2, Elem(0));
    FAIL() << "expected a collision";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CollisionDetected);
  }
}

TEST(FatPoints, DerivativeOfASquareVanishesInCharacteristicTwo) {
  auto F4 = field_of_order(4);
  std::mt19937_64 rng(6);
  // x^2 + y^2 = (x + y)^2
  auto sq = plane_form(*F4, 2, {{F4->one(), {0, 2, 0}}, {F4->one(), {2, 0, 0}}});
  for (int t = 0; t < 30; ++t) {
    std::vector<Elem> p{F4->random(rng), F4->random(rng), 1}, v{1, F4->random(rng), 0};
    EXPECT_EQ(directional_derivative(*F4, sq, std::span<const Elem>(p), std::span<const Elem>(v)), 0u);
  }
}

TEST(FatPoints, LineCoversCountMultiplicity) {
  auto c8 = classify_scheme(example(8), 2, 3);
  EXPECT_FALSE(c8.degenerate);
  ASSERT_TRUE(c8.cover_beta.has_value());
  EXPECT_EQ(c8.cover_beta->lines.size(), 3u);
  EXPECT_FALSE(c8.cover_beta->pairwise_skew);  // all three pass through e4
  EXPECT_FALSE(c8.cover_alpha.has_value());
  auto c7 = classify_scheme(example(7), 3, 3);
  EXPECT_FALSE(c7.degenerate);
  auto simple = make_scheme(field_of_order(2), 3, {}, {});
  EXPECT_EQ(simple.length(), 0u);
}

TEST(FatPoints, SchemeFixturesMatchTheBuiltInExamples) {
  for (int ex : {7, 8, 9}) {
    auto S = read_scheme(std::string(GEPROCI_FIXTURES) + "/example" + std::to_string(ex) + "_scheme.txt");
    auto T = example(ex);
    EXPECT_EQ(S.simple, T.simple) << ex;
    EXPECT_EQ(S.doubled, T.doubled) << ex;
  }
}

}  // namespace
