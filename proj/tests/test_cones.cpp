#include <gtest/gtest.h>

#include <random>

#include "geproci/geproci.hpp"
#include "oracles.hpp"

using namespace geproci;

namespace {

/// 4x4 determinant by cofactor expansion along the first row.
Elem det4(const FiniteField& L, const std::array<std::array<Elem, 4>, 4>& m) {
  auto det3 = [&](unsigned skip) {
    std::array<std::array<Elem, 3>, 3> s{};
    for (unsigned i = 1; i < 4; ++i)
      for (unsigned j = 0, k = 0; j < 4; ++j)
        if (j != skip) s[i - 1][k++] = m[i][j];
    auto t1 = L.mul(s[0][0], L.sub(L.mul(s[1][1], s[2][2]), L.mul(s[1][2], s[2][1])));
    auto t2 = L.mul(s[0][1], L.sub(L.mul(s[1][0], s[2][2]), L.mul(s[1][2], s[2][0])));
    auto t3 = L.mul(s[0][2], L.sub(L.mul(s[1][0], s[2][1]), L.mul(s[1][1], s[2][0])));
    return L.add(L.sub(t1, t2), t3);
  };
  Elem d = 0;
  for (unsigned j = 0; j < 4; ++j) {
    auto t = L.mul(m[0][j], det3(j));
    d = j % 2 ? L.sub(d, t) : L.add(d, t);
  }
  return d;
}

TEST(Cones, FrobeniusConeOverTheFunctionField) {
  const std::size_t lines[] = {35, 130, 357};
  for (std::uint64_t q : {2, 3, 4}) {
    auto Fq = field_of_order(q);
    RFF K = generic_field(Fq);
    auto P = generic_point(K);
    auto F = frobenius_cone(K, P.coords, q);
    EXPECT_EQ(F.degree, q + 1);
    EXPECT_EQ(F.nvars, 4u);
    for (const auto& t : F.poly.terms) EXPECT_EQ(t.m.degree(), q + 1);
    for (const auto& p : enumerate_projective_space(Fq, 3).points)
      ASSERT_TRUE(K.is_zero(evaluate(K, F, std::span<const RFF::Element>(embed_coords(K, p.x)))));
    EXPECT_TRUE(frobenius_grouping_identity(K, P.coords, q, F));
    // multiplicity q+1 at P through the vertex conditions
    auto V = vertex_conditions(K, std::span<const RFF::Element>(P.coords), static_cast<unsigned>(q + 1));
    auto cols = monomials_of_degree(4, static_cast<unsigned>(q + 1));
    for (const auto& row : V) {
      RFF::Element s = K.zero();
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& t : F.poly.terms)
          if (t.m == cols[j]) s = K.add(s, K.mul(t.c, row[j]));
      ASSERT_TRUE(K.is_zero(s));
    }
    auto tr = cone_line_transversality(K, F, *Fq);
    EXPECT_EQ(tr.lines_checked, lines[q == 2 ? 0 : q == 3 ? 1 : 2]);
    EXPECT_TRUE(tr.clean());
  }
}

TEST(Cones, FrobeniusConeMatchesCofactorDeterminant) {
  std::mt19937_64 rng(31);
  for (std::uint64_t q : {2, 3, 4, 5}) {
    auto Fq = field_of_order(q);
    auto L = FiniteField::extension(Fq, 5);
    for (int t = 0; t < 20; ++t) {
      std::vector<Elem> P{L->random(rng), L->random(rng), L->random(rng), 1};
      auto F = frobenius_cone(*L, P, q);
      std::array<Elem, 4> X{L->random(rng), L->random(rng), L->random(rng), L->random(rng)};
      std::array<std::array<Elem, 4>, 4> m{};
      for (unsigned j = 0; j < 4; ++j) {
        m[0][j] = P[j];
        m[1][j] = L->pow(P[j], q);
        m[2][j] = X[j];
        m[3][j] = L->pow(X[j], q);
      }
      ASSERT_EQ(evaluate(*L, F, std::span<const Elem>(X.data(), 4)), det4(*L, m));
    }
  }
}

TEST(Cones, UnexpectedConesThroughProjectiveSpaceOverF2) {
  auto Z = enumerate_projective_space(field_of_order(2), 3);
  RFF K = generic_field(Z.field);
  auto P = generic_point(K);
  auto d3 = unexpected_cone_dim(K, Z, 3, P);
  EXPECT_EQ(d3.hilbert, 6u);
  EXPECT_GE(d3.lhs, 1u);
  EXPECT_EQ(d3.rhs, 0);
  EXPECT_TRUE(d3.unexpected);
  auto d5 = unexpected_cone_dim(K, Z, 5, P);
  EXPECT_EQ(d5.hilbert, 41u);
  EXPECT_EQ(d5.lhs, 7u);
  EXPECT_EQ(d5.rhs, 6);
  EXPECT_TRUE(d5.unexpected);
  // the same count through the projection
  EXPECT_EQ(cone_dim_by_projection(K, Z, 3, P), d3.lhs);
  EXPECT_EQ(cone_dim_by_projection(K, Z, 5, P), d5.lhs);
}

TEST(Cones, RandomVertexBoundsTheGenericCount) {
  auto Z = enumerate_projective_space(field_of_order(2), 3);
  auto L = FiniteField::extension(Z.field, 31);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 3; ++t) {
    auto P = random_point(*L, 2, rng, 4, 31);
    EXPECT_EQ(unexpected_cone_dim(*L, Z, 5, P).lhs, 7u);
  }
}

TEST(Cones, HilbertIsAtLeastTheExpectedCount) {
  std::mt19937_64 rng(12);
  auto F = field_of_order(3);
  auto all = enumerate_projective_space(F, 3).points;
  for (int t = 0; t < 20; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    auto Z = make_point_set(F, 3, {all.begin(), all.begin() + 5 + t});
    for (unsigned d = 1; d <= 4; ++d) {
      const long long expected = static_cast<long long>(oracle::choose(d + 3, 3)) - static_cast<long long>(Z.size());
      EXPECT_GE(static_cast<long long>(hilbert_value(Z, d)), expected);
    }
  }
}

TEST(Cones, UnexpectednessInequality) {
  for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
    auto r = unexpectedness_inequality(q);
    const auto q2 = static_cast<unsigned>(q * q);
    const long long lhs = static_cast<long long>(oracle::choose(q2 - static_cast<unsigned>(q) + 2, 2));
    const long long rhs = static_cast<long long>(oracle::choose(q2 + 4, 3)) - static_cast<long long>((q2 + 1) * (q + 1)) -
                          static_cast<long long>(oracle::choose(q2 + 3, 3));
    EXPECT_EQ(r.lhs, lhs);
    EXPECT_EQ(r.rhs, rhs);
    EXPECT_EQ(r.holds, q != 2) << q;
  }
  auto two = unexpectedness_inequality(2);
  EXPECT_EQ(two.lhs, 6);
  EXPECT_EQ(two.rhs, 6);
  EXPECT_THROW(unexpectedness_inequality(1), Error);
}

}  // namespace
