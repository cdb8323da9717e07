#include <gtest/gtest.h>

#include <random>

#include "geproci/field.hpp"
#include "oracles.hpp"

using namespace geproci;

namespace {

const char* kTowers[] = {
    "p=2",           "p=7",           "p=2;mod=1,1,1",          "p=2;mod=1,1,0,1", "p=3;mod=1,0,1",
    "p=7;mod=1,0,1", "p=2;mod=1,1,1;ext=2", "p=3;mod=1,0,1;ext=3", "p=2;mod=1,1,1;ext=2;ext=2",
    "p=2;ext=31",    "p=5;ext=2;ext=3",
};

class FieldAxioms : public ::testing::TestWithParam<const char*> {};

TEST_P(FieldAxioms, RingAxiomsAndInverses) {
  auto F = parse_field_spec(GetParam());
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const auto a = F->random(rng), b = F->random(rng), c = F->random(rng);
    ASSERT_EQ(F->add(a, b), F->add(b, a));
    ASSERT_EQ(F->mul(a, b), F->mul(b, a));
    ASSERT_EQ(F->add(F->add(a, b), c), F->add(a, F->add(b, c)));
    ASSERT_EQ(F->mul(F->mul(a, b), c), F->mul(a, F->mul(b, c)));
    ASSERT_EQ(F->mul(a, F->add(b, c)), F->add(F->mul(a, b), F->mul(a, c)));
    ASSERT_EQ(F->add(a, F->neg(a)), 0u);
    ASSERT_EQ(F->sub(F->add(a, b), b), a);
    ASSERT_EQ(F->mul(a, 1), a);
    if (a != 0) {
      ASSERT_EQ(F->mul(a, F->inv(a)), 1u);
      ASSERT_EQ(F->mul(F->div(b, a), a), b);
    }
  }
}

TEST_P(FieldAxioms, FrobeniusIsAHomomorphism) {
  auto F = parse_field_spec(GetParam());
  std::mt19937_64 rng(7);
  const std::uint64_t p = F->characteristic();
  for (int i = 0; i < 1000; ++i) {
    const auto a = F->random(rng), b = F->random(rng);
    ASSERT_EQ(F->frobenius(F->add(a, b), p), F->add(F->frobenius(a, p), F->frobenius(b, p)));
    ASSERT_EQ(F->frobenius(F->mul(a, b), p), F->mul(F->frobenius(a, p), F->frobenius(b, p)));
    ASSERT_EQ(F->pow(a, F->size()), a);
  }
}

TEST_P(FieldAxioms, LayerSubfieldsAreFixedByTheirFrobenius) {
  auto F = parse_field_spec(GetParam());
  std::mt19937_64 rng(3);
  for (auto q : F->tower_sizes()) {
    for (int i = 0; i < 200; ++i) {
      const auto a = F->random(rng);
      ASSERT_EQ(F->frobenius(a, q) == a, a < q) << "q=" << q << " a=" << a;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Towers, FieldAxioms, ::testing::ValuesIn(kTowers));

TEST(Field, SingleExtensionMatchesSchoolbookProduct) {
  for (const char* spec : {"p=2;mod=1,1,0,1", "p=3;mod=1,0,1", "p=7;mod=1,0,1", "p=5;ext=3", "p=2;ext=8"}) {
    auto F = parse_field_spec(spec);
    oracle::PolyField O{{F->characteristic()}, F->modulus()};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const auto a = F->random(rng), b = F->random(rng);
      auto ca = F->coefficients(a), cb = F->coefficients(b);
      ASSERT_EQ(F->coefficients(F->mul(a, b)), O.mul(ca, cb)) << spec;
      ASSERT_EQ(F->coefficients(F->add(a, b)), O.add(ca, cb)) << spec;
    }
  }
}

TEST(Field, PrimeFieldMatchesModularArithmetic) {
  auto F = parse_field_spec("p=13");
  oracle::Zp z{13};
  for (std::uint64_t a = 0; a < 13; ++a)
    for (std::uint64_t b = 0; b < 13; ++b) {
      EXPECT_EQ(F->mul(a, b), z.mul(a, b));
      EXPECT_EQ(F->sub(a, b), z.sub(a, b));
    }
}

TEST(Field, MultiplicativeGroupIsCyclicOfOrderQMinusOne) {
  for (std::uint64_t q : {4, 8, 9, 16, 25, 27, 49}) {
    auto F = field_of_order(q);
    std::size_t generators = 0;
    for (std::uint64_t x = 1; x < q; ++x) {
      std::uint64_t order = 1;
      for (auto y = x; y != 1; y = F->mul(y, x)) ++order;
      ASSERT_EQ((q - 1) % order, 0u);
      if (order == q - 1) ++generators;
    }
    EXPECT_GT(generators, 0u) << q;
  }
}

TEST(Field, SpecsRoundTrip) {
  for (const char* spec : kTowers) {
    auto F = parse_field_spec(spec);
    auto G = parse_field_spec(F->spec());
    EXPECT_EQ(F->spec(), G->spec());
    EXPECT_EQ(F->size(), G->size());
  }
  EXPECT_EQ(parse_field_spec("9")->size(), 9u);
  EXPECT_EQ(parse_field_spec("p=2;mod=1,1,1;ext=2")->size(), 16u);
}

TEST(Field, RejectsBadInput) {
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind([] { parse_field_spec("p=4"); }), ErrorKind::NonPrimeModulus);
  EXPECT_EQ(kind([] { parse_field_spec("6"); }), ErrorKind::NonPrimeModulus);
  EXPECT_EQ(kind([] { parse_field_spec("p=2;mod=1,0,1"); }), ErrorKind::ReducibleModulus);
  EXPECT_EQ(kind([] { parse_field_spec("q=2"); }), ErrorKind::ParseError);
  auto F = field_of_order(8);
  EXPECT_EQ(kind([&] { F->frobenius(3, 4); }), ErrorKind::NotASubfield);
  EXPECT_THROW(F->inv(0), Error);
}

}  // namespace
