#include <gtest/gtest.h>

#include "efk/matrix.hpp"
#include "efk/synth.hpp"

using namespace efk;

// Reference values produced by an independent arbitrary-precision
// implementation of the documented generator.
TEST(Generator, PinnedVectors) {
  EXPECT_EQ(synth::mix(0), 0u);
  EXPECT_EQ(synth::mix(1), 0x5692161d100b05e5ULL);
  EXPECT_EQ(synth::draw(0, 0, 0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(synth::draw(0, 0, 1), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(synth::draw(42, 0, 0), 0x989b3f130a063869ULL);
  EXPECT_EQ(synth::draw(42, 3, 7), 0xe4492d0d98486128ULL);
  EXPECT_EQ(synth::draw(0xDEADBEEF, 1, 123456), 0x496e0207ba163476ULL);
  EXPECT_EQ(synth::uniform(0, 0, 0), 0.8833108082136426);
  EXPECT_EQ(synth::uniform(42, 3, 7), 0.8917415769758761);
  EXPECT_EQ(synth::uniform(0xDEADBEEF, 1, 123456), 0.2868348378052239);
}

TEST(Generator, UniformAndNormalMoments) {
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = synth::uniform(5, 9, static_cast<std::uint64_t>(i));
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = synth::normal(5, 9, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.03);
  EXPECT_NEAR(s2 / n, 1.0, 0.04);
}

TEST(Nested, NoiseFreeStaircase) {
  auto m = synth::nested_matrix({3, 3, 0.0, 0});
  EXPECT_EQ(m, BinaryCPMatrix::from_rows({{1, 1, 1}, {1, 1, 0}, {1, 0, 0}}, {"C001", "C002", "C003"},
                                         {"P001", "P002", "P003"}));
}

TEST(Nested, PinnedNoisyInstance) {
  auto m = synth::nested_matrix({4, 5, 0.3, 7});
  EXPECT_EQ(m.cells(), (std::vector<std::uint8_t>{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 1, 1, 1, 0, 1, 1}));
}

TEST(Nested, RowDegreesFollowCeiling) {
  auto m = synth::nested_matrix({5, 12, 0.0, 0});
  // ceil(c * 12 / 5) for c = 5..1
  EXPECT_EQ(m.diversification(), (std::vector<std::size_t>{12, 10, 8, 5, 3}));
}

TEST(Nested, Deterministic) {
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    EXPECT_EQ(synth::nested_matrix({9, 13, 0.2, seed}), synth::nested_matrix({9, 13, 0.2, seed}));
  EXPECT_FALSE(synth::nested_matrix({9, 13, 0.2, 1}) == synth::nested_matrix({9, 13, 0.2, 2}));
}

TEST(Nested, NoiseFreeIsPerfectlyNestedWhenSquare) {
  for (std::size_t n = 2; n <= 12; ++n)
    EXPECT_DOUBLE_EQ(nestedness(synth::nested_matrix({n, n, 0.0, 0})).nodf_total, 100.0) << n;
}

TEST(Nested, SpecValidation) {
  EXPECT_THROW(synth::nested_matrix({0, 3, 0.0, 0}), Error);
  EXPECT_THROW(synth::nested_matrix({3, 3, 1.0, 0}), Error);
  EXPECT_THROW(synth::nested_matrix({3, 3, -0.1, 0}), Error);
}

TEST(DriftField, DeterministicWithExactDrift) {
  synth::DriftFieldSpec spec{8, 6, 0.02, -0.01, 0.0, 3, 1990};
  auto a = synth::drift_field(spec);
  auto b = synth::drift_field(spec);
  EXPECT_EQ(a.points(), b.points());
  EXPECT_EQ(a.size(), 48u);
  EXPECT_EQ(a.min_year(), 1990);
  EXPECT_EQ(a.max_year(), 1995);
  for (const auto& p : a.points()) {
    const auto* start = a.find(p.country, 1990);
    EXPECT_NEAR(p.x - start->x, 0.02 * (p.year - 1990), 1e-12);
    EXPECT_NEAR(p.y - start->y, -0.01 * (p.year - 1990), 1e-12);
    EXPECT_GE(start->x, 2.5);
    EXPECT_LT(start->x, 4.5);
  }
  spec.years = 1;
  EXPECT_THROW(synth::drift_field(spec), Error);
}

TEST(Codes, ZeroPadded) {
  EXPECT_EQ(synth::code('C', 7), "C007");
  EXPECT_EQ(synth::code('K', 1234), "K1234");
}
