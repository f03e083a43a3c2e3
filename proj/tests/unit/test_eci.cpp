#include <gtest/gtest.h>

#include "efk/eci.hpp"
#include "efk/synth.hpp"
#include "support/oracles.hpp"

using namespace efk;

namespace {

const auto kStaircase = BinaryCPMatrix::from_rows({{1, 1, 1}, {1, 1, 0}, {1, 0, 0}});

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no efk::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(Similarity, StaircaseRowsByHand) {
  auto W = country_similarity_matrix(kStaircase);
  const double expected[3][3] = {{11.0 / 18, 5.0 / 18, 2.0 / 18}, {5.0 / 12, 5.0 / 12, 2.0 / 12}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(W(i, j), expected[i][j], 1e-15) << i << "," << j;
}

TEST(Similarity, RowStochasticBothSides) {
  auto m = synth::random_matrix(6, 9, 0.5, 4);
  auto W = country_similarity_matrix(m);
  auto V = product_similarity_matrix(m);
  for (Eigen::Index i = 0; i < W.rows(); ++i) EXPECT_NEAR(W.row(i).sum(), 1.0, 1e-14);
  for (Eigen::Index i = 0; i < V.rows(); ++i) EXPECT_NEAR(V.row(i).sum(), 1.0, 1e-14);
}

TEST(Similarity, AllOnesAndBlockDiagonal) {
  auto W = country_similarity_matrix(BinaryCPMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}}));
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(W(i, j), 0.25, 1e-15);

  auto B = country_similarity_matrix(
      BinaryCPMatrix::from_rows({{1, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 1}}));
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 2; j < 4; ++j) {
      EXPECT_EQ(B(i, j), 0.0);
      EXPECT_EQ(B(j, i), 0.0);
    }
}

TEST(Eigen, AllOnesIsDegenerate) {
  auto m = BinaryCPMatrix::from_rows({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  EXPECT_EQ(kind_of([&] { eci_eigen(m); }), ErrorKind::DegenerateSpectrum);
}

TEST(Eigen, OrderOutOfRange) {
  EXPECT_EQ(kind_of([] { eci_eigen(kStaircase, 0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { eci_eigen(kStaircase, 4); }), ErrorKind::InvalidArgument);
}

TEST(Eigen, StaircaseDecreasingAndMatchesDense) {
  auto s = eci_eigen(kStaircase);
  EXPECT_GT(s.eci_z[0], s.eci_z[1]);
  EXPECT_GT(s.eci_z[1], s.eci_z[2]);
  auto d = oracle::dense_eci(kStaircase);
  EXPECT_NEAR(s.lambda, d.lambda, 1e-12);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(s.eci_z[c], d.eci[c], 1e-9);
  EXPECT_DOUBLE_EQ(s.a * s.b * s.lambda, 1.0);
}

TEST(Eigen, LeadingEigenpairIsTrivial) {
  auto m = synth::random_matrix(7, 10, 0.5, 8);
  auto spec = similarity_spectrum(m);
  EXPECT_NEAR(spec.front(), 1.0, 1e-12);
  for (std::size_t i = 1; i < spec.size(); ++i) EXPECT_LE(spec[i], spec[i - 1]);

  auto s = eci_eigen(m, 1);
  EXPECT_NEAR(s.lambda, 1.0, 1e-12);
  for (std::size_t c = 1; c < s.eci_raw.size(); ++c) EXPECT_NEAR(s.eci_raw[c], s.eci_raw[0], 1e-12);
  EXPECT_LT(eci_residual(m, s), 1e-8);
}

TEST(Eigen, MatchesDenseOnRandomInstances) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto m = oracle::random_instance(seed);
    if (!m) continue;
    EigenSolution s;
    try {
      s = eci_eigen(*m);
    } catch (const Error&) {
      continue;
    }
    auto d = oracle::dense_eci(*m);
    for (std::size_t c = 0; c < m->rows(); ++c) EXPECT_NEAR(s.eci_z[c], d.eci[c], 1e-8) << seed;
    EXPECT_NEAR(s.lambda, d.lambda, 1e-10) << seed;
    EXPECT_LT(eci_residual(*m, s), 1e-8) << seed;
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Eigen, IdenticalRowsGetIdenticalScores) {
  auto m = BinaryCPMatrix::from_rows({{1, 1, 0, 1, 0}, {0, 1, 1, 0, 0}, {1, 1, 0, 1, 0}, {1, 0, 1, 1, 1}});
  auto s = eci_eigen(m);
  EXPECT_EQ(s.eci_raw[0], s.eci_raw[2]);
  EXPECT_EQ(s.eci_z[0], s.eci_z[2]);
}

TEST(Eigen, PositivelyCorrelatedWithDiversification) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto m = oracle::random_instance(seed);
    if (!m) continue;
    try {
      auto s = eci_eigen(*m);
      std::vector<double> kc(m->diversification().begin(), m->diversification().end());
      EXPECT_GE(stats::spearman(s.eci_raw, kc), 0.0) << seed;
    } catch (const Error&) {
    }
  }
}

TEST(Residual, DetectsPerturbation) {
  auto m = synth::random_matrix(6, 8, 0.5, 12);
  auto s = eci_eigen(m);
  EXPECT_LT(eci_residual(m, s), 1e-8);
  std::size_t big = 0;
  for (std::size_t c = 1; c < s.eci_raw.size(); ++c)
    if (std::abs(s.eci_raw[c]) > std::abs(s.eci_raw[big])) big = c;
  s.eci_raw[big] *= 1.1;
  EXPECT_GT(eci_residual(m, s), 1e-3);
}

TEST(Reflections, LevelZeroIsDegree) {
  auto m = synth::random_matrix(5, 6, 0.5, 3);
  auto t = method_of_reflections(m, 0);
  ASSERT_EQ(t.country_levels.size(), 1u);
  for (std::size_t c = 0; c < m.rows(); ++c) EXPECT_EQ(t.country_levels[0][c], m.diversification()[c]);
  for (std::size_t p = 0; p < m.cols(); ++p) EXPECT_EQ(t.product_levels[0][p], m.ubiquity()[p]);
}

TEST(Reflections, AllOnesLevelOne) {
  auto t = method_of_reflections(BinaryCPMatrix::from_rows({{1, 1, 1, 1}, {1, 1, 1, 1}}), 1);
  for (double v : t.country_levels[1]) EXPECT_EQ(v, 2.0);
  for (double v : t.product_levels[1]) EXPECT_EQ(v, 4.0);
}

TEST(Reflections, StaircaseDepth20MatchesEigenRanks) {
  auto t = method_of_reflections(kStaircase, 20);
  auto s = eci_eigen(kStaircase);
  EXPECT_EQ(rank_labels(t.country_levels[20], kStaircase.countries()), rank_labels(s.eci_z, kStaircase.countries()));
}

TEST(Reflections, AgreeWhenSubleadingModeHasDecayed) {
  // Level 20 is W^10 applied to diversification, so it still carries the
  // third eigenvector with weight (lambda_3 / lambda_2)^10 relative to the
  // second. Two loosely coupled communities give a wide gap. The direction of
  // the second mode in the reflections is the projection of diversification,
  // which need not match the Spearman orientation of eci_eigen.
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 100 && checked < 10; ++seed) {
    std::vector<std::vector<int>> rows(8, std::vector<int>(10));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        rows[i][j] = synth::uniform(seed, 0, i * 10 + j) < ((i < 4) == (j < 5) ? 0.8 : 0.08);
    BinaryCPMatrix m;
    EigenSolution s;
    try {
      m = BinaryCPMatrix::from_rows(rows);
      if (m.rows() != 8 || m.cols() != 10) continue;
      s = eci_eigen(m);
    } catch (const Error&) {
      continue;
    }
    if (std::pow(std::abs(s.spectrum[2] / s.spectrum[1]), 10) > 1e-6) continue;
    auto level = method_of_reflections(m, 20).country_levels[20];
    double proj = 0.0;
    const double mean = stats::mean(level);
    for (std::size_t c = 0; c < m.rows(); ++c) proj += (level[c] - mean) * s.eci_raw[c];
    auto oriented = s.eci_raw;
    if (proj < 0.0)
      for (double& x : oriented) x = -x;
    EXPECT_EQ(rank_labels(level, m.countries()), rank_labels(oriented, m.countries())) << seed;
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(Ranking, EciCarriesMetadata) {
  auto s = eci_eigen(kStaircase);
  auto r = eci_ranking(s);
  EXPECT_EQ(r.algorithm, "eci");
  EXPECT_EQ(r.order_n, 2u);
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(pci_ranking(s).algorithm, "pci");
}
