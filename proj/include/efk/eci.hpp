#pragma once

// ECI / PCI as mutual averages:
//
//   ECI_c = a <PCI>_c      (mean PCI over the country's basket)
//   PCI_p = b <ECI>_p      (mean ECI over the product's exporters)
//
// Substituting one into the other gives W ECI = ECI / (a b) with the
// row-stochastic country similarity W = D_c^-1 M D_p^-1 M^T, so every
// eigenpair (lambda, v) of W is a solution with a b = 1 / lambda. The
// conventional ECI is the second eigenvector; nothing in the definition
// prefers it over the others.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "efk/error.hpp"
#include "efk/matrix.hpp"
#include "efk/ranking.hpp"
#include "efk/stats.hpp"

namespace efk {

inline constexpr double kEigenGapTol = 1e-10;
inline constexpr double kZeroEigenvalueTol = 1e-12;

struct EigenSolution {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::size_t order_n = 2;
  double lambda = 0.0;
  std::vector<double> eci_raw;
  std::vector<double> pci_raw;
  double a = 1.0;  // gauge: fixed to 1
  double b = 1.0;  // = 1 / lambda
  std::vector<double> eci_z;
  std::vector<double> pci_z;
  std::vector<double> spectrum;  // all eigenvalues of W, descending
};

struct ReflectionsTrace {
  std::vector<std::vector<double>> country_levels;  // k_c^(n), n = 0..depth
  std::vector<std::vector<double>> product_levels;  // k_p^(n)
  std::size_t depth = 0;
};

namespace detail {

inline Eigen::MatrixXd incidence(const BinaryCPMatrix& m) {
  Eigen::MatrixXd M(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.rows(); ++c)
    for (std::size_t p = 0; p < m.cols(); ++p) M(c, p) = m(c, p) ? 1.0 : 0.0;
  return M;
}

inline Eigen::VectorXd as_vector(const std::vector<std::size_t>& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = static_cast<double>(v[i]);
  return out;
}

// Mean of product values over each country's basket.
inline std::vector<double> country_average(const BinaryCPMatrix& m, const std::vector<double>& product_values) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t c = 0; c < m.rows(); ++c) {
    double acc = 0.0;
    const auto row = m.row(c);
    for (std::size_t p = 0; p < m.cols(); ++p)
      if (row[p]) acc += product_values[p];
    out[c] = acc / static_cast<double>(m.diversification()[c]);
  }
  return out;
}

// Mean of country values over each product's exporters.
inline std::vector<double> product_average(const BinaryCPMatrix& m, const std::vector<double>& country_values) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t c = 0; c < m.rows(); ++c) {
    const auto row = m.row(c);
    for (std::size_t p = 0; p < m.cols(); ++p)
      if (row[p]) out[p] += country_values[c];
  }
  for (std::size_t p = 0; p < m.cols(); ++p) out[p] /= static_cast<double>(m.ubiquity()[p]);
  return out;
}

}  // namespace detail

/// W_cc' = (1/k_c) sum_p M_cp M_c'p / k_p. Rows sum to 1.
inline Eigen::MatrixXd country_similarity_matrix(const BinaryCPMatrix& m) {
  const Eigen::MatrixXd M = detail::incidence(m);
  const Eigen::VectorXd kc = detail::as_vector(m.diversification());
  const Eigen::VectorXd kp = detail::as_vector(m.ubiquity());
  return kc.cwiseInverse().asDiagonal() * M * kp.cwiseInverse().asDiagonal() * M.transpose();
}

/// Product-side counterpart D_p^-1 M^T D_c^-1 M (P x P).
inline Eigen::MatrixXd product_similarity_matrix(const BinaryCPMatrix& m) {
  const Eigen::MatrixXd M = detail::incidence(m);
  const Eigen::VectorXd kc = detail::as_vector(m.diversification());
  const Eigen::VectorXd kp = detail::as_vector(m.ubiquity());
  return kp.cwiseInverse().asDiagonal() * M.transpose() * kc.cwiseInverse().asDiagonal() * M;
}

namespace detail {

// W is similar to the symmetric S = D_c^-1/2 M D_p^-1 M^T D_c^-1/2, so its
// spectrum is real and lies in [0, 1]; eigenvectors map back as
// v = D_c^-1/2 u.
struct SymmetricSpectrum {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns are eigenvectors of W (not normalized)
};

inline SymmetricSpectrum similarity_eigensystem(const BinaryCPMatrix& m) {
  const Eigen::MatrixXd M = incidence(m);
  const Eigen::VectorXd kc = as_vector(m.diversification());
  const Eigen::VectorXd kp = as_vector(m.ubiquity());
  const Eigen::VectorXd kc_isqrt = kc.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A = kc_isqrt.asDiagonal() * M * kp.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd S = A * A.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::DegenerateSpectrum, "eigensolver failed");

  const auto n = S.rows();
  SymmetricSpectrum out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Eigen returns ascending order
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = kc_isqrt.asDiagonal() * solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

}  // namespace detail

/// All eigenvalues of W, descending.
inline std::vector<double> similarity_spectrum(const BinaryCPMatrix& m) {
  auto sys = detail::similarity_eigensystem(m);
  return {sys.values.data(), sys.values.data() + sys.values.size()};
}

/// Solves the coupled averages with the order_n-th eigenvector of W
/// (descending eigenvalues, 1-based). Gauge a = 1, b = 1 / lambda; the sign is
/// chosen so that ECI correlates nonnegatively (Spearman) with
/// diversification, falling back to a nonnegative score for the
/// lexicographically first country when the correlation is exactly zero.
inline EigenSolution eci_eigen(const BinaryCPMatrix& m, std::size_t order_n = 2) {
  const auto C = m.rows();
  if (order_n < 1 || order_n > C)
    throw Error(ErrorKind::InvalidArgument,
                "order_n must be in [1, " + std::to_string(C) + "], got " + std::to_string(order_n));

  auto sys = detail::similarity_eigensystem(m);
  const auto k = static_cast<Eigen::Index>(order_n - 1);
  const double lambda = sys.values(k);
  if (std::abs(lambda) < kZeroEigenvalueTol)
    throw Error(ErrorKind::DegenerateSpectrum,
                "eigenvalue " + std::to_string(order_n) + " is zero: only the trivial solution ECI = PCI = 0");
  if ((k > 0 && std::abs(sys.values(k - 1) - lambda) < kEigenGapTol) ||
      (k + 1 < sys.values.size() && std::abs(sys.values(k + 1) - lambda) < kEigenGapTol))
    throw Error(ErrorKind::DegenerateSpectrum,
                "eigenvalue " + std::to_string(order_n) + " is repeated; eigenvector not unique");

  Eigen::VectorXd v = sys.vectors.col(k);
  v.normalize();
  std::vector<double> vec(v.data(), v.data() + v.size());

  EigenSolution sol;
  sol.countries = m.countries();
  sol.products = m.products();
  sol.order_n = order_n;
  sol.lambda = lambda;
  sol.a = 1.0;
  sol.b = 1.0 / lambda;
  sol.spectrum.assign(sys.values.data(), sys.values.data() + sys.values.size());

  // One pass through the coupled equations: PCI from the eigenvector, then
  // ECI as the exact basket mean of PCI. Countries with identical baskets get
  // bit-identical ECI this way.
  sol.pci_raw = detail::product_average(m, vec);
  for (double& x : sol.pci_raw) x *= sol.b;
  sol.eci_raw = detail::country_average(m, sol.pci_raw);

  std::vector<double> kc(m.diversification().begin(), m.diversification().end());
  const double rho = stats::spearman(sol.eci_raw, kc);
  const auto first = static_cast<std::size_t>(
      std::min_element(sol.countries.begin(), sol.countries.end()) - sol.countries.begin());
  if (rho < 0.0 || (rho == 0.0 && sol.eci_raw[first] < 0.0)) {
    for (double& x : sol.eci_raw) x = -x;
    for (double& x : sol.pci_raw) x = -x;
  }
  sol.eci_z = stats::zscore(sol.eci_raw);
  sol.pci_z = stats::zscore(sol.pci_raw);
  return sol;
}

/// Largest violation of either coupled equation, relative to the largest
/// absolute entry of the two raw vectors.
inline double eci_residual(const BinaryCPMatrix& m, const EigenSolution& sol) {
  if (sol.eci_raw.size() != m.rows() || sol.pci_raw.size() != m.cols())
    throw Error(ErrorKind::LengthMismatch, "solution does not match matrix");
  const auto pci_avg = detail::country_average(m, sol.pci_raw);
  const auto eci_avg = detail::product_average(m, sol.eci_raw);
  double worst = 0.0, scale = 0.0;
  for (std::size_t c = 0; c < m.rows(); ++c) {
    worst = std::max(worst, std::abs(sol.eci_raw[c] - sol.a * pci_avg[c]));
    scale = std::max(scale, std::abs(sol.eci_raw[c]));
  }
  for (std::size_t p = 0; p < m.cols(); ++p) {
    worst = std::max(worst, std::abs(sol.pci_raw[p] - sol.b * eci_avg[p]));
    scale = std::max(scale, std::abs(sol.pci_raw[p]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

/// Alternating averages starting from diversification and ubiquity.
inline ReflectionsTrace method_of_reflections(const BinaryCPMatrix& m, std::size_t depth) {
  ReflectionsTrace t;
  t.depth = depth;
  t.country_levels.emplace_back(m.diversification().begin(), m.diversification().end());
  t.product_levels.emplace_back(m.ubiquity().begin(), m.ubiquity().end());
  for (std::size_t n = 1; n <= depth; ++n) {
    auto kc = detail::country_average(m, t.product_levels.back());
    auto kp = detail::product_average(m, t.country_levels.back());
    t.country_levels.push_back(std::move(kc));
    t.product_levels.push_back(std::move(kp));
  }
  return t;
}

inline RankingResult eci_ranking(const EigenSolution& s) {
  auto r = make_ranking("eci", s.countries, s.eci_z);
  r.order_n = s.order_n;
  r.lambda = s.lambda;
  return r;
}

inline RankingResult pci_ranking(const EigenSolution& s) {
  auto r = make_ranking("pci", s.products, s.pci_z);
  r.order_n = s.order_n;
  r.lambda = s.lambda;
  return r;
}

}  // namespace efk
