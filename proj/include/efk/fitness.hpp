#pragma once

// Fitness-Complexity: the nonlinear fixed point
//
//   F_c = sum_p M_cp Q_p                 (complexity-weighted diversification)
//   Q_p = 1 / sum_c M_cp / F_c           (harmonic penalty from weak exporters)
//
// with both vectors renormalized to unit mean after every step.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "efk/error.hpp"
#include "efk/matrix.hpp"
#include "efk/ranking.hpp"

namespace efk {

struct FitnessResult {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> fitness;
  std::vector<double> complexity;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t final_rank_stability = 0;
  double residual = std::numeric_limits<double>::infinity();
};

/// Raised when neither stopping rule fires within max_iter, or the iteration
/// leaves the positive finite range. Carries the last good state.
class FitnessNonConvergence : public Error {
 public:
  explicit FitnessNonConvergence(FitnessResult last, const std::string& why)
      : Error(ErrorKind::NonConvergence, why), last_(std::move(last)) {}
  const FitnessResult& last() const noexcept { return last_; }

 private:
  FitnessResult last_;
};

struct FitnessStep {
  std::vector<double> fitness;
  std::vector<double> complexity;
};

namespace detail {

inline void normalize_to_unit_mean(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  for (double& x : v) x /= mean;
}

inline double max_relative_change(const std::vector<double>& before, const std::vector<double>& after) {
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    worst = std::max(worst, std::abs(after[i] - before[i]) / std::abs(before[i]));
  return worst;
}

inline bool all_positive_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

/// One map application. Both outputs use the *input* fitness, i.e. the
/// updates are simultaneous.
inline FitnessStep fitness_step(const BinaryCPMatrix& m, const std::vector<double>& f, const std::vector<double>& q) {
  const auto C = m.rows(), P = m.cols();
  if (f.size() != C || q.size() != P) throw Error(ErrorKind::LengthMismatch, "fitness/complexity size mismatch");
  if (!detail::all_positive_finite(f) || !detail::all_positive_finite(q))
    throw Error(ErrorKind::InvalidArgument, "fitness and complexity inputs must be positive and finite");

  FitnessStep out{std::vector<double>(C, 0.0), std::vector<double>(P, 0.0)};
  std::vector<double> inverse_sum(P, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const auto row = m.row(c);
    const double inv_f = 1.0 / f[c];
    double acc = 0.0;
    for (std::size_t p = 0; p < P; ++p)
      if (row[p]) {
        acc += q[p];
        inverse_sum[p] += inv_f;
      }
    out.fitness[c] = acc;
  }
  for (std::size_t p = 0; p < P; ++p) {
    if (inverse_sum[p] == 0.0) throw Error(ErrorKind::ZeroDenominator, "product " + m.products()[p] + " has no exporter");
    out.complexity[p] = 1.0 / inverse_sum[p];
  }
  detail::normalize_to_unit_mean(out.fitness);
  detail::normalize_to_unit_mean(out.complexity);
  return out;
}

struct FitnessOptions {
  double tol = 1e-9;
  std::size_t max_iter = 1000;
  std::size_t rank_patience = 20;
};

/// Iterates fitness_step from the uniform state until either the maximum
/// relative change of both vectors drops below tol, or the rank orders of
/// both vectors have stayed unchanged for rank_patience consecutive steps.
/// The second rule covers matrices on which weak countries decay towards
/// zero geometrically without ever reordering.
inline FitnessResult fitness_fixed_point(const BinaryCPMatrix& m, const FitnessOptions& opt = {}) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorKind::EmptyMatrix, "fitness of an empty matrix");
  if (!(opt.tol > 0.0) || opt.max_iter == 0) throw Error(ErrorKind::InvalidArgument, "tol must be > 0 and max_iter >= 1");

  FitnessResult r;
  r.countries = m.countries();
  r.products = m.products();
  r.fitness.assign(m.rows(), 1.0);
  r.complexity.assign(m.cols(), 1.0);

  auto f_ranks = rank_labels(r.fitness, r.countries);
  auto q_ranks = rank_labels(r.complexity, r.products);
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    auto next = fitness_step(m, r.fitness, r.complexity);
    if (!detail::all_positive_finite(next.fitness) || !detail::all_positive_finite(next.complexity))
      throw FitnessNonConvergence(r, "iteration " + std::to_string(it) + " left the positive finite range");

    const double change = std::max(detail::max_relative_change(r.fitness, next.fitness),
                                   detail::max_relative_change(r.complexity, next.complexity));
    auto nf = rank_labels(next.fitness, r.countries);
    auto nq = rank_labels(next.complexity, r.products);
    r.final_rank_stability = (nf == f_ranks && nq == q_ranks) ? r.final_rank_stability + 1 : 0;
    f_ranks = std::move(nf);
    q_ranks = std::move(nq);

    r.fitness = std::move(next.fitness);
    r.complexity = std::move(next.complexity);
    r.iterations = it;
    r.residual = change;
    if (change < opt.tol || (opt.rank_patience > 0 && r.final_rank_stability >= opt.rank_patience)) {
      r.converged = true;
      return r;
    }
  }
  throw FitnessNonConvergence(r, "no stopping rule met within " + std::to_string(opt.max_iter) + " iterations");
}

inline RankingResult fitness_ranking(const FitnessResult& r) {
  auto out = make_ranking("fitness", r.countries, r.fitness);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.residual = r.residual;
  return out;
}

inline RankingResult complexity_ranking(const FitnessResult& r) {
  auto out = make_ranking("complexity", r.products, r.complexity);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.residual = r.residual;
  return out;
}

}  // namespace efk
