#pragma once

// Product-removal experiments and cross-algorithm ranking comparison.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "efk/eci.hpp"
#include "efk/error.hpp"
#include "efk/fitness.hpp"
#include "efk/matrix.hpp"
#include "efk/ranking.hpp"
#include "efk/stats.hpp"

namespace efk {

/// Zeroes the country's row outside kept_products. Products left without any
/// exporter are pruned and listed in removed_products() of the result; no
/// other row changes.
inline BinaryCPMatrix restrict_country(const BinaryCPMatrix& m, const std::string& country,
                                       const std::vector<std::string>& kept_products) {
  auto ci = m.country_index(country);
  if (!ci) throw Error(ErrorKind::UnknownEntity, "country " + country);
  if (kept_products.empty()) throw Error(ErrorKind::InvalidArgument, "kept_products is empty");

  std::vector<std::uint8_t> keep(m.cols(), 0);
  for (const auto& code : kept_products) {
    auto pi = m.product_index(code);
    if (!pi) throw Error(ErrorKind::UnknownEntity, "product " + code);
    if (!m(*ci, *pi)) throw Error(ErrorKind::NotCurrentlyExported, country + " does not export " + code);
    keep[*pi] = 1;
  }
  auto cells = m.cells();
  for (std::size_t p = 0; p < m.cols(); ++p) cells[*ci * m.cols() + p] &= keep[p];
  return BinaryCPMatrix::from_cells(m.countries(), m.products(), cells);
}

/// The eigenvector sign is a gauge. Diversification-based orientation is
/// unreliable on a restricted matrix (the restricted country now has k_c = 1),
/// so the recomputed solution is oriented to agree (Spearman >= 0) with the
/// reference solution on every country except `excluded`. A zero correlation
/// leaves the solution's own orientation in place.
inline void align_orientation(EigenSolution& sol, const EigenSolution& reference, const std::string& excluded) {
  std::map<std::string, double> ref;
  for (std::size_t c = 0; c < reference.countries.size(); ++c) ref[reference.countries[c]] = reference.eci_raw[c];
  std::vector<double> mine, theirs;
  for (std::size_t c = 0; c < sol.countries.size(); ++c) {
    if (sol.countries[c] == excluded) continue;
    auto it = ref.find(sol.countries[c]);
    if (it == ref.end()) continue;
    mine.push_back(sol.eci_raw[c]);
    theirs.push_back(it->second);
  }
  if (mine.size() < 2 || stats::spearman(mine, theirs) >= 0.0) return;
  for (auto* v : {&sol.eci_raw, &sol.pci_raw, &sol.eci_z, &sol.pci_z})
    for (double& x : *v) x = -x;
}

struct CounterfactualOptions {
  FitnessOptions fitness;
  std::size_t order_n = 2;
  // Keep the unrestricted PCI and only re-average the country's basket,
  // instead of re-solving the eigenproblem on the restricted matrix.
  bool frozen_pci = false;
};

struct CounterfactualOutcome {
  std::string country;
  std::vector<std::string> kept_products;
  std::vector<std::string> removed_products;  // lost their last exporter
  bool frozen_pci = false;
  std::size_t fitness_rank_before = 0, fitness_rank_after = 0;
  std::size_t eci_rank_before = 0, eci_rank_after = 0;
  double fitness_score_before = 0.0, fitness_score_after = 0.0;
  double eci_z_before = 0.0, eci_z_after = 0.0;
  double eci_raw_before = 0.0, eci_raw_after = 0.0;
};

inline CounterfactualOutcome counterfactual_experiment(const BinaryCPMatrix& m, const std::string& country,
                                                       const std::vector<std::string>& kept_products,
                                                       const CounterfactualOptions& opt = {}) {
  auto restricted = restrict_country(m, country, kept_products);

  const auto fit_before = fitness_fixed_point(m, opt.fitness);
  const auto eci_before = eci_eigen(m, opt.order_n);
  const auto fit_after = fitness_fixed_point(restricted, opt.fitness);

  CounterfactualOutcome out;
  out.country = country;
  out.kept_products = kept_products;
  std::sort(out.kept_products.begin(), out.kept_products.end());
  out.removed_products = restricted.removed_products();
  out.frozen_pci = opt.frozen_pci;

  const auto c0 = *m.country_index(country);
  const auto c1 = *restricted.country_index(country);
  out.fitness_rank_before = rank_labels(fit_before.fitness, fit_before.countries)[c0];
  out.fitness_rank_after = rank_labels(fit_after.fitness, fit_after.countries)[c1];
  out.fitness_score_before = fit_before.fitness[c0];
  out.fitness_score_after = fit_after.fitness[c1];
  out.eci_rank_before = rank_labels(eci_before.eci_z, eci_before.countries)[c0];
  out.eci_z_before = eci_before.eci_z[c0];
  out.eci_raw_before = eci_before.eci_raw[c0];

  if (opt.frozen_pci) {
    double acc = 0.0;
    for (const auto& code : out.kept_products) acc += eci_before.pci_raw[*m.product_index(code)];
    auto eci = eci_before.eci_raw;
    eci[c0] = eci_before.a * acc / static_cast<double>(out.kept_products.size());
    const auto z = stats::zscore(eci);
    out.eci_raw_after = eci[c0];
    out.eci_z_after = z[c0];
    out.eci_rank_after = rank_labels(z, eci_before.countries)[c0];
  } else {
    auto eci_after = eci_eigen(restricted, opt.order_n);
    align_orientation(eci_after, eci_before, country);
    out.eci_raw_after = eci_after.eci_raw[c1];
    out.eci_z_after = eci_after.eci_z[c1];
    out.eci_rank_after = rank_labels(eci_after.eci_z, eci_after.countries)[c1];
  }
  return out;
}

/// Keep only `product` in the country's basket.
inline CounterfactualOutcome coalfish_experiment(const BinaryCPMatrix& m, const std::string& country,
                                                 const std::string& product, const CounterfactualOptions& opt = {}) {
  return counterfactual_experiment(m, country, {product}, opt);
}

struct BatchRow {
  std::string country;
  std::string product;
  std::size_t fit_rank_before = 0, fit_rank_after = 0;
  std::size_t eci_rank_before = 0, eci_rank_after = 0;
};

struct BatchReport {
  std::vector<BatchRow> rows;
  std::vector<std::string> failures;  // "country,product: reason"
};

/// Runs coalfish_experiment for every product of each listed country (all
/// countries when `countries` is empty). Pairs whose restricted matrix has no
/// well-defined solution are reported in `failures` rather than aborting.
inline BatchReport coalfish_batch(const BinaryCPMatrix& m, std::vector<std::string> countries,
                                  const CounterfactualOptions& opt = {}) {
  if (countries.empty()) countries = m.countries();
  BatchReport report;
  for (const auto& c : countries) {
    auto ci = m.country_index(c);
    if (!ci) throw Error(ErrorKind::UnknownEntity, "country " + c);
    for (std::size_t p = 0; p < m.cols(); ++p) {
      if (!m(*ci, p)) continue;
      try {
        auto o = coalfish_experiment(m, c, m.products()[p], opt);
        report.rows.push_back(
            {c, m.products()[p], o.fitness_rank_before, o.fitness_rank_after, o.eci_rank_before, o.eci_rank_after});
      } catch (const Error& e) {
        report.failures.push_back(c + "," + m.products()[p] + ": " + e.what());
      }
    }
  }
  return report;
}

struct RankDelta {
  std::string entity;
  std::size_t rank_a = 0;
  std::size_t rank_b = 0;
  long long delta = 0;  // rank_b - rank_a
};

struct RankingComparison {
  std::size_t n = 0;
  double spearman = 1.0;
  double kendall_tau = 1.0;
  std::size_t top_k = 0;
  std::size_t top_k_overlap = 0;
  std::vector<RankDelta> deltas;  // sorted by entity code
};

/// Spearman and Kendall tau on the rank labels (which are permutations of
/// 1..n), overlap of the two top-k sets and per-entity rank deltas.
inline RankingComparison compare_rankings(const RankingResult& a, const RankingResult& b, std::size_t k = 10) {
  std::map<std::string, std::size_t> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) ra[a.entities[i]] = a.ranks[i];
  for (std::size_t i = 0; i < b.size(); ++i) rb[b.entities[i]] = b.ranks[i];
  if (ra.size() != rb.size() ||
      !std::equal(ra.begin(), ra.end(), rb.begin(), [](const auto& x, const auto& y) { return x.first == y.first; }))
    throw Error(ErrorKind::EntityMismatch, "rankings cover different entity sets");
  if (ra.empty()) throw Error(ErrorKind::EmptyInput, "empty rankings");

  RankingComparison out;
  out.n = ra.size();
  const double n = static_cast<double>(out.n);
  double d2 = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [entity, r1] : ra) {
    const auto r2 = rb[entity];
    const auto d = static_cast<long long>(r2) - static_cast<long long>(r1);
    out.deltas.push_back({entity, r1, r2, d});
    d2 += static_cast<double>(d * d);
    pairs.emplace_back(r1, r2);
  }
  out.spearman = out.n > 1 ? 1.0 - 6.0 * d2 / (n * (n * n - 1.0)) : 1.0;

  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const bool sa = pairs[i].first < pairs[j].first;
      const bool sb = pairs[i].second < pairs[j].second;
      (sa == sb ? concordant : discordant) += 1;
    }
  out.kendall_tau =
      out.n > 1 ? static_cast<double>(concordant - discordant) / (n * (n - 1.0) / 2.0) : 1.0;

  out.top_k = std::min(k, out.n);
  for (const auto& [r1, r2] : pairs)
    if (r1 <= out.top_k && r2 <= out.top_k) ++out.top_k_overlap;
  return out;
}

}  // namespace efk
