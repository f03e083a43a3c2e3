#pragma once

// JSON and CSV encodings of results. Every JSON document carries
// "schema_version": 1.

#include <nlohmann/json.hpp>

#include <ostream>
#include <string>
#include <vector>

#include "efk/counterfactual.hpp"
#include "efk/dynamics.hpp"
#include "efk/eci.hpp"
#include "efk/fitness.hpp"
#include "efk/matrix.hpp"
#include "efk/ranking.hpp"
#include "efk/text.hpp"

namespace efk::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json matrix_to_json(const BinaryCPMatrix& m) {
  json rows = json::array();
  for (std::size_t c = 0; c < m.rows(); ++c) {
    json row = json::array();
    for (std::size_t p = 0; p < m.cols(); ++p) row.push_back(m(c, p) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion},
          {"countries", m.countries()},
          {"products", m.products()},
          {"rows", std::move(rows)}};
}

inline BinaryCPMatrix matrix_from_json(const json& j) {
  try {
    auto countries = j.at("countries").get<std::vector<std::string>>();
    auto products = j.at("products").get<std::vector<std::string>>();
    std::vector<std::uint8_t> cells;
    const auto& rows = j.at("rows");
    if (rows.size() != countries.size()) throw Error(ErrorKind::LengthMismatch, "row count != country count");
    for (const auto& row : rows) {
      if (row.size() != products.size()) throw Error(ErrorKind::LengthMismatch, "row length != product count");
      for (const auto& v : row) {
        const int x = v.get<int>();
        if (x != 0 && x != 1) throw Error(ErrorKind::MalformedRecord, "matrix cells must be 0 or 1");
        cells.push_back(static_cast<std::uint8_t>(x));
      }
    }
    return BinaryCPMatrix::from_cells(std::move(countries), std::move(products), cells);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("matrix JSON: ") + e.what());
  }
}

inline json ranking_to_json(const RankingResult& r) {
  std::vector<std::size_t> by_rank(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) by_rank[r.ranks[i] - 1] = i;
  json entries = json::array();
  for (auto i : by_rank) entries.push_back({{"entity", r.entities[i]}, {"score", r.scores[i]}, {"rank", r.ranks[i]}});
  json j = {{"schema_version", kSchemaVersion},
            {"algorithm", r.algorithm},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"residual", r.residual}};
  if (r.order_n) j["order_n"] = *r.order_n;
  if (r.lambda) j["lambda"] = *r.lambda;
  if (r.algorithm == "eci" || r.algorithm == "pci") j["standardization"] = "population";
  j["ranking"] = std::move(entries);
  return j;
}

inline json nestedness_to_json(const NestednessReport& n, const BinaryCPMatrix& m) {
  return {{"schema_version", kSchemaVersion},
          {"countries", m.rows()},
          {"products", m.cols()},
          {"nodf_rows", n.nodf_rows},
          {"nodf_cols", n.nodf_cols},
          {"nodf_total", n.nodf_total},
          {"fill", n.fill}};
}

inline json eigen_to_json(const EigenSolution& s) {
  return {{"schema_version", kSchemaVersion},
          {"algorithm", "eci"},
          {"order_n", s.order_n},
          {"lambda", s.lambda},
          {"a", s.a},
          {"b", s.b},
          {"spectrum", s.spectrum},
          {"standardization", "population"},
          {"eci", ranking_to_json(eci_ranking(s))["ranking"]},
          {"pci", ranking_to_json(pci_ranking(s))["ranking"]}};
}

/// `side,entity,level_0,...,level_depth`, countries first.
inline void write_reflections_csv(std::ostream& out, const ReflectionsTrace& t, const BinaryCPMatrix& m) {
  out << "side,entity";
  for (std::size_t n = 0; n <= t.depth; ++n) out << ",level_" << n;
  out << '\n';
  for (std::size_t c = 0; c < m.rows(); ++c) {
    out << "country," << m.countries()[c];
    for (const auto& level : t.country_levels) out << ',' << text::real(level[c]);
    out << '\n';
  }
  for (std::size_t p = 0; p < m.cols(); ++p) {
    out << "product," << m.products()[p];
    for (const auto& level : t.product_levels) out << ',' << text::real(level[p]);
    out << '\n';
  }
}

inline json comparison_to_json(const RankingComparison& c) {
  json deltas = json::array();
  for (const auto& d : c.deltas)
    deltas.push_back({{"entity", d.entity}, {"rank_a", d.rank_a}, {"rank_b", d.rank_b}, {"delta", d.delta}});
  return {{"schema_version", kSchemaVersion},
          {"n", c.n},
          {"spearman", c.spearman},
          {"kendall_tau", c.kendall_tau},
          {"top_k", c.top_k},
          {"top_k_overlap", c.top_k_overlap},
          {"deltas", std::move(deltas)}};
}

inline json outcome_to_json(const CounterfactualOutcome& o) {
  return {{"schema_version", kSchemaVersion},
          {"country", o.country},
          {"kept_products", o.kept_products},
          {"removed_products", o.removed_products},
          {"frozen_pci", o.frozen_pci},
          {"fitness_rank_before", o.fitness_rank_before},
          {"fitness_rank_after", o.fitness_rank_after},
          {"fitness_score_before", o.fitness_score_before},
          {"fitness_score_after", o.fitness_score_after},
          {"eci_rank_before", o.eci_rank_before},
          {"eci_rank_after", o.eci_rank_after},
          {"eci_z_before", o.eci_z_before},
          {"eci_z_after", o.eci_z_after},
          {"eci_raw_before", o.eci_raw_before},
          {"eci_raw_after", o.eci_raw_after}};
}

inline void write_batch_csv(std::ostream& out, const BatchReport& b) {
  out << "country,product,fit_rank_before,fit_rank_after,eci_rank_before,eci_rank_after\n";
  for (const auto& r : b.rows)
    out << r.country << ',' << r.product << ',' << r.fit_rank_before << ',' << r.fit_rank_after << ','
        << r.eci_rank_before << ',' << r.eci_rank_after << '\n';
}

inline json forecast_to_json(const ForecastResult& f) {
  return {{"country", f.query.country},
          {"year", f.query.year},
          {"x", f.query.x},
          {"y", f.query.y},
          {"horizon", f.horizon},
          {"analogues_used", f.analogues_used},
          {"mean_dx", f.mean_dx},
          {"mean_dy", f.mean_dy},
          {"sx", f.sx},
          {"sy", f.sy},
          {"regime", std::string(to_string(f.regime))}};
}

inline void write_forecast_csv(std::ostream& out, const std::vector<ForecastResult>& fs) {
  out << "country,year,x,y,horizon,analogues_used,mean_dx,mean_dy,sx,sy,regime\n";
  for (const auto& f : fs)
    out << f.query.country << ',' << f.query.year << ',' << text::real(f.query.x) << ',' << text::real(f.query.y)
        << ',' << f.horizon << ',' << f.analogues_used << ',' << text::real(f.mean_dx) << ','
        << text::real(f.mean_dy) << ',' << text::real(f.sx) << ',' << text::real(f.sy) << ','
        << to_string(f.regime) << '\n';
}

inline json forecast_options_to_json(const ForecastOptions& o) {
  return {{"horizon", o.horizon},
          {"radius", o.radius},
          {"min_analogues", o.min_analogues},
          {"theta", o.theta},
          {"theta_note", "laminar iff sd of log10 GDPpc displacement <= theta; a reporting convention"}};
}

inline json regime_grid_to_json(const RegimeGrid& g) {
  json cells = json::array();
  for (const auto& c : g.cells)
    cells.push_back({{"ix", c.ix},
                     {"iy", c.iy},
                     {"x", c.x},
                     {"y", c.y},
                     {"regime", std::string(to_string(c.regime))},
                     {"analogues", c.analogues},
                     {"sx", c.sx},
                     {"mean_dx", c.mean_dx},
                     {"mean_dy", c.mean_dy}});
  return {{"nx", g.nx},
          {"ny", g.ny},
          {"xn_range", {g.xn_min, g.xn_max}},
          {"yn_range", {g.yn_min, g.yn_max}},
          {"cells", std::move(cells)}};
}

inline json backtest_to_json(const BacktestReport& b, int split_year, const ForecastOptions& o) {
  return {{"schema_version", kSchemaVersion},
          {"split_year", split_year},
          {"options", forecast_options_to_json(o)},
          {"queries", b.queries},
          {"forecasts", b.forecasts},
          {"skipped", b.skipped},
          {"leakage_violations", b.leakage_violations},
          {"mae_analogue", b.mae_analogue},
          {"mae_persistence", b.mae_persistence},
          {"mae_global_mean", b.mae_global_mean}};
}

/// Everything an external plotting tool needs for the GDPpc-Fitness plane.
inline json plot_data_json(const TrajectorySet& set, const RegimeGrid& grid, const std::vector<ForecastResult>& forecasts,
                           const ForecastOptions& o) {
  json traj = json::object();
  for (const auto& p : set.points()) {
    if (!traj.contains(p.country)) traj[p.country] = json::array();
    traj[p.country].push_back({{"year", p.year}, {"x", p.x}, {"y", p.y}});
  }
  json fc = json::array();
  for (const auto& f : forecasts) fc.push_back(forecast_to_json(f));
  const auto& n = set.normalization();
  return {{"schema_version", kSchemaVersion},
          {"axes", {{"x", "log10 GDPpc"}, {"y", "log10 Fitness"}}},
          {"normalization", {{"mean_x", n.mean_x}, {"sd_x", n.sd_x}, {"mean_y", n.mean_y}, {"sd_y", n.sd_y}}},
          {"options", forecast_options_to_json(o)},
          {"trajectories", std::move(traj)},
          {"regime_grid", regime_grid_to_json(grid)},
          {"forecasts", std::move(fc)}};
}

}  // namespace efk::io
