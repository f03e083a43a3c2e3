#pragma once

// Country trajectories in the (log10 GDPpc, log10 Fitness) plane and
// forecasting by analogues: the displacement expected from a state is the
// average displacement observed from nearby past states.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "efk/error.hpp"
#include "efk/fitness.hpp"
#include "efk/ingest.hpp"
#include "efk/stats.hpp"
#include "efk/text.hpp"

namespace efk {

struct TrajectoryPoint {
  std::string country;
  int year = 0;
  double x = 0.0;  // log10 GDPpc
  double y = 0.0;  // log10 Fitness
  double xn = 0.0;
  double yn = 0.0;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Per-axis z-normalization statistics (population sd; a zero sd is stored
/// as 1 so a degenerate axis collapses to 0 instead of dividing by zero).
struct AxisNormalization {
  double mean_x = 0.0, sd_x = 1.0;
  double mean_y = 0.0, sd_y = 1.0;
};

/// Immutable point set sorted by (country, year), one point per key.
class TrajectorySet {
 public:
  TrajectorySet() = default;

  static TrajectorySet from_points(std::vector<TrajectoryPoint> points) {
    if (points.empty()) throw Error(ErrorKind::EmptyInput, "no trajectory points");
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
      return a.country != b.country ? a.country < b.country : a.year < b.year;
    });
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw Error(ErrorKind::InvalidArgument, "non-finite trajectory point " + p.country + " " + std::to_string(p.year));
      if (i > 0 && p.country == points[i - 1].country && p.year == points[i - 1].year)
        throw Error(ErrorKind::DuplicateSample, p.country + " " + std::to_string(p.year));
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    TrajectorySet s;
    s.norm_.mean_x = stats::mean(xs);
    s.norm_.mean_y = stats::mean(ys);
    const double sx = stats::population_sd(xs), sy = stats::population_sd(ys);
    s.norm_.sd_x = sx > 0.0 ? sx : 1.0;
    s.norm_.sd_y = sy > 0.0 ? sy : 1.0;
    s.points_ = std::move(points);
    s.min_year_ = s.points_.front().year;
    s.max_year_ = s.points_.front().year;
    for (std::size_t i = 0; i < s.points_.size(); ++i) {
      auto& p = s.points_[i];
      s.normalize_in_place(p);
      s.index_[{p.country, p.year}] = i;
      s.min_year_ = std::min(s.min_year_, p.year);
      s.max_year_ = std::max(s.max_year_, p.year);
    }
    return s;
  }

  const std::vector<TrajectoryPoint>& points() const { return points_; }
  const AxisNormalization& normalization() const { return norm_; }
  std::size_t size() const { return points_.size(); }
  int min_year() const { return min_year_; }
  int max_year() const { return max_year_; }

  const TrajectoryPoint* find(const std::string& country, int year) const {
    auto it = index_.find({country, year});
    return it == index_.end() ? nullptr : &points_[it->second];
  }

  /// Copy of `p` with xn, yn recomputed from x, y under this set's statistics.
  TrajectoryPoint normalized(TrajectoryPoint p) const {
    normalize_in_place(p);
    return p;
  }

  std::pair<double, double> denormalize(double xn, double yn) const {
    return {norm_.mean_x + xn * norm_.sd_x, norm_.mean_y + yn * norm_.sd_y};
  }

 private:
  void normalize_in_place(TrajectoryPoint& p) const {
    p.xn = (p.x - norm_.mean_x) / norm_.sd_x;
    p.yn = (p.y - norm_.mean_y) / norm_.sd_y;
  }

  std::vector<TrajectoryPoint> points_;
  std::map<std::pair<std::string, int>, std::size_t> index_;
  AxisNormalization norm_;
  int min_year_ = 0, max_year_ = 0;
};

inline TrajectoryPoint make_point(std::string country, int year, double gdppc, double fitness) {
  if (!(gdppc > 0.0) || !(fitness > 0.0))
    throw Error(ErrorKind::InvalidArgument, "GDPpc and Fitness must be positive for " + country);
  return {std::move(country), year, std::log10(gdppc), std::log10(fitness), 0.0, 0.0};
}

/// One point per (country, year) present in both sources. Years missing on
/// either side are skipped silently.
inline TrajectorySet build_trajectories(const std::map<int, FitnessResult>& fitness_by_year,
                                        const std::vector<GdpSeries>& gdp) {
  std::map<std::string, const GdpSeries*> by_country;
  for (const auto& s : gdp) by_country[s.country] = &s;
  std::vector<TrajectoryPoint> pts;
  for (const auto& [year, fr] : fitness_by_year)
    for (std::size_t c = 0; c < fr.countries.size(); ++c) {
      auto it = by_country.find(fr.countries[c]);
      if (it == by_country.end()) continue;
      auto g = it->second->samples.find(year);
      if (g == it->second->samples.end()) continue;
      pts.push_back(make_point(fr.countries[c], year, g->second, fr.fitness[c]));
    }
  if (pts.empty()) throw Error(ErrorKind::EmptyInput, "no (country, year) present in both Fitness and GDP data");
  return TrajectorySet::from_points(std::move(pts));
}

enum class Regime { Laminar, Turbulent, NoData };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Laminar: return "laminar";
    case Regime::Turbulent: return "turbulent";
    case Regime::NoData: return "no-data";
  }
  return "no-data";
}

struct ForecastOptions {
  int horizon = 5;
  double radius = 0.25;              // in z-normalized units
  std::size_t min_analogues = 5;
  double theta = 0.05;               // laminar iff sd of dx <= theta (log10 units)
  std::optional<int> cutoff_year;    // if set, analogue year + horizon <= cutoff_year

  void validate() const {
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
    if (min_analogues < 1) throw Error(ErrorKind::InvalidArgument, "min_analogues must be >= 1");
    if (!(theta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "theta must be >= 0");
  }
};

struct ForecastResult {
  TrajectoryPoint query;
  int horizon = 0;
  std::size_t analogues_used = 0;
  double mean_dx = 0.0, mean_dy = 0.0;
  double sx = 0.0, sy = 0.0;  // sample sd
  Regime regime = Regime::NoData;
  std::vector<std::pair<std::string, int>> analogues;  // (country, start year)
};

/// Whether a past state may serve as analogue for `query`: its future at
/// year + horizon must be observed, and a country's own history only counts
/// up to the query year.
inline bool admissible_analogue(const TrajectorySet& set, const TrajectoryPoint& query, const std::string& country,
                                int year, const ForecastOptions& opt) {
  const int end = year + opt.horizon;
  if (end > set.max_year()) return false;
  if (!set.find(country, year) || !set.find(country, end)) return false;
  if (country == query.country && end > query.year) return false;
  if (opt.cutoff_year && end > *opt.cutoff_year) return false;
  return true;
}

/// Number of analogues in `r` that violate the temporal constraints.
inline std::size_t leakage_violations(const TrajectorySet& set, const ForecastResult& r, const ForecastOptions& opt) {
  std::size_t bad = 0;
  for (const auto& [country, year] : r.analogues)
    if (!admissible_analogue(set, r.query, country, year, opt)) ++bad;
  return bad;
}

inline ForecastResult analogue_forecast(const TrajectorySet& set, const TrajectoryPoint& query_in,
                                        const ForecastOptions& opt = {}) {
  opt.validate();
  if (set.size() == 0) throw Error(ErrorKind::EmptyInput, "empty trajectory set");
  const auto query = set.normalized(query_in);
  const double r2 = opt.radius * opt.radius;

  ForecastResult out;
  out.query = query;
  out.horizon = opt.horizon;
  std::vector<double> dxs, dys;
  for (const auto& s : set.points()) {
    const double ex = s.xn - query.xn, ey = s.yn - query.yn;
    if (ex * ex + ey * ey > r2) continue;
    if (!admissible_analogue(set, query, s.country, s.year, opt)) continue;
    const auto* future = set.find(s.country, s.year + opt.horizon);
    dxs.push_back(future->x - s.x);
    dys.push_back(future->y - s.y);
    out.analogues.emplace_back(s.country, s.year);
  }
  if (dxs.size() < opt.min_analogues) throw InsufficientAnalogues(dxs.size(), opt.min_analogues);
  if (leakage_violations(set, out, opt) != 0) throw std::logic_error("analogue leakage");

  out.analogues_used = dxs.size();
  out.mean_dx = stats::mean(dxs);
  out.mean_dy = stats::mean(dys);
  out.sx = stats::sample_sd(dxs);
  out.sy = stats::sample_sd(dys);
  out.regime = out.sx <= opt.theta ? Regime::Laminar : Regime::Turbulent;
  return out;
}

struct RegimeCell {
  std::size_t ix = 0, iy = 0;
  double xn = 0.0, yn = 0.0;  // cell center, normalized
  double x = 0.0, y = 0.0;    // cell center, log10 units
  Regime regime = Regime::NoData;
  std::size_t analogues = 0;
  double sx = 0.0;
  double mean_dx = 0.0, mean_dy = 0.0;
};

struct RegimeGrid {
  std::size_t nx = 0, ny = 0;
  double xn_min = 0.0, xn_max = 0.0, yn_min = 0.0, yn_max = 0.0;
  std::vector<RegimeCell> cells;  // row-major: iy * nx + ix

  const RegimeCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * nx + ix]; }
};

/// Classifies the centers of an nx x ny grid over the bounding box of the
/// normalized coordinates. Cells without enough analogues are no-data.
inline RegimeGrid regime_map(const TrajectorySet& set, std::size_t nx, std::size_t ny, ForecastOptions opt = {}) {
  if (set.size() == 0) throw Error(ErrorKind::EmptyInput, "empty trajectory set");
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidArgument, "grid needs nx, ny >= 2");
  opt.validate();

  RegimeGrid g;
  g.nx = nx;
  g.ny = ny;
  g.xn_min = g.xn_max = set.points().front().xn;
  g.yn_min = g.yn_max = set.points().front().yn;
  for (const auto& p : set.points()) {
    g.xn_min = std::min(g.xn_min, p.xn);
    g.xn_max = std::max(g.xn_max, p.xn);
    g.yn_min = std::min(g.yn_min, p.yn);
    g.yn_max = std::max(g.yn_max, p.yn);
  }
  const double wx = (g.xn_max - g.xn_min) / static_cast<double>(nx);
  const double wy = (g.yn_max - g.yn_min) / static_cast<double>(ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      RegimeCell cell;
      cell.ix = ix;
      cell.iy = iy;
      cell.xn = g.xn_min + (static_cast<double>(ix) + 0.5) * wx;
      cell.yn = g.yn_min + (static_cast<double>(iy) + 0.5) * wy;
      std::tie(cell.x, cell.y) = set.denormalize(cell.xn, cell.yn);
      // A country-less query: only the horizon and cutoff constraints apply.
      TrajectoryPoint q{"", set.max_year(), cell.x, cell.y, 0.0, 0.0};
      try {
        auto f = analogue_forecast(set, q, opt);
        cell.regime = f.regime;
        cell.analogues = f.analogues_used;
        cell.sx = f.sx;
        cell.mean_dx = f.mean_dx;
        cell.mean_dy = f.mean_dy;
      } catch (const InsufficientAnalogues& e) {
        cell.regime = Regime::NoData;
        cell.analogues = e.found();
      }
      g.cells.push_back(cell);
    }
  return g;
}

struct BacktestReport {
  std::size_t queries = 0;    // points with a realized outcome
  std::size_t forecasts = 0;  // queries that found enough analogues
  std::size_t skipped = 0;
  std::size_t leakage_violations = 0;
  double mae_analogue = 0.0;
  double mae_persistence = 0.0;   // predicts dx = 0
  double mae_global_mean = 0.0;   // predicts the mean of all admissible past displacements
};

/// Out-of-sample evaluation on every point at year >= split_year whose
/// position `horizon` years later is known. Each query only sees
/// displacements that ended by its own year.
inline BacktestReport backtest(const TrajectorySet& set, ForecastOptions opt, int split_year) {
  opt.validate();
  std::vector<const TrajectoryPoint*> queries;
  for (const auto& p : set.points())
    if (p.year >= split_year && set.find(p.country, p.year + opt.horizon)) queries.push_back(&p);
  if (queries.empty()) throw Error(ErrorKind::EmptyInput, "no query at or after split year has a realized outcome");

  BacktestReport rep;
  rep.queries = queries.size();
  double ae = 0.0, ap = 0.0, ag = 0.0;
  for (const auto* q : queries) {
    const double actual = set.find(q->country, q->year + opt.horizon)->x - q->x;
    auto local = opt;
    local.cutoff_year = q->year;

    double gsum = 0.0;
    std::size_t gcount = 0;
    for (const auto& s : set.points()) {
      if (!admissible_analogue(set, *q, s.country, s.year, local)) continue;
      gsum += set.find(s.country, s.year + opt.horizon)->x - s.x;
      ++gcount;
    }
    try {
      auto f = analogue_forecast(set, *q, local);
      rep.leakage_violations += leakage_violations(set, f, local);
      if (gcount == 0) throw InsufficientAnalogues(0, 1);
      ae += std::abs(actual - f.mean_dx);
      ap += std::abs(actual);
      ag += std::abs(actual - gsum / static_cast<double>(gcount));
      ++rep.forecasts;
    } catch (const InsufficientAnalogues&) {
      ++rep.skipped;
    }
  }
  if (rep.forecasts == 0) throw InsufficientAnalogues(0, opt.min_analogues);
  const double n = static_cast<double>(rep.forecasts);
  rep.mae_analogue = ae / n;
  rep.mae_persistence = ap / n;
  rep.mae_global_mean = ag / n;
  return rep;
}

/// Trajectory CSV: `country,year,gdppc,fitness`.
inline void write_trajectory_csv(std::ostream& out, const TrajectorySet& set) {
  out << "country,year,gdppc,fitness\n";
  for (const auto& p : set.points())
    out << p.country << ',' << p.year << ',' << text::real(std::pow(10.0, p.x)) << ','
        << text::real(std::pow(10.0, p.y)) << '\n';
}

inline TrajectorySet parse_trajectory_csv(std::istream& in) {
  detail::expect_header(in, "country,year,gdppc,fitness");
  std::vector<TrajectoryPoint> pts;
  std::string line;
  std::size_t lineno = 1;
  while (text::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto f = text::split(line);
    if (f.size() != 4) throw MalformedRecord(lineno, "expected 4 columns");
    auto country = text::upper(detail::parse_code(f[0], lineno, "country"));
    int year = detail::parse_year(f[1], lineno);
    auto g = text::parse_double(f[2]);
    auto fit = text::parse_double(f[3]);
    if (!g || !fit || !std::isfinite(*g) || !std::isfinite(*fit)) throw MalformedRecord(lineno, "non-numeric value");
    if (*g <= 0.0) throw Error(ErrorKind::NonPositiveGdp, "line " + std::to_string(lineno));
    if (*fit <= 0.0) throw MalformedRecord(lineno, "fitness must be positive");
    pts.push_back(make_point(country, year, *g, *fit));
  }
  return TrajectorySet::from_points(std::move(pts));
}

inline TrajectorySet parse_trajectory_csv(const std::string& content) {
  std::istringstream in(content);
  return parse_trajectory_csv(in);
}

}  // namespace efk
