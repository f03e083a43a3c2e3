#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "efk/dynamics.hpp"
#include "efk/synth.hpp"

using namespace efk;

namespace {

TrajectoryPoint pt(std::string c, int year, double x, double y) { return {std::move(c), year, x, y, 0.0, 0.0}; }

// Two populations on either side of y = 0, drifting in opposite x
// directions.
TrajectorySet two_populations(double drift) {
  std::vector<TrajectoryPoint> pts;
  for (std::size_t i = 0; i < 16; ++i) {
    const double x0 = 3.0 + synth::uniform(77, 1, i);
    const double ya = -0.5 * synth::uniform(77, 2, i) - 0.01;
    const double yb = 0.5 * synth::uniform(77, 3, i) + 0.01;
    for (int t = 0; t <= 10; ++t) {
      pts.push_back(pt(synth::code('A', i), 2000 + t, x0 + drift * t, ya));
      pts.push_back(pt(synth::code('B', i), 2000 + t, x0 + 0.5 - drift * t, yb));
    }
  }
  return TrajectorySet::from_points(std::move(pts));
}

}  // namespace

TEST(Points, LogOfRoundNumbers) {
  auto p = make_point("X", 2000, 1000.0, 1.0);
  EXPECT_DOUBLE_EQ(p.x, 3.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_THROW(make_point("X", 2000, 0.0, 1.0), Error);
}

TEST(Points, BuildIntersectsSources) {
  FitnessResult f;
  f.countries = {"AAA", "BBB"};
  f.fitness = {2.0, 0.5};
  std::map<int, FitnessResult> by_year{{2000, f}, {2001, f}};
  GdpSeries a{"AAA", {{2000, 100.0}, {2001, 110.0}}};
  GdpSeries b{"BBB", {{2001, 50.0}}};
  auto set = build_trajectories(by_year, {a, b});
  EXPECT_EQ(set.size(), 3u);
  EXPECT_EQ(set.find("BBB", 2000), nullptr);
  ASSERT_NE(set.find("BBB", 2001), nullptr);
  EXPECT_DOUBLE_EQ(set.find("AAA", 2000)->x, 2.0);
}

TEST(Points, IdenticalCountriesIdenticalPoints) {
  auto set = TrajectorySet::from_points({pt("A", 2000, 3, 1), pt("B", 2000, 3, 1), pt("C", 2000, 4, 0)});
  EXPECT_EQ(set.find("A", 2000)->xn, set.find("B", 2000)->xn);
  EXPECT_EQ(set.find("A", 2000)->yn, set.find("B", 2000)->yn);
  EXPECT_THROW(TrajectorySet::from_points({pt("A", 2000, 3, 1), pt("A", 2000, 4, 1)}), Error);
  EXPECT_THROW(TrajectorySet::from_points({}), Error);
}

TEST(Forecast, ConstantFieldRecoversDrift) {
  auto set = synth::drift_field({20, 12, 0.02, 0.01, 0.0, 5, 2000});
  ForecastOptions opt;
  opt.radius = 0.6;
  for (const auto& q : set.points()) {
    if (q.year != set.max_year()) continue;
    auto f = analogue_forecast(set, q, opt);
    EXPECT_NEAR(f.mean_dx, 0.10, 1e-12);
    EXPECT_NEAR(f.mean_dy, 0.05, 1e-12);
    EXPECT_NEAR(f.sx, 0.0, 1e-12);
    EXPECT_NEAR(f.sy, 0.0, 1e-12);
    EXPECT_EQ(f.regime, Regime::Laminar);
    EXPECT_EQ(leakage_violations(set, f, opt), 0u);
  }
}

TEST(Forecast, EmptyNeighbourhood) {
  auto set = synth::drift_field({10, 8, 0.02, 0.01, 0.0, 5, 2000});
  try {
    analogue_forecast(set, pt("Q", 2007, 40.0, 40.0));
    FAIL();
  } catch (const InsufficientAnalogues& e) {
    EXPECT_EQ(e.found(), 0u);
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientAnalogues);
  }
}

TEST(Forecast, TwoValuedNeighbourhood) {
  // four analogues from the same start, displacements +0.1, +0.1, -0.1, -0.1
  std::vector<TrajectoryPoint> pts;
  const double d[] = {0.1, -0.1, 0.1, -0.1};
  for (int i = 0; i < 4; ++i) {
    pts.push_back(pt(synth::code('A', i), 2000, 3.0, 0.0));
    pts.push_back(pt(synth::code('A', i), 2001, 3.0 + d[i], 0.0));
  }
  auto set = TrajectorySet::from_points(pts);
  ForecastOptions opt;
  opt.horizon = 1;
  opt.min_analogues = 4;
  auto f = analogue_forecast(set, pt("Q", 2001, 3.0, 0.0), opt);
  const double n = 4.0;
  EXPECT_EQ(f.analogues_used, 4u);
  EXPECT_NEAR(f.mean_dx, 0.0, 1e-15);
  EXPECT_NEAR(f.sx, 0.1 * std::sqrt(n / (n - 1.0)), 1e-12);
  EXPECT_EQ(f.regime, Regime::Turbulent);
  opt.theta = 0.2;
  EXPECT_EQ(analogue_forecast(set, pt("Q", 2001, 3.0, 0.0), opt).regime, Regime::Laminar);
}

TEST(Forecast, OwnFutureIsNeverUsed) {
  auto set = synth::drift_field({10, 20, 0.02, 0.01, 0.005, 6, 2000});
  ForecastOptions opt;
  opt.radius = 2.0;
  opt.min_analogues = 1;
  const auto& q = *set.find("K003", 2008);
  auto f = analogue_forecast(set, q, opt);
  for (const auto& [country, year] : f.analogues) {
    EXPECT_LE(year + opt.horizon, set.max_year());
    if (country == "K003") {
      EXPECT_LE(year + opt.horizon, 2008);
    }
  }
  EXPECT_FALSE(admissible_analogue(set, q, "K003", 2004, opt));
  EXPECT_TRUE(admissible_analogue(set, q, "K003", 2003, opt));
  EXPECT_TRUE(admissible_analogue(set, q, "K004", 2010, opt));
  opt.cutoff_year = 2008;
  EXPECT_FALSE(admissible_analogue(set, q, "K004", 2010, opt));
}

TEST(Forecast, PermutationInvariant) {
  auto set = synth::drift_field({15, 12, 0.02, 0.01, 0.01, 8, 2000});
  auto pts = set.points();
  std::reverse(pts.begin(), pts.end());
  std::rotate(pts.begin(), pts.begin() + 17, pts.end());
  auto shuffled = TrajectorySet::from_points(pts);
  ForecastOptions opt;
  opt.radius = 0.5;
  const auto& q = *set.find("K007", 2011);
  auto a = analogue_forecast(set, q, opt);
  auto b = analogue_forecast(shuffled, q, opt);
  EXPECT_EQ(a.analogues, b.analogues);
  EXPECT_EQ(a.mean_dx, b.mean_dx);
  EXPECT_EQ(a.sx, b.sx);
}

TEST(Forecast, ShrinkingRadiusNeverAddsAnalogues) {
  auto set = synth::drift_field({25, 15, 0.02, 0.01, 0.01, 9, 2000});
  const auto& q = *set.find("K011", 2014);
  ForecastOptions opt;
  opt.min_analogues = 1;
  std::size_t prev = SIZE_MAX;
  for (double r : {3.0, 1.0, 0.6, 0.4, 0.25, 0.15, 0.1}) {
    opt.radius = r;
    std::size_t used = 0;
    try {
      used = analogue_forecast(set, q, opt).analogues_used;
    } catch (const InsufficientAnalogues& e) {
      used = e.found();
    }
    EXPECT_LE(used, prev) << r;
    prev = used;
  }
}

TEST(Forecast, OptionValidation) {
  auto set = synth::drift_field({5, 8, 0.02, 0.01, 0.0, 1, 2000});
  ForecastOptions opt;
  opt.radius = 0.0;
  EXPECT_THROW(analogue_forecast(set, set.points()[0], opt), Error);
  opt = {};
  opt.horizon = 0;
  EXPECT_THROW(analogue_forecast(set, set.points()[0], opt), Error);
}

TEST(RegimeMap, ConstantFieldLaminarEverywhere) {
  auto set = synth::drift_field({30, 15, 0.02, 0.01, 0.0, 10, 2000});
  ForecastOptions opt;
  opt.radius = 0.5;
  auto g = regime_map(set, 6, 6, opt);
  std::size_t populated = 0;
  for (const auto& c : g.cells) {
    if (c.regime == Regime::NoData) continue;
    ++populated;
    EXPECT_EQ(c.regime, Regime::Laminar);
    EXPECT_NEAR(c.mean_dx, 0.10, 1e-12);
  }
  EXPECT_GT(populated, 0u);
}

TEST(RegimeMap, OppositeDriftsMeetAtTurbulentBoundary) {
  const double drift = 0.05, disp = 5 * drift;
  auto set = two_populations(drift);
  ForecastOptions opt;
  opt.radius = 0.5;
  auto g = regime_map(set, 6, 9, opt);
  const double reach = opt.radius * set.normalization().sd_y;  // radius in y units
  std::size_t laminar = 0, turbulent = 0, boundary_turbulent = 0;
  for (const auto& c : g.cells) {
    if (c.regime == Regime::NoData) continue;
    // a cell mixing nA displacements of +d with nB of -d has sample sd
    // 2 d sqrt(nA nB / (n (n - 1))); pure cells have sd 0
    const auto n = c.analogues;
    bool explained = false;
    for (std::size_t na = 0; na <= n && !explained; ++na) {
      const double nn = static_cast<double>(n), a = static_cast<double>(na), b = nn - a;
      const double sd = 2.0 * disp * std::sqrt(a * b / (nn * (nn - 1.0)));
      explained = std::abs(sd - c.sx) < 1e-12;
    }
    EXPECT_TRUE(explained) << c.ix << "," << c.iy << " sx=" << c.sx;
    EXPECT_EQ(c.regime, c.sx <= opt.theta ? Regime::Laminar : Regime::Turbulent);
    if (std::abs(c.y) > reach + 0.01) {
      EXPECT_EQ(c.regime, Regime::Laminar) << c.ix << "," << c.iy;
    }
    if (c.regime == Regime::Laminar) {
      ++laminar;
    } else {
      ++turbulent;
      if (std::abs(c.y) < reach) ++boundary_turbulent;
    }
  }
  EXPECT_GT(laminar, 0u);
  EXPECT_GT(turbulent, 0u);
  EXPECT_EQ(boundary_turbulent, turbulent);
}

TEST(RegimeMap, DeterministicAndValidated) {
  auto set = synth::drift_field({20, 12, 0.02, 0.01, 0.02, 11, 2000});
  auto a = regime_map(set, 5, 5);
  auto b = regime_map(set, 5, 5);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].regime, b.cells[i].regime);
    EXPECT_EQ(a.cells[i].sx, b.cells[i].sx);
  }
  EXPECT_THROW(regime_map(set, 1, 5), Error);
  try {
    regime_map(TrajectorySet{}, 4, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(Backtest, ConstantFieldIsExact) {
  auto set = synth::drift_field({20, 20, 0.02, 0.01, 0.0, 12, 2000});
  ForecastOptions opt;
  opt.radius = 0.6;
  auto rep = backtest(set, opt, 2010);
  EXPECT_GT(rep.forecasts, 0u);
  EXPECT_LT(rep.mae_analogue, 1e-12);
  EXPECT_NEAR(rep.mae_persistence, 0.10, 1e-12);
  EXPECT_LT(rep.mae_analogue, rep.mae_persistence);
  EXPECT_EQ(rep.leakage_violations, 0u);
}

TEST(Backtest, PureNoiseTiesGlobalMean) {
  // x performs a random walk with yearly sd s; the 5-year displacement is
  // N(0, 5 s^2), so any unbiased predictor has MAE about sqrt(2/pi) sqrt(5) s
  const double s = 0.02;
  auto set = synth::drift_field({60, 30, 0.0, 0.0, s, 13, 1980});
  ForecastOptions opt;
  opt.radius = 0.5;
  auto rep = backtest(set, opt, 1995);
  const double expected = std::sqrt(2.0 / std::numbers::pi) * std::sqrt(5.0) * s;
  EXPECT_GT(rep.forecasts, 500u);
  EXPECT_NEAR(rep.mae_global_mean / expected, 1.0, 0.12);
  EXPECT_NEAR(rep.mae_analogue / expected, 1.0, 0.2);
  EXPECT_NEAR(rep.mae_analogue / rep.mae_global_mean, 1.0, 0.15);
  EXPECT_EQ(rep.leakage_violations, 0u);
}

TEST(Backtest, SplitBeyondDataIsEmpty) {
  auto set = synth::drift_field({10, 10, 0.02, 0.01, 0.0, 14, 2000});
  try {
    backtest(set, {}, 2020);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(TrajectoryCsv, RoundTrip) {
  auto set = synth::drift_field({6, 5, 0.02, 0.01, 0.01, 15, 2000});
  std::ostringstream os;
  write_trajectory_csv(os, set);
  auto back = parse_trajectory_csv(os.str());
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back.points()[i].country, set.points()[i].country);
    EXPECT_NEAR(back.points()[i].x, set.points()[i].x, 1e-14);
    EXPECT_NEAR(back.points()[i].y, set.points()[i].y, 1e-14);
  }
  EXPECT_THROW(parse_trajectory_csv("country,year,gdppc,fitness\nA,2000,0,1\n"), Error);
}
