// efk: command-line front end for the economic fitness toolkit.
//
// Every subcommand writes one artifact (to --output, atomically, or to
// stdout) and a one-line summary. Failures print a JSON error object to
// stderr and exit with 1 (input), 2 (convergence), 3 (degenerate spectrum)
// or 4 (insufficient data).

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "efk/efk.hpp"
#include "efk/serialize.hpp"

namespace fs = std::filesystem;
using efk::io::json;

namespace {

struct Config {
  std::string command;
  // inputs
  std::string input, matrix, gdp, trajectories, rank_a, rank_b;
  std::optional<int> year;
  double threshold = 1.0;
  // fitness / eci
  double tol = 1e-9;
  std::size_t max_iter = 1000;
  std::size_t rank_patience = 20;
  std::size_t order_n = 2;
  std::size_t depth = 20;
  std::string side = "country";
  std::size_t top_k = 10;
  // counterfactual
  std::string country;
  std::vector<std::string> products;
  bool frozen_pci = false;
  bool batch = false;
  // dynamics
  int horizon = 5;
  double radius = 0.25;
  std::size_t min_analogues = 5;
  double theta = 0.05;
  std::optional<int> split_year;
  std::size_t nx = 20, ny = 20;
  // synth
  std::string kind = "matrix";
  std::size_t countries = 10, products_n = 15, years = 20;
  double noise = 0.0, noise_sd = 0.0, dx = 0.02, dy = 0.01;
  std::uint64_t seed = 0;
  // output
  std::string output;
  std::string format;
  std::optional<std::string> timestamp;
};

// Relative input paths resolve against $EFK_DATA_DIR when it is set.
std::string resolve(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  if (const char* root = std::getenv("EFK_DATA_DIR"); root && *root) return (fs::path(root) / path).string();
  return path;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(resolve(path), std::ios::binary);
  if (!in) throw efk::Error(efk::ErrorKind::Io, "cannot open " + resolve(path));
  return in;
}

std::vector<efk::TradeRecord> load_trade(const Config& cfg) {
  auto in = open_input(cfg.input);
  return efk::parse_trade_csv(in);
}

int pick_year(const Config& cfg, const std::vector<efk::TradeRecord>& records) {
  if (cfg.year) return *cfg.year;
  auto years = efk::years_of(records);
  if (years.size() != 1)
    throw efk::Error(efk::ErrorKind::InvalidArgument, "input holds several years; pass --year");
  return years.front();
}

efk::BinaryCPMatrix load_matrix(const Config& cfg) {
  if (!cfg.matrix.empty()) {
    auto in = open_input(cfg.matrix);
    return efk::parse_matrix_csv(in);
  }
  if (cfg.input.empty()) throw efk::Error(efk::ErrorKind::InvalidArgument, "pass --input (trade CSV) or --matrix");
  auto records = load_trade(cfg);
  auto table = efk::build_trade_table(records, pick_year(cfg, records));
  return efk::binarize(efk::rca(table), cfg.threshold);
}

efk::FitnessOptions fitness_options(const Config& cfg) { return {cfg.tol, cfg.max_iter, cfg.rank_patience}; }

efk::ForecastOptions forecast_options(const Config& cfg) {
  efk::ForecastOptions o;
  o.horizon = cfg.horizon;
  o.radius = cfg.radius;
  o.min_analogues = cfg.min_analogues;
  o.theta = cfg.theta;
  o.validate();
  return o;
}

efk::TrajectorySet load_trajectories(const Config& cfg) {
  if (!cfg.trajectories.empty()) {
    auto in = open_input(cfg.trajectories);
    return efk::parse_trajectory_csv(in);
  }
  if (cfg.input.empty() || cfg.gdp.empty())
    throw efk::Error(efk::ErrorKind::InvalidArgument, "pass --trajectories, or --input with --gdp");
  auto records = load_trade(cfg);
  std::map<int, efk::FitnessResult> by_year;
  for (int y : efk::years_of(records)) {
    auto m = efk::binarize(efk::rca(efk::build_trade_table(records, y)), cfg.threshold);
    by_year.emplace(y, efk::fitness_fixed_point(m, fitness_options(cfg)));
  }
  auto gin = open_input(cfg.gdp);
  return efk::build_trajectories(by_year, efk::parse_gdp_csv(gin));
}

/// Collected output of a command: artifact body plus the summary line.
struct Artifact {
  std::string body;
  std::string summary;
};

std::string format_or(const Config& cfg, const char* fallback) { return cfg.format.empty() ? fallback : cfg.format; }

void require_format(const std::string& fmt, std::initializer_list<const char*> allowed, const std::string& cmd) {
  for (const char* a : allowed)
    if (fmt == a) return;
  throw efk::Error(efk::ErrorKind::InvalidArgument, "format '" + fmt + "' not supported by " + cmd);
}

std::string dump(json j, const Config& cfg) {
  if (cfg.timestamp) j["run"] = {{"command", cfg.command}, {"timestamp", *cfg.timestamp}};
  return j.dump(2) + "\n";
}

Artifact cmd_fitness(const Config& cfg) {
  auto m = load_matrix(cfg);
  auto fmt = format_or(cfg, "csv");
  require_format(fmt, {"csv", "json"}, "fitness");
  auto r = efk::fitness_fixed_point(m, fitness_options(cfg));
  auto ranking = cfg.side == "product" ? efk::complexity_ranking(r) : efk::fitness_ranking(r);
  std::ostringstream os;
  if (fmt == "csv") efk::write_ranking_csv(os, ranking);
  else os << dump(efk::io::ranking_to_json(ranking), cfg);
  std::ostringstream sum;
  sum << "fitness: " << m.rows() << " countries, " << m.cols() << " products, " << r.iterations
      << " iterations, converged=" << (r.converged ? "true" : "false") << ", residual=" << efk::text::real(r.residual);
  return {os.str(), sum.str()};
}

Artifact cmd_eci(const Config& cfg) {
  auto m = load_matrix(cfg);
  auto fmt = format_or(cfg, "csv");
  require_format(fmt, {"csv", "json"}, "eci");
  auto s = efk::eci_eigen(m, cfg.order_n);
  auto ranking = cfg.side == "product" ? efk::pci_ranking(s) : efk::eci_ranking(s);
  ranking.residual = efk::eci_residual(m, s);
  std::ostringstream os;
  if (fmt == "csv") efk::write_ranking_csv(os, ranking);
  else os << dump(efk::io::ranking_to_json(ranking), cfg);
  std::ostringstream sum;
  sum << "eci: " << m.rows() << " countries, " << m.cols() << " products, order_n=" << s.order_n
      << ", lambda=" << efk::text::real(s.lambda) << ", residual=" << efk::text::real(ranking.residual);
  return {os.str(), sum.str()};
}

Artifact cmd_reflections(const Config& cfg) {
  auto m = load_matrix(cfg);
  auto fmt = format_or(cfg, "csv");
  require_format(fmt, {"csv", "json"}, "reflections");
  auto t = efk::method_of_reflections(m, cfg.depth);
  std::ostringstream os;
  if (fmt == "csv") {
    efk::io::write_reflections_csv(os, t, m);
  } else {
    json j = {{"schema_version", efk::io::kSchemaVersion},
              {"depth", t.depth},
              {"countries", m.countries()},
              {"products", m.products()},
              {"country_levels", t.country_levels},
              {"product_levels", t.product_levels}};
    os << dump(std::move(j), cfg);
  }
  return {os.str(), "reflections: " + std::to_string(m.rows()) + " countries, " + std::to_string(m.cols()) +
                        " products, depth " + std::to_string(t.depth)};
}

Artifact cmd_compare(const Config& cfg) {
  if (cfg.rank_a.empty() || cfg.rank_b.empty())
    throw efk::Error(efk::ErrorKind::InvalidArgument, "compare needs --a and --b");
  auto ia = open_input(cfg.rank_a);
  auto ib = open_input(cfg.rank_b);
  auto a = efk::parse_ranking_csv(ia);
  auto b = efk::parse_ranking_csv(ib);
  auto c = efk::compare_rankings(a, b, cfg.top_k);
  auto fmt = format_or(cfg, "json");
  require_format(fmt, {"csv", "json"}, "compare");
  std::ostringstream os;
  if (fmt == "json") {
    os << dump(efk::io::comparison_to_json(c), cfg);
  } else {
    os << "entity,rank_a,rank_b,delta\n";
    for (const auto& d : c.deltas) os << d.entity << ',' << d.rank_a << ',' << d.rank_b << ',' << d.delta << '\n';
  }
  std::ostringstream sum;
  sum << "compare: " << c.n << " entities, spearman=" << efk::text::real(c.spearman)
      << ", kendall_tau=" << efk::text::real(c.kendall_tau) << ", top" << c.top_k << "_overlap=" << c.top_k_overlap;
  return {os.str(), sum.str()};
}

Artifact cmd_counterfactual(const Config& cfg) {
  auto m = load_matrix(cfg);
  efk::CounterfactualOptions opt{fitness_options(cfg), cfg.order_n, cfg.frozen_pci};
  std::ostringstream os;
  if (cfg.batch) {
    auto fmt = format_or(cfg, "csv");
    require_format(fmt, {"csv"}, "counterfactual --batch");
    std::vector<std::string> countries;
    if (!cfg.country.empty()) countries.push_back(efk::text::upper(cfg.country));
    auto report = efk::coalfish_batch(m, countries, opt);
    efk::io::write_batch_csv(os, report);
    return {os.str(), "counterfactual batch: " + std::to_string(report.rows.size()) + " experiments, " +
                          std::to_string(report.failures.size()) + " without a defined solution"};
  }
  if (cfg.country.empty() || cfg.products.empty())
    throw efk::Error(efk::ErrorKind::InvalidArgument, "counterfactual needs --country and --product (or --batch)");
  auto fmt = format_or(cfg, "json");
  require_format(fmt, {"csv", "json"}, "counterfactual");
  auto o = efk::counterfactual_experiment(m, efk::text::upper(cfg.country), cfg.products, opt);
  if (fmt == "json") {
    os << dump(efk::io::outcome_to_json(o), cfg);
  } else {
    efk::BatchReport one;
    for (const auto& p : o.kept_products)
      one.rows.push_back({o.country, p, o.fitness_rank_before, o.fitness_rank_after, o.eci_rank_before, o.eci_rank_after});
    efk::io::write_batch_csv(os, one);
  }
  std::ostringstream sum;
  sum << "counterfactual: " << o.country << " fitness rank " << o.fitness_rank_before << " -> " << o.fitness_rank_after
      << ", eci rank " << o.eci_rank_before << " -> " << o.eci_rank_after;
  return {os.str(), sum.str()};
}

Artifact cmd_nestedness(const Config& cfg) {
  auto m = load_matrix(cfg);
  auto n = efk::nestedness(m);
  auto fmt = format_or(cfg, "json");
  require_format(fmt, {"csv", "json"}, "nestedness");
  std::ostringstream os;
  if (fmt == "json") {
    os << dump(efk::io::nestedness_to_json(n, m), cfg);
  } else {
    os << "nodf_rows,nodf_cols,nodf_total,fill\n"
       << efk::text::real(n.nodf_rows) << ',' << efk::text::real(n.nodf_cols) << ','
       << efk::text::real(n.nodf_total) << ',' << efk::text::real(n.fill) << '\n';
  }
  return {os.str(), "nestedness: " + std::to_string(m.rows()) + " countries, " + std::to_string(m.cols()) +
                        " products, nodf_total=" + efk::text::real(n.nodf_total)};
}

// The latest point of each country, or the single requested (country, year).
std::vector<efk::TrajectoryPoint> query_points(const Config& cfg, const efk::TrajectorySet& set) {
  std::vector<efk::TrajectoryPoint> out;
  if (!cfg.country.empty()) {
    const auto code = efk::text::upper(cfg.country);
    const efk::TrajectoryPoint* p = nullptr;
    if (cfg.year) {
      p = set.find(code, *cfg.year);
    } else {
      for (const auto& q : set.points())
        if (q.country == code) p = &q;
    }
    if (!p) throw efk::Error(efk::ErrorKind::UnknownEntity, "no trajectory point for " + code);
    out.push_back(*p);
    return out;
  }
  const auto& pts = set.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (i + 1 == pts.size() || pts[i + 1].country != pts[i].country) out.push_back(pts[i]);
  return out;
}

std::vector<efk::ForecastResult> forecast_all(const Config& cfg, const efk::TrajectorySet& set,
                                              const efk::ForecastOptions& opt, std::size_t& skipped) {
  std::vector<efk::ForecastResult> out;
  skipped = 0;
  for (const auto& q : query_points(cfg, set)) {
    try {
      out.push_back(efk::analogue_forecast(set, q, opt));
    } catch (const efk::InsufficientAnalogues&) {
      if (!cfg.country.empty()) throw;
      ++skipped;
    }
  }
  if (out.empty()) throw efk::InsufficientAnalogues(0, opt.min_analogues);
  return out;
}

Artifact cmd_forecast(const Config& cfg) {
  auto set = load_trajectories(cfg);
  auto opt = forecast_options(cfg);
  auto fmt = format_or(cfg, "csv");
  require_format(fmt, {"csv", "json"}, "forecast");
  std::size_t skipped = 0;
  auto fs = forecast_all(cfg, set, opt, skipped);
  std::ostringstream os;
  if (fmt == "csv") {
    efk::io::write_forecast_csv(os, fs);
  } else {
    json arr = json::array();
    for (const auto& f : fs) arr.push_back(efk::io::forecast_to_json(f));
    os << dump({{"schema_version", efk::io::kSchemaVersion},
                {"options", efk::io::forecast_options_to_json(opt)},
                {"forecasts", std::move(arr)}},
               cfg);
  }
  return {os.str(), "forecast: " + std::to_string(fs.size()) + " forecasts, " + std::to_string(skipped) +
                        " queries without enough analogues"};
}

Artifact cmd_backtest(const Config& cfg) {
  auto set = load_trajectories(cfg);
  auto opt = forecast_options(cfg);
  if (!cfg.split_year) throw efk::Error(efk::ErrorKind::InvalidArgument, "backtest needs --split-year");
  auto rep = efk::backtest(set, opt, *cfg.split_year);
  auto fmt = format_or(cfg, "json");
  require_format(fmt, {"csv", "json"}, "backtest");
  std::ostringstream os;
  if (fmt == "json") {
    os << dump(efk::io::backtest_to_json(rep, *cfg.split_year, opt), cfg);
  } else {
    os << "queries,forecasts,skipped,leakage_violations,mae_analogue,mae_persistence,mae_global_mean\n"
       << rep.queries << ',' << rep.forecasts << ',' << rep.skipped << ',' << rep.leakage_violations << ','
       << efk::text::real(rep.mae_analogue) << ',' << efk::text::real(rep.mae_persistence) << ','
       << efk::text::real(rep.mae_global_mean) << '\n';
  }
  return {os.str(), "backtest: " + std::to_string(rep.forecasts) + " of " + std::to_string(rep.queries) +
                        " queries forecast, mae_analogue=" + efk::text::real(rep.mae_analogue) +
                        ", mae_persistence=" + efk::text::real(rep.mae_persistence)};
}

Artifact cmd_regime_map(const Config& cfg) {
  auto set = load_trajectories(cfg);
  auto opt = forecast_options(cfg);
  auto grid = efk::regime_map(set, cfg.nx, cfg.ny, opt);
  auto fmt = format_or(cfg, "csv");
  require_format(fmt, {"csv", "json"}, "regime-map");
  std::ostringstream os;
  std::size_t lam = 0, tur = 0;
  for (const auto& c : grid.cells) {
    lam += c.regime == efk::Regime::Laminar;
    tur += c.regime == efk::Regime::Turbulent;
  }
  if (fmt == "csv") {
    os << "ix,iy,x,y,regime,analogues,sx\n";
    for (const auto& c : grid.cells)
      os << c.ix << ',' << c.iy << ',' << efk::text::real(c.x) << ',' << efk::text::real(c.y) << ','
         << efk::to_string(c.regime) << ',' << c.analogues << ',' << efk::text::real(c.sx) << '\n';
  } else {
    auto j = efk::io::regime_grid_to_json(grid);
    j["schema_version"] = efk::io::kSchemaVersion;
    j["options"] = efk::io::forecast_options_to_json(opt);
    os << dump(std::move(j), cfg);
  }
  return {os.str(), "regime-map: " + std::to_string(grid.cells.size()) + " cells, " + std::to_string(lam) +
                        " laminar, " + std::to_string(tur) + " turbulent"};
}

Artifact cmd_plot_data(const Config& cfg) {
  auto set = load_trajectories(cfg);
  auto opt = forecast_options(cfg);
  require_format(format_or(cfg, "json"), {"json"}, "plot-data");
  auto grid = efk::regime_map(set, cfg.nx, cfg.ny, opt);
  std::vector<efk::ForecastResult> fs;
  for (const auto& q : query_points(cfg, set)) {
    try {
      fs.push_back(efk::analogue_forecast(set, q, opt));
    } catch (const efk::InsufficientAnalogues&) {
    }
  }
  std::ostringstream os;
  os << dump(efk::io::plot_data_json(set, grid, fs, opt), cfg);
  return {os.str(), "plot-data: " + std::to_string(set.size()) + " points, " + std::to_string(fs.size()) +
                        " forecasts, " + std::to_string(grid.cells.size()) + " grid cells"};
}

Artifact cmd_synth(const Config& cfg) {
  std::ostringstream os;
  if (cfg.kind == "matrix") {
    auto m = efk::synth::nested_matrix({cfg.countries, cfg.products_n, cfg.noise, cfg.seed});
    auto fmt = format_or(cfg, "csv");
    require_format(fmt, {"csv", "json"}, "synth --kind matrix");
    if (fmt == "csv") efk::write_matrix_csv(os, m);
    else os << dump(efk::io::matrix_to_json(m), cfg);
    return {os.str(), "synth: nested matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", " +
                          std::to_string(m.ones()) + " ones"};
  }
  if (cfg.kind == "field") {
    require_format(format_or(cfg, "csv"), {"csv"}, "synth --kind field");
    efk::synth::DriftFieldSpec spec;
    spec.countries = cfg.countries;
    spec.years = cfg.years;
    spec.dx = cfg.dx;
    spec.dy = cfg.dy;
    spec.noise_sd = cfg.noise_sd;
    spec.seed = cfg.seed;
    if (cfg.year) spec.first_year = *cfg.year;
    auto set = efk::synth::drift_field(spec);
    efk::write_trajectory_csv(os, set);
    return {os.str(), "synth: drift field, " + std::to_string(set.size()) + " points"};
  }
  throw efk::Error(efk::ErrorKind::InvalidArgument, "unknown --kind '" + cfg.kind + "' (matrix, field)");
}

// Temp file in the target directory, then rename: readers never see a
// truncated artifact.
void write_atomic(const std::string& path, const std::string& body) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw efk::Error(efk::ErrorKind::Io, "cannot write " + tmp.string());
    out << body;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw efk::Error(efk::ErrorKind::Io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw efk::Error(efk::ErrorKind::Io, "cannot rename onto " + path);
  }
}

int fail(efk::ErrorKind kind, const std::string& message) {
  const int code = efk::exit_code(kind);
  json err = {{"error", {{"code", code}, {"kind", std::string(efk::to_string(kind))}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Economic fitness toolkit: Fitness-Complexity, ECI/PCI, counterfactuals, analogue forecasting"};
  app.require_subcommand(1);
  Config cfg;

  auto add_matrix_inputs = [&](CLI::App* sc) {
    sc->add_option("--input", cfg.input, "trade CSV (year,exporter,product,value)");
    sc->add_option("--matrix", cfg.matrix, "binary matrix CSV");
    sc->add_option("--year", cfg.year, "year to select from the trade CSV")->check(CLI::Range(efk::kMinYear, efk::kMaxYear));
    sc->add_option("--threshold", cfg.threshold, "RCA threshold for binarization")->check(CLI::PositiveNumber);
  };
  auto add_fitness_opts = [&](CLI::App* sc) {
    sc->add_option("--tol", cfg.tol, "max relative change at convergence")->check(CLI::PositiveNumber);
    sc->add_option("--max-iter", cfg.max_iter, "iteration cap")->check(CLI::Range(std::size_t{1}, std::size_t{10000000}));
    sc->add_option("--rank-patience", cfg.rank_patience, "stop after this many rank-stable steps (0 disables)");
  };
  auto add_trajectory_inputs = [&](CLI::App* sc) {
    sc->add_option("--trajectories", cfg.trajectories, "trajectory CSV (country,year,gdppc,fitness)");
    sc->add_option("--input", cfg.input, "trade CSV, all years");
    sc->add_option("--gdp", cfg.gdp, "GDP CSV (country,year,gdppc)");
    sc->add_option("--threshold", cfg.threshold, "RCA threshold for binarization")->check(CLI::PositiveNumber);
    sc->add_option("--horizon", cfg.horizon, "forecast horizon in years")->check(CLI::Range(1, 100));
    sc->add_option("--radius", cfg.radius, "analogue radius in normalized units")->check(CLI::PositiveNumber);
    sc->add_option("--min-analogues", cfg.min_analogues, "minimum analogues per forecast")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    sc->add_option("--theta", cfg.theta, "laminar threshold on sd of log10 GDPpc displacement")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_output = [&](CLI::App* sc) {
    sc->add_option("--output,-o", cfg.output, "output file (default: stdout)");
    sc->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--timestamp", cfg.timestamp, "run timestamp recorded in JSON metadata");
  };
  auto side_option = [&](CLI::App* sc) {
    sc->add_option("--side", cfg.side, "country or product")->check(CLI::IsMember({"country", "product"}));
  };

  auto* fitness = app.add_subcommand("fitness", "Fitness and Complexity ranking");
  add_matrix_inputs(fitness);
  add_fitness_opts(fitness);
  side_option(fitness);
  add_output(fitness);

  auto* eci = app.add_subcommand("eci", "ECI/PCI ranking from the N-th eigenvector");
  add_matrix_inputs(eci);
  eci->add_option("--order-n", cfg.order_n, "eigenvector index (1-based, descending eigenvalues)")
      ->check(CLI::PositiveNumber);
  side_option(eci);
  add_output(eci);

  auto* refl = app.add_subcommand("reflections", "Method of Reflections trace");
  add_matrix_inputs(refl);
  refl->add_option("--depth", cfg.depth, "number of reflections");
  add_output(refl);

  auto* cmp = app.add_subcommand("compare", "Compare two ranking CSVs");
  cmp->add_option("--a", cfg.rank_a, "first ranking CSV")->required();
  cmp->add_option("--b", cfg.rank_b, "second ranking CSV")->required();
  cmp->add_option("--top-k", cfg.top_k, "size of the top-k overlap")->check(CLI::PositiveNumber);
  add_output(cmp);

  auto* cf = app.add_subcommand("counterfactual", "Keep only some products of one country and re-rank");
  add_matrix_inputs(cf);
  add_fitness_opts(cf);
  cf->add_option("--country", cfg.country, "country code");
  cf->add_option("--product", cfg.products, "product(s) to keep (repeatable)");
  cf->add_option("--order-n", cfg.order_n, "ECI eigenvector index")->check(CLI::PositiveNumber);
  cf->add_flag("--frozen-pci", cfg.frozen_pci, "keep the unrestricted PCI instead of re-solving");
  cf->add_flag("--batch", cfg.batch, "one experiment per exported product (of --country, or of every country)");
  add_output(cf);

  auto* nest = app.add_subcommand("nestedness", "NODF nestedness of the binary matrix");
  add_matrix_inputs(nest);
  add_output(nest);

  auto* fc = app.add_subcommand("forecast", "Analogue forecast of GDPpc-Fitness displacement");
  add_trajectory_inputs(fc);
  fc->add_option("--country", cfg.country, "query country (default: every country's latest point)");
  fc->add_option("--year", cfg.year, "query year (default: latest)");
  add_output(fc);

  auto* bt = app.add_subcommand("backtest", "Out-of-sample analogue backtest");
  add_trajectory_inputs(bt);
  bt->add_option("--split-year", cfg.split_year, "first query year")->required();
  add_output(bt);

  auto* rm = app.add_subcommand("regime-map", "Laminar/turbulent classification on a grid");
  add_trajectory_inputs(rm);
  rm->add_option("--nx", cfg.nx, "grid columns")->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
  rm->add_option("--ny", cfg.ny, "grid rows")->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
  add_output(rm);

  auto* sy = app.add_subcommand("synth", "Generate synthetic fixtures");
  sy->add_option("--kind", cfg.kind, "matrix or field")->check(CLI::IsMember({"matrix", "field"}));
  sy->add_option("--countries", cfg.countries, "number of countries")->check(CLI::PositiveNumber);
  sy->add_option("--products", cfg.products_n, "number of products")->check(CLI::PositiveNumber);
  sy->add_option("--noise", cfg.noise, "cell flip probability")->check(CLI::Range(0.0, 0.999999));
  sy->add_option("--seed", cfg.seed, "generator seed");
  sy->add_option("--years", cfg.years, "years per trajectory")->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  sy->add_option("--year", cfg.year, "first year")->check(CLI::Range(efk::kMinYear, efk::kMaxYear));
  sy->add_option("--dx", cfg.dx, "yearly drift in log10 GDPpc");
  sy->add_option("--dy", cfg.dy, "yearly drift in log10 Fitness");
  sy->add_option("--noise-sd", cfg.noise_sd, "yearly noise sd")->check(CLI::NonNegativeNumber);
  add_output(sy);

  auto* pd = app.add_subcommand("plot-data", "JSON bundle of trajectories, regime grid and forecasts");
  add_trajectory_inputs(pd);
  pd->add_option("--nx", cfg.nx, "grid columns")->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
  pd->add_option("--ny", cfg.ny, "grid rows")->check(CLI::Range(std::size_t{2}, std::size_t{10000}));
  add_output(pd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(efk::ErrorKind::InvalidArgument, e.what());
  }

  const std::map<std::string, Artifact (*)(const Config&)> commands = {
      {"fitness", cmd_fitness},         {"eci", cmd_eci},
      {"reflections", cmd_reflections}, {"compare", cmd_compare},
      {"counterfactual", cmd_counterfactual}, {"nestedness", cmd_nestedness},
      {"forecast", cmd_forecast},       {"backtest", cmd_backtest},
      {"regime-map", cmd_regime_map},   {"synth", cmd_synth},
      {"plot-data", cmd_plot_data},
  };
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    Artifact art = commands.at(cfg.command)(cfg);
    if (cfg.output.empty()) {
      std::cout << art.body;
      std::cerr << art.summary << std::endl;
    } else {
      write_atomic(cfg.output, art.body);
      std::cout << art.summary << std::endl;
    }
    return 0;
  } catch (const efk::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(efk::ErrorKind::Io, e.what());
  }
}
