#pragma once

// Export and GDP-per-capita ingestion.
//
// Trade CSV:  year,exporter,product,value
// GDP CSV:    country,year,gdppc
//
// Both accept LF or CRLF line endings, '.' as decimal point and no
// thousands separators. Blank lines are ignored.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "efk/error.hpp"
#include "efk/text.hpp"

namespace efk {

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

struct TradeRecord {
  int year = 0;
  std::string exporter;
  std::string product;
  double value = 0.0;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

/// Dense country x product export table for one year. Axes are sorted and
/// every row and column has a positive total.
struct TradeTable {
  int year = 0;
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> values;  // row-major, countries.size() x products.size()

  std::size_t rows() const { return countries.size(); }
  std::size_t cols() const { return products.size(); }
  double at(std::size_t c, std::size_t p) const { return values[c * products.size() + p]; }

  double total() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }

  friend bool operator==(const TradeTable&, const TradeTable&) = default;
};

struct GdpSeries {
  std::string country;
  std::map<int, double> samples;  // year -> GDP per capita (USD)

  friend bool operator==(const GdpSeries&, const GdpSeries&) = default;
};

namespace detail {

inline int parse_year(std::string_view field, std::size_t line) {
  auto year = text::parse_int(field);
  if (!year) throw MalformedRecord(line, "year is not an integer: '" + std::string(field) + "'");
  if (*year < kMinYear || *year > kMaxYear)
    throw MalformedRecord(line, "year out of range [1900, 2100]: " + std::to_string(*year));
  return static_cast<int>(*year);
}

inline std::string parse_code(std::string_view field, std::size_t line, const char* what) {
  if (!text::valid_code(field)) throw MalformedRecord(line, std::string("invalid ") + what + " code");
  return std::string(field);
}

inline void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  while (text::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty()) continue;
    // tolerate a UTF-8 byte-order mark
    if (t.size() >= 3 && t.substr(0, 3) == "\xEF\xBB\xBF") t.remove_prefix(3);
    if (t != expected) throw MalformedRecord(1, "expected header '" + std::string(expected) + "'");
    return;
  }
  throw Error(ErrorKind::EmptyInput, "no header");
}

}  // namespace detail

/// One record per data row; duplicates are kept and summed later by
/// build_trade_table.
inline std::vector<TradeRecord> parse_trade_csv(std::istream& in) {
  detail::expect_header(in, "year,exporter,product,value");
  std::vector<TradeRecord> records;
  std::string line;
  std::size_t lineno = 1;
  while (text::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line);
    if (fields.size() != 4)
      throw MalformedRecord(lineno, "expected 4 columns, got " + std::to_string(fields.size()));
    TradeRecord r;
    r.year = detail::parse_year(fields[0], lineno);
    r.exporter = text::upper(detail::parse_code(fields[1], lineno, "exporter"));
    r.product = detail::parse_code(fields[2], lineno, "product");
    auto v = text::parse_double(fields[3]);
    if (!v || !std::isfinite(*v)) throw MalformedRecord(lineno, "value is not a finite number");
    if (*v < 0.0) throw MalformedRecord(lineno, "negative value");
    r.value = *v;
    records.push_back(std::move(r));
  }
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "trade CSV has no data rows");
  return records;
}

inline std::vector<TradeRecord> parse_trade_csv(const std::string& content) {
  std::istringstream in(content);
  return parse_trade_csv(in);
}

/// Aggregates the records of one year into a dense table. Duplicate
/// (exporter, product) keys are summed; all-zero rows and columns are dropped.
inline TradeTable build_trade_table(const std::vector<TradeRecord>& records, int year) {
  std::map<std::pair<std::string, std::string>, double> cells;
  bool any = false;
  for (const auto& r : records) {
    if (r.year != year) continue;
    any = true;
    cells[{r.exporter, r.product}] += r.value;
  }
  if (!any) throw Error(ErrorKind::EmptyInput, "no records for year " + std::to_string(year));

  std::map<std::string, double> row_total, col_total;
  for (const auto& [key, v] : cells) {
    row_total[key.first] += v;
    col_total[key.second] += v;
  }
  TradeTable table;
  table.year = year;
  for (const auto& [c, t] : row_total)
    if (t > 0.0) table.countries.push_back(c);
  for (const auto& [p, t] : col_total)
    if (t > 0.0) table.products.push_back(p);
  if (table.countries.empty())
    throw Error(ErrorKind::EmptyInput, "all values are zero for year " + std::to_string(year));

  std::map<std::string, std::size_t> ci, pi;
  for (std::size_t i = 0; i < table.countries.size(); ++i) ci[table.countries[i]] = i;
  for (std::size_t i = 0; i < table.products.size(); ++i) pi[table.products[i]] = i;
  table.values.assign(table.rows() * table.cols(), 0.0);
  for (const auto& [key, v] : cells) {
    auto c = ci.find(key.first);
    auto p = pi.find(key.second);
    if (c == ci.end() || p == pi.end()) continue;
    table.values[c->second * table.cols() + p->second] = v;
  }
  return table;
}

/// Years present in a record set, ascending.
inline std::vector<int> years_of(const std::vector<TradeRecord>& records) {
  std::set<int> ys;
  for (const auto& r : records) ys.insert(r.year);
  return {ys.begin(), ys.end()};
}

/// Writes nonzero cells in table order with 6 fractional digits.
inline void write_trade_csv(std::ostream& out, const TradeTable& table) {
  out << "year,exporter,product,value\n";
  for (std::size_t c = 0; c < table.rows(); ++c)
    for (std::size_t p = 0; p < table.cols(); ++p) {
      double v = table.at(c, p);
      if (v == 0.0) continue;
      out << table.year << ',' << table.countries[c] << ',' << table.products[p] << ','
          << text::fixed(v, 6) << '\n';
    }
}

inline std::vector<GdpSeries> parse_gdp_csv(std::istream& in) {
  detail::expect_header(in, "country,year,gdppc");
  std::map<std::string, GdpSeries> by_country;
  std::string line;
  std::size_t lineno = 1;
  bool any = false;
  while (text::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line);
    if (fields.size() != 3)
      throw MalformedRecord(lineno, "expected 3 columns, got " + std::to_string(fields.size()));
    auto country = text::upper(detail::parse_code(fields[0], lineno, "country"));
    int year = detail::parse_year(fields[1], lineno);
    auto v = text::parse_double(fields[2]);
    if (!v || !std::isfinite(*v)) throw MalformedRecord(lineno, "gdppc is not a finite number");
    if (*v <= 0.0)
      throw Error(ErrorKind::NonPositiveGdp,
                  "line " + std::to_string(lineno) + ": " + country + " " + std::to_string(year));
    auto& series = by_country[country];
    series.country = country;
    if (!series.samples.emplace(year, *v).second)
      throw Error(ErrorKind::DuplicateSample,
                  "line " + std::to_string(lineno) + ": " + country + " " + std::to_string(year));
    any = true;
  }
  if (!any) throw Error(ErrorKind::EmptyInput, "GDP CSV has no data rows");
  std::vector<GdpSeries> out;
  out.reserve(by_country.size());
  for (auto& [_, s] : by_country) out.push_back(std::move(s));
  return out;
}

inline std::vector<GdpSeries> parse_gdp_csv(const std::string& content) {
  std::istringstream in(content);
  return parse_gdp_csv(in);
}

inline void write_gdp_csv(std::ostream& out, const std::vector<GdpSeries>& series) {
  out << "country,year,gdppc\n";
  for (const auto& s : series)
    for (const auto& [year, v] : s.samples) out << s.country << ',' << year << ',' << text::fixed(v, 6) << '\n';
}

}  // namespace efk
