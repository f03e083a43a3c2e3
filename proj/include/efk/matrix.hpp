#pragma once

// Country-product matrices: Balassa RCA, binarization, degrees and NODF
// nestedness.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "efk/error.hpp"
#include "efk/ingest.hpp"
#include "efk/text.hpp"

namespace efk {

/// Real-valued country x product table sharing the axes of its TradeTable.
struct RcaTable {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> values;  // row-major

  double at(std::size_t c, std::size_t p) const { return values[c * products.size() + p]; }
};

/// The binary network M_cp. Every country exports at least one product and
/// every product has at least one exporter; rows and columns that would break
/// this are pruned at construction and listed in removed_countries() /
/// removed_products().
class BinaryCPMatrix {
 public:
  BinaryCPMatrix() = default;

  static BinaryCPMatrix from_cells(std::vector<std::string> countries, std::vector<std::string> products,
                                   const std::vector<std::uint8_t>& cells) {
    const auto C = countries.size(), P = products.size();
    if (cells.size() != C * P)
      throw Error(ErrorKind::LengthMismatch, "cell count " + std::to_string(cells.size()) + " != " +
                                                 std::to_string(C) + "x" + std::to_string(P));
    check_unique(countries, "country");
    check_unique(products, "product");

    std::vector<std::size_t> rsum(C, 0), csum(P, 0);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t p = 0; p < P; ++p)
        if (cells[c * P + p]) {
          ++rsum[c];
          ++csum[p];
        }

    BinaryCPMatrix m;
    std::vector<std::size_t> keep_c, keep_p;
    for (std::size_t c = 0; c < C; ++c) {
      if (rsum[c]) keep_c.push_back(c);
      else m.removed_countries_.push_back(countries[c]);
    }
    for (std::size_t p = 0; p < P; ++p) {
      if (csum[p]) keep_p.push_back(p);
      else m.removed_products_.push_back(products[p]);
    }
    if (keep_c.empty()) throw Error(ErrorKind::EmptyMatrix, "no nonzero entries");

    for (auto c : keep_c) m.countries_.push_back(std::move(countries[c]));
    for (auto p : keep_p) m.products_.push_back(std::move(products[p]));
    m.cells_.reserve(keep_c.size() * keep_p.size());
    for (auto c : keep_c)
      for (auto p : keep_p) m.cells_.push_back(cells[c * P + p] ? 1 : 0);
    m.recount();
    return m;
  }

  /// Convenience for literals: rows of 0/1 integers, codes generated as
  /// C1..Cn / P1..Pm when not supplied.
  static BinaryCPMatrix from_rows(const std::vector<std::vector<int>>& rows,
                                  std::vector<std::string> countries = {},
                                  std::vector<std::string> products = {}) {
    const auto C = rows.size();
    const auto P = C ? rows.front().size() : 0;
    if (countries.empty())
      for (std::size_t c = 0; c < C; ++c) countries.push_back("C" + std::to_string(c + 1));
    if (products.empty())
      for (std::size_t p = 0; p < P; ++p) products.push_back("P" + std::to_string(p + 1));
    std::vector<std::uint8_t> cells;
    cells.reserve(C * P);
    for (const auto& r : rows) {
      if (r.size() != P) throw Error(ErrorKind::LengthMismatch, "ragged rows");
      for (int v : r) cells.push_back(v ? 1 : 0);
    }
    return from_cells(std::move(countries), std::move(products), cells);
  }

  std::size_t rows() const { return countries_.size(); }
  std::size_t cols() const { return products_.size(); }
  bool operator()(std::size_t c, std::size_t p) const { return cells_[c * cols() + p] != 0; }
  std::span<const std::uint8_t> row(std::size_t c) const { return {cells_.data() + c * cols(), cols()}; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  const std::vector<std::string>& countries() const { return countries_; }
  const std::vector<std::string>& products() const { return products_; }
  /// k_c
  const std::vector<std::size_t>& diversification() const { return diversification_; }
  /// k_p
  const std::vector<std::size_t>& ubiquity() const { return ubiquity_; }
  const std::vector<std::string>& removed_countries() const { return removed_countries_; }
  const std::vector<std::string>& removed_products() const { return removed_products_; }

  std::size_t ones() const {
    return std::accumulate(diversification_.begin(), diversification_.end(), std::size_t{0});
  }

  std::optional<std::size_t> country_index(std::string_view code) const { return find(countries_, code); }
  std::optional<std::size_t> product_index(std::string_view code) const { return find(products_, code); }

  friend bool operator==(const BinaryCPMatrix& a, const BinaryCPMatrix& b) {
    return a.countries_ == b.countries_ && a.products_ == b.products_ && a.cells_ == b.cells_;
  }

 private:
  static void check_unique(const std::vector<std::string>& codes, const char* what) {
    std::set<std::string_view> seen;
    for (const auto& c : codes)
      if (!seen.insert(c).second) throw Error(ErrorKind::InvalidArgument, std::string("duplicate ") + what + " " + c);
  }

  static std::optional<std::size_t> find(const std::vector<std::string>& v, std::string_view code) {
    auto it = std::find(v.begin(), v.end(), code);
    if (it == v.end()) return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
  }

  void recount() {
    diversification_.assign(rows(), 0);
    ubiquity_.assign(cols(), 0);
    for (std::size_t c = 0; c < rows(); ++c)
      for (std::size_t p = 0; p < cols(); ++p)
        if ((*this)(c, p)) {
          ++diversification_[c];
          ++ubiquity_[p];
        }
  }

  std::vector<std::string> countries_;
  std::vector<std::string> products_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> diversification_;
  std::vector<std::size_t> ubiquity_;
  std::vector<std::string> removed_countries_;
  std::vector<std::string> removed_products_;
};

/// Balassa revealed comparative advantage:
///   RCA_cp = (V_cp / sum_p V_cp) / (sum_c V_cp / sum_cp V_cp)
/// Entries in a zero row or column are 0.
inline RcaTable rca(const TradeTable& table) {
  const auto C = table.rows(), P = table.cols();
  if (C == 0 || P == 0 || table.values.size() != C * P) throw Error(ErrorKind::EmptyInput, "empty trade table");
  std::vector<double> rsum(C, 0.0), csum(P, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t p = 0; p < P; ++p) {
      double v = table.at(c, p);
      rsum[c] += v;
      csum[p] += v;
      total += v;
    }
  if (!(total > 0.0)) throw Error(ErrorKind::EmptyInput, "world export total is zero");

  RcaTable out{table.countries, table.products, std::vector<double>(C * P, 0.0)};
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t p = 0; p < P; ++p) {
      if (rsum[c] <= 0.0 || csum[p] <= 0.0) continue;
      out.values[c * P + p] = (table.at(c, p) / rsum[c]) / (csum[p] / total);
    }
  return out;
}

/// M_cp = 1 iff RCA_cp >= threshold.
inline BinaryCPMatrix binarize(const RcaTable& rca_table, double threshold = 1.0) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be > 0");
  std::vector<std::uint8_t> cells(rca_table.values.size());
  std::transform(rca_table.values.begin(), rca_table.values.end(), cells.begin(),
                 [threshold](double v) { return v >= threshold ? 1 : 0; });
  return BinaryCPMatrix::from_cells(rca_table.countries, rca_table.products, cells);
}

struct NestednessReport {
  double nodf_rows = 0.0;
  double nodf_cols = 0.0;
  double nodf_total = 0.0;
  double fill = 0.0;
};

namespace detail {

// Sum of pair contributions over unordered pairs of lines (rows or columns).
// A pair contributes 100 * overlap / k_small when degrees differ strictly.
template <typename At>
double nodf_pair_sum(std::size_t n, std::size_t len, const std::vector<std::size_t>& degree, At at) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (degree[i] == degree[j]) continue;
      std::size_t hi = degree[i] > degree[j] ? i : j;
      std::size_t lo = hi == i ? j : i;
      std::size_t overlap = 0;
      for (std::size_t k = 0; k < len; ++k)
        if (at(lo, k) && at(hi, k)) ++overlap;
      sum += 100.0 * static_cast<double>(overlap) / static_cast<double>(degree[lo]);
    }
  return sum;
}

}  // namespace detail

/// NODF (overlap and decreasing fill). Pairs are unordered and oriented by
/// degree, so the score is invariant under row and column permutations.
/// Matrices with a single row (or column) have no pairs on that side and the
/// side's term is 0.
inline NestednessReport nestedness(const BinaryCPMatrix& m) {
  const auto C = m.rows(), P = m.cols();
  if (C == 0 || P == 0) throw Error(ErrorKind::EmptyMatrix, "nestedness of an empty matrix");
  double row_sum = detail::nodf_pair_sum(C, P, m.diversification(),
                                         [&](std::size_t a, std::size_t k) { return m(a, k); });
  double col_sum = detail::nodf_pair_sum(P, C, m.ubiquity(),
                                         [&](std::size_t a, std::size_t k) { return m(k, a); });
  double row_pairs = static_cast<double>(C * (C - 1) / 2);
  double col_pairs = static_cast<double>(P * (P - 1) / 2);

  NestednessReport r;
  r.nodf_rows = row_pairs > 0 ? row_sum / row_pairs : 0.0;
  r.nodf_cols = col_pairs > 0 ? col_sum / col_pairs : 0.0;
  r.nodf_total = row_pairs + col_pairs > 0 ? (row_sum + col_sum) / (row_pairs + col_pairs) : 0.0;
  r.fill = static_cast<double>(m.ones()) / static_cast<double>(C * P);
  return r;
}

/// Index permutation that sorts `scores` (descending if `descending`), ties
/// broken by ascending code.
inline std::vector<std::size_t> score_order(const std::vector<double>& scores, const std::vector<std::string>& codes,
                                            bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return descending ? scores[a] > scores[b] : scores[a] < scores[b];
    return codes[a] < codes[b];
  });
  return idx;
}

/// Rows by descending country score, columns by ascending product score:
/// the triangular layout with the strongest country on top.
inline BinaryCPMatrix order_by_scores(const BinaryCPMatrix& m, const std::vector<double>& country_scores,
                                      const std::vector<double>& product_scores) {
  if (country_scores.size() != m.rows() || product_scores.size() != m.cols())
    throw Error(ErrorKind::LengthMismatch, "score vectors do not match matrix axes");
  auto rorder = score_order(country_scores, m.countries(), true);
  auto corder = score_order(product_scores, m.products(), false);
  std::vector<std::string> countries, products;
  for (auto c : rorder) countries.push_back(m.countries()[c]);
  for (auto p : corder) products.push_back(m.products()[p]);
  std::vector<std::uint8_t> cells;
  cells.reserve(m.cells().size());
  for (auto c : rorder)
    for (auto p : corder) cells.push_back(m(c, p));
  return BinaryCPMatrix::from_cells(std::move(countries), std::move(products), cells);
}

/// Header row holds product codes (first cell "country"); one row per
/// country with 0/1 cells.
inline void write_matrix_csv(std::ostream& out, const BinaryCPMatrix& m) {
  out << "country";
  for (const auto& p : m.products()) out << ',' << p;
  out << '\n';
  for (std::size_t c = 0; c < m.rows(); ++c) {
    out << m.countries()[c];
    for (std::size_t p = 0; p < m.cols(); ++p) out << ',' << (m(c, p) ? '1' : '0');
    out << '\n';
  }
}

inline BinaryCPMatrix parse_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> products;
  while (text::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line);
    if (fields.size() < 2) throw MalformedRecord(lineno, "matrix header needs at least one product");
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!text::valid_code(fields[i])) throw MalformedRecord(lineno, "invalid product code");
      products.emplace_back(fields[i]);
    }
    break;
  }
  if (products.empty()) throw Error(ErrorKind::EmptyInput, "matrix CSV has no header");
  std::vector<std::string> countries;
  std::vector<std::uint8_t> cells;
  while (text::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line);
    if (fields.size() != products.size() + 1)
      throw MalformedRecord(lineno, "expected " + std::to_string(products.size() + 1) + " columns");
    if (!text::valid_code(fields[0])) throw MalformedRecord(lineno, "invalid country code");
    countries.push_back(text::upper(fields[0]));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] == "1") cells.push_back(1);
      else if (fields[i] == "0") cells.push_back(0);
      else throw MalformedRecord(lineno, "cell must be 0 or 1");
    }
  }
  if (countries.empty()) throw Error(ErrorKind::EmptyInput, "matrix CSV has no data rows");
  return BinaryCPMatrix::from_cells(std::move(countries), std::move(products), cells);
}

inline BinaryCPMatrix parse_matrix_csv(const std::string& content) {
  std::istringstream in(content);
  return parse_matrix_csv(in);
}

}  // namespace efk
