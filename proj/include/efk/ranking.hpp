#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "efk/error.hpp"
#include "efk/matrix.hpp"
#include "efk/text.hpp"

namespace efk {

/// Rank labels, 1 = highest score. Equal scores are ordered by ascending
/// code, so labels are always a permutation of 1..n.
inline std::vector<std::size_t> rank_labels(const std::vector<double>& scores, const std::vector<std::string>& codes) {
  auto order = score_order(scores, codes, true);
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranks[order[i]] = i + 1;
  return ranks;
}

/// Scores and ranks of one entity type under one algorithm, plus the run
/// metadata that serializers carry along.
struct RankingResult {
  std::string algorithm;  // "fitness", "complexity", "eci", "pci", or "" when read back from CSV
  std::vector<std::string> entities;
  std::vector<double> scores;
  std::vector<std::size_t> ranks;

  std::size_t iterations = 0;
  bool converged = true;
  double residual = 0.0;
  std::optional<std::size_t> order_n;
  std::optional<double> lambda;

  std::size_t size() const { return entities.size(); }
};

inline RankingResult make_ranking(std::string algorithm, std::vector<std::string> entities, std::vector<double> scores) {
  if (entities.size() != scores.size()) throw Error(ErrorKind::LengthMismatch, "entities and scores differ in length");
  RankingResult r;
  r.algorithm = std::move(algorithm);
  r.ranks = rank_labels(scores, entities);
  r.entities = std::move(entities);
  r.scores = std::move(scores);
  return r;
}

/// `entity,score,rank`, sorted by rank.
inline void write_ranking_csv(std::ostream& out, const RankingResult& r) {
  std::vector<std::size_t> by_rank(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) by_rank[r.ranks[i] - 1] = i;
  out << "entity,score,rank\n";
  for (auto i : by_rank) out << r.entities[i] << ',' << text::real(r.scores[i]) << ',' << r.ranks[i] << '\n';
}

inline RankingResult parse_ranking_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  RankingResult r;
  std::set<std::size_t> seen_ranks;
  std::set<std::string> seen_entities;
  while (text::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty()) continue;
    if (!header) {
      if (t != "entity,score,rank") throw MalformedRecord(lineno, "expected header 'entity,score,rank'");
      header = true;
      continue;
    }
    auto f = text::split(t);
    if (f.size() != 3) throw MalformedRecord(lineno, "expected 3 columns");
    auto score = text::parse_double(f[1]);
    auto rank = text::parse_int(f[2]);
    if (!text::valid_code(f[0]) || !score || !std::isfinite(*score) || !rank || *rank < 1)
      throw MalformedRecord(lineno, "bad ranking row");
    if (!seen_entities.insert(std::string(f[0])).second) throw MalformedRecord(lineno, "duplicate entity");
    if (!seen_ranks.insert(static_cast<std::size_t>(*rank)).second) throw MalformedRecord(lineno, "duplicate rank");
    r.entities.emplace_back(f[0]);
    r.scores.push_back(*score);
    r.ranks.push_back(static_cast<std::size_t>(*rank));
  }
  if (!header) throw Error(ErrorKind::EmptyInput, "ranking CSV has no header");
  if (r.entities.empty()) throw Error(ErrorKind::EmptyInput, "ranking CSV has no rows");
  if (*seen_ranks.rbegin() != r.size()) throw Error(ErrorKind::MalformedRecord, "ranks are not 1..n");
  return r;
}

inline RankingResult parse_ranking_csv(const std::string& content) {
  std::istringstream in(content);
  return parse_ranking_csv(in);
}

}  // namespace efk
