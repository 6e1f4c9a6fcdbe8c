#include "wove/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "wove/corpus.hpp"
#include "wove/errors.hpp"

namespace wove {

UnitEmbeddings::UnitEmbeddings(const EmbeddingMatrix& emb) : rows_(emb) {
  for (WordId id = 0; id < rows_.size(); ++id) {
    auto row = rows_.row(id);
    const double norm = std::sqrt(std::inner_product(row.begin(), row.end(), row.begin(), 0.0));
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
    }
  }
}

namespace {

/// Ranks all non-excluded rows by dot product with `query`.
std::vector<Neighbor> rank_rows(const UnitEmbeddings& emb, std::span<const double> query,
                                std::size_t n, std::span<const WordId> exclude) {
  std::vector<Neighbor> candidates;
  candidates.reserve(emb.size());
  for (WordId id = 0; id < emb.size(); ++id) {
    if (std::find(exclude.begin(), exclude.end(), id) != exclude.end()) continue;
    const auto row = emb.row(id);
    candidates.push_back({id, std::inner_product(row.begin(), row.end(), query.begin(), 0.0)});
  }
  const std::size_t keep = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), [](const Neighbor& a, const Neighbor& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.id < b.id;
                    });
  candidates.resize(keep);
  return candidates;
}

}  // namespace

std::vector<Neighbor> nearest(const UnitEmbeddings& emb, std::span<const double> query,
                              std::size_t n, std::span<const WordId> exclude) {
  if (query.size() != emb.dim()) {
    throw std::invalid_argument("query has dimension " + std::to_string(query.size()) +
                                ", embedding has " + std::to_string(emb.dim()));
  }
  const double norm = std::sqrt(std::inner_product(query.begin(), query.end(), query.begin(), 0.0));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("query vector has zero or non-finite norm");
  }
  std::vector<double> unit(query.begin(), query.end());
  for (double& v : unit) v /= norm;
  return rank_rows(emb, unit, n, exclude);
}

std::optional<std::string> solve_analogy(const UnitEmbeddings& emb, std::string_view a,
                                         std::string_view b, std::string_view c) {
  const auto ia = emb.find(a);
  const auto ib = emb.find(b);
  const auto ic = emb.find(c);
  if (!ia || !ib || !ic) return std::nullopt;

  std::vector<double> target(emb.dim());
  const auto ra = emb.row(*ia);
  const auto rb = emb.row(*ib);
  const auto rc = emb.row(*ic);
  for (std::size_t d = 0; d < target.size(); ++d) target[d] = ra[d] - rb[d] + rc[d];

  // Ranking by dot with unit rows equals ranking by cosine for any positive
  // target norm; a zero target ties everything and falls to the lowest id.
  const WordId exclude[] = {*ia, *ib, *ic};
  const auto best = rank_rows(emb, target, 1, exclude);
  if (best.empty()) return std::nullopt;
  return emb.word(best.front().id);
}

// Analogy ------------------------------------------------------------------

std::vector<AnalogyQuestion> read_analogy_questions(std::istream& in) {
  std::vector<AnalogyQuestion> out;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = tokenize(line);
    if (fields.empty()) continue;
    if (fields[0].starts_with(":")) {
      section = fields[0].size() > 1 ? fields[0].substr(1) : (fields.size() > 1 ? fields[1] : "");
      continue;
    }
    if (fields.size() != 4) {
      throw DataError("analogy line " + std::to_string(line_no) + ": expected 4 words");
    }
    out.push_back({lowercase(fields[1]), lowercase(fields[0]), lowercase(fields[2]),
                   lowercase(fields[3]), section});
  }
  return out;
}

double AnalogyTally::accuracy() const {
  return asked ? 100.0 * static_cast<double>(correct) / static_cast<double>(asked) : 0.0;
}

double AnalogyTally::coverage() const {
  return asked ? 100.0 * static_cast<double>(answered) / static_cast<double>(asked) : 0.0;
}

AnalogyReport eval_analogy(const UnitEmbeddings& emb, std::span<const AnalogyQuestion> questions) {
  if (questions.empty()) throw std::invalid_argument("no analogy questions");
  AnalogyReport report;
  for (const auto& q : questions) {
    auto it = std::find_if(report.sections.begin(), report.sections.end(),
                           [&](const auto& s) { return s.first == q.section; });
    if (it == report.sections.end()) {
      report.sections.emplace_back(q.section, AnalogyTally{});
      it = std::prev(report.sections.end());
    }
    AnalogyTally& tally = it->second;
    ++tally.asked;
    ++report.total.asked;
    if (!emb.find(q.d)) continue;
    const auto predicted = solve_analogy(emb, q.a, q.b, q.c);
    if (!predicted) continue;
    ++tally.answered;
    ++report.total.answered;
    if (*predicted == q.d) {
      ++tally.correct;
      ++report.total.correct;
    }
  }
  return report;
}

// Similarity ---------------------------------------------------------------

std::vector<ScoredPair> read_scored_pairs(std::istream& in, double scale_max) {
  if (!(scale_max > 0.0)) throw std::invalid_argument("scale max must be > 0");
  std::vector<ScoredPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = tokenize(line);
    if (fields.empty() || fields[0].starts_with("#")) continue;
    if (fields.size() != 3) {
      throw DataError("pair line " + std::to_string(line_no) + ": expected 'word1 word2 score'");
    }
    double score = 0.0;
    const auto& f = fields[2];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), score);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
      throw DataError("pair line " + std::to_string(line_no) + ": bad score '" + f + "'");
    }
    if (score < 0.0 || score > scale_max) {
      throw DataError("pair line " + std::to_string(line_no) + ": score outside [0, scale max]");
    }
    out.push_back({lowercase(fields[0]), lowercase(fields[1]), score, scale_max});
  }
  return out;
}

SynonymDataset extract_synonyms(std::span<const ScoredPair> pairs, double threshold_fraction,
                                std::string name) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw std::invalid_argument("threshold fraction must be in (0, 1]");
  }
  SynonymDataset out{std::move(name), {}};
  std::set<std::pair<std::string, std::string>> seen;
  auto emit = [&](const std::string& x, const std::string& y) {
    if (seen.emplace(x, y).second) out.pairs.emplace_back(x, y);
  };
  for (const auto& p : pairs) {
    if (p.w1 == p.w2) continue;
    if (p.score / p.scale_max >= threshold_fraction) {
      emit(p.w1, p.w2);
      emit(p.w2, p.w1);
    }
  }
  return out;
}

SimilarityReport eval_similarity(const UnitEmbeddings& emb, const SynonymDataset& dataset) {
  if (dataset.pairs.empty()) {
    throw std::invalid_argument("synonym dataset '" + dataset.name + "' is empty");
  }
  SimilarityReport report;
  report.name = dataset.name;
  long total = 0;
  for (const auto& [target, synonym] : dataset.pairs) {
    int rank = static_cast<int>(kSimilarityListSize);
    const auto t = emb.find(target);
    if (t) {
      const WordId exclude[] = {*t};
      const auto row = emb.row(*t);
      const bool zero = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
      if (!zero) {
        const auto list = nearest(emb, row, kSimilarityListSize, exclude);
        for (std::size_t pos = 0; pos < list.size(); ++pos) {
          if (emb.word(list[pos].id) == synonym) {
            rank = static_cast<int>(pos);
            break;
          }
        }
      }
    }
    report.ranks.push_back(rank);
    total += rank;
    if (rank < static_cast<int>(kSimilarityListSize)) ++report.found;
  }
  report.average_rank = static_cast<double>(total) / static_cast<double>(report.ranks.size());
  return report;
}

double relative_improvement(double new_value, double base_value) {
  if (!(base_value > 0.0)) throw std::domain_error("relative improvement needs a positive base");
  return 100.0 * (new_value - base_value) / base_value;
}

}  // namespace wove
