#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wove/embedding.hpp"

namespace wove {

inline constexpr std::size_t kSimilarityListSize = 10;
inline constexpr double kDefaultSynonymThreshold = 0.75;

/// Copy of an embedding with every row scaled to unit L2 norm (zero rows
/// stay zero), so a dot product against it is a cosine.
class UnitEmbeddings {
 public:
  explicit UnitEmbeddings(const EmbeddingMatrix& emb);

  std::size_t size() const { return rows_.size(); }
  std::size_t dim() const { return rows_.dim(); }
  std::optional<WordId> find(std::string_view word) const { return rows_.find(word); }
  const std::string& word(WordId id) const { return rows_.word(id); }
  std::span<const double> row(WordId id) const { return rows_.row(id); }

 private:
  EmbeddingMatrix rows_;
};

struct Neighbor {
  WordId id = 0;
  double cosine = 0.0;
};

/// Top-n words by cosine to `query`, excluded ids removed, ties broken by
/// ascending id. Throws std::invalid_argument on a zero-norm or
/// wrong-dimension query.
std::vector<Neighbor> nearest(const UnitEmbeddings& emb, std::span<const double> query,
                              std::size_t n, std::span<const WordId> exclude = {});

/// 3CosAdd: argmax over words outside {a, b, c} of cos(v, â - b̂ + ĉ).
/// std::nullopt if any of a, b, c is out of vocabulary.
std::optional<std::string> solve_analogy(const UnitEmbeddings& emb, std::string_view a,
                                         std::string_view b, std::string_view c);

// Analogy ------------------------------------------------------------------

/// Holds a - b + c = d.
struct AnalogyQuestion {
  std::string a, b, c, d;
  std::string section;
};

/// Google/GloVe question file. `: name` starts a section; each other line
/// `w1 w2 w3 w4` reads "w1 is to w2 as w3 is to w4" and becomes
/// a = w2, b = w1, c = w3, d = w4 so that a - b + c = d. Words are
/// lowercased. Throws DataError on a malformed line.
std::vector<AnalogyQuestion> read_analogy_questions(std::istream& in);

struct AnalogyTally {
  std::size_t asked = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;

  /// Percent of asked.
  double accuracy() const;
  double coverage() const;

  friend bool operator==(const AnalogyTally&, const AnalogyTally&) = default;
};

struct AnalogyReport {
  std::vector<std::pair<std::string, AnalogyTally>> sections;  // first-seen order
  AnalogyTally total;

  friend bool operator==(const AnalogyReport&, const AnalogyReport&) = default;
};

/// Questions with any OOV word are asked but neither answered nor correct.
/// Throws std::invalid_argument on an empty question list.
AnalogyReport eval_analogy(const UnitEmbeddings& emb, std::span<const AnalogyQuestion> questions);

// Similarity ---------------------------------------------------------------

struct ScoredPair {
  std::string w1, w2;
  double score = 0.0;
  double scale_max = 10.0;
};

struct SynonymDataset {
  std::string name;
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// `word1 word2 score` lines; blank and `#` lines skipped; words lowercased.
std::vector<ScoredPair> read_scored_pairs(std::istream& in, double scale_max);

/// Keeps (w1, w2) and (w2, w1) for every pair with score / scale_max >=
/// threshold, dropping duplicates and self-pairs.
SynonymDataset extract_synonyms(std::span<const ScoredPair> pairs,
                                double threshold_fraction = kDefaultSynonymThreshold,
                                std::string name = {});

struct SimilarityReport {
  std::string name;
  std::vector<int> ranks;  // per pair, 0..9 or 10 when not found
  double average_rank = 0.0;
  std::size_t found = 0;

  friend bool operator==(const SimilarityReport&, const SimilarityReport&) = default;
};

/// Rank of each synonym among the target's 10 nearest neighbours (target
/// excluded); 10 when absent or the target is OOV. Throws on an empty set.
SimilarityReport eval_similarity(const UnitEmbeddings& emb, const SynonymDataset& dataset);

/// 100 (new - base) / base. Throws std::domain_error when base <= 0.
double relative_improvement(double new_value, double base_value);

}  // namespace wove
