#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wove/corpus.hpp"

namespace wove {

/// Dense V x dim matrix with one row per word, rows in vocabulary order.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-initialized.
  EmbeddingMatrix(std::vector<std::string> words, std::size_t dim);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(WordId id) const { return words_[id]; }
  std::optional<WordId> find(std::string_view word) const;

  std::span<double> row(WordId id) { return {data_.data() + std::size_t{id} * dim_, dim_}; }
  std::span<const double> row(WordId id) const {
    return {data_.data() + std::size_t{id} * dim_, dim_};
  }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::string> words_;
  StringMap<WordId> index_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// GloVe text format: `word v1 ... vk` per line, 9 significant digits.
void write_vectors(std::ostream& out, const EmbeddingMatrix& emb);

/// Throws DataError on ragged rows, unparsable values, or duplicate words.
EmbeddingMatrix read_vectors(std::istream& in);

/// Shortest-form decimal text with 9 significant digits, locale-independent.
std::string format_real(double value);

}  // namespace wove
