#include "wove/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "wove/errors.hpp"

namespace wove {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> words, std::size_t dim)
    : words_(std::move(words)), dim_(dim), data_(words_.size() * dim, 0.0) {
  index_.reserve(words_.size());
  for (std::size_t id = 0; id < words_.size(); ++id) {
    if (!index_.emplace(words_[id], static_cast<WordId>(id)).second) {
      throw DataError("duplicate word '" + words_[id] + "' in embedding");
    }
  }
}

std::optional<WordId> EmbeddingMatrix::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  return std::string(buf, ptr);
}

void write_vectors(std::ostream& out, const EmbeddingMatrix& emb) {
  std::string line;
  for (WordId id = 0; id < emb.size(); ++id) {
    line = emb.word(id);
    for (double v : emb.row(id)) {
      line.push_back(' ');
      line += format_real(v);
    }
    line.push_back('\n');
    out << line;
  }
}

EmbeddingMatrix read_vectors(std::istream& in) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = tokenize(line);
    if (fields.empty()) continue;
    const std::size_t row_dim = fields.size() - 1;
    if (row_dim == 0) throw DataError("vector line " + std::to_string(line_no) + " has no values");
    if (words.empty()) dim = row_dim;
    if (row_dim != dim) {
      throw DataError("vector line " + std::to_string(line_no) + " has " + std::to_string(row_dim) +
                      " values, expected " + std::to_string(dim));
    }
    words.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      const auto& f = fields[k];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw DataError("vector line " + std::to_string(line_no) + ": bad value '" + f + "'");
      }
      values.push_back(v);
    }
  }
  EmbeddingMatrix emb(std::move(words), dim);
  for (WordId id = 0; id < emb.size(); ++id) {
    auto row = emb.row(id);
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(id * dim), dim, row.begin());
  }
  return emb;
}

}  // namespace wove
