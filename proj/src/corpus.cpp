#include "wove/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "wove/errors.hpp"

namespace wove {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(UChar32 cp) {
  return (U_GET_GC_MASK(cp) & (U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK)) != 0;
}

void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, cp);
  out.append(buf, static_cast<std::size_t>(len));
}

bool vocabulary_order(const Vocabulary::Entry& a, const Vocabulary::Entry& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.word < b.word;
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  const auto length = static_cast<int32_t>(raw.size());

  bool in_tag = false;
  bool pending_space = false;
  int32_t pos = 0;
  while (pos < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, pos, length, cp);
    if (in_tag) {
      // A tag ends at '>' or, if left open, at the end of its line.
      if (cp == '>' || cp == '\n') {
        in_tag = false;
        pending_space = true;
      }
      continue;
    }
    if (cp == '<') {
      in_tag = true;
      pending_space = true;
      continue;
    }
    if (cp < 0 || !is_word_char(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    append_utf8(out, u_tolower(cp));
  }
  return out;
}

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t pos = 0;
  while (pos < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, pos, length, cp);
    if (cp >= 0) append_utf8(out, u_tolower(cp));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_ascii_space(cleaned[i])) ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && !is_ascii_space(cleaned[i])) ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

void read_documents(std::istream& in,
                    const std::function<void(std::vector<std::string>&&)>& sink) {
  std::vector<std::string> document;
  std::string line;
  auto flush = [&] {
    if (!document.empty()) sink(std::move(document));
    document.clear();
  };
  while (std::getline(in, line)) {
    if (std::all_of(line.begin(), line.end(), is_ascii_space)) {
      flush();
      continue;
    }
    for (auto& token : tokenize(clean_text(line))) document.push_back(std::move(token));
  }
  flush();
}

// Vocabulary ---------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t id = 0; id < entries_.size(); ++id) {
    if (id > 0 && !vocabulary_order(entries_[id - 1], entries_[id])) {
      throw DataError("vocabulary entries out of order at '" + entries_[id].word + "'");
    }
    if (entries_[id].word.empty()) throw DataError("empty word in vocabulary");
    index_.emplace(entries_[id].word, static_cast<WordId>(id));
  }
}

std::vector<std::string> Vocabulary::words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.word);
  return out;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::write(std::ostream& out) const {
  for (const auto& e : entries_) out << e.word << ' ' << e.count << '\n';
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tokens = tokenize(line);
    Entry entry;
    if (tokens.size() != 2) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": expected 'word count'");
    }
    const auto& field = tokens[1];
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), entry.count);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": bad count '" + field + "'");
    }
    entry.word = tokens[0];
    entries.push_back(std::move(entry));
  }
  return Vocabulary(std::move(entries));
}

// VocabCounter ---------------------------------------------------------------

void VocabCounter::add(std::string_view token) {
  auto it = counts_.find(token);
  if (it == counts_.end()) {
    counts_.emplace(std::string(token), 1);
  } else {
    ++it->second;
  }
  ++total_;
}

void VocabCounter::add(std::span<const std::string> tokens) {
  for (const auto& t : tokens) add(t);
}

void VocabCounter::merge(const VocabCounter& other) {
  for (const auto& [word, count] : other.counts_) counts_[word] += count;
  total_ += other.total_;
}

Vocabulary VocabCounter::build(std::uint64_t min_count) const {
  if (min_count == 0) throw std::invalid_argument("min_count must be >= 1");
  std::vector<Vocabulary::Entry> entries;
  for (const auto& [word, count] : counts_) {
    if (count >= min_count) entries.push_back({word, count});
  }
  std::sort(entries.begin(), entries.end(), vocabulary_order);
  return Vocabulary(std::move(entries));
}

Vocabulary build_vocabulary(std::span<const std::string> tokens, std::uint64_t min_count) {
  VocabCounter counter;
  counter.add(tokens);
  return counter.build(min_count);
}

// Encoding -----------------------------------------------------------------

void EncodedCorpus::add_document(std::vector<WordId> ids) {
  token_count += ids.size();
  documents.push_back(std::move(ids));
}

std::vector<WordId> encode(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto id = vocab.find(t)) ids.push_back(*id);
  }
  return ids;
}

EncodedCorpus encode(std::span<const std::vector<std::string>> documents, const Vocabulary& vocab) {
  EncodedCorpus corpus;
  corpus.documents.reserve(documents.size());
  for (const auto& doc : documents) corpus.add_document(encode(doc, vocab));
  return corpus;
}

}  // namespace wove
