#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wove {

/// Transparent hash so string-keyed maps can be probed with string_view.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

using WordId = std::uint32_t;

inline constexpr std::uint64_t kDefaultMinCount = 5;

// Text cleaning ------------------------------------------------------------

/// Strips `<...>` tags, turns every character that is not a letter, mark or
/// number into a separator, lowercases, and collapses separators to single
/// spaces with no leading or trailing space. A tag left open runs to the end
/// of its line. Malformed UTF-8 becomes a separator.
std::string clean_text(std::string_view raw);

/// Unicode simple lowercase of valid UTF-8; malformed bytes are dropped.
std::string lowercase(std::string_view text);

/// Splits on runs of ASCII whitespace. Never yields empty tokens.
std::vector<std::string> tokenize(std::string_view cleaned);

/// Reads raw text and calls `sink` once per document with its cleaned
/// tokens. Documents end at a whitespace-only line and at end of stream.
/// Empty documents are not reported.
void read_documents(std::istream& in,
                    const std::function<void(std::vector<std::string>&&)>& sink);

// Vocabulary ---------------------------------------------------------------

class Vocabulary {
 public:
  struct Entry {
    std::string word;
    std::uint64_t count = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Vocabulary() = default;

  /// Takes entries already in vocabulary order; throws DataError if the
  /// order or uniqueness invariant is violated.
  explicit Vocabulary(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](WordId id) const { return entries_[id]; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> words() const;
  std::optional<WordId> find(std::string_view word) const;

  /// `word count` lines in vocabulary order.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  StringMap<WordId> index_;
};

/// Token frequency counter. Merging is a plain count sum, so counting
/// chunks separately and merging gives the same result as one pass.
class VocabCounter {
 public:
  void add(std::string_view token);
  void add(std::span<const std::string> tokens);
  void merge(const VocabCounter& other);

  std::uint64_t total_tokens() const { return total_; }
  const StringMap<std::uint64_t>& counts() const { return counts_; }

  /// Words with count >= min_count, sorted by descending count then
  /// ascending byte order. Throws std::invalid_argument if min_count == 0.
  Vocabulary build(std::uint64_t min_count) const;

 private:
  StringMap<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

Vocabulary build_vocabulary(std::span<const std::string> tokens, std::uint64_t min_count);

// Encoding -----------------------------------------------------------------

struct EncodedCorpus {
  std::vector<std::vector<WordId>> documents;
  std::uint64_t token_count = 0;

  void add_document(std::vector<WordId> ids);
};

/// Maps tokens to ids, dropping out-of-vocabulary tokens so the survivors
/// become adjacent.
std::vector<WordId> encode(std::span<const std::string> tokens, const Vocabulary& vocab);

EncodedCorpus encode(std::span<const std::vector<std::string>> documents, const Vocabulary& vocab);

}  // namespace wove
