#pragma once

// Test-only helpers: random corpora and a brute-force co-occurrence oracle
// that shares no code with the library's counters.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wove/corpus.hpp"

namespace wove::testing {

using DenseCounts = std::map<std::pair<WordId, WordId>, double>;

inline EncodedCorpus random_corpus(std::uint64_t seed, std::size_t tokens, std::size_t vocab,
                                   std::size_t max_doc = 400) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> doc_len(1, max_doc);
  std::uniform_int_distribution<WordId> word(0, static_cast<WordId>(vocab - 1));
  EncodedCorpus corpus;
  std::size_t left = tokens;
  while (left > 0) {
    const std::size_t n = std::min(left, doc_len(gen));
    std::vector<WordId> doc(n);
    for (auto& w : doc) w = word(gen);
    corpus.add_document(std::move(doc));
    left -= n;
  }
  return corpus;
}

/// Naive O(n W) scan. For every token and every other token in the same
/// document at signed offset p (0 < |p| <= W), records a pair.
inline DenseCounts brute_force_baseline(const EncodedCorpus& corpus, int window) {
  DenseCounts out;
  for (const auto& doc : corpus.documents) {
    const auto n = static_cast<long>(doc.size());
    for (long t = 0; t < n; ++t) {
      for (long u = t - window; u <= t + window; ++u) {
        if (u == t || u < 0 || u >= n) continue;
        out[{doc[t], doc[u]}] += 1.0 / static_cast<double>(std::labs(u - t));
      }
    }
  }
  return out;
}

inline DenseCounts brute_force_positional(const EncodedCorpus& corpus, int offset) {
  DenseCounts out;
  for (const auto& doc : corpus.documents) {
    const auto n = static_cast<long>(doc.size());
    for (long t = 0; t < n; ++t) {
      const long u = t + offset;
      if (u < 0 || u >= n) continue;
      out[{doc[t], doc[u]}] += 1.0;
    }
  }
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wove-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace wove::testing
