#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wove/corpus.hpp"

namespace wove {

inline constexpr int kDefaultWindow = 4;

struct CoocEntry {
  WordId i = 0;
  WordId j = 0;
  double value = 0.0;

  friend bool operator==(const CoocEntry&, const CoocEntry&) = default;
};

/// Sparse co-occurrence matrix over a vocabulary of size V. Entries are kept
/// sorted by (i, j), unique, and strictly positive.
class CoocMatrix {
 public:
  explicit CoocMatrix(std::size_t vocab_size = 0) : vocab_size_(vocab_size) {}

  /// Sorts, sums duplicates (in input order) and drops zeros. Throws
  /// DataError on an id >= vocab_size or a negative / non-finite value.
  static CoocMatrix from_entries(std::size_t vocab_size, std::vector<CoocEntry> entries);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const CoocEntry> entries() const { return entries_; }

  /// Value at (i, j), 0 when absent.
  double at(WordId i, WordId j) const;
  double total_mass() const;

  friend bool operator==(const CoocMatrix&, const CoocMatrix&) = default;

 private:
  std::size_t vocab_size_ = 0;
  std::vector<CoocEntry> entries_;
};

/// One exact-count matrix per signed offset in -W..-1, +1..+W.
class PositionalCoocSet {
 public:
  PositionalCoocSet() = default;
  PositionalCoocSet(int window, std::map<int, CoocMatrix> matrices);

  int window() const { return window_; }
  std::size_t vocab_size() const;
  /// Signed offsets in ascending order.
  std::vector<int> offsets() const;
  const CoocMatrix& at(int offset) const;
  const std::map<int, CoocMatrix>& matrices() const { return matrices_; }

  friend bool operator==(const PositionalCoocSet&, const PositionalCoocSet&) = default;

 private:
  int window_ = 0;
  std::map<int, CoocMatrix> matrices_;
};

/// -W, ..., -1, +1, ..., +W
std::vector<int> signed_offsets(int window);

struct CountOptions {
  std::size_t workers = 1;
  /// Budget for in-memory hash accumulation across all workers; exceeding it
  /// spills sorted runs to `spill_dir`.
  std::size_t memory_bytes = std::size_t{512} << 20;
  std::filesystem::path spill_dir = std::filesystem::temp_directory_path();
};

/// Distance-damped symmetric counts: each pair d <= W apart in the same
/// document adds 1/d to (pivot, context) from both sides.
CoocMatrix count_baseline(const EncodedCorpus& corpus, std::size_t vocab_size, int window,
                          const CountOptions& options = {});

/// Undamped counts per offset: X^(p)(i, j) = times j occurs p positions
/// after i (p < 0: before) in the same document.
PositionalCoocSet count_positional(const EncodedCorpus& corpus, std::size_t vocab_size, int window,
                                   const CountOptions& options = {});

/// Entrywise sum. Throws DataError on mismatched vocab sizes.
CoocMatrix merge(std::span<const CoocMatrix> shards);
PositionalCoocSet merge(std::span<const PositionalCoocSet> shards);

/// max |baseline(i,j) - sum_p positional^(p)(i,j) / |p||
double verify_decomposition(const CoocMatrix& baseline, const PositionalCoocSet& positional);

// Shard files: little-endian records of (u32 i, u32 j, f64 value).

inline constexpr std::size_t kShardRecordBytes = 16;

void write_shard(const std::filesystem::path& path, const CoocMatrix& matrix);
CoocMatrix read_shard(const std::filesystem::path& path, std::size_t vocab_size);

/// `<prefix>.bin`
std::filesystem::path baseline_shard_path(const std::string& prefix);
/// `<prefix>.p+2.bin`, `<prefix>.p-1.bin`, ...
std::filesystem::path positional_shard_path(const std::string& prefix, int offset);

void write_positional(const std::string& prefix, const PositionalCoocSet& set);
PositionalCoocSet read_positional(const std::string& prefix, int window, std::size_t vocab_size);

}  // namespace wove
