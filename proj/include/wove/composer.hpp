#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wove/cooccur.hpp"
#include "wove/embedding.hpp"
#include "wove/trainer.hpp"

namespace wove {

/// One embedding per signed offset, all sharing words and dimension.
class PositionalEmbeddings {
 public:
  PositionalEmbeddings() = default;
  PositionalEmbeddings(int window, std::map<int, EmbeddingMatrix> per_offset);

  int window() const { return window_; }
  std::size_t dim() const { return per_offset_.begin()->second.dim(); }
  const std::vector<std::string>& words() const { return per_offset_.begin()->second.words(); }
  const std::map<int, EmbeddingMatrix>& per_offset() const { return per_offset_; }
  const EmbeddingMatrix& at(int offset) const { return per_offset_.at(offset); }

  friend bool operator==(const PositionalEmbeddings&, const PositionalEmbeddings&) = default;

 private:
  int window_ = 0;
  std::map<int, EmbeddingMatrix> per_offset_;
};

enum class CompositionMethod { direct, reduced, weighted };

std::string to_string(CompositionMethod method);
/// Throws std::invalid_argument on an unknown name.
CompositionMethod parse_method(std::string_view name);

struct ComposedEmbeddings {
  CompositionMethod method = CompositionMethod::direct;
  int window = 0;
  /// Requested dimension k (for reduced, the target total).
  std::size_t base_dim = 0;
  std::size_t block_dim = 0;
  /// Offsets in block order.
  std::vector<int> layout;
  EmbeddingMatrix vectors;

  std::size_t total_dim() const { return vectors.dim(); }

  /// The stored block of `offset` for one word (scaled, for weighted).
  std::span<const double> block(WordId id, int offset) const;
  /// The positional vector the block was built from, undoing any weight.
  std::vector<double> positional_vector(WordId id, int offset) const;

  friend bool operator==(const ComposedEmbeddings&, const ComposedEmbeddings&) = default;
};

/// Seed for the run at `offset`; independent of which other offsets exist.
std::uint64_t offset_seed(std::uint64_t seed, int offset);

/// Trains every offset's matrix independently at `per_position_dim`.
/// Offsets run concurrently on up to config.workers threads, each run
/// single-worker, so the result is deterministic for any worker count.
PositionalEmbeddings train_positional(const PositionalCoocSet& matrices, const TrainConfig& config,
                                      std::size_t per_position_dim,
                                      const std::vector<std::string>& words,
                                      ExportMode mode = ExportMode::sum);

/// Per-offset blocks of dimension k concatenated -W..+W; D = 2Wk.
ComposedEmbeddings direct_concat(const PositionalEmbeddings& pe);

/// As direct_concat, with the block for offset p scaled by 1/|p|.
ComposedEmbeddings weighted_concat(const PositionalEmbeddings& pe);

/// Trains each offset at floor(k / 2W) and concatenates; D = 2W floor(k/2W).
/// Throws std::invalid_argument when 2W > k.
ComposedEmbeddings reduced_concat(const PositionalCoocSet& matrices, const TrainConfig& config,
                                  const std::vector<std::string>& words,
                                  ExportMode mode = ExportMode::sum);

std::size_t reduced_block_dim(std::size_t dim, int window);

/// `key=value` sidecar: method, window, dim, block_dim, total_dim, block_order.
void write_metadata(std::ostream& out, const ComposedEmbeddings& composed);

}  // namespace wove
