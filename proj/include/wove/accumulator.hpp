#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <unordered_map>
#include <vector>

#include "wove/cooccur.hpp"

namespace wove {

/// Hash accumulator for (i, j) += value with a memory budget. When the
/// table outgrows the budget it is sorted and spilled to a temporary run
/// file; finish() k-way merges all runs with the live table.
class SpillingAccumulator {
 public:
  /// Rough per-entry footprint of the hash table, used against the budget.
  static constexpr std::size_t kBytesPerEntry = 48;

  SpillingAccumulator(std::size_t vocab_size, std::size_t memory_bytes,
                      std::filesystem::path spill_dir);
  ~SpillingAccumulator();

  SpillingAccumulator(const SpillingAccumulator&) = delete;
  SpillingAccumulator& operator=(const SpillingAccumulator&) = delete;
  SpillingAccumulator(SpillingAccumulator&&) noexcept;
  SpillingAccumulator& operator=(SpillingAccumulator&&) = delete;

  void add(WordId i, WordId j, double value) {
    table_[(std::uint64_t{i} << 32) | j] += value;
    if (table_.size() > max_entries_) spill();
  }

  std::size_t spill_count() const { return runs_.size(); }

  /// Consumes the accumulated state.
  CoocMatrix finish();

 private:
  void spill();
  std::vector<CoocEntry> drain_sorted();

  std::size_t vocab_size_;
  std::size_t max_entries_;
  std::filesystem::path spill_dir_;
  std::unordered_map<std::uint64_t, double> table_;
  std::vector<std::filesystem::path> runs_;
};

}  // namespace wove
