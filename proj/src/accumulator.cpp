#include "wove/accumulator.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <memory>
#include <queue>

#include <unistd.h>

#include "shard_codec.hpp"
#include "wove/errors.hpp"

namespace wove {

namespace {

std::atomic<std::uint64_t> g_run_counter{0};

std::filesystem::path fresh_run_path(const std::filesystem::path& dir) {
  const auto n = g_run_counter.fetch_add(1);
  return dir / ("wove-spill-" + std::to_string(::getpid()) + "-" + std::to_string(n) + ".bin");
}

}  // namespace

SpillingAccumulator::SpillingAccumulator(std::size_t vocab_size, std::size_t memory_bytes,
                                         std::filesystem::path spill_dir)
    : vocab_size_(vocab_size),
      max_entries_(std::max<std::size_t>(memory_bytes / kBytesPerEntry, 1)),
      spill_dir_(std::move(spill_dir)) {}

SpillingAccumulator::SpillingAccumulator(SpillingAccumulator&& other) noexcept
    : vocab_size_(other.vocab_size_),
      max_entries_(other.max_entries_),
      spill_dir_(std::move(other.spill_dir_)),
      table_(std::move(other.table_)),
      runs_(std::move(other.runs_)) {
  other.runs_.clear();
}

SpillingAccumulator::~SpillingAccumulator() {
  std::error_code ec;
  for (const auto& run : runs_) std::filesystem::remove(run, ec);
}

std::vector<CoocEntry> SpillingAccumulator::drain_sorted() {
  std::vector<std::pair<std::uint64_t, double>> cells(table_.begin(), table_.end());
  table_.clear();
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CoocEntry> out;
  out.reserve(cells.size());
  for (const auto& [key, value] : cells) {
    out.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xffffffffu), value});
  }
  return out;
}

void SpillingAccumulator::spill() {
  auto path = fresh_run_path(spill_dir_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create spill file " + path.string());
  runs_.push_back(path);
  for (const auto& e : drain_sorted()) detail::put_record(out, e);
  if (!out) throw DataError("failed writing spill file " + path.string());
}

CoocMatrix SpillingAccumulator::finish() {
  auto live = drain_sorted();
  if (runs_.empty()) return CoocMatrix::from_entries(vocab_size_, std::move(live));

  // Run order fixes summation order, so the result is deterministic.
  struct Head {
    CoocEntry entry;
    std::size_t source;
  };
  auto later = [](const Head& a, const Head& b) {
    if (a.entry.i != b.entry.i) return a.entry.i > b.entry.i;
    if (a.entry.j != b.entry.j) return a.entry.j > b.entry.j;
    return a.source > b.source;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);

  std::vector<std::unique_ptr<std::ifstream>> streams;
  for (const auto& run : runs_) {
    streams.push_back(std::make_unique<std::ifstream>(run, std::ios::binary));
    if (!*streams.back()) throw DataError("cannot reopen spill file " + run.string());
  }
  std::size_t live_pos = 0;
  auto advance = [&](std::size_t source) {
    CoocEntry e;
    if (source < streams.size()) {
      if (detail::get_record(*streams[source], e)) heap.push({e, source});
    } else if (live_pos < live.size()) {
      heap.push({live[live_pos++], source});
    }
  };
  for (std::size_t s = 0; s <= streams.size(); ++s) advance(s);

  std::vector<CoocEntry> merged;
  while (!heap.empty()) {
    const Head top = heap.top();
    heap.pop();
    if (!merged.empty() && merged.back().i == top.entry.i && merged.back().j == top.entry.j) {
      merged.back().value += top.entry.value;
    } else {
      merged.push_back(top.entry);
    }
    advance(top.source);
  }

  streams.clear();
  std::error_code ec;
  for (const auto& run : runs_) std::filesystem::remove(run, ec);
  runs_.clear();
  return CoocMatrix::from_entries(vocab_size_, std::move(merged));
}

}  // namespace wove
