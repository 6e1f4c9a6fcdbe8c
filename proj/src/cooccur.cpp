#include "wove/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "shard_codec.hpp"
#include "wove/accumulator.hpp"
#include "wove/atomic_file.hpp"
#include "wove/errors.hpp"

namespace wove {

// CoocMatrix -----------------------------------------------------------------

namespace {

bool key_less(const CoocEntry& a, const CoocEntry& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

}  // namespace

CoocMatrix CoocMatrix::from_entries(std::size_t vocab_size, std::vector<CoocEntry> entries) {
  for (const auto& e : entries) {
    if (e.i >= vocab_size || e.j >= vocab_size) {
      throw DataError("co-occurrence id out of range (" + std::to_string(e.i) + ", " +
                      std::to_string(e.j) + ") for vocabulary size " + std::to_string(vocab_size));
    }
    if (!std::isfinite(e.value) || e.value < 0.0) {
      throw DataError("co-occurrence value must be finite and non-negative");
    }
  }
  if (!std::is_sorted(entries.begin(), entries.end(), key_less)) {
    std::stable_sort(entries.begin(), entries.end(), key_less);
  }
  CoocMatrix m(vocab_size);
  m.entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!m.entries_.empty() && m.entries_.back().i == e.i && m.entries_.back().j == e.j) {
      m.entries_.back().value += e.value;
    } else {
      m.entries_.push_back(e);
    }
  }
  std::erase_if(m.entries_, [](const CoocEntry& e) { return e.value == 0.0; });
  return m;
}

double CoocMatrix::at(WordId i, WordId j) const {
  const CoocEntry probe{i, j, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, key_less);
  if (it == entries_.end() || it->i != i || it->j != j) return 0.0;
  return it->value;
}

double CoocMatrix::total_mass() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value;
  return sum;
}

// PositionalCoocSet ----------------------------------------------------------

std::vector<int> signed_offsets(int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<int> out;
  out.reserve(2 * static_cast<std::size_t>(window));
  for (int p = -window; p <= window; ++p) {
    if (p != 0) out.push_back(p);
  }
  return out;
}

PositionalCoocSet::PositionalCoocSet(int window, std::map<int, CoocMatrix> matrices)
    : window_(window), matrices_(std::move(matrices)) {
  const auto expected = signed_offsets(window);
  if (matrices_.size() != expected.size()) {
    throw DataError("positional set needs exactly " + std::to_string(expected.size()) + " matrices");
  }
  for (int p : expected) {
    auto it = matrices_.find(p);
    if (it == matrices_.end()) throw DataError("positional set missing offset " + std::to_string(p));
    if (it->second.vocab_size() != matrices_.begin()->second.vocab_size()) {
      throw DataError("positional matrices disagree on vocabulary size");
    }
  }
}

std::size_t PositionalCoocSet::vocab_size() const {
  return matrices_.empty() ? 0 : matrices_.begin()->second.vocab_size();
}

std::vector<int> PositionalCoocSet::offsets() const {
  std::vector<int> out;
  for (const auto& [p, m] : matrices_) out.push_back(p);
  return out;
}

const CoocMatrix& PositionalCoocSet::at(int offset) const {
  auto it = matrices_.find(offset);
  if (it == matrices_.end()) throw std::out_of_range("no matrix for offset " + std::to_string(offset));
  return it->second;
}

// Counting -------------------------------------------------------------------

namespace {

/// Contiguous document ranges of roughly equal token mass.
std::vector<std::pair<std::size_t, std::size_t>> partition(const EncodedCorpus& corpus,
                                                           std::size_t parts) {
  parts = std::max<std::size_t>(parts, 1);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const std::uint64_t target = corpus.token_count / parts + 1;
  std::size_t begin = 0;
  std::uint64_t mass = 0;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    mass += corpus.documents[d].size();
    if (mass >= target && ranges.size() + 1 < parts) {
      ranges.emplace_back(begin, d + 1);
      begin = d + 1;
      mass = 0;
    }
  }
  ranges.emplace_back(begin, corpus.documents.size());
  return ranges;
}

template <typename Work>
void run_workers(std::size_t n, Work&& work) {
  if (n == 1) {
    work(0);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(n);
  for (std::size_t w = 0; w < n; ++w) {
    threads.emplace_back([&, w] {
      try {
        work(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_window(int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

}  // namespace

CoocMatrix count_baseline(const EncodedCorpus& corpus, std::size_t vocab_size, int window,
                          const CountOptions& options) {
  check_window(window);
  const auto ranges = partition(corpus, options.workers);
  std::vector<CoocMatrix> shards(ranges.size());
  const std::size_t budget = options.memory_bytes / ranges.size();

  run_workers(ranges.size(), [&](std::size_t w) {
    SpillingAccumulator acc(vocab_size, budget, options.spill_dir);
    for (std::size_t d = ranges[w].first; d < ranges[w].second; ++d) {
      const auto& doc = corpus.documents[d];
      for (std::size_t t = 0; t < doc.size(); ++t) {
        const std::size_t last = std::min(doc.size(), t + static_cast<std::size_t>(window) + 1);
        for (std::size_t u = t + 1; u < last; ++u) {
          const double inc = 1.0 / static_cast<double>(u - t);
          acc.add(doc[t], doc[u], inc);
          acc.add(doc[u], doc[t], inc);
        }
      }
    }
    shards[w] = acc.finish();
  });
  return shards.size() == 1 ? std::move(shards.front()) : merge(shards);
}

PositionalCoocSet count_positional(const EncodedCorpus& corpus, std::size_t vocab_size, int window,
                                   const CountOptions& options) {
  check_window(window);
  const auto ranges = partition(corpus, options.workers);
  const auto offsets = signed_offsets(window);
  const std::size_t budget = options.memory_bytes / (ranges.size() * offsets.size());
  std::vector<std::map<int, CoocMatrix>> shards(ranges.size());

  run_workers(ranges.size(), [&](std::size_t w) {
    // Slot layout: index window - d holds offset -d, window + d - 1 holds +d.
    std::vector<SpillingAccumulator> acc;
    acc.reserve(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      acc.emplace_back(vocab_size, budget, options.spill_dir);
    }
    const auto W = static_cast<std::size_t>(window);
    for (std::size_t d = ranges[w].first; d < ranges[w].second; ++d) {
      const auto& doc = corpus.documents[d];
      for (std::size_t t = 0; t < doc.size(); ++t) {
        const std::size_t last = std::min(doc.size(), t + W + 1);
        for (std::size_t u = t + 1; u < last; ++u) {
          const std::size_t dist = u - t;
          acc[W + dist - 1].add(doc[t], doc[u], 1.0);
          acc[W - dist].add(doc[u], doc[t], 1.0);
        }
      }
    }
    for (std::size_t k = 0; k < offsets.size(); ++k) shards[w].emplace(offsets[k], acc[k].finish());
  });

  if (shards.size() == 1) return PositionalCoocSet(window, std::move(shards.front()));
  std::vector<PositionalCoocSet> sets;
  for (auto& s : shards) sets.emplace_back(window, std::move(s));
  return merge(sets);
}

CoocMatrix merge(std::span<const CoocMatrix> shards) {
  if (shards.empty()) return CoocMatrix(0);
  const std::size_t V = shards.front().vocab_size();
  std::size_t total = 0;
  for (const auto& s : shards) {
    if (s.vocab_size() != V) {
      throw DataError("cannot merge shards with vocabulary sizes " + std::to_string(V) + " and " +
                      std::to_string(s.vocab_size()));
    }
    total += s.nnz();
  }
  std::vector<CoocEntry> all;
  all.reserve(total);
  for (const auto& s : shards) all.insert(all.end(), s.entries().begin(), s.entries().end());
  return CoocMatrix::from_entries(V, std::move(all));
}

PositionalCoocSet merge(std::span<const PositionalCoocSet> shards) {
  if (shards.empty()) throw std::invalid_argument("nothing to merge");
  const int window = shards.front().window();
  std::map<int, CoocMatrix> merged;
  for (int p : signed_offsets(window)) {
    std::vector<CoocMatrix> parts;
    for (const auto& s : shards) {
      if (s.window() != window) throw DataError("cannot merge positional sets with different windows");
      parts.push_back(s.at(p));
    }
    merged.emplace(p, merge(parts));
  }
  return PositionalCoocSet(window, std::move(merged));
}

double verify_decomposition(const CoocMatrix& baseline, const PositionalCoocSet& positional) {
  std::vector<CoocEntry> weighted;
  for (const auto& [p, m] : positional.matrices()) {
    const double scale = 1.0 / std::abs(p);
    for (auto e : m.entries()) {
      e.value *= scale;
      weighted.push_back(e);
    }
  }
  const auto combined = CoocMatrix::from_entries(
      std::max(baseline.vocab_size(), positional.vocab_size()), std::move(weighted));

  const auto a = baseline.entries();
  const auto b = combined.entries();
  double worst = 0.0;
  std::size_t x = 0;
  std::size_t y = 0;
  while (x < a.size() || y < b.size()) {
    if (y == b.size() || (x < a.size() && key_less(a[x], b[y]))) {
      worst = std::max(worst, std::abs(a[x++].value));
    } else if (x == a.size() || key_less(b[y], a[x])) {
      worst = std::max(worst, std::abs(b[y++].value));
    } else {
      worst = std::max(worst, std::abs(a[x++].value - b[y++].value));
    }
  }
  return worst;
}

// Shard files ----------------------------------------------------------------

bool detail::get_record(std::istream& in, CoocEntry& e) {
  std::array<char, kShardRecordBytes> buf{};
  in.read(buf.data(), buf.size());
  if (in.gcount() == 0) return false;
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw DataError("truncated co-occurrence record");
  }
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint64_t v = 0;
  std::memcpy(&i, buf.data(), 4);
  std::memcpy(&j, buf.data() + 4, 4);
  std::memcpy(&v, buf.data() + 8, 8);
  e.i = to_little(i);
  e.j = to_little(j);
  e.value = std::bit_cast<double>(to_little(v));
  return true;
}

void write_shard(const std::filesystem::path& path, const CoocMatrix& matrix) {
  AtomicFile file(path, /*binary=*/true);
  for (const auto& e : matrix.entries()) detail::put_record(file.stream(), e);
  file.commit();
}

CoocMatrix read_shard(const std::filesystem::path& path, std::size_t vocab_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open co-occurrence file " + path.string());
  std::vector<CoocEntry> entries;
  CoocEntry e;
  try {
    while (detail::get_record(in, e)) entries.push_back(e);
    return CoocMatrix::from_entries(vocab_size, std::move(entries));
  } catch (const DataError& err) {
    throw DataError(path.string() + ": " + err.what());
  }
}

std::filesystem::path baseline_shard_path(const std::string& prefix) { return prefix + ".bin"; }

std::filesystem::path positional_shard_path(const std::string& prefix, int offset) {
  return prefix + ".p" + (offset > 0 ? "+" : "-") + std::to_string(std::abs(offset)) + ".bin";
}

void write_positional(const std::string& prefix, const PositionalCoocSet& set) {
  for (const auto& [p, m] : set.matrices()) write_shard(positional_shard_path(prefix, p), m);
}

PositionalCoocSet read_positional(const std::string& prefix, int window, std::size_t vocab_size) {
  std::map<int, CoocMatrix> matrices;
  for (int p : signed_offsets(window)) {
    matrices.emplace(p, read_shard(positional_shard_path(prefix, p), vocab_size));
  }
  return PositionalCoocSet(window, std::move(matrices));
}

}  // namespace wove
