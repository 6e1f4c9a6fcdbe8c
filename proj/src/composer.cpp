#include "wove/composer.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "wove/errors.hpp"
#include "wove/rng.hpp"

namespace wove {

PositionalEmbeddings::PositionalEmbeddings(int window, std::map<int, EmbeddingMatrix> per_offset)
    : window_(window), per_offset_(std::move(per_offset)) {
  const auto expected = signed_offsets(window);
  if (per_offset_.size() != expected.size()) {
    throw std::invalid_argument("positional embeddings need exactly " +
                                std::to_string(expected.size()) + " offsets");
  }
  const auto& first = per_offset_.begin()->second;
  for (int p : expected) {
    auto it = per_offset_.find(p);
    if (it == per_offset_.end()) throw std::invalid_argument("missing offset " + std::to_string(p));
    if (it->second.dim() != first.dim() || it->second.words() != first.words()) {
      throw std::invalid_argument("offset " + std::to_string(p) +
                                  " disagrees on vocabulary or dimension");
    }
  }
}

std::string to_string(CompositionMethod method) {
  switch (method) {
    case CompositionMethod::direct: return "direct";
    case CompositionMethod::reduced: return "reduced";
    case CompositionMethod::weighted: return "weighted";
  }
  return "unknown";
}

CompositionMethod parse_method(std::string_view name) {
  if (name == "direct") return CompositionMethod::direct;
  if (name == "reduced") return CompositionMethod::reduced;
  if (name == "weighted") return CompositionMethod::weighted;
  throw std::invalid_argument("unknown composition method '" + std::string(name) + "'");
}

std::span<const double> ComposedEmbeddings::block(WordId id, int offset) const {
  for (std::size_t slot = 0; slot < layout.size(); ++slot) {
    if (layout[slot] == offset) return vectors.row(id).subspan(slot * block_dim, block_dim);
  }
  throw std::out_of_range("offset " + std::to_string(offset) + " not in layout");
}

std::vector<double> ComposedEmbeddings::positional_vector(WordId id, int offset) const {
  const auto b = block(id, offset);
  std::vector<double> out(b.begin(), b.end());
  if (method == CompositionMethod::weighted) {
    for (double& v : out) v *= std::abs(offset);
  }
  return out;
}

std::uint64_t offset_seed(std::uint64_t seed, int offset) {
  return derive_seed(seed, 0x9000'0000ULL + static_cast<std::uint64_t>(static_cast<std::int64_t>(offset)));
}

PositionalEmbeddings train_positional(const PositionalCoocSet& matrices, const TrainConfig& config,
                                      std::size_t per_position_dim,
                                      const std::vector<std::string>& words, ExportMode mode) {
  if (per_position_dim == 0) throw std::invalid_argument("per-position dimension must be >= 1");
  config.validate();
  const auto offsets = matrices.offsets();
  for (int p : offsets) {
    if (matrices.at(p).empty()) {
      throw DataError("co-occurrence matrix for offset " + std::to_string(p) + " is empty");
    }
  }

  std::vector<EmbeddingMatrix> trained(offsets.size());
  std::vector<std::exception_ptr> errors(offsets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < offsets.size(); k = next++) {
      try {
        TrainConfig run = config;
        run.dim = per_position_dim;
        run.workers = 1;
        run.seed = offset_seed(config.seed, offsets[k]);
        trained[k] = emit_vectors(train(matrices.at(offsets[k]), run).model, words, mode);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(config.workers, offsets.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::map<int, EmbeddingMatrix> per_offset;
  for (std::size_t k = 0; k < offsets.size(); ++k) per_offset.emplace(offsets[k], std::move(trained[k]));
  return PositionalEmbeddings(matrices.window(), std::move(per_offset));
}

namespace {

ComposedEmbeddings concatenate(const PositionalEmbeddings& pe, CompositionMethod method,
                               std::size_t base_dim, bool weighted) {
  ComposedEmbeddings out;
  out.method = method;
  out.window = pe.window();
  out.base_dim = base_dim;
  out.block_dim = pe.dim();
  out.layout = signed_offsets(pe.window());
  out.vectors = EmbeddingMatrix(pe.words(), out.layout.size() * out.block_dim);
  for (std::size_t slot = 0; slot < out.layout.size(); ++slot) {
    const int p = out.layout[slot];
    const double scale = weighted ? 1.0 / std::abs(p) : 1.0;
    const auto& source = pe.at(p);
    for (WordId id = 0; id < source.size(); ++id) {
      const auto from = source.row(id);
      auto to = out.vectors.row(id).subspan(slot * out.block_dim, out.block_dim);
      for (std::size_t d = 0; d < from.size(); ++d) to[d] = weighted ? from[d] * scale : from[d];
    }
  }
  return out;
}

}  // namespace

ComposedEmbeddings direct_concat(const PositionalEmbeddings& pe) {
  return concatenate(pe, CompositionMethod::direct, pe.dim(), false);
}

ComposedEmbeddings weighted_concat(const PositionalEmbeddings& pe) {
  return concatenate(pe, CompositionMethod::weighted, pe.dim(), true);
}

std::size_t reduced_block_dim(std::size_t dim, int window) {
  const std::size_t positions = 2 * static_cast<std::size_t>(window);
  if (window < 1 || positions > dim) {
    throw std::invalid_argument("reduced concatenation needs 2W <= k (W=" + std::to_string(window) +
                                ", k=" + std::to_string(dim) + ")");
  }
  return dim / positions;
}

ComposedEmbeddings reduced_concat(const PositionalCoocSet& matrices, const TrainConfig& config,
                                  const std::vector<std::string>& words, ExportMode mode) {
  const std::size_t block = reduced_block_dim(config.dim, matrices.window());
  const auto pe = train_positional(matrices, config, block, words, mode);
  return concatenate(pe, CompositionMethod::reduced, config.dim, false);
}

void write_metadata(std::ostream& out, const ComposedEmbeddings& composed) {
  out << "method=" << to_string(composed.method) << '\n'
      << "window=" << composed.window << '\n'
      << "dim=" << composed.base_dim << '\n'
      << "block_dim=" << composed.block_dim << '\n'
      << "total_dim=" << composed.total_dim() << '\n'
      << "block_order=";
  for (std::size_t k = 0; k < composed.layout.size(); ++k) {
    out << (k ? "," : "") << (composed.layout[k] > 0 ? "+" : "") << composed.layout[k];
  }
  out << '\n';
}

}  // namespace wove
