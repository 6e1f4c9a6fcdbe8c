#include "wove/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wove/rng.hpp"

namespace wove {

void TrainConfig::validate() const {
  if (dim == 0) throw std::invalid_argument("dim must be >= 1");
  if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
}

GloveModel::GloveModel(std::size_t vocab_size, std::size_t dim)
    : vocab_size_(vocab_size),
      dim_(dim),
      pivot_(vocab_size * dim, 0.0),
      context_(vocab_size * dim, 0.0),
      pivot_bias_(vocab_size, 0.0),
      context_bias_(vocab_size, 0.0),
      pivot_sq_(vocab_size * dim, 0.0),
      context_sq_(vocab_size * dim, 0.0),
      pivot_bias_sq_(vocab_size, 0.0),
      context_bias_sq_(vocab_size, 0.0) {}

GloveModel GloveModel::initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  GloveModel m(vocab_size, dim);
  SplitMix64 rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto* params : {&m.pivot_, &m.context_, &m.pivot_bias_, &m.context_bias_}) {
    for (double& v : *params) v = rng.uniform(-half, half);
  }
  return m;
}

bool GloveModel::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(pivot_) && finite(context_) && finite(pivot_bias_) && finite(context_bias_) &&
         finite(pivot_sq_) && finite(context_sq_) && finite(pivot_bias_sq_) &&
         finite(context_bias_sq_);
}

double weight_fn(double x, double x_max, double alpha) {
  if (!(x > 0.0)) throw std::domain_error("co-occurrence value must be > 0");
  return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

RecordGradient loss_and_grad(const GloveModel& model, const CoocEntry& record,
                             double x_max, double alpha) {
  const double f = weight_fn(record.value, x_max, alpha);
  const auto w = model.pivot(record.i);
  const auto c = model.context(record.j);
  const double residual = std::inner_product(w.begin(), w.end(), c.begin(), 0.0) +
                          model.pivot_bias(record.i) + model.context_bias(record.j) -
                          std::log(record.value);
  const double g = 2.0 * f * residual;

  RecordGradient out;
  out.loss = f * residual * residual;
  out.pivot.resize(w.size());
  out.context.resize(c.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.pivot[k] = g * c[k];
    out.context[k] = g * w[k];
  }
  out.pivot_bias = g;
  out.context_bias = g;
  if (!std::isfinite(out.loss) || !std::isfinite(g)) {
    throw std::domain_error("non-finite loss for record (" + std::to_string(record.i) + ", " +
                            std::to_string(record.j) + ")");
  }
  return out;
}

// Per-record AdaGrad step. With Shared, parameter reads and writes go through
// relaxed atomic_ref so concurrent workers race benignly (last write wins).
class GloveUpdater {
 public:
  GloveUpdater(GloveModel& model, const TrainConfig& config)
      : m_(model), cfg_(config), next_w_(model.dim_), next_wsq_(model.dim_),
        next_c_(model.dim_), next_csq_(model.dim_) {}

  /// Returns false if the update was non-finite and skipped.
  template <bool Shared>
  bool apply(const CoocEntry& rec, double& loss) {
    const std::size_t k = m_.dim_;
    double* w = m_.pivot_.data() + m_.offset(rec.i);
    double* c = m_.context_.data() + m_.offset(rec.j);
    double* wsq = m_.pivot_sq_.data() + m_.offset(rec.i);
    double* csq = m_.context_sq_.data() + m_.offset(rec.j);
    double& bw = m_.pivot_bias_[rec.i];
    double& bc = m_.context_bias_[rec.j];
    double& bwsq = m_.pivot_bias_sq_[rec.i];
    double& bcsq = m_.context_bias_sq_[rec.j];

    const double f = rec.value < cfg_.x_max ? std::pow(rec.value / cfg_.x_max, cfg_.alpha) : 1.0;
    double dot = 0.0;
    for (std::size_t d = 0; d < k; ++d) dot += load<Shared>(w[d]) * load<Shared>(c[d]);
    const double residual = dot + load<Shared>(bw) + load<Shared>(bc) - std::log(rec.value);
    const double g = 2.0 * f * residual;
    if (!std::isfinite(g)) return false;

    bool finite = true;
    for (std::size_t d = 0; d < k; ++d) {
      const double wd = load<Shared>(w[d]);
      const double cd = load<Shared>(c[d]);
      const double gw = g * cd;
      const double gc = g * wd;
      next_wsq_[d] = load<Shared>(wsq[d]) + gw * gw;
      next_csq_[d] = load<Shared>(csq[d]) + gc * gc;
      next_w_[d] = wd - cfg_.eta * gw / std::sqrt(next_wsq_[d] + kAdaGradEpsilon);
      next_c_[d] = cd - cfg_.eta * gc / std::sqrt(next_csq_[d] + kAdaGradEpsilon);
      finite = finite && std::isfinite(next_w_[d]) && std::isfinite(next_c_[d]) &&
               std::isfinite(next_wsq_[d]) && std::isfinite(next_csq_[d]);
    }
    const double next_bwsq = load<Shared>(bwsq) + g * g;
    const double next_bcsq = load<Shared>(bcsq) + g * g;
    const double next_bw = load<Shared>(bw) - cfg_.eta * g / std::sqrt(next_bwsq + kAdaGradEpsilon);
    const double next_bc = load<Shared>(bc) - cfg_.eta * g / std::sqrt(next_bcsq + kAdaGradEpsilon);
    finite = finite && std::isfinite(next_bw) && std::isfinite(next_bc) &&
             std::isfinite(next_bwsq) && std::isfinite(next_bcsq);
    const double term = f * residual * residual;
    if (!finite || !std::isfinite(term)) return false;

    for (std::size_t d = 0; d < k; ++d) {
      store<Shared>(w[d], next_w_[d]);
      store<Shared>(c[d], next_c_[d]);
      store<Shared>(wsq[d], next_wsq_[d]);
      store<Shared>(csq[d], next_csq_[d]);
    }
    store<Shared>(bw, next_bw);
    store<Shared>(bc, next_bc);
    store<Shared>(bwsq, next_bwsq);
    store<Shared>(bcsq, next_bcsq);
    loss = term;
    return true;
  }

 private:
  template <bool Shared>
  static double load(double& x) {
    if constexpr (Shared) {
      return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }

  template <bool Shared>
  static void store(double& x, double v) {
    if constexpr (Shared) {
      std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }

  GloveModel& m_;
  const TrainConfig& cfg_;
  std::vector<double> next_w_;
  std::vector<double> next_wsq_;
  std::vector<double> next_c_;
  std::vector<double> next_csq_;
};

namespace {

struct SliceTotals {
  double loss = 0.0;
  std::size_t applied = 0;
  std::size_t skipped = 0;
};

template <bool Shared>
SliceTotals run_slice(GloveModel& model, const TrainConfig& config,
                      std::span<const CoocEntry> records) {
  GloveUpdater updater(model, config);
  SliceTotals totals;
  for (const auto& rec : records) {
    double loss = 0.0;
    if (updater.apply<Shared>(rec, loss)) {
      totals.loss += loss;
      ++totals.applied;
    } else {
      ++totals.skipped;
    }
  }
  return totals;
}

}  // namespace

TrainResult train(const CoocMatrix& matrix, const TrainConfig& config) {
  config.validate();
  if (matrix.empty()) throw std::invalid_argument("cannot train on an empty co-occurrence matrix");

  TrainResult result{GloveModel::initialize(matrix.vocab_size(), config.dim, config.seed), {}};
  std::vector<CoocEntry> records(matrix.entries().begin(), matrix.entries().end());
  const std::size_t workers = std::min(config.workers, records.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t k = records.size() - 1; k > 0; --k) {
      std::swap(records[k], records[rng.below(k + 1)]);
    }

    SliceTotals epoch_totals;
    if (workers == 1) {
      epoch_totals = run_slice<false>(result.model, config, records);
    } else {
      std::vector<SliceTotals> totals(workers);
      std::vector<std::thread> threads;
      const std::size_t chunk = (records.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(records.size(), w * chunk);
        const std::size_t end = std::min(records.size(), begin + chunk);
        threads.emplace_back([&, w, begin, end] {
          totals[w] = run_slice<true>(result.model, config,
                                      std::span<const CoocEntry>(records).subspan(begin, end - begin));
        });
      }
      for (auto& t : threads) t.join();
      for (const auto& t : totals) {
        epoch_totals.loss += t.loss;
        epoch_totals.applied += t.applied;
        epoch_totals.skipped += t.skipped;
      }
    }

    result.report.epoch_loss.push_back(
        epoch_totals.applied ? epoch_totals.loss / static_cast<double>(epoch_totals.applied) : 0.0);
    result.report.skipped_updates.push_back(epoch_totals.skipped);
    if (epoch_totals.skipped * 100 > records.size()) {
      throw std::runtime_error("training diverged: " + std::to_string(epoch_totals.skipped) +
                               " of " + std::to_string(records.size()) +
                               " updates were non-finite in epoch " + std::to_string(epoch + 1));
    }
  }
  return result;
}

EmbeddingMatrix emit_vectors(const GloveModel& model, std::vector<std::string> words,
                             ExportMode mode) {
  if (words.size() != model.vocab_size()) {
    throw std::invalid_argument("word list size " + std::to_string(words.size()) +
                                " does not match model vocabulary " +
                                std::to_string(model.vocab_size()));
  }
  EmbeddingMatrix out(std::move(words), model.dim());
  for (WordId id = 0; id < out.size(); ++id) {
    auto row = out.row(id);
    const auto w = model.pivot(id);
    const auto c = model.context(id);
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] = mode == ExportMode::sum ? w[d] + c[d] : w[d];
    }
  }
  return out;
}

}  // namespace wove
