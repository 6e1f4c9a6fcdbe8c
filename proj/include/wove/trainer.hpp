#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wove/cooccur.hpp"
#include "wove/embedding.hpp"

namespace wove {

struct TrainConfig {
  std::size_t dim = 100;
  double x_max = 100.0;
  double alpha = 0.75;
  double eta = 0.05;
  int epochs = 15;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// AdaGrad denominator floor: step = eta * g / sqrt(G + kAdaGradEpsilon).
inline constexpr double kAdaGradEpsilon = 1e-8;

/// Parameters of the log-bilinear model: pivot vectors, context vectors,
/// their biases, and an AdaGrad accumulator for each.
class GloveModel {
 public:
  GloveModel() = default;
  GloveModel(std::size_t vocab_size, std::size_t dim);

  /// All vectors and biases uniform in [-0.5/dim, 0.5/dim]; accumulators 0.
  static GloveModel initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t dim() const { return dim_; }

  std::span<double> pivot(WordId i) { return {pivot_.data() + offset(i), dim_}; }
  std::span<const double> pivot(WordId i) const { return {pivot_.data() + offset(i), dim_}; }
  std::span<double> context(WordId j) { return {context_.data() + offset(j), dim_}; }
  std::span<const double> context(WordId j) const { return {context_.data() + offset(j), dim_}; }
  double& pivot_bias(WordId i) { return pivot_bias_[i]; }
  double pivot_bias(WordId i) const { return pivot_bias_[i]; }
  double& context_bias(WordId j) { return context_bias_[j]; }
  double context_bias(WordId j) const { return context_bias_[j]; }

  bool all_finite() const;

  friend bool operator==(const GloveModel&, const GloveModel&) = default;

 private:
  friend class GloveUpdater;

  std::size_t offset(WordId id) const { return std::size_t{id} * dim_; }

  std::size_t vocab_size_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> pivot_;
  std::vector<double> context_;
  std::vector<double> pivot_bias_;
  std::vector<double> context_bias_;
  std::vector<double> pivot_sq_;
  std::vector<double> context_sq_;
  std::vector<double> pivot_bias_sq_;
  std::vector<double> context_bias_sq_;
};

/// f(x) = (x / x_max)^alpha below x_max, 1 otherwise. Throws on x <= 0.
double weight_fn(double x, double x_max, double alpha);

struct RecordGradient {
  double loss = 0.0;
  std::vector<double> pivot;
  std::vector<double> context;
  double pivot_bias = 0.0;
  double context_bias = 0.0;
};

/// loss = f(X_ij) (w_i . c_j + b_i + c~_j - ln X_ij)^2 and its exact partial
/// derivatives. Throws std::domain_error on a non-finite intermediate.
RecordGradient loss_and_grad(const GloveModel& model, const CoocEntry& record,
                             double x_max, double alpha);

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<std::size_t> skipped_updates;
};

struct TrainResult {
  GloveModel model;
  TrainReport report;
};

/// Fits the model with AdaGrad over a per-epoch seeded shuffle of the
/// nonzero entries. Non-finite updates are skipped; more than 1% skipped in
/// an epoch aborts with std::runtime_error. workers > 1 runs lock-free
/// shared updates and is not reproducible.
TrainResult train(const CoocMatrix& matrix, const TrainConfig& config);

enum class ExportMode { sum, pivot_only };

/// Rows are w_i + c_i (sum) or w_i (pivot_only).
EmbeddingMatrix emit_vectors(const GloveModel& model, std::vector<std::string> words,
                             ExportMode mode = ExportMode::sum);

}  // namespace wove
