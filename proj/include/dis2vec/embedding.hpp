#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dis2vec/error.hpp"
#include "dis2vec/random.hpp"
#include "dis2vec/vector_table.hpp"

namespace dis2vec {

constexpr double kSigmoidClamp = 1e-7;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log of a probability clamped to [1e-7, 1 - 1e-7].
inline double clamped_log(double p) {
  if (p < kSigmoidClamp) p = kSigmoidClamp;
  if (p > 1.0 - kSigmoidClamp) p = 1.0 - kSigmoidClamp;
  return std::log(p);
}

enum class NoiseKind { kUniform, kUnigram, kUnigramPow075 };

NoiseKind parse_noise_kind(const std::string& tag);

// Noise distribution psi over an id space with an alias sampler.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(std::span<const std::size_t> counts, NoiseKind kind);
  static NoiseModel uniform(std::size_t size);

  NoiseKind kind() const { return kind_; }
  std::size_t size() const { return probs_.size(); }
  double probability(std::size_t id) const { return probs_[id]; }
  const std::vector<double>& probabilities() const { return probs_; }

  std::size_t sample(Rng& rng) const { return alias_.sample(rng); }

 private:
  NoiseKind kind_ = NoiseKind::kUniform;
  std::vector<double> probs_;
  AliasTable alias_;
};

inline std::size_t sample_noise(const NoiseModel& model, Rng& rng) {
  return model.sample(rng);
}

// Fills `out` with noise ids, redrawing (a bounded number of times) any draw
// equal to `target`.
void draw_negatives(const NoiseModel& model, std::size_t target, Rng& rng,
                    std::span<std::size_t> out);

enum class LossKind { kNegativeSampling, kNce };

// Additive logit correction -log(M * psi(id)) used by NCE with Z fixed to 1.
// Throws ArgumentError when psi(id) is zero.
double nce_logit_offset(const NoiseModel& model, std::size_t id, std::size_t num_noise);

// How the output layer scores one (input, target, noise...) instance.
struct OutputObjective {
  LossKind kind = LossKind::kNegativeSampling;
  const NoiseModel* noise = nullptr;  // required for NCE
};

// Logit offsets for one instance: empty for negative sampling, otherwise
// nce_logit_offset of the target followed by each noise id.
std::span<const double> logit_offsets(const OutputObjective& obj, std::size_t target,
                                      std::span<const std::size_t> noise,
                                      std::vector<double>& buffer);

// Negative-sampling / NCE kernel shared by every trainable model.
//
// `Output` provides `std::span<const double> vector(std::size_t id)` and
// `std::span<double> gradient(std::size_t id)`; each call of `vector` is one
// output-layer access. The loss
//   -log s(x_t) - sum_m log s(-x_m),  x = omega(id).phi + offset
// is returned and its gradient is added to `input_grad` and to the output
// gradients. `offsets` is empty (all zero) or holds one value per score,
// target first.
template <class Output>
double output_layer_loss(std::span<const double> input, Output& out, std::size_t target,
                         std::span<const std::size_t> noise, std::span<const double> offsets,
                         std::span<double> input_grad) {
  const std::size_t dim = input.size();
  double loss = 0.0;
  auto visit = [&](std::size_t id, bool positive, std::size_t slot) {
    std::span<const double> w = out.vector(id);
    if (w.size() != dim) throw ArgumentError("output vector dimension mismatch");
    double x = dot(input, w);
    if (!offsets.empty()) x += offsets[slot];
    // d(loss)/dx is s(x) - 1 for the target and s(x) for noise.
    double g;
    if (positive) {
      loss -= clamped_log(sigmoid(x));
      g = sigmoid(x) - 1.0;
    } else {
      loss -= clamped_log(sigmoid(-x));
      g = sigmoid(x);
    }
    std::span<double> gw = out.gradient(id);
    for (std::size_t k = 0; k < dim; ++k) {
      input_grad[k] += g * w[k];
      gw[k] += g * input[k];
    }
  };
  visit(target, true, 0);
  for (std::size_t m = 0; m < noise.size(); ++m) visit(noise[m], false, m + 1);
  return loss;
}

// Closed-form loss and gradients for explicit vectors; used by tests and the
// Python bindings. Minimization convention.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> d_input;
  std::vector<double> d_target;
  std::vector<std::vector<double>> d_noise;
};

LossGradient neg_sampling_loss(std::span<const double> input, std::span<const double> target,
                               const std::vector<std::vector<double>>& noise);

LossGradient nce_loss(std::span<const double> input, std::span<const double> target,
                      std::size_t target_id, const std::vector<std::vector<double>>& noise,
                      std::span<const std::size_t> noise_ids, const NoiseModel& model);

// Paired input (phi) and output (omega) tables over one id space.
struct EmbeddingTable {
  VectorTable input;
  VectorTable output;

  std::size_t dim() const { return input.dim(); }
};

// phi uniform in [-0.5/d, 0.5/d], omega all zero.
EmbeddingTable init_embedding(std::size_t rows, std::size_t dim, Rng& rng);
void init_input_vectors(VectorTable& table, Rng& rng);

struct TrainConfig {
  std::size_t dim = 100;
  int epochs = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::size_t negative = 5;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  NoiseKind noise = NoiseKind::kUnigramPow075;
  LossKind loss = LossKind::kNegativeSampling;
  double subsample = 1e-5;  // 0 disables subsampling
};

void validate(const TrainConfig& cfg);

// Per-instance sparse gradient: one dense slot per touched (table, row).
// Slot spans stay valid until clear().
class SparseGradient {
 public:
  std::span<double> add(VectorTable& table, std::size_t row);
  void clear() { used_ = 0; }
  std::size_t size() const { return used_; }

  VectorTable& table(std::size_t slot) const { return *slots_[slot].table; }
  std::size_t row(std::size_t slot) const { return slots_[slot].row; }
  std::span<const double> values(std::size_t slot) const { return slots_[slot].grad; }
  std::span<double> values(std::size_t slot) { return slots_[slot].grad; }

  // p -= lr * g for every slot. `relaxed_atomic` switches to relaxed atomic
  // element access for the lock-free multi-worker mode.
  void apply(double lr, bool relaxed_atomic = false) const;

 private:
  struct Slot {
    VectorTable* table = nullptr;
    std::size_t row = 0;
    std::vector<double> grad;
  };
  std::vector<Slot> slots_;
  std::size_t used_ = 0;
};

// Output adapter over a table that records gradients in a SparseGradient.
struct TableOutput {
  VectorTable& table;
  SparseGradient& grad;

  std::span<const double> vector(std::size_t id) const { return table.row(id); }
  std::span<double> gradient(std::size_t id) const { return grad.add(table, id); }
};

// A model as seen by the optimizer: a sequence of instances per epoch, each
// producing a loss and a sparse gradient. `gradient` must only read shared
// state, so that workers can call it concurrently.
class TrainingStream {
 public:
  virtual ~TrainingStream() = default;

  // Called once per epoch before any instance, single-threaded.
  virtual void begin_epoch(int epoch, Rng& rng) = 0;
  virtual std::size_t epoch_size() const = 0;
  // `lr` is the step size sgd_run will apply to the returned gradient.
  virtual double gradient(std::size_t instance, double lr, Rng& rng,
                          SparseGradient& grad) const = 0;
};

struct SgdReport {
  std::vector<double> epoch_mean_loss;
  std::size_t instances = 0;
};

// Linear decay from learning_rate to min(min_learning_rate, learning_rate)
// over the run; `progress` in [0, 1].
double decayed_learning_rate(const TrainConfig& cfg, double progress);

// Runs cfg.epochs passes. With one worker the run is bit-deterministic for a
// fixed seed. With several, instances are strided across threads and applied
// without locks. Throws TrainingError on a non-finite loss.
SgdReport sgd_run(TrainingStream& stream, const TrainConfig& cfg);

}  // namespace dis2vec
