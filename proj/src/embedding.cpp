#include "dis2vec/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace dis2vec {

NoiseKind parse_noise_kind(const std::string& tag) {
  if (tag == "uniform") return NoiseKind::kUniform;
  if (tag == "unigram") return NoiseKind::kUnigram;
  if (tag == "unigram^0.75" || tag == "unigram075") return NoiseKind::kUnigramPow075;
  throw ArgumentError("unknown noise distribution '" + tag + "'");
}

NoiseModel::NoiseModel(std::span<const std::size_t> counts, NoiseKind kind) : kind_(kind) {
  if (counts.empty()) throw ArgumentError("noise model over an empty id space");
  probs_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double c = static_cast<double>(counts[i]);
    switch (kind) {
      case NoiseKind::kUniform: probs_[i] = 1.0; break;
      case NoiseKind::kUnigram: probs_[i] = c; break;
      case NoiseKind::kUnigramPow075: probs_[i] = std::pow(c, 0.75); break;
    }
    total += probs_[i];
  }
  if (!(total > 0.0)) throw ArgumentError("noise model needs a positive count");
  for (double& p : probs_) p /= total;
  alias_ = AliasTable(probs_);
}

NoiseModel NoiseModel::uniform(std::size_t size) {
  std::vector<std::size_t> ones(size, 1);
  return NoiseModel(ones, NoiseKind::kUniform);
}

void draw_negatives(const NoiseModel& model, std::size_t target, Rng& rng,
                    std::span<std::size_t> out) {
  constexpr int kRedraws = 10;
  for (auto& id : out) {
    id = model.sample(rng);
    for (int t = 0; t < kRedraws && id == target && model.size() > 1; ++t) id = model.sample(rng);
  }
}

double nce_logit_offset(const NoiseModel& model, std::size_t id, std::size_t num_noise) {
  if (id >= model.size()) throw ArgumentError("noise id out of range");
  double p = model.probability(id);
  if (!(p > 0.0)) throw ArgumentError("NCE needs a positive noise probability for id " + std::to_string(id));
  return -std::log(static_cast<double>(num_noise) * p);
}

std::span<const double> logit_offsets(const OutputObjective& obj, std::size_t target,
                                      std::span<const std::size_t> noise,
                                      std::vector<double>& buffer) {
  if (obj.kind == LossKind::kNegativeSampling) return {};
  if (obj.noise == nullptr) throw ArgumentError("NCE needs a noise model");
  buffer.resize(noise.size() + 1);
  buffer[0] = nce_logit_offset(*obj.noise, target, noise.size());
  for (std::size_t m = 0; m < noise.size(); ++m)
    buffer[m + 1] = nce_logit_offset(*obj.noise, noise[m], noise.size());
  return buffer;
}

namespace {

// Output adapter over explicit vectors: position 0 is the target, 1.. noise.
struct DenseOutput {
  std::vector<std::span<const double>> vectors;
  std::vector<std::vector<double>>* grads;

  std::span<const double> vector(std::size_t id) const { return vectors[id]; }
  std::span<double> gradient(std::size_t id) const { return (*grads)[id]; }
};

LossGradient dense_loss(std::span<const double> input, std::span<const double> target,
                        const std::vector<std::vector<double>>& noise,
                        std::span<const double> offsets) {
  const std::size_t dim = input.size();
  if (target.size() != dim) throw ArgumentError("target dimension mismatch");
  for (const auto& n : noise) {
    if (n.size() != dim) throw ArgumentError("noise vector dimension mismatch");
  }
  std::vector<std::vector<double>> grads(noise.size() + 1, std::vector<double>(dim, 0.0));
  DenseOutput o{{target}, &grads};
  std::vector<std::size_t> positions(noise.size());
  for (std::size_t m = 0; m < noise.size(); ++m) {
    o.vectors.push_back(noise[m]);
    positions[m] = m + 1;
  }
  LossGradient out;
  out.d_input.assign(dim, 0.0);
  out.loss = output_layer_loss(input, o, 0, positions, offsets, out.d_input);
  out.d_target = std::move(grads[0]);
  out.d_noise.assign(std::make_move_iterator(grads.begin() + 1),
                     std::make_move_iterator(grads.end()));
  return out;
}

}  // namespace

LossGradient neg_sampling_loss(std::span<const double> input, std::span<const double> target,
                               const std::vector<std::vector<double>>& noise) {
  return dense_loss(input, target, noise, {});
}

LossGradient nce_loss(std::span<const double> input, std::span<const double> target,
                      std::size_t target_id, const std::vector<std::vector<double>>& noise,
                      std::span<const std::size_t> noise_ids, const NoiseModel& model) {
  if (noise_ids.size() != noise.size()) throw ArgumentError("one noise id per noise vector");
  OutputObjective obj{LossKind::kNce, &model};
  std::vector<double> buffer;
  auto offsets = logit_offsets(obj, target_id, noise_ids, buffer);
  return dense_loss(input, target, noise, offsets);
}

void init_input_vectors(VectorTable& table, Rng& rng) {
  const double half = 0.5 / static_cast<double>(table.dim());
  for (double& v : table.values()) v = (uniform01(rng) * 2.0 - 1.0) * half;
}

EmbeddingTable init_embedding(std::size_t rows, std::size_t dim, Rng& rng) {
  EmbeddingTable t{VectorTable(rows, dim), VectorTable(rows, dim)};
  init_input_vectors(t.input, rng);
  return t;
}

void validate(const TrainConfig& cfg) {
  if (cfg.dim < 1) throw ArgumentError("dim must be at least 1");
  if (cfg.epochs < 0) throw ArgumentError("epochs must be non-negative");
  if (!(cfg.learning_rate >= 0.0)) throw ArgumentError("learning rate must be non-negative");
  if (cfg.negative < 1) throw ArgumentError("at least one negative sample is required");
  if (cfg.workers < 1) throw ArgumentError("workers must be at least 1");
  if (cfg.subsample < 0.0) throw ArgumentError("subsampling threshold must be non-negative");
}

std::span<double> SparseGradient::add(VectorTable& table, std::size_t row) {
  if (used_ == slots_.size()) slots_.emplace_back();
  Slot& s = slots_[used_++];
  s.table = &table;
  s.row = row;
  s.grad.assign(table.dim(), 0.0);
  return s.grad;
}

void SparseGradient::apply(double lr, bool relaxed_atomic) const {
  for (std::size_t k = 0; k < used_; ++k) {
    const Slot& s = slots_[k];
    auto row = s.table->row(s.row);
    if (relaxed_atomic) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        std::atomic_ref<double> cell(row[j]);
        cell.store(cell.load(std::memory_order_relaxed) - lr * s.grad[j],
                   std::memory_order_relaxed);
      }
    } else {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= lr * s.grad[j];
    }
  }
}

double decayed_learning_rate(const TrainConfig& cfg, double progress) {
  double floor = std::min(cfg.min_learning_rate, cfg.learning_rate);
  progress = std::clamp(progress, 0.0, 1.0);
  return cfg.learning_rate - (cfg.learning_rate - floor) * progress;
}

SgdReport sgd_run(TrainingStream& stream, const TrainConfig& cfg) {
  validate(cfg);
  SgdReport report;
  Rng master(cfg.seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    stream.begin_epoch(epoch, master);
    const std::size_t n = stream.epoch_size();
    auto lr_at = [&](std::size_t i) {
      double progress = (static_cast<double>(epoch) +
                         (n ? static_cast<double>(i) / static_cast<double>(n) : 0.0)) /
                        static_cast<double>(cfg.epochs);
      return decayed_learning_rate(cfg, progress);
    };
    auto fail = [&](std::size_t i) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", instance " +
                          std::to_string(i));
    };
    double total = 0.0;
    if (cfg.workers == 1) {
      SparseGradient grad;
      for (std::size_t i = 0; i < n; ++i) {
        grad.clear();
        double lr = lr_at(i);
        double loss = stream.gradient(i, lr, master, grad);
        if (!std::isfinite(loss)) fail(i);
        grad.apply(lr);
        total += loss;
      }
    } else {
      const std::size_t workers = cfg.workers;
      std::vector<double> partial(workers, 0.0);
      std::vector<std::size_t> bad(workers, static_cast<std::size_t>(-1));
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch), w));
          SparseGradient grad;
          for (std::size_t i = w; i < n; i += workers) {
            grad.clear();
            double lr = lr_at(i);
            double loss = stream.gradient(i, lr, rng, grad);
            if (!std::isfinite(loss)) {
              bad[w] = i;
              return;
            }
            grad.apply(lr, true);
            partial[w] += loss;
          }
        });
      }
      for (auto& t : pool) t.join();
      for (std::size_t w = 0; w < workers; ++w) {
        if (bad[w] != static_cast<std::size_t>(-1)) fail(bad[w]);
        total += partial[w];
      }
    }
    report.instances += n;
    report.epoch_mean_loss.push_back(n ? total / static_cast<double>(n) : 0.0);
  }
  return report;
}

}  // namespace dis2vec
