#pragma once

#include <cstddef>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/graph.hpp"
#include "dis2vec/sen2vec.hpp"

namespace dis2vec {

struct RegConfig {
  double beta = 1.0;
  double word_beta = 1.0;
  bool weighted = true;
  ContentVariant base = ContentVariant::kDbow;
};

// sum_{u,v} W_uv |phi(u) - phi(v)|^2 over undirected edges counted once;
// W = 1 when unweighted.
double graph_quadratic(const VectorTable& vectors, const WeightedGraph& graph, bool weighted);

// dbow_corpus_loss(model) + beta * graph_quadratic(sentence vectors).
double reg_objective(const Sen2VecModel& model, const Corpus& corpus,
                     const WeightedGraph& graph, const RegConfig& cfg);

// Gradient of reg_objective with respect to the sentence vectors.
VectorTable reg_objective_gradient(const Sen2VecModel& model, const Corpus& corpus,
                                   const WeightedGraph& graph, const RegConfig& cfg);

struct WeightedVector {
  std::vector<double> vector;
  double weight;
};

struct RegInstanceGradient {
  double loss = 0.0;
  std::vector<double> d_input;
  std::vector<double> d_target;
  std::vector<std::vector<double>> d_noise;
};

// One content instance of sentence v with its share of the graph term:
//   NS(phi(v); target, noise) + (beta / n_v) sum_u W_uv |phi(v) - phi(u)|^2
// Neighbor vectors are treated as constants.
RegInstanceGradient reg_instance(std::span<const double> input,
                                 std::span<const double> target,
                                 const std::vector<std::vector<double>>& noise,
                                 const std::vector<WeightedVector>& neighbors, double beta,
                                 std::size_t instances);

// Share of the lexicon term charged to one instance targeting word w:
//   (word_beta / n_w) sum_{w'} |omega(w) - omega(w')|^2. Returns the loss and
// writes the gradient with respect to omega(w).
double lexicon_instance(std::span<const double> word, const std::vector<std::vector<double>>& neighbors,
                        double word_beta, std::size_t instances, std::span<double> d_word);

// DBOW with the discourse-graph smoothing term (and, with a lexicon, the
// word-level smoothing term on output word vectors) applied per content
// instance and scaled by 1 / (instances of that sentence or word per epoch).
class RegularizedStream : public DbowStream {
 public:
  RegularizedStream(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                    Sen2VecModel& model, const WeightedGraph& graph, const RegConfig& reg,
                    const WeightedGraph* lexicon);

  void begin_epoch(int epoch, Rng& rng) override;
  double gradient(std::size_t instance, double lr, Rng& rng,
                  SparseGradient& grad) const override;

 private:
  const WeightedGraph& graph_;
  const RegConfig& reg_;
  const WeightedGraph* lexicon_;
  std::vector<std::size_t> word_targets_;  // instances per epoch targeting each word
};

Sen2VecModel train_regularized(const Corpus& corpus, const Vocab& vocab,
                               const WeightedGraph& graph, const RegConfig& reg,
                               const TrainConfig& cfg, SgdReport* report = nullptr);

// Lexicon graph is over vocabulary ids and always treated as unweighted.
Sen2VecModel train_dictreg(const Corpus& corpus, const Vocab& vocab,
                           const WeightedGraph& sentence_graph, const WeightedGraph& lexicon,
                           const RegConfig& reg, const TrainConfig& cfg,
                           SgdReport* report = nullptr);

}  // namespace dis2vec
