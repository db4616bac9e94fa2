#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/embedding.hpp"

namespace dis2vec {

enum class ContentVariant { kDbow, kDm };

// Sentence vectors plus the word tables the content model trains alongside.
// DBOW leaves word_input empty; DM trains it as context input.
struct Sen2VecModel {
  ContentVariant variant = ContentVariant::kDbow;
  VectorTable sentence_vectors;
  VectorTable word_input;
  VectorTable word_output;
  std::size_t window = 0;
};

constexpr std::size_t kDefaultDmWindow = 5;

// Per-epoch list of kept tokens for every sentence after subsampling.
class SubsampledCorpus {
 public:
  SubsampledCorpus(const Corpus& corpus, const Vocab& vocab, double threshold);

  void resample(Rng& rng);

  // (sentence, position within kept list) per instance.
  const std::vector<std::pair<std::size_t, std::size_t>>& instances() const {
    return instances_;
  }
  const std::vector<std::size_t>& kept(std::size_t sentence) const { return kept_[sentence]; }
  std::size_t instances_of(std::size_t sentence) const { return kept_[sentence].size(); }
  const Corpus& corpus() const { return corpus_; }

 private:
  const Corpus& corpus_;
  std::vector<double> keep_prob_;  // per vocabulary id
  std::vector<std::vector<std::size_t>> kept_;
  std::vector<std::pair<std::size_t, std::size_t>> instances_;
};

// DBOW: each kept word of a sentence is predicted from the sentence vector.
class DbowStream : public TrainingStream {
 public:
  DbowStream(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
             Sen2VecModel& model);

  void begin_epoch(int epoch, Rng& rng) override;
  std::size_t epoch_size() const override { return sampled_.instances().size(); }
  double gradient(std::size_t instance, double lr, Rng& rng,
                  SparseGradient& grad) const override;

 protected:
  // Content part of one instance; returns the loss and leaves the sentence
  // and target ids in the out-parameters.
  double content_gradient(std::size_t instance, Rng& rng, SparseGradient& grad,
                          std::size_t& sentence, std::size_t& target) const;

  const Corpus& corpus_;
  const TrainConfig& cfg_;
  Sen2VecModel& model_;
  NoiseModel noise_;
  SubsampledCorpus sampled_;
};

// DM: the center word is predicted from the mean of the sentence vector and
// the input vectors of kept words within `window` positions.
class DmStream : public TrainingStream {
 public:
  DmStream(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
           Sen2VecModel& model);

  void begin_epoch(int epoch, Rng& rng) override;
  std::size_t epoch_size() const override { return sampled_.instances().size(); }
  double gradient(std::size_t instance, double lr, Rng& rng,
                  SparseGradient& grad) const override;

 private:
  const TrainConfig& cfg_;
  Sen2VecModel& model_;
  NoiseModel noise_;
  SubsampledCorpus sampled_;
};

// Fresh model: sentence (and DM word input) vectors uniform in
// [-0.5/d, 0.5/d], output word vectors zero.
Sen2VecModel init_sen2vec_model(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                                ContentVariant variant, std::size_t window);

// Requires corpus.index(vocab) to have run.
Sen2VecModel train_dbow(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                        SgdReport* report = nullptr);
Sen2VecModel train_dm(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                      std::size_t window = kDefaultDmWindow, SgdReport* report = nullptr);

// Per-sentence [DBOW | DM]. Throws ArgumentError on mismatched id spaces.
VectorTable concat_s2v(const Sen2VecModel& dbow, const Sen2VecModel& dm);

struct AveragedInputGradient {
  double loss = 0.0;
  std::vector<std::vector<double>> d_inputs;
  std::vector<double> d_target;
  std::vector<std::vector<double>> d_noise;
};

// One DM instance over explicit vectors: the negative-sampling loss of the
// mean of `inputs`, with the hidden gradient split equally among inputs.
AveragedInputGradient averaged_input_loss(const std::vector<std::vector<double>>& inputs,
                                          std::span<const double> target,
                                          const std::vector<std::vector<double>>& noise);

// Exact DBOW negative log-likelihood under the full softmax over the
// vocabulary: -sum_v sum_{w in v} log softmax(omega(w).phi(v)).
double dbow_corpus_loss(const Sen2VecModel& model, const Corpus& corpus);

}  // namespace dis2vec
