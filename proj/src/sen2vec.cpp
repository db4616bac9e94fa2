#include "dis2vec/sen2vec.hpp"

#include <algorithm>
#include <cmath>

namespace dis2vec {

SubsampledCorpus::SubsampledCorpus(const Corpus& corpus, const Vocab& vocab, double threshold)
    : corpus_(corpus), keep_prob_(vocab.size(), 1.0), kept_(corpus.sentences().size()) {
  if (!corpus.indexed()) throw ArgumentError("corpus must be indexed against the vocabulary");
  if (threshold > 0.0) {
    for (std::size_t w = 0; w < vocab.size(); ++w)
      keep_prob_[w] = subsample_keep_prob(vocab.frequency(w), threshold);
  }
}

void SubsampledCorpus::resample(Rng& rng) {
  instances_.clear();
  for (const auto& s : corpus_.sentences()) {
    auto& kept = kept_[s.id];
    kept.clear();
    for (std::size_t w : s.tokens) {
      double p = keep_prob_[w];
      if (p >= 1.0 || uniform01(rng) < p) kept.push_back(w);
    }
    for (std::size_t pos = 0; pos < kept.size(); ++pos) instances_.emplace_back(s.id, pos);
  }
}

namespace {

NoiseModel word_noise(const Vocab& vocab, const TrainConfig& cfg) {
  return NoiseModel(vocab.counts(), cfg.noise);
}

}  // namespace

Sen2VecModel init_sen2vec_model(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                                ContentVariant variant, std::size_t window) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, 0x5e2));
  Sen2VecModel m;
  m.variant = variant;
  m.window = window;
  m.sentence_vectors = VectorTable(corpus.sentences().size(), cfg.dim);
  init_input_vectors(m.sentence_vectors, rng);
  if (variant == ContentVariant::kDm) {
    m.word_input = VectorTable(vocab.size(), cfg.dim);
    init_input_vectors(m.word_input, rng);
  }
  m.word_output = VectorTable(vocab.size(), cfg.dim);
  std::vector<std::string> words = vocab.words();
  m.word_output.set_ids(words);
  if (variant == ContentVariant::kDm) m.word_input.set_ids(std::move(words));
  return m;
}

DbowStream::DbowStream(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                       Sen2VecModel& model)
    : corpus_(corpus),
      cfg_(cfg),
      model_(model),
      noise_(word_noise(vocab, cfg)),
      sampled_(corpus, vocab, cfg.subsample) {}

void DbowStream::begin_epoch(int, Rng& rng) { sampled_.resample(rng); }

double DbowStream::content_gradient(std::size_t instance, Rng& rng, SparseGradient& grad,
                                    std::size_t& sentence, std::size_t& target) const {
  auto [s, pos] = sampled_.instances()[instance];
  sentence = s;
  target = sampled_.kept(s)[pos];
  std::vector<std::size_t> negatives(cfg_.negative);
  draw_negatives(noise_, target, rng, negatives);
  std::vector<double> offsets;
  OutputObjective obj{cfg_.loss, &noise_};
  auto off = logit_offsets(obj, target, negatives, offsets);
  std::span<double> input_grad = grad.add(model_.sentence_vectors, s);
  TableOutput out{model_.word_output, grad};
  return output_layer_loss(model_.sentence_vectors.row(s), out, target, negatives, off,
                           input_grad);
}

double DbowStream::gradient(std::size_t instance, double, Rng& rng, SparseGradient& grad) const {
  std::size_t s = 0, w = 0;
  return content_gradient(instance, rng, grad, s, w);
}

DmStream::DmStream(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                   Sen2VecModel& model)
    : cfg_(cfg), model_(model), noise_(word_noise(vocab, cfg)), sampled_(corpus, vocab, cfg.subsample) {}

void DmStream::begin_epoch(int, Rng& rng) { sampled_.resample(rng); }

double DmStream::gradient(std::size_t instance, double, Rng& rng, SparseGradient& grad) const {
  auto [s, pos] = sampled_.instances()[instance];
  const auto& kept = sampled_.kept(s);
  const std::size_t target = kept[pos];
  const std::size_t dim = model_.sentence_vectors.dim();
  const std::size_t lo = pos >= model_.window ? pos - model_.window : 0;
  const std::size_t hi = std::min(kept.size(), pos + model_.window + 1);

  std::vector<double> hidden(dim, 0.0);
  std::size_t count = 1;
  auto sv = model_.sentence_vectors.row(s);
  for (std::size_t k = 0; k < dim; ++k) hidden[k] += sv[k];
  for (std::size_t j = lo; j < hi; ++j) {
    if (j == pos) continue;
    auto wv = model_.word_input.row(kept[j]);
    for (std::size_t k = 0; k < dim; ++k) hidden[k] += wv[k];
    ++count;
  }
  const double inv = static_cast<double>(count);
  for (double& h : hidden) h /= inv;

  std::vector<std::size_t> negatives(cfg_.negative);
  draw_negatives(noise_, target, rng, negatives);
  std::vector<double> offsets;
  OutputObjective obj{cfg_.loss, &noise_};
  auto off = logit_offsets(obj, target, negatives, offsets);
  std::vector<double> hidden_grad(dim, 0.0);
  TableOutput out{model_.word_output, grad};
  double loss = output_layer_loss(std::span<const double>(hidden), out, target, negatives, off,
                                  std::span<double>(hidden_grad));

  auto add_share = [&](VectorTable& table, std::size_t row) {
    auto g = grad.add(table, row);
    for (std::size_t k = 0; k < dim; ++k) g[k] = hidden_grad[k] / inv;
  };
  add_share(model_.sentence_vectors, s);
  for (std::size_t j = lo; j < hi; ++j) {
    if (j != pos) add_share(model_.word_input, kept[j]);
  }
  return loss;
}

Sen2VecModel train_dbow(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                        SgdReport* report) {
  Sen2VecModel model = init_sen2vec_model(corpus, vocab, cfg, ContentVariant::kDbow, 0);
  DbowStream stream(corpus, vocab, cfg, model);
  SgdReport r = sgd_run(stream, cfg);
  if (report) *report = std::move(r);
  return model;
}

Sen2VecModel train_dm(const Corpus& corpus, const Vocab& vocab, const TrainConfig& cfg,
                      std::size_t window, SgdReport* report) {
  Sen2VecModel model = init_sen2vec_model(corpus, vocab, cfg, ContentVariant::kDm, window);
  DmStream stream(corpus, vocab, cfg, model);
  SgdReport r = sgd_run(stream, cfg);
  if (report) *report = std::move(r);
  return model;
}

VectorTable concat_s2v(const Sen2VecModel& dbow, const Sen2VecModel& dm) {
  if (dbow.sentence_vectors.rows() != dm.sentence_vectors.rows())
    throw ArgumentError("DBOW and DM cover different sentence id spaces");
  if (dbow.sentence_vectors.dim() != dm.sentence_vectors.dim())
    throw ArgumentError("DBOW and DM use different dimensions");
  return concat_rows(dbow.sentence_vectors, dm.sentence_vectors);
}

AveragedInputGradient averaged_input_loss(const std::vector<std::vector<double>>& inputs,
                                          std::span<const double> target,
                                          const std::vector<std::vector<double>>& noise) {
  if (inputs.empty()) throw ArgumentError("at least one input vector is required");
  const std::size_t dim = target.size();
  std::vector<double> hidden(dim, 0.0);
  for (const auto& in : inputs) {
    if (in.size() != dim) throw ArgumentError("input dimension mismatch");
    for (std::size_t k = 0; k < dim; ++k) hidden[k] += in[k];
  }
  const double n = static_cast<double>(inputs.size());
  for (double& h : hidden) h /= n;
  LossGradient lg = neg_sampling_loss(hidden, target, noise);
  AveragedInputGradient out;
  out.loss = lg.loss;
  out.d_target = std::move(lg.d_target);
  out.d_noise = std::move(lg.d_noise);
  out.d_inputs.assign(inputs.size(), std::vector<double>(dim));
  for (auto& g : out.d_inputs) {
    for (std::size_t k = 0; k < dim; ++k) g[k] = lg.d_input[k] / n;
  }
  return out;
}

double dbow_corpus_loss(const Sen2VecModel& model, const Corpus& corpus) {
  const VectorTable& words = model.word_output;
  std::vector<double> scores(words.rows());
  double total = 0.0;
  for (const auto& s : corpus.sentences()) {
    if (s.tokens.empty()) continue;
    auto phi = model.sentence_vectors.row(s.id);
    double mx = -INFINITY;
    for (std::size_t w = 0; w < words.rows(); ++w) {
      scores[w] = dot(phi, words.row(w));
      mx = std::max(mx, scores[w]);
    }
    double z = 0.0;
    for (double sc : scores) z += std::exp(sc - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t w : s.tokens) total += log_z - scores[w];
  }
  return total;
}

}  // namespace dis2vec
