#include "dis2vec/regularized.hpp"

#include <algorithm>
#include <cmath>

#include "dis2vec/retrofit.hpp"

namespace dis2vec {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return d2;
}

void check_graph(const Sen2VecModel& model, const WeightedGraph& graph) {
  if (graph.node_count() > model.sentence_vectors.rows())
    throw ArgumentError("graph has more nodes than the model has sentences");
}

}  // namespace

double graph_quadratic(const VectorTable& vectors, const WeightedGraph& graph, bool weighted) {
  double total = 0.0;
  for (const auto& e : graph.edges())
    total += (weighted ? e.weight : 1.0) * squared_distance(vectors.row(e.u), vectors.row(e.v));
  return total;
}

double reg_objective(const Sen2VecModel& model, const Corpus& corpus, const WeightedGraph& graph,
                     const RegConfig& cfg) {
  check_graph(model, graph);
  return dbow_corpus_loss(model, corpus) +
         cfg.beta * graph_quadratic(model.sentence_vectors, graph, cfg.weighted);
}

VectorTable reg_objective_gradient(const Sen2VecModel& model, const Corpus& corpus,
                                   const WeightedGraph& graph, const RegConfig& cfg) {
  check_graph(model, graph);
  const VectorTable& words = model.word_output;
  const std::size_t dim = model.sentence_vectors.dim();
  VectorTable grad(model.sentence_vectors.rows(), dim);
  std::vector<double> p(words.rows());
  for (const auto& s : corpus.sentences()) {
    if (s.tokens.empty()) continue;
    auto phi = model.sentence_vectors.row(s.id);
    double mx = -INFINITY;
    for (std::size_t w = 0; w < words.rows(); ++w) {
      p[w] = dot(phi, words.row(w));
      mx = std::max(mx, p[w]);
    }
    double z = 0.0;
    for (double& x : p) z += (x = std::exp(x - mx));
    for (double& x : p) x /= z;
    // Each token contributes E_p[omega] - omega(w).
    auto g = grad.row(s.id);
    const double count = static_cast<double>(s.tokens.size());
    for (std::size_t w = 0; w < words.rows(); ++w) {
      auto ow = words.row(w);
      for (std::size_t k = 0; k < dim; ++k) g[k] += count * p[w] * ow[k];
    }
    for (std::size_t w : s.tokens) {
      auto ow = words.row(w);
      for (std::size_t k = 0; k < dim; ++k) g[k] -= ow[k];
    }
  }
  for (const auto& e : graph.edges()) {
    const double c = 2.0 * cfg.beta * (cfg.weighted ? e.weight : 1.0);
    auto a = model.sentence_vectors.row(e.u), b = model.sentence_vectors.row(e.v);
    auto ga = grad.row(e.u), gb = grad.row(e.v);
    for (std::size_t k = 0; k < dim; ++k) {
      ga[k] += c * (a[k] - b[k]);
      gb[k] += c * (b[k] - a[k]);
    }
  }
  return grad;
}

RegInstanceGradient reg_instance(std::span<const double> input, std::span<const double> target,
                                 const std::vector<std::vector<double>>& noise,
                                 const std::vector<WeightedVector>& neighbors, double beta,
                                 std::size_t instances) {
  if (instances == 0) throw ArgumentError("instance count must be positive");
  LossGradient ns = neg_sampling_loss(input, target, noise);
  RegInstanceGradient out;
  out.loss = ns.loss;
  out.d_input = ns.d_input;
  out.d_target = std::move(ns.d_target);
  out.d_noise = std::move(ns.d_noise);
  const double share = beta / static_cast<double>(instances);
  for (const auto& nb : neighbors) {
    if (nb.vector.size() != input.size()) throw ArgumentError("neighbor dimension mismatch");
    out.loss += share * nb.weight * squared_distance(input, nb.vector);
    for (std::size_t k = 0; k < input.size(); ++k)
      out.d_input[k] += 2.0 * share * nb.weight * (input[k] - nb.vector[k]);
  }
  return out;
}

double lexicon_instance(std::span<const double> word,
                        const std::vector<std::vector<double>>& neighbors, double word_beta,
                        std::size_t instances, std::span<double> d_word) {
  if (instances == 0) throw ArgumentError("instance count must be positive");
  const double share = word_beta / static_cast<double>(instances);
  double loss = 0.0;
  std::fill(d_word.begin(), d_word.end(), 0.0);
  for (const auto& nb : neighbors) {
    if (nb.size() != word.size()) throw ArgumentError("neighbor dimension mismatch");
    loss += share * squared_distance(word, nb);
    for (std::size_t k = 0; k < word.size(); ++k) d_word[k] += 2.0 * share * (word[k] - nb[k]);
  }
  return loss;
}

RegularizedStream::RegularizedStream(const Corpus& corpus, const Vocab& vocab,
                                     const TrainConfig& cfg, Sen2VecModel& model,
                                     const WeightedGraph& graph, const RegConfig& reg,
                                     const WeightedGraph* lexicon)
    : DbowStream(corpus, vocab, cfg, model), graph_(graph), reg_(reg), lexicon_(lexicon) {
  if (reg.beta < 0.0 || reg.word_beta < 0.0) throw ArgumentError("regularization strengths must be non-negative");
  if (graph.node_count() > corpus.sentences().size())
    throw ArgumentError("discourse graph has more nodes than the corpus has sentences");
  if (lexicon && lexicon->node_count() > vocab.size())
    throw ArgumentError("lexicon graph has more nodes than the vocabulary");
}

void RegularizedStream::begin_epoch(int epoch, Rng& rng) {
  DbowStream::begin_epoch(epoch, rng);
  if (!lexicon_) return;
  word_targets_.assign(model_.word_output.rows(), 0);
  for (const auto& [s, pos] : sampled_.instances()) ++word_targets_[sampled_.kept(s)[pos]];
}

double RegularizedStream::gradient(std::size_t instance, double lr, Rng& rng,
                                   SparseGradient& grad) const {
  const std::size_t first = grad.size();
  std::size_t s = 0, w = 0;
  double loss = content_gradient(instance, rng, grad, s, w);

  if (reg_.beta > 0.0 && s < graph_.node_count() && graph_.degree(s) > 0) {
    const double share = reg_.beta / static_cast<double>(sampled_.instances_of(s));
    double total_weight = 0.0;
    for (const auto& nb : graph_.neighbors(s)) total_weight += reg_.weighted ? nb.weight : 1.0;
    const double scale = pull_scale(lr, 2.0 * share * total_weight);
    auto phi = model_.sentence_vectors.row(s);
    auto g = grad.values(first);  // sentence input slot
    for (const auto& nb : graph_.neighbors(s)) {
      const double wgt = reg_.weighted ? nb.weight : 1.0;
      auto other = model_.sentence_vectors.row(nb.id);
      double d2 = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) {
        double diff = phi[k] - other[k];
        d2 += diff * diff;
        g[k] += 2.0 * share * scale * wgt * diff;
      }
      loss += share * wgt * d2;
    }
  }

  if (lexicon_ && reg_.word_beta > 0.0 && w < lexicon_->node_count() && lexicon_->degree(w) > 0) {
    const double share = reg_.word_beta / static_cast<double>(word_targets_[w]);
    const double scale =
        pull_scale(lr, 2.0 * share * static_cast<double>(lexicon_->degree(w)));
    auto omega = model_.word_output.row(w);
    auto g = grad.add(model_.word_output, w);
    for (const auto& nb : lexicon_->neighbors(w)) {
      auto other = model_.word_output.row(nb.id);
      double d2 = 0.0;
      for (std::size_t k = 0; k < omega.size(); ++k) {
        double diff = omega[k] - other[k];
        d2 += diff * diff;
        g[k] += 2.0 * share * scale * diff;
      }
      loss += share * d2;
    }
  }
  return loss;
}

Sen2VecModel train_regularized(const Corpus& corpus, const Vocab& vocab,
                               const WeightedGraph& graph, const RegConfig& reg,
                               const TrainConfig& cfg, SgdReport* report) {
  Sen2VecModel model = init_sen2vec_model(corpus, vocab, cfg, ContentVariant::kDbow, 0);
  RegularizedStream stream(corpus, vocab, cfg, model, graph, reg, nullptr);
  SgdReport r = sgd_run(stream, cfg);
  if (report) *report = std::move(r);
  return model;
}

Sen2VecModel train_dictreg(const Corpus& corpus, const Vocab& vocab,
                           const WeightedGraph& sentence_graph, const WeightedGraph& lexicon,
                           const RegConfig& reg, const TrainConfig& cfg, SgdReport* report) {
  Sen2VecModel model = init_sen2vec_model(corpus, vocab, cfg, ContentVariant::kDbow, 0);
  const WeightedGraph unit = lexicon.unweighted();
  RegularizedStream stream(corpus, vocab, cfg, model, sentence_graph, reg, &unit);
  SgdReport r = sgd_run(stream, cfg);
  if (report) *report = std::move(r);
  return model;
}

}  // namespace dis2vec
