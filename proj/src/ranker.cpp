#include "dis2vec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dis2vec/error.hpp"

namespace dis2vec {

void validate(const RankConfig& cfg) {
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) throw ArgumentError("damping must lie in (0, 1)");
  if (!(cfg.pagerank_tol > 0.0)) throw ArgumentError("PageRank tolerance must be positive");
  if (cfg.max_power_iterations == 0) throw ArgumentError("PageRank needs at least one iteration");
}

WeightedGraph build_sentence_graph(const Document& doc, const VectorTable& vectors,
                                   const RankConfig& cfg) {
  const auto& ids = doc.sentence_ids;
  std::vector<EdgeTriple> edges;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vectors.rows()) throw ArgumentError("sentence without a vector");
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[j] >= vectors.rows()) throw ArgumentError("sentence without a vector");
      double s;
      try {
        s = cosine(vectors.row(ids[i]), vectors.row(ids[j]));
      } catch (const UndefinedMetricError&) {
        continue;
      }
      if (s >= cfg.edge_min_weight && s >= 0.0) edges.push_back({i, j, s});
    }
  }
  return WeightedGraph::from_edges(ids.size(), edges);
}

std::vector<double> pagerank(const WeightedGraph& graph, const RankConfig& cfg) {
  validate(cfg);
  const std::size_t n = graph.node_count();
  if (n == 0) throw ArgumentError("PageRank of an empty graph");
  const double nd = static_cast<double>(n);
  std::vector<double> out_weight(n);
  for (std::size_t u = 0; u < n; ++u) out_weight[u] = graph.weighted_degree(u);

  std::vector<double> rank(n, 1.0 / nd), next(n);
  for (std::size_t it = 0; it < cfg.max_power_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (out_weight[u] == 0.0) dangling += rank[u];
    }
    const double base = (1.0 - cfg.damping) / nd + cfg.damping * dangling / nd;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t u = 0; u < n; ++u) {
      if (out_weight[u] == 0.0) continue;
      const double share = cfg.damping * rank[u] / out_weight[u];
      for (const auto& nb : graph.neighbors(u)) next[nb.id] += share * nb.weight;
    }
    double sum = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      next[u] /= sum;
      change += std::abs(next[u] - rank[u]);
    }
    std::swap(rank, next);
    if (change < cfg.pagerank_tol) break;
  }
  return rank;
}

std::vector<double> rank_document(const Document& doc, const VectorTable& vectors,
                                  const RankConfig& cfg) {
  return pagerank(build_sentence_graph(doc, vectors, cfg), cfg);
}

std::vector<std::size_t> extract_summary(const Document& doc, const Corpus& corpus,
                                         const std::vector<double>& scores,
                                         std::size_t word_budget) {
  const auto& ids = doc.sentence_ids;
  if (scores.size() != ids.size()) throw ArgumentError("one score per document sentence is required");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> picked;
  std::size_t words = 0;
  for (std::size_t local : order) {
    if (words >= word_budget) break;
    picked.push_back(local);
    words += corpus.sentence(ids[local]).words.size();
  }
  std::sort(picked.begin(), picked.end());
  std::vector<std::size_t> out;
  out.reserve(picked.size());
  for (std::size_t local : picked) out.push_back(ids[local]);
  return out;
}

std::vector<std::size_t> extract_summary(const Document& doc, const Corpus& corpus,
                                         const VectorTable& vectors, const RankConfig& cfg,
                                         std::size_t word_budget) {
  return extract_summary(doc, corpus, rank_document(doc, vectors, cfg), word_budget);
}

std::size_t top_percent_count(std::size_t n, double p_percent) {
  if (!(p_percent > 0.0 && p_percent <= 100.0)) throw ArgumentError("P must lie in (0, 100]");
  double exact = p_percent * static_cast<double>(n) / 100.0;
  // Guard against products such as 2.0000000000000004.
  std::size_t k = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(k, n ? 1 : 0, n);
}

Annotation annotate_top_sentences(const Corpus& corpus, const VectorTable& vectors,
                                  double p_percent, const RankConfig& cfg) {
  Annotation out;
  for (const auto& doc : corpus.documents()) {
    if (!doc.label) {
      out.warnings.push_back("document '" + doc.doc_id + "' has no label; skipped");
      continue;
    }
    std::vector<double> scores = rank_document(doc, vectors, cfg);
    const std::size_t k = top_percent_count(doc.sentence_ids.size(), p_percent);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    for (std::size_t local : order) out.labels.emplace_back(doc.sentence_ids[local], *doc.label);
  }
  return out;
}

}  // namespace dis2vec
