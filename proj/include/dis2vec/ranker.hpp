#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/graph.hpp"
#include "dis2vec/vector_table.hpp"

namespace dis2vec {

struct RankConfig {
  double edge_min_weight = 0.10;
  double damping = 0.85;
  double pagerank_tol = 1e-10;
  std::size_t max_power_iterations = 200;
};

void validate(const RankConfig& cfg);

// Graph over the document's sentences (local ids in document order) with an
// edge wherever cosine >= edge_min_weight.
WeightedGraph build_sentence_graph(const Document& doc, const VectorTable& vectors,
                                   const RankConfig& cfg);

// Weighted PageRank. Nodes without outgoing weight spread their mass
// uniformly. Scores sum to 1.
std::vector<double> pagerank(const WeightedGraph& graph, const RankConfig& cfg);

// PageRank scores of a document's sentences, in document order.
std::vector<double> rank_document(const Document& doc, const VectorTable& vectors,
                                  const RankConfig& cfg);

// Greedy extraction in descending score order (ties: document order) until
// the selected word count reaches `word_budget`. Returns sentence ids in
// document order.
std::vector<std::size_t> extract_summary(const Document& doc, const Corpus& corpus,
                                         const std::vector<double>& scores,
                                         std::size_t word_budget);
std::vector<std::size_t> extract_summary(const Document& doc, const Corpus& corpus,
                                         const VectorTable& vectors, const RankConfig& cfg,
                                         std::size_t word_budget);

struct Annotation {
  std::vector<std::pair<std::size_t, std::string>> labels;  // (sentence id, label)
  std::vector<std::string> warnings;
};

// ceil(P/100 * n) top-ranked sentences per labeled document get the
// document's label. Unlabeled documents are skipped with a warning.
Annotation annotate_top_sentences(const Corpus& corpus, const VectorTable& vectors,
                                  double p_percent, const RankConfig& cfg = {});

// Number of sentences labeled for a document of n sentences.
std::size_t top_percent_count(std::size_t n, double p_percent);

}  // namespace dis2vec
