#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/vector_table.hpp"

namespace dis2vec {

struct Neighbor {
  std::size_t id;
  double weight;

  bool operator==(const Neighbor&) const = default;
};

struct EdgeTriple {
  std::size_t u;
  std::size_t v;
  double weight;
};

// Undirected weighted graph in compressed sparse row form. Every undirected
// edge is stored in both endpoints' lists; lists are sorted by neighbor id.
// Weights are non-negative and self-loops are rejected.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t node_count);

  // Builds the canonical graph from undirected edges. Repeated edges are
  // accepted only when they agree on the weight.
  static WeightedGraph from_edges(std::size_t node_count,
                                  std::span<const EdgeTriple> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const Neighbor> neighbors(std::size_t u) const {
    return {neighbors_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(std::size_t u) const { return offsets_[u + 1] - offsets_[u]; }
  double weighted_degree(std::size_t u) const;

  // Position of v inside neighbors(u) or npos.
  std::size_t find(std::size_t u, std::size_t v) const;
  bool has_edge(std::size_t u, std::size_t v) const { return find(u, v) != npos; }
  double weight(std::size_t u, std::size_t v) const;

  // Offset of u's first slot in the flat neighbor array; slot indices are
  // stable ids for directed edges.
  std::size_t first_slot(std::size_t u) const { return offsets_[u]; }
  std::size_t slot_count() const { return neighbors_.size(); }

  // Undirected edges once each, u < v, sorted.
  std::vector<EdgeTriple> edges() const;

  // Same topology with every weight set to 1.
  WeightedGraph unweighted() const;

  std::size_t component_count() const;

  bool operator==(const WeightedGraph&) const = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> neighbors_;
};

enum class Similarity { kCosine };

struct GraphBuildConfig {
  double intra_threshold = 0.5;
  double across_threshold = 0.8;
  std::size_t top_k = 20;
  Similarity similarity = Similarity::kCosine;
};

// Throws UndefinedMetricError when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

// Thresholded similarity graph over all sentences, pruned to each node's
// top_k neighbors. An edge survives when either endpoint ranks it (union),
// ties at the cut go to the smaller neighbor id. Zero-norm vectors and
// negative similarities never produce edges. `workers` > 1 splits the
// pairwise pass by source-node range; the result is identical.
WeightedGraph build_discourse_graph(const VectorTable& vectors, const Corpus& corpus,
                                    const GraphBuildConfig& cfg, std::size_t workers = 1);

// Edge-list text: "u<TAB>v<TAB>weight" per line, '#' comments. Two-column
// lines are unweighted (weight 1). An optional "# nodes N" comment fixes the
// node count, otherwise it is one past the largest id. `min_nodes` raises
// the node count when the file's ids do not reach it.
WeightedGraph load_edge_list(const std::filesystem::path& path, std::size_t min_nodes = 0);
WeightedGraph parse_edge_list(const std::string& text, std::size_t min_nodes = 0);

// Canonical form: "# nodes N" header, then each undirected edge once with
// u < v in (u, v) order. Weights use the shortest round-trip decimal.
void save_edge_list(const WeightedGraph& graph, const std::filesystem::path& path);
std::string format_edge_list(const WeightedGraph& graph);

struct LexiconLoad {
  WeightedGraph graph;  // over vocabulary ids, unit weights
  std::size_t skipped_edges = 0;
};

// Reads a lexicon edge list whose ids go through a "word<TAB>index" mapping
// file, then resolves the words against the vocabulary. Edges touching a
// word outside the vocabulary are skipped and counted.
LexiconLoad load_lexicon(const std::filesystem::path& edges,
                         const std::filesystem::path& word_map, const Vocab& vocab);

}  // namespace dis2vec
