#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dis2vec/embedding.hpp"
#include "dis2vec/graph.hpp"

namespace dis2vec {

struct WalkConfig {
  double return_param = 1.0;   // r
  double forward_param = 1.0;  // f
  std::size_t walk_length = 80;
  std::size_t walks_per_node = 10;
  std::size_t window = 10;
};

void validate(const WalkConfig& cfg);

// Second-order bias for a candidate x given the previous node p:
// 1/r at hop distance 0, 1 at distance 1, 1/f at distance 2.
double transition_bias(int hop_distance, double return_param, double forward_param);

// One alias table per node for the first step (edge weights) and one per
// directed edge p->u over u's neighbors, weighted by bias(p, x) * w(u, x).
class TransitionTable {
 public:
  TransitionTable(const WeightedGraph& graph, const WalkConfig& cfg);

  const WeightedGraph& graph() const { return graph_; }

  // Next node from `current` as the first step of a walk; npos on a dead end.
  std::size_t first_step(std::size_t current, Rng& rng) const;
  // Next node at `current` having arrived from `previous`.
  std::size_t next_step(std::size_t previous, std::size_t current, Rng& rng) const;

  // Normalized distribution over neighbors(current) implied by the table.
  std::vector<double> step_distribution(std::size_t previous, std::size_t current) const;

  static constexpr std::size_t npos = WeightedGraph::npos;

 private:
  const WeightedGraph& graph_;
  std::vector<AliasTable> first_;
  std::vector<AliasTable> edge_;  // indexed by graph slot of (previous -> current)
};

using Walk = std::vector<std::size_t>;

// walks_per_node rounds over all nodes in id order. Every walk has its own
// rng stream derived from (seed, node, round), so the result does not depend
// on `workers`. Walks stop early at dead ends.
std::vector<Walk> sample_walks(const TransitionTable& transitions, const WalkConfig& cfg,
                               std::uint64_t seed, std::size_t workers = 1);

void save_walks(const std::vector<Walk>& walks, const std::filesystem::path& path);

// Number of (center, context) pairs a walk of `length` yields with
// half-window `window`.
std::size_t pair_count(std::size_t length, std::size_t window);

// Skip-gram over walk windows. Instance k is the k-th (center, context)
// pair in walk order.
class SkipGramStream : public TrainingStream {
 public:
  SkipGramStream(std::vector<Walk> walks, std::size_t node_count, const TrainConfig& cfg,
                 const WalkConfig& walk_cfg, EmbeddingTable& table);

  void begin_epoch(int, Rng&) override {}
  std::size_t epoch_size() const override { return total_pairs_; }
  double gradient(std::size_t instance, double lr, Rng& rng,
                  SparseGradient& grad) const override;

  // Number of instances whose center is `node`.
  std::size_t instances_of(std::size_t node) const { return center_counts_[node]; }

 protected:
  std::pair<std::size_t, std::size_t> pair_at(std::size_t instance) const;
  double pair_gradient(std::size_t center, std::size_t context, Rng& rng,
                       SparseGradient& grad) const;

  std::vector<Walk> walks_;
  std::vector<std::size_t> walk_start_;    // flat position of each walk
  std::vector<std::size_t> flat_nodes_;
  std::vector<std::size_t> flat_walk_;  // walk index per flat position
  std::vector<std::size_t> pair_prefix_;   // cumulative pairs per flat position
  std::vector<std::size_t> center_counts_;
  std::size_t total_pairs_ = 0;
  const TrainConfig& cfg_;
  std::size_t window_;
  EmbeddingTable& table_;
  NoiseModel noise_;
};

// Walks plus skip-gram training. With `init` the input vectors start from it
// (the warm-started variant); its row count must equal the node count and its
// dimension overrides cfg.dim.
EmbeddingTable train_node2vec(const WeightedGraph& graph, const WalkConfig& walk_cfg,
                              const TrainConfig& cfg,
                              const std::optional<VectorTable>& init = std::nullopt,
                              SgdReport* report = nullptr);

}  // namespace dis2vec
