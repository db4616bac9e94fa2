#include "dis2vec/node2vec.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

namespace dis2vec {

void validate(const WalkConfig& cfg) {
  if (!(cfg.return_param > 0.0)) throw ArgumentError("return parameter r must be positive");
  if (!(cfg.forward_param > 0.0)) throw ArgumentError("forward parameter f must be positive");
  if (cfg.walk_length < 2) throw ArgumentError("walk length must be at least 2");
  if (cfg.walks_per_node < 1) throw ArgumentError("walks per node must be at least 1");
  if (cfg.window < 1) throw ArgumentError("context window must be at least 1");
}

double transition_bias(int hop_distance, double return_param, double forward_param) {
  switch (hop_distance) {
    case 0: return 1.0 / return_param;
    case 1: return 1.0;
    case 2: return 1.0 / forward_param;
    default:
      throw ArgumentError("hop distance must be 0, 1 or 2, got " + std::to_string(hop_distance));
  }
}

namespace {

// Alias table over weights, or an empty table when nothing is reachable.
AliasTable table_or_empty(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return {};
  return AliasTable(weights);
}

}  // namespace

TransitionTable::TransitionTable(const WeightedGraph& graph, const WalkConfig& cfg)
    : graph_(graph), first_(graph.node_count()), edge_(graph.slot_count()) {
  validate(cfg);
  if (graph.node_count() == 0) throw ArgumentError("cannot walk an empty graph");
  std::vector<double> w;
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    w.clear();
    for (const auto& nb : graph.neighbors(u)) w.push_back(nb.weight);
    first_[u] = table_or_empty(w);
  }
  for (std::size_t p = 0; p < graph.node_count(); ++p) {
    auto from_p = graph.neighbors(p);
    for (std::size_t k = 0; k < from_p.size(); ++k) {
      const std::size_t u = from_p[k].id;
      w.clear();
      for (const auto& x : graph.neighbors(u)) {
        int hop = x.id == p ? 0 : (graph.has_edge(p, x.id) ? 1 : 2);
        w.push_back(transition_bias(hop, cfg.return_param, cfg.forward_param) * x.weight);
      }
      edge_[graph.first_slot(p) + k] = table_or_empty(w);
    }
  }
}

std::size_t TransitionTable::first_step(std::size_t current, Rng& rng) const {
  const AliasTable& t = first_[current];
  if (t.empty()) return npos;
  return graph_.neighbors(current)[t.sample(rng)].id;
}

std::size_t TransitionTable::next_step(std::size_t previous, std::size_t current,
                                       Rng& rng) const {
  std::size_t k = graph_.find(previous, current);
  if (k == WeightedGraph::npos) throw ArgumentError("walk step along a non-edge");
  const AliasTable& t = edge_[graph_.first_slot(previous) + k];
  if (t.empty()) return npos;
  return graph_.neighbors(current)[t.sample(rng)].id;
}

std::vector<double> TransitionTable::step_distribution(std::size_t previous,
                                                       std::size_t current) const {
  std::size_t k = graph_.find(previous, current);
  if (k == WeightedGraph::npos) throw ArgumentError("no edge between the given nodes");
  const AliasTable& t = edge_[graph_.first_slot(previous) + k];
  if (t.empty()) return std::vector<double>(graph_.degree(current), 0.0);
  return t.probabilities();
}

std::vector<Walk> sample_walks(const TransitionTable& transitions, const WalkConfig& cfg,
                               std::uint64_t seed, std::size_t workers) {
  validate(cfg);
  const std::size_t n = transitions.graph().node_count();
  std::vector<Walk> walks(n * cfg.walks_per_node);
  auto walk_from = [&](std::size_t round, std::size_t start) {
    Rng rng(derive_seed(seed, start, round));
    Walk walk{start};
    walk.reserve(cfg.walk_length);
    std::size_t next = transitions.first_step(start, rng);
    while (next != TransitionTable::npos) {
      walk.push_back(next);
      if (walk.size() >= cfg.walk_length) break;
      next = transitions.next_step(walk[walk.size() - 2], walk.back(), rng);
    }
    walks[round * n + start] = std::move(walk);
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
    if (workers == 1) {
      for (std::size_t v = 0; v < n; ++v) walk_from(round, v);
      continue;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t v = w; v < n; v += workers) walk_from(round, v);
      });
    }
    for (auto& t : pool) t.join();
  }
  return walks;
}

void save_walks(const std::vector<Walk>& walks, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write walks: " + path.string());
  for (const auto& walk : walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) out << (i ? " " : "") << walk[i];
    out << '\n';
  }
}

std::size_t pair_count(std::size_t length, std::size_t window) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < length; ++i)
    total += std::min(i, window) + std::min(length - 1 - i, window);
  return total;
}

SkipGramStream::SkipGramStream(std::vector<Walk> walks, std::size_t node_count,
                               const TrainConfig& cfg, const WalkConfig& walk_cfg,
                               EmbeddingTable& table)
    : walks_(std::move(walks)),
      center_counts_(node_count, 0),
      cfg_(cfg),
      window_(walk_cfg.window),
      table_(table) {
  std::vector<std::size_t> occurrences(node_count, 0);
  for (std::size_t w = 0; w < walks_.size(); ++w) {
    const Walk& walk = walks_[w];
    walk_start_.push_back(flat_nodes_.size());
    const std::size_t len = walk.size();
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t node = walk[i];
      if (node >= node_count) throw ArgumentError("walk visits an unknown node");
      std::size_t pairs = std::min(i, window_) + std::min(len - 1 - i, window_);
      pair_prefix_.push_back(total_pairs_);
      flat_nodes_.push_back(node);
      flat_walk_.push_back(w);
      total_pairs_ += pairs;
      center_counts_[node] += pairs;
      ++occurrences[node];
    }
  }
  noise_ = NoiseModel(occurrences, cfg.noise);
}

std::pair<std::size_t, std::size_t> SkipGramStream::pair_at(std::size_t instance) const {
  auto it = std::upper_bound(pair_prefix_.begin(), pair_prefix_.end(), instance);
  std::size_t p = static_cast<std::size_t>(it - pair_prefix_.begin()) - 1;
  // Among positions sharing a prefix value only the last one has pairs.
  std::size_t k = instance - pair_prefix_[p];
  const std::size_t w = flat_walk_[p];
  const std::size_t i = p - walk_start_[w];
  const Walk& walk = walks_[w];
  const std::size_t lo = i >= window_ ? i - window_ : 0;
  std::size_t j = lo + k;
  if (j >= i) ++j;
  return {walk[i], walk[j]};
}

double SkipGramStream::pair_gradient(std::size_t center, std::size_t context, Rng& rng,
                                     SparseGradient& grad) const {
  std::vector<std::size_t> negatives(cfg_.negative);
  draw_negatives(noise_, context, rng, negatives);
  std::vector<double> offsets;
  OutputObjective obj{cfg_.loss, &noise_};
  auto off = logit_offsets(obj, context, negatives, offsets);
  std::span<double> input_grad = grad.add(table_.input, center);
  TableOutput out{table_.output, grad};
  return output_layer_loss(table_.input.row(center), out, context, negatives, off, input_grad);
}

double SkipGramStream::gradient(std::size_t instance, double, Rng& rng,
                                SparseGradient& grad) const {
  auto [center, context] = pair_at(instance);
  return pair_gradient(center, context, rng, grad);
}

EmbeddingTable train_node2vec(const WeightedGraph& graph, const WalkConfig& walk_cfg,
                              const TrainConfig& cfg, const std::optional<VectorTable>& init,
                              SgdReport* report) {
  const std::size_t n = graph.node_count();
  TrainConfig run = cfg;
  EmbeddingTable table;
  if (init) {
    if (init->rows() != n)
      throw ArgumentError("initial vectors cover " + std::to_string(init->rows()) +
                          " ids but the graph has " + std::to_string(n) + " nodes");
    run.dim = init->dim();
    table.input = *init;
    table.input.set_ids({});
    table.output = VectorTable(n, run.dim);
  } else {
    validate(run);
    Rng rng(derive_seed(cfg.seed, 0x2e2));
    table = init_embedding(n, run.dim, rng);
  }
  TransitionTable transitions(graph, walk_cfg);
  auto walks = sample_walks(transitions, walk_cfg, derive_seed(cfg.seed, 0x3a1), cfg.workers);
  SkipGramStream stream(std::move(walks), n, run, walk_cfg, table);
  SgdReport r = sgd_run(stream, run);
  if (report) *report = std::move(r);
  return table;
}

}  // namespace dis2vec
