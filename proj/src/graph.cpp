#include "dis2vec/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "dis2vec/error.hpp"

namespace dis2vec {

WeightedGraph::WeightedGraph(std::size_t node_count) : offsets_(node_count + 1, 0) {}

WeightedGraph WeightedGraph::from_edges(std::size_t node_count,
                                        std::span<const EdgeTriple> edges) {
  std::vector<EdgeTriple> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count)
      throw ValidationError("edge endpoint out of range: " + std::to_string(std::max(e.u, e.v)));
    if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u));
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw ValidationError("edge weight must be finite and non-negative");
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(canon.begin(), canon.end(), [](const EdgeTriple& a, const EdgeTriple& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<EdgeTriple> unique;
  for (const auto& e : canon) {
    if (!unique.empty() && unique.back().u == e.u && unique.back().v == e.v) {
      if (unique.back().weight != e.weight)
        throw ValidationError("conflicting weights for edge " + std::to_string(e.u) + "-" +
                              std::to_string(e.v));
      continue;
    }
    unique.push_back(e);
  }

  WeightedGraph g(node_count);
  std::vector<std::size_t> deg(node_count, 0);
  for (const auto& e : unique) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.neighbors_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges arrive sorted by (u, v): appending yields sorted lists for both ends.
  for (const auto& e : unique) {
    g.neighbors_[fill[e.u]++] = {e.v, e.weight};
  }
  for (const auto& e : unique) {
    g.neighbors_[fill[e.v]++] = {e.u, e.weight};
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(g.neighbors_.begin() + g.offsets_[i], g.neighbors_.begin() + g.offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }
  return g;
}

double WeightedGraph::weighted_degree(std::size_t u) const {
  double s = 0.0;
  for (const auto& n : neighbors(u)) s += n.weight;
  return s;
}

std::size_t WeightedGraph::find(std::size_t u, std::size_t v) const {
  auto list = neighbors(u);
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Neighbor& n, std::size_t id) { return n.id < id; });
  if (it == list.end() || it->id != v) return npos;
  return static_cast<std::size_t>(it - list.begin());
}

double WeightedGraph::weight(std::size_t u, std::size_t v) const {
  std::size_t k = find(u, v);
  return k == npos ? 0.0 : neighbors(u)[k].weight;
}

std::vector<EdgeTriple> WeightedGraph::edges() const {
  std::vector<EdgeTriple> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < node_count(); ++u) {
    for (const auto& n : neighbors(u)) {
      if (u < n.id) out.push_back({u, n.id, n.weight});
    }
  }
  return out;
}

WeightedGraph WeightedGraph::unweighted() const {
  WeightedGraph g = *this;
  for (auto& n : g.neighbors_) n.weight = 1.0;
  return g;
}

std::size_t WeightedGraph::component_count() const {
  const std::size_t n = node_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t comps = n;
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& nb : neighbors(u)) {
      std::size_t a = root(u), b = root(nb.id);
      if (a != b) {
        parent[a] = b;
        --comps;
      }
    }
  }
  return comps;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("cosine: dimension mismatch");
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw UndefinedMetricError("cosine of a zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

WeightedGraph build_discourse_graph(const VectorTable& vectors, const Corpus& corpus,
                                    const GraphBuildConfig& cfg, std::size_t workers) {
  const std::size_t n = corpus.sentences().size();
  if (vectors.rows() < n) throw ArgumentError("every sentence needs a vector");
  if (cfg.top_k == 0) throw ArgumentError("top_k must be positive");
  const std::size_t dim = vectors.dim();

  // Unit vectors; zero-norm rows are flagged and never connect.
  std::vector<double> unit(n * dim, 0.0);
  std::vector<char> valid(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = vectors.row(i);
    double nr = norm(r);
    if (nr == 0.0) continue;
    valid[i] = 1;
    for (std::size_t k = 0; k < dim; ++k) unit[i * dim + k] = r[k] / nr;
  }
  auto sim = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    const double* x = unit.data() + a * dim;
    const double* y = unit.data() + b * dim;
    for (std::size_t k = 0; k < dim; ++k) s += x[k] * y[k];
    return std::clamp(s, -1.0, 1.0);
  };

  // Each node's own top-k list.
  std::vector<std::vector<Neighbor>> top(n);
  auto rank_range = [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> cand;
    for (std::size_t u = begin; u < end; ++u) {
      if (!valid[u]) continue;
      cand.clear();
      const std::size_t doc_u = corpus.sentence(u).doc;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u || !valid[v]) continue;
        // Symmetric evaluation order keeps w(u,v) == w(v,u) bit for bit.
        double s = u < v ? sim(u, v) : sim(v, u);
        if (s < 0.0) continue;
        double thr = corpus.sentence(v).doc == doc_u ? cfg.intra_threshold : cfg.across_threshold;
        if (s >= thr) cand.push_back({v, s});
      }
      auto better = [](const Neighbor& a, const Neighbor& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
      };
      if (cand.size() > cfg.top_k) {
        std::partial_sort(cand.begin(), cand.begin() + cfg.top_k, cand.end(), better);
        cand.resize(cfg.top_k);
      }
      top[u] = cand;
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n == 0 ? 1 : n));
  if (workers == 1) {
    rank_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t b = w * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(rank_range, b, e);
    }
    for (auto& t : pool) t.join();
  }

  std::vector<EdgeTriple> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& nb : top[u]) edges.push_back({u, nb.id, nb.weight});
  }
  return WeightedGraph::from_edges(n, edges);
}

namespace {

std::string format_weight(double w) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, ptr);
}

template <class T>
bool parse_number(const std::string& tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

WeightedGraph parse_edge_list(const std::string& text, std::size_t min_nodes) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t declared = 0;
  std::size_t max_id = 0;
  bool any = false;
  std::vector<EdgeTriple> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> toks;
    for (std::string t; fields >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0].starts_with('#')) {
      if (toks.size() == 3 && toks[0] == "#" && toks[1] == "nodes") {
        if (!parse_number(toks[2], declared)) throw ParseError("bad node count", line_no);
      }
      continue;
    }
    if (toks.size() != 2 && toks.size() != 3)
      throw ParseError("expected 'u<TAB>v<TAB>weight'", line_no);
    EdgeTriple e{0, 0, 1.0};
    if (!parse_number(toks[0], e.u) || !parse_number(toks[1], e.v))
      throw ParseError("node ids must be non-negative integers", line_no);
    if (toks.size() == 3 && (!parse_number(toks[2], e.weight) || !std::isfinite(e.weight)))
      throw ParseError("bad weight '" + toks[2] + "'", line_no);
    if (e.weight < 0.0)
      throw ValidationError("negative weight on line " + std::to_string(line_no));
    if (e.u == e.v) throw ValidationError("self-loop on line " + std::to_string(line_no));
    max_id = std::max({max_id, e.u, e.v});
    any = true;
    edges.push_back(e);
  }
  std::size_t nodes = std::max(declared, min_nodes);
  if (any) nodes = std::max(nodes, max_id + 1);
  return WeightedGraph::from_edges(nodes, edges);
}

WeightedGraph load_edge_list(const std::filesystem::path& path, std::size_t min_nodes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read edge list: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str(), min_nodes);
}

std::string format_edge_list(const WeightedGraph& graph) {
  std::string out = "# nodes " + std::to_string(graph.node_count()) + "\n";
  for (const auto& e : graph.edges()) {
    out += std::to_string(e.u) + '\t' + std::to_string(e.v) + '\t' + format_weight(e.weight) + '\n';
  }
  return out;
}

void save_edge_list(const WeightedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write edge list: " + path.string());
  out << format_edge_list(graph);
}

LexiconLoad load_lexicon(const std::filesystem::path& edges,
                         const std::filesystem::path& word_map, const Vocab& vocab) {
  std::ifstream map_in(word_map);
  if (!map_in) throw InputError("cannot read lexicon word map: " + word_map.string());
  std::vector<std::optional<std::size_t>> to_vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(map_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with('#')) continue;
    auto tab = line.find('\t');
    std::size_t index = 0;
    if (tab == std::string::npos || !parse_number(line.substr(tab + 1), index))
      throw ParseError("expected word<TAB>index", line_no);
    if (index >= to_vocab.size()) to_vocab.resize(index + 1);
    to_vocab[index] = vocab.find(line.substr(0, tab));
  }

  WeightedGraph raw = load_edge_list(edges);
  LexiconLoad result;
  std::vector<EdgeTriple> resolved;
  for (const auto& e : raw.edges()) {
    auto a = e.u < to_vocab.size() ? to_vocab[e.u] : std::nullopt;
    auto b = e.v < to_vocab.size() ? to_vocab[e.v] : std::nullopt;
    if (!a || !b || *a == *b) {
      ++result.skipped_edges;
      continue;
    }
    resolved.push_back({*a, *b, 1.0});
  }
  result.graph = WeightedGraph::from_edges(vocab.size(), resolved);
  return result;
}

}  // namespace dis2vec
