#include "dis2vec/retrofit.hpp"

#include <algorithm>
#include <cmath>

namespace dis2vec {

namespace {

class Strengths {
 public:
  Strengths(const std::vector<double>& values, std::size_t n, const char* name)
      : values_(values) {
    if (values.size() != 1 && values.size() != n)
      throw ArgumentError(std::string(name) + " needs one value or one per node");
    for (double v : values) {
      if (!(v >= 0.0)) throw ArgumentError(std::string(name) + " must be non-negative");
    }
  }
  double operator[](std::size_t v) const { return values_.size() == 1 ? values_[0] : values_[v]; }

 private:
  const std::vector<double>& values_;
};

void check_shapes(const VectorTable& prior, const WeightedGraph& graph) {
  if (prior.rows() < graph.node_count()) throw ArgumentError("every graph node needs a prior vector");
}

double edge_weight(const Neighbor& nb, bool weighted) { return weighted ? nb.weight : 1.0; }

}  // namespace

double retrofit_objective(const VectorTable& phi, const VectorTable& prior,
                          const WeightedGraph& graph, const RetrofitConfig& cfg) {
  const std::size_t n = graph.node_count();
  check_shapes(prior, graph);
  if (phi.rows() != prior.rows() || phi.dim() != prior.dim())
    throw ArgumentError("retrofit objective: table shapes differ");
  Strengths alpha(cfg.alpha, n, "alpha"), beta(cfg.beta, n, "beta");
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    auto a = phi.row(v), b = prior.row(v);
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    total += alpha[v] * d2;
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& nb : graph.neighbors(u)) {
      if (nb.id <= u) continue;
      auto a = phi.row(u), b = phi.row(nb.id);
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      total += 0.5 * (beta[u] + beta[nb.id]) * edge_weight(nb, cfg.weighted) * d2;
    }
  }
  return total;
}

RetrofitResult retrofit_jacobi(const VectorTable& prior, const WeightedGraph& graph,
                               const RetrofitConfig& cfg) {
  const std::size_t n = graph.node_count();
  check_shapes(prior, graph);
  Strengths alpha(cfg.alpha, n, "alpha"), beta(cfg.beta, n, "beta");
  const std::size_t dim = prior.dim();

  RetrofitResult result;
  result.vectors = prior;
  std::vector<char> frozen(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    double incident = 0.0;
    for (const auto& nb : graph.neighbors(v))
      incident += 0.5 * (beta[v] + beta[nb.id]) * edge_weight(nb, cfg.weighted);
    if (incident == 0.0) {
      frozen[v] = 1;
      if (alpha[v] == 0.0)
        result.warnings.push_back("node " + std::to_string(v) +
                                  " has alpha 0 and no incident weight; left at its prior");
    }
  }
  if (cfg.track_objective)
    result.objective.push_back(retrofit_objective(result.vectors, prior, graph, cfg));

  VectorTable next = result.vectors;
  std::vector<double> acc(dim);
  for (std::size_t sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    double max_change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (frozen[v]) continue;
      auto p = prior.row(v);
      double denom = alpha[v];
      for (std::size_t k = 0; k < dim; ++k) acc[k] = alpha[v] * p[k];
      for (const auto& nb : graph.neighbors(v)) {
        double c = 0.5 * (beta[v] + beta[nb.id]) * edge_weight(nb, cfg.weighted);
        auto u = result.vectors.row(nb.id);
        for (std::size_t k = 0; k < dim; ++k) acc[k] += c * u[k];
        denom += c;
      }
      auto out = next.row(v);
      auto old = result.vectors.row(v);
      for (std::size_t k = 0; k < dim; ++k) {
        out[k] = acc[k] / denom;
        max_change = std::max(max_change, std::abs(out[k] - old[k]));
      }
    }
    std::swap(result.vectors, next);
    // Frozen rows are identical in both buffers.
    ++result.sweeps;
    if (cfg.track_objective)
      result.objective.push_back(retrofit_objective(result.vectors, prior, graph, cfg));
    if (max_change < cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

RetrofitResult retrofit_rw_view(const VectorTable& prior, const WeightedGraph& graph,
                                const RetrofitConfig& cfg) {
  const std::size_t n = graph.node_count();
  check_shapes(prior, graph);
  Strengths alpha(cfg.alpha, n, "alpha"), beta(cfg.beta, n, "beta");
  for (std::size_t v = 0; v < n; ++v) {
    if (std::abs(alpha[v] + beta[v] - 1.0) > 1e-9)
      throw ArgumentError("random-walk retrofit needs alpha + beta = 1 at node " + std::to_string(v));
  }
  const std::size_t dim = prior.dim();
  RetrofitResult result;
  result.vectors = prior;
  std::vector<double> acc(dim);
  for (std::size_t sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    double max_change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double total = 0.0;
      for (const auto& nb : graph.neighbors(v)) total += edge_weight(nb, cfg.weighted);
      if (total == 0.0) continue;
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const auto& nb : graph.neighbors(v)) {
        double p = edge_weight(nb, cfg.weighted) / total;
        auto u = result.vectors.row(nb.id);
        for (std::size_t k = 0; k < dim; ++k) acc[k] += p * u[k];
      }
      auto cur = result.vectors.row(v);
      auto pr = prior.row(v);
      for (std::size_t k = 0; k < dim; ++k) {
        double value = alpha[v] * pr[k] + beta[v] * acc[k];
        max_change = std::max(max_change, std::abs(value - cur[k]));
        cur[k] = value;
      }
    }
    ++result.sweeps;
    if (max_change < cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

N2vRetrofitGradient n2v_retrofit_instance(std::span<const double> input,
                                          std::span<const double> prior,
                                          std::span<const double> target,
                                          const std::vector<std::vector<double>>& noise,
                                          double alpha, double beta, std::size_t instances) {
  if (prior.size() != input.size()) throw ArgumentError("prior dimension mismatch");
  if (instances == 0) throw ArgumentError("instance count must be positive");
  LossGradient ns = neg_sampling_loss(input, target, noise);
  N2vRetrofitGradient out;
  const double share = beta / static_cast<double>(instances);
  out.loss = alpha * ns.loss;
  out.d_input.resize(input.size());
  for (std::size_t k = 0; k < input.size(); ++k) {
    double diff = input[k] - prior[k];
    out.loss += share * diff * diff;
    out.d_input[k] = alpha * ns.d_input[k] + 2.0 * share * diff;
  }
  out.d_target = ns.d_target;
  for (double& g : out.d_target) g *= alpha;
  out.d_noise = ns.d_noise;
  for (auto& v : out.d_noise) {
    for (double& g : v) g *= alpha;
  }
  return out;
}

namespace {

class N2vRetrofitStream : public SkipGramStream {
 public:
  N2vRetrofitStream(std::vector<Walk> walks, std::size_t n, const TrainConfig& cfg,
                    const WalkConfig& walk_cfg, EmbeddingTable& table, const VectorTable& prior,
                    const std::vector<double>& alpha, const std::vector<double>& beta)
      : SkipGramStream(std::move(walks), n, cfg, walk_cfg, table),
        prior_(prior),
        alpha_(alpha, n, "alpha"),
        beta_(beta, n, "beta") {}

  double gradient(std::size_t instance, double lr, Rng& rng,
                  SparseGradient& grad) const override {
    auto [center, context] = pair_at(instance);
    const std::size_t first = grad.size();
    double loss = pair_gradient(center, context, rng, grad);
    const double a = alpha_[center];
    if (a != 1.0) {
      loss *= a;
      for (std::size_t s = first; s < grad.size(); ++s) {
        for (double& g : grad.values(s)) g *= a;
      }
    }
    const double b = beta_[center];
    if (b == 0.0) return loss;
    const double share = b / static_cast<double>(instances_of(center));
    const double scale = pull_scale(lr, 2.0 * share);
    auto phi = table_.input.row(center);
    auto prior = prior_.row(center);
    auto g = grad.values(first);  // the center's input slot
    for (std::size_t k = 0; k < phi.size(); ++k) {
      double diff = phi[k] - prior[k];
      loss += share * diff * diff;
      g[k] += 2.0 * share * scale * diff;
    }
    return loss;
  }

 private:
  const VectorTable& prior_;
  Strengths alpha_, beta_;
};

}  // namespace

EmbeddingTable retrofit_n2v(const VectorTable& prior, const WeightedGraph& graph,
                            const WalkConfig& walk_cfg, const std::vector<double>& alpha,
                            const std::vector<double>& beta, const TrainConfig& cfg,
                            SgdReport* report) {
  const std::size_t n = graph.node_count();
  if (prior.rows() != n) throw ArgumentError("prior must cover every graph node");
  TrainConfig run = cfg;
  run.dim = prior.dim();
  EmbeddingTable table;
  table.input = prior;
  table.input.set_ids({});
  table.output = VectorTable(n, run.dim);
  TransitionTable transitions(graph, walk_cfg);
  auto walks = sample_walks(transitions, walk_cfg, derive_seed(cfg.seed, 0x3a1), cfg.workers);
  N2vRetrofitStream stream(std::move(walks), n, run, walk_cfg, table, prior, alpha, beta);
  SgdReport r = sgd_run(stream, run);
  if (report) *report = std::move(r);
  return table;
}

}  // namespace dis2vec
