#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dis2vec/embedding.hpp"
#include "dis2vec/graph.hpp"
#include "dis2vec/node2vec.hpp"

namespace dis2vec {

// Per-node strengths: a single value broadcasts to every node.
struct RetrofitConfig {
  std::vector<double> alpha{1.0};
  std::vector<double> beta{1.0};
  std::size_t max_iterations = 20;
  double convergence_tol = 1e-4;
  bool weighted = true;  // false: every existing edge has weight 1
  bool track_objective = false;
};

struct RetrofitResult {
  VectorTable vectors;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<double> objective;  // before the first sweep and after each one
  std::vector<std::string> warnings;
};

// Quadratic retrofitting objective
//   sum_v alpha_v |phi(v) - prior(v)|^2
//     + sum_{u,v} b_uv W_uv |phi(u) - phi(v)|^2,
// with each undirected edge counted once and b_uv = (beta_u + beta_v) / 2.
double retrofit_objective(const VectorTable& phi, const VectorTable& prior,
                          const WeightedGraph& graph, const RetrofitConfig& cfg);

// Jacobi iteration on the objective's stationarity conditions:
//   phi(v) <- (alpha_v prior(v) + sum_u b_uv W_uv phi(u))
//             / (alpha_v + sum_u b_uv W_uv).
// Each sweep reads the previous iterate only. Stops when the largest
// coordinate change drops below convergence_tol or after max_iterations.
RetrofitResult retrofit_jacobi(const VectorTable& prior, const WeightedGraph& graph,
                               const RetrofitConfig& cfg);

// Random-walk form: phi(v) <- alpha_v prior(v) + beta_v sum_u P(v->u) phi(u)
// with P proportional to W. Requires alpha_v + beta_v = 1. Nodes are updated
// in place in id order; isolated nodes keep their prior.
RetrofitResult retrofit_rw_view(const VectorTable& prior, const WeightedGraph& graph,
                                const RetrofitConfig& cfg);

struct N2vRetrofitGradient {
  double loss = 0.0;
  std::vector<double> d_input;
  std::vector<double> d_target;
  std::vector<std::vector<double>> d_noise;
};

// Loss of one (v, context) instance of the walk-based retrofit:
//   alpha_v * NS(phi(v); context, noise) + (beta_v / n_v) |phi(v) - prior(v)|^2
// where n_v is the number of instances centered at v per epoch.
N2vRetrofitGradient n2v_retrofit_instance(std::span<const double> input,
                                          std::span<const double> prior,
                                          std::span<const double> target,
                                          const std::vector<std::vector<double>>& noise,
                                          double alpha, double beta, std::size_t instances);

// Skip-gram over node2vec walks starting from the prior, with every
// instance also pulling phi(v) toward prior(v). With beta = 0 and alpha = 1
// this is exactly train_node2vec warm-started from the prior.
EmbeddingTable retrofit_n2v(const VectorTable& prior, const WeightedGraph& graph,
                            const WalkConfig& walk_cfg, const std::vector<double>& alpha,
                            const std::vector<double>& beta, const TrainConfig& cfg,
                            SgdReport* report = nullptr);

// Step-size guard for quadratic pull terms: scale applied to a pull with
// total coefficient `coeff` so that lr * coeff * scale never exceeds 1/2.
inline double pull_scale(double lr, double coeff) {
  double step = lr * coeff;
  return step > 0.5 ? 0.5 / step : 1.0;
}

}  // namespace dis2vec
