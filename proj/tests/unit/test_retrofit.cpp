#include <doctest.h>

#include <numeric>
#include <random>

#include "../oracles.hpp"
#include "dis2vec/error.hpp"
#include "dis2vec/retrofit.hpp"

using namespace dis2vec;
using oracle::Vec;

namespace {

VectorTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  VectorTable t(n, d);
  std::normal_distribution<double> g(0, 1);
  for (auto& x : t.values()) x = g(rng);
  return t;
}

WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<EdgeTriple> e;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (u(rng) < p) e.push_back({a, b, 0.1 + u(rng)});
  return WeightedGraph::from_edges(n, e);
}

double max_abs_diff(const VectorTable& a, const VectorTable& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("two-node analytic fixpoint") {
  VectorTable prior(2, 2);
  prior.values() = {1, 0, 0, 1};
  WeightedGraph g = WeightedGraph::from_edges(2, std::vector<EdgeTriple>{{0, 1, 1}});
  RetrofitConfig cfg;
  cfg.max_iterations = 200;
  cfg.convergence_tol = 1e-12;
  RetrofitResult r = retrofit_jacobi(prior, g, cfg);
  CHECK(r.converged);
  const std::vector<double> expect{2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.vectors.values()[i] - expect[i]) < 1e-6);
}

TEST_CASE("isolated node keeps its prior exactly") {
  std::mt19937_64 rng(1);
  VectorTable prior = random_table(rng, 3, 4);
  WeightedGraph g = WeightedGraph::from_edges(3, std::vector<EdgeTriple>{{0, 1, 0.7}});
  RetrofitResult r = retrofit_jacobi(prior, g, RetrofitConfig{});
  for (std::size_t k = 0; k < 4; ++k) CHECK(r.vectors.row(2)[k] == prior.row(2)[k]);
}

TEST_CASE("zero alpha on an isolated node warns and keeps the prior") {
  VectorTable prior(2, 1);
  prior.values() = {3, 4};
  WeightedGraph g = WeightedGraph::from_edges(2, std::vector<EdgeTriple>{});
  RetrofitConfig cfg;
  cfg.alpha = {0.0};
  RetrofitResult r = retrofit_jacobi(prior, g, cfg);
  CHECK(r.vectors == prior);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("objective examples") {
  VectorTable prior(1, 2), phi(1, 2);
  phi.values() = {1, 1};
  WeightedGraph g = WeightedGraph::from_edges(1, std::vector<EdgeTriple>{});
  RetrofitConfig cfg;
  cfg.alpha = {2.0};
  CHECK(retrofit_objective(phi, prior, g, cfg) == doctest::Approx(4.0));
  CHECK(retrofit_objective(prior, prior, g, cfg) == 0.0);

  VectorTable same(3, 2);
  same.values() = {1, 2, 1, 2, 1, 2};
  WeightedGraph tri = WeightedGraph::from_edges(3, std::vector<EdgeTriple>{{0, 1, 1}, {1, 2, 1}});
  CHECK(retrofit_objective(same, same, tri, RetrofitConfig{}) == 0.0);
}

TEST_CASE("Jacobi matches a dense solve and never raises the objective") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 10, d = 1 + rng() % 4;
    VectorTable prior = random_table(rng, n, d);
    WeightedGraph g = random_graph(rng, n, 0.4);
    RetrofitConfig cfg;
    cfg.alpha.assign(n, 0);
    cfg.beta.assign(n, 0);
    for (auto& a : cfg.alpha) a = u(rng);
    for (auto& b : cfg.beta) b = u(rng);
    cfg.weighted = trial % 2 == 0;
    cfg.max_iterations = 5000;
    cfg.convergence_tol = 1e-13;
    cfg.track_objective = true;
    RetrofitResult r = retrofit_jacobi(prior, g, cfg);
    VectorTable dense = oracle::dense_retrofit(prior, g, cfg.alpha, cfg.beta, cfg.weighted);
    CHECK(max_abs_diff(r.vectors, dense) < 1e-6);
    for (std::size_t s = 1; s < r.objective.size(); ++s) CHECK(r.objective[s] <= r.objective[s - 1] + 1e-12);
    CHECK(retrofit_objective(r.vectors, prior, g, cfg) <= retrofit_objective(prior, prior, g, cfg) + 1e-12);
  }
}

TEST_CASE("zero beta returns the priors") {
  std::mt19937_64 rng(5);
  VectorTable prior = random_table(rng, 6, 3);
  WeightedGraph g = random_graph(rng, 6, 0.6);
  RetrofitConfig cfg;
  cfg.beta = {0.0};
  CHECK(retrofit_jacobi(prior, g, cfg).vectors == prior);
  cfg.alpha = {1.0};
  CHECK(retrofit_rw_view(prior, g, cfg).vectors == prior);
}

TEST_CASE("relabeling nodes permutes the result") {
  std::mt19937_64 rng(8);
  const std::size_t n = 7;
  VectorTable prior = random_table(rng, n, 3);
  WeightedGraph g = random_graph(rng, n, 0.5);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  VectorTable pprior(n, 3);
  for (std::size_t v = 0; v < n; ++v)
    std::copy(prior.row(v).begin(), prior.row(v).end(), pprior.row(perm[v]).begin());
  std::vector<EdgeTriple> pe;
  for (const auto& e : g.edges()) pe.push_back({perm[e.u], perm[e.v], e.weight});
  WeightedGraph pg = WeightedGraph::from_edges(n, pe);
  RetrofitResult a = retrofit_jacobi(prior, g, RetrofitConfig{});
  RetrofitResult b = retrofit_jacobi(pprior, pg, RetrofitConfig{});
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < 3; ++k) CHECK(b.vectors.row(perm[v])[k] == doctest::Approx(a.vectors.row(v)[k]));
}

TEST_CASE("random-walk view") {
  VectorTable prior(2, 2);
  prior.values() = {1, 0, 0, 1};
  WeightedGraph pair = WeightedGraph::from_edges(2, std::vector<EdgeTriple>{{0, 1, 1}});
  RetrofitConfig cfg;
  cfg.alpha = {0.0};
  cfg.beta = {1.0};
  cfg.max_iterations = 100;
  RetrofitResult r = retrofit_rw_view(prior, pair, cfg);
  for (std::size_t k = 0; k < 2; ++k) CHECK(r.vectors.row(0)[k] == doctest::Approx(r.vectors.row(1)[k]));

  // Three-node path, alpha = beta = 1/2, against (I - B P) x = A p.
  VectorTable p3(3, 2);
  p3.values() = {1, 0, 0, 1, -1, 2};
  WeightedGraph path = WeightedGraph::from_edges(3, std::vector<EdgeTriple>{{0, 1, 1}, {1, 2, 2}});
  cfg.alpha = {0.5};
  cfg.beta = {0.5};
  cfg.max_iterations = 500;
  cfg.convergence_tol = 1e-14;
  RetrofitResult rw = retrofit_rw_view(p3, path, cfg);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1;
  w(1, 2) = w(2, 1) = 2;
  for (int v = 0; v < 3; ++v) m.row(v) -= 0.5 * w.row(v) / w.row(v).sum();
  for (std::size_t k = 0; k < 2; ++k) {
    Eigen::VectorXd rhs(3);
    for (int v = 0; v < 3; ++v) rhs(v) = 0.5 * p3.row(v)[k];
    Eigen::VectorXd x = m.fullPivLu().solve(rhs);
    for (int v = 0; v < 3; ++v) CHECK(std::abs(rw.vectors.row(v)[k] - x(v)) < 1e-6);
  }

  cfg.alpha = {0.7};
  CHECK_THROWS_AS(retrofit_rw_view(p3, path, cfg), ArgumentError);
}

TEST_CASE("walk-based retrofit instance gradient matches central differences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t d = 1 + rng() % 5, m = 1 + rng() % 4, count = 1 + rng() % 6;
    Vec in = oracle::random_vec(rng, d), prior = oracle::random_vec(rng, d), t = oracle::random_vec(rng, d);
    std::vector<Vec> noise;
    for (std::size_t j = 0; j < m; ++j) noise.push_back(oracle::random_vec(rng, d));
    const double a = u(rng), b = u(rng);
    auto loss = [&](const Vec& x, const Vec& y, const std::vector<Vec>& ns) {
      return n2v_retrofit_instance(x, prior, y, ns, a, b, count).loss;
    };
    N2vRetrofitGradient g = n2v_retrofit_instance(in, prior, t, noise, a, b, count);
    CHECK(oracle::relative_error(g.d_input, oracle::numeric_gradient([&](const Vec& x) { return loss(x, t, noise); }, in)) <
          1e-4);
    CHECK(oracle::relative_error(g.d_target, oracle::numeric_gradient([&](const Vec& y) { return loss(in, y, noise); }, t)) <
          1e-4);
    for (std::size_t j = 0; j < m; ++j) {
      auto f = [&](const Vec& x) {
        auto ns = noise;
        ns[j] = x;
        return loss(in, t, ns);
      };
      CHECK(oracle::relative_error(g.d_noise[j], oracle::numeric_gradient(f, noise[j])) < 1e-4);
    }
  }
}

TEST_CASE("walk-based retrofit term removal") {
  std::mt19937_64 rng(77);
  WeightedGraph g = random_graph(rng, 8, 0.5);
  VectorTable prior = random_table(rng, 8, 4);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 19;
  cfg.learning_rate = 0.05;
  WalkConfig wc;
  wc.walk_length = 8;
  wc.walks_per_node = 3;
  wc.window = 2;

  EmbeddingTable warm = train_node2vec(g, wc, cfg, prior);
  EmbeddingTable beta0 = retrofit_n2v(prior, g, wc, {1.0}, {0.0}, cfg);
  CHECK(beta0.input == warm.input);

  // Only the prior pull left, and training starts at the prior.
  EmbeddingTable pull = retrofit_n2v(prior, g, wc, {0.0}, {1.0}, cfg);
  CHECK(max_abs_diff(pull.input, prior) < 1e-12);
}
