// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dis2vec/graph.hpp"
#include "dis2vec/vector_table.hpp"

namespace oracle {

using Vec = std::vector<double>;

// Central difference of f at x along every coordinate.
inline Vec numeric_gradient(const std::function<double(const Vec&)>& f, Vec x, double h = 1e-5) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||), with a floor so exact zeros compare cleanly.
inline double relative_error(const Vec& a, const Vec& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-8});
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vec v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

// Dense power iteration with uniform teleport and uniform dangling mass.
inline Vec dense_pagerank(const Eigen::MatrixXd& w, double d, int iterations = 5000) {
  const Eigen::Index n = w.rows();
  Eigen::VectorXd out = w.rowwise().sum();
  Eigen::VectorXd r = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Constant(n, (1 - d) / n);
    for (Eigen::Index u = 0; u < n; ++u) {
      if (out(u) == 0) {
        next.array() += d * r(u) / n;
      } else {
        next += d * r(u) * w.row(u).transpose() / out(u);
      }
    }
    if ((next - r).lpNorm<1>() < 1e-15) {
      r = next;
      break;
    }
    r = next;
  }
  return Vec(r.data(), r.data() + n);
}

// Stationarity of sum_v a_v|x_v - p_v|^2 + sum_{u<v} c_uv|x_u - x_v|^2 with
// c_uv = (b_u + b_v)/2 * W_uv, solved densely per coordinate.
inline dis2vec::VectorTable dense_retrofit(const dis2vec::VectorTable& prior,
                                           const dis2vec::WeightedGraph& g, const Vec& alpha,
                                           const Vec& beta, bool weighted) {
  const std::size_t n = prior.rows(), d = prior.dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t v = 0; v < n; ++v) a(v, v) += alpha[v];
  for (const auto& e : g.edges()) {
    const double c = 0.5 * (beta[e.u] + beta[e.v]) * (weighted ? e.weight : 1.0);
    a(e.u, e.u) += c;
    a(e.v, e.v) += c;
    a(e.u, e.v) -= c;
    a(e.v, e.u) -= c;
  }
  dis2vec::VectorTable out(n, d);
  for (std::size_t k = 0; k < d; ++k) {
    Eigen::VectorXd rhs(n);
    for (std::size_t v = 0; v < n; ++v) rhs(v) = alpha[v] * prior.row(v)[k];
    Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    for (std::size_t v = 0; v < n; ++v) out.row(v)[k] = x(v);
  }
  return out;
}

// ---- clustering scores from first principles ----

struct Scores {
  double h = 0, c = 0, v = 0, ami = 0, mi = 0, emi = 0;
};

inline double entropy_of(const std::vector<int>& labels) {
  std::map<int, double> count;
  for (int l : labels) count[l] += 1;
  double h = 0, n = static_cast<double>(labels.size());
  for (auto& [l, c] : count) h -= c / n * std::log(c / n);
  return h;
}

// H(A | B) straight from the joint counts.
inline double conditional_entropy(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> nb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    nb[b[i]] += 1;
  }
  double h = 0, n = static_cast<double>(a.size());
  for (auto& [key, c] : joint) h -= c / n * std::log(c / nb[key.second]);
  return h;
}

inline double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  return entropy_of(a) - conditional_entropy(a, b);
}

// E[MI] by averaging over every permutation of the second labeling, cached
// per pair of sorted marginals.
inline double permutation_emi(const std::vector<int>& a, const std::vector<int>& b) {
  auto marginal = [](const std::vector<int>& x) {
    std::map<int, int> c;
    for (int l : x) ++c[l];
    std::vector<int> m;
    for (auto& [l, k] : c) m.push_back(k);
    std::sort(m.begin(), m.end());
    return m;
  };
  static std::map<std::pair<std::vector<int>, std::vector<int>>, double> cache;
  const auto key = std::make_pair(marginal(a), marginal(b));
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<int> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0;
  std::size_t count = 0;
  std::vector<int> shuffled(b.size());
  do {
    for (std::size_t i = 0; i < b.size(); ++i) shuffled[i] = b[perm[i]];
    total += mutual_information(a, shuffled);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cache[key] = total / static_cast<double>(count);
}

inline Scores clustering(const std::vector<int>& classes, const std::vector<int>& clusters) {
  Scores s;
  const double hc = entropy_of(classes), hk = entropy_of(clusters);
  s.h = hc == 0 ? 1.0 : 1.0 - conditional_entropy(classes, clusters) / hc;
  s.c = hk == 0 ? 1.0 : 1.0 - conditional_entropy(clusters, classes) / hk;
  s.v = s.h + s.c == 0 ? 0.0 : 2 * s.h * s.c / (s.h + s.c);
  s.mi = mutual_information(classes, clusters);
  s.emi = permutation_emi(classes, clusters);
  const double mean = 0.5 * (hc + hk);
  if (std::abs(mean - s.emi) < 1e-12) {
    s.ami = std::abs(mean - s.mi) < 1e-12 ? 1.0 : 0.0;
  } else {
    s.ami = std::max(0.0, std::min(1.0, (s.mi - s.emi) / (mean - s.emi)));
  }
  return s;
}

// Every labeling of n items with labels 0..k-1.
inline std::vector<std::vector<int>> all_labelings(std::size_t n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = 0;
    while (i < n && ++cur[i] == k) cur[i++] = 0;
    if (i == n) break;
  }
  return out;
}

}  // namespace oracle
