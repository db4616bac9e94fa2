#include "dis2vec/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dis2vec/error.hpp"
#include "dis2vec/random.hpp"

namespace dis2vec {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double second_fraction, std::uint64_t seed) {
  if (!(second_fraction >= 0.0 && second_fraction <= 1.0)) {
    throw ArgumentError("split fraction must lie in [0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  const auto second = static_cast<std::size_t>(std::llround(second_fraction * n));
  std::vector<std::size_t> a(order.begin(), order.end() - second);
  std::vector<std::size_t> b(order.end() - second, order.end());
  return {a, b};
}

void LogisticRegression::fit(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& y, const LogisticConfig& cfg) {
  if (x.empty() || x.size() != y.size()) throw ArgumentError("classifier needs one label per row");
  dim_ = x.front().size();
  for (const auto& row : x) {
    if (row.size() != dim_) throw ArgumentError("rows differ in dimension");
  }
  classes_ = y;
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  const std::size_t k = classes_.size();
  const std::size_t n = x.size();
  const std::size_t stride = dim_ + 1;

  mean_.assign(dim_, 0.0);
  scale_.assign(dim_, 0.0);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < dim_; ++j) mean_[j] += row[j];
  }
  for (auto& m : mean_) m /= static_cast<double>(n);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < dim_; ++j) scale_[j] += (row[j] - mean_[j]) * (row[j] - mean_[j]);
  }
  for (auto& s : scale_) {
    s = std::sqrt(s / static_cast<double>(n));
    s = s > 1e-12 ? 1.0 / s : 1.0;
  }

  std::vector<double> z(n * stride);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) z[i * stride + j] = (x[i][j] - mean_[j]) * scale_[j];
    z[i * stride + dim_] = 1.0;
  }
  std::vector<std::size_t> yi(n);
  for (std::size_t i = 0; i < n; ++i) {
    yi[i] = static_cast<std::size_t>(std::lower_bound(classes_.begin(), classes_.end(), y[i]) -
                                     classes_.begin());
  }

  weights_.assign(k * stride, 0.0);
  if (k < 2) return;
  std::vector<double> grad(k * stride), p(k);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* zi = &z[i * stride];
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < stride; ++j) s += weights_[c * stride + j] * zi[j];
        p[c] = s;
        mx = std::max(mx, s);
      }
      double total = 0.0;
      for (auto& v : p) total += (v = std::exp(v - mx));
      for (std::size_t c = 0; c < k; ++c) {
        const double g = p[c] / total - (c == yi[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < stride; ++j) grad[c * stride + j] += g * zi[j];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < stride; ++j) {
        double& w = weights_[c * stride + j];
        double g = grad[c * stride + j] / static_cast<double>(n);
        if (j < dim_) g += cfg.l2 * w;  // bias is not penalized
        w -= cfg.learning_rate * g;
      }
    }
  }
}

int LogisticRegression::predict(const std::vector<double>& x) const {
  if (classes_.empty()) throw ArgumentError("classifier is not fitted");
  if (x.size() != dim_) throw ArgumentError("row dimension does not match the classifier");
  const std::size_t stride = dim_ + 1;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    double s = weights_[c * stride + dim_];
    for (std::size_t j = 0; j < dim_; ++j) s += weights_[c * stride + j] * (x[j] - mean_[j]) * scale_[j];
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return classes_[best];
}

std::vector<int> LogisticRegression::predict(const std::vector<std::vector<double>>& x) const {
  std::vector<int> out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(predict(row));
  return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const double* b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

KMeansResult kmeans_once(const std::vector<std::vector<double>>& x, std::size_t k, Rng& rng,
                         std::size_t max_iterations) {
  const std::size_t n = x.size(), d = x.front().size();
  std::vector<double> centers(k * d);
  std::vector<double> closest(n, std::numeric_limits<double>::infinity());

  // k-means++ seeding
  std::size_t first = uniform_index(rng, n);
  std::copy(x[first].begin(), x[first].end(), centers.begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], sq_dist(x[i], &centers[(c - 1) * d]));
      total += closest[i];
    }
    std::size_t pick = uniform_index(rng, n);
    if (total > 0) {
      double r = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        r -= closest[i];
        if (r <= 0 && closest[i] > 0) {
          pick = i;
          break;
        }
      }
    }
    std::copy(x[pick].begin(), x[pick].end(), centers.begin() + c * d);
  }

  KMeansResult res;
  res.assignment.assign(n, -1);
  std::vector<double> sums(k * d);
  std::vector<std::size_t> sizes(k);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double dd = sq_dist(x[i], &centers[c * d]);
        if (dd < bd) {
          bd = dd;
          best = static_cast<int>(c);
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(res.assignment[i]);
      ++sizes[c];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += x[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its old center
      for (std::size_t j = 0; j < d; ++j) centers[c * d + j] = sums[c * d + j] / sizes[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    res.inertia += sq_dist(x[i], &centers[static_cast<std::size_t>(res.assignment[i]) * d]);
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& x, std::size_t k,
                    std::size_t restarts, std::uint64_t seed, std::size_t max_iterations) {
  if (x.empty()) throw ArgumentError("k-means on an empty set");
  if (k == 0 || k > x.size()) throw ArgumentError("k must lie in [1, number of points]");
  for (const auto& row : x) {
    if (row.size() != x.front().size()) throw ArgumentError("rows differ in dimension");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    Rng rng(derive_seed(seed, r, 0x6b));
    KMeansResult cur = kmeans_once(x, k, rng, max_iterations);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

std::vector<std::vector<double>> rows_of(const VectorTable& table,
                                         const std::vector<std::size_t>& ids) {
  std::vector<std::vector<double>> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    if (id >= table.rows()) throw ArgumentError("row " + std::to_string(id) + " is out of range");
    auto r = table.row(id);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

}  // namespace dis2vec
