#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/vector_table.hpp"

namespace dis2vec {

// Seeded shuffle of 0..n-1 split into (first, second) with
// round(fraction * n) items in the second part.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double second_fraction, std::uint64_t seed);

struct LogisticConfig {
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::size_t iterations = 300;
};

// Multinomial logistic regression with L2, full-batch gradient descent.
class LogisticRegression {
 public:
  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
           const LogisticConfig& cfg = {});
  int predict(const std::vector<double>& x) const;
  std::vector<int> predict(const std::vector<std::vector<double>>& x) const;

 private:
  std::vector<int> classes_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;  // classes x (dim + 1), bias last
  std::vector<double> mean_, scale_;
};

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
};

// Lloyd's algorithm with k-means++ seeding; best of `restarts` by inertia.
KMeansResult kmeans(const std::vector<std::vector<double>>& x, std::size_t k,
                    std::size_t restarts, std::uint64_t seed, std::size_t max_iterations = 100);

std::vector<std::vector<double>> rows_of(const VectorTable& table,
                                         const std::vector<std::size_t>& ids);

}  // namespace dis2vec
