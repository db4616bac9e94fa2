#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dis2vec {

enum class Averaging { kMacro, kMicro };

struct ClassificationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double kappa = 0.0;
};

// Classes are the union of gold and predicted labels. A class with no
// predictions (or no gold items) contributes 0 precision (or recall).
ClassificationMetrics classification_metrics(std::span<const int> gold,
                                             std::span<const int> predicted,
                                             Averaging averaging = Averaging::kMacro);

// (p_o - p_e) / (1 - p_e). When p_e = 1 the value is 1 if p_o = 1,
// otherwise UndefinedMetricError.
double cohen_kappa(std::span<const int> gold, std::span<const int> predicted);

struct ClusteringMetrics {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double ami = 0.0;      // clipped at 0
  double ami_raw = 0.0;  // before clipping
  double mutual_information = 0.0;
  double expected_mutual_information = 0.0;
};

// AMI uses the arithmetic mean of the two entropies and the exact expected
// mutual information under the hypergeometric model. Natural logarithms.
ClusteringMetrics clustering_metrics(std::span<const int> classes,
                                     std::span<const int> clusters);

// Bundled English stopword list.
const std::set<std::string>& default_stopwords();

// Clipped unigram recall of the stopword-filtered candidate (truncated to
// word_limit words) averaged over stopword-filtered references. References
// that become empty are skipped.
double rouge_1(const std::vector<std::string>& candidate,
               const std::vector<std::vector<std::string>>& references, std::size_t word_limit,
               const std::set<std::string>& stopwords);

// Integer codes for string labels in first-seen order.
std::vector<int> encode_labels(const std::vector<std::string>& labels,
                               std::map<std::string, int>* dictionary = nullptr);

using MetricMap = std::map<std::string, double>;

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

// Mean and deviation per metric across repeated runs.
std::map<std::string, MetricSummary> summarize_runs(const std::vector<MetricMap>& runs);

// variant -> metric -> value, plus run metadata.
struct MetricsReport {
  std::map<std::string, MetricMap> variants;
  std::map<std::string, std::string> metadata;

  // "variant<TAB>metric<TAB>value" lines.
  std::string to_tsv() const;
  // One {"variant","metric","value"} object per line.
  std::string to_jsonl() const;
};

}  // namespace dis2vec
