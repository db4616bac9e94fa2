#include "dis2vec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "dis2vec/error.hpp"

namespace dis2vec {
namespace {

void check_pairs(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ArgumentError("label sequences differ in length");
  if (a.empty()) throw ArgumentError("no labels to score");
}

// Remaps arbitrary integer labels to 0..k-1 in first-seen order.
std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& k) {
  std::unordered_map<int, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, ids.size()).first->second);
  k = ids.size();
  return out;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

// E[MI] under the hypergeometric model with the observed marginals fixed.
double expected_mutual_information(const std::vector<double>& a, const std::vector<double>& b,
                                   double n) {
  const double lg_n = std::lgamma(n + 1);
  double emi = 0.0;
  for (double ai : a) {
    for (double bj : b) {
      const double lo = std::max(1.0, ai + bj - n);
      const double hi = std::min(ai, bj);
      const double base = std::lgamma(ai + 1) + std::lgamma(bj + 1) + std::lgamma(n - ai + 1) +
                          std::lgamma(n - bj + 1) - lg_n;
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double log_p = base - std::lgamma(nij + 1) - std::lgamma(ai - nij + 1) -
                             std::lgamma(bj - nij + 1) - std::lgamma(n - ai - bj + nij + 1);
        emi += (nij / n) * std::log(n * nij / (ai * bj)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

}  // namespace

double cohen_kappa(std::span<const int> gold, std::span<const int> predicted) {
  check_pairs(gold, predicted);
  std::map<int, double> g, p;
  double agree = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    g[gold[i]] += 1;
    p[predicted[i]] += 1;
    if (gold[i] == predicted[i]) agree += 1;
  }
  const double n = static_cast<double>(gold.size());
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : g) {
    auto it = p.find(label);
    if (it != p.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) {
    if (po == 1.0) return 1.0;
    throw UndefinedMetricError("kappa is undefined when chance agreement is 1");
  }
  return (po - pe) / (1.0 - pe);
}

ClassificationMetrics classification_metrics(std::span<const int> gold,
                                             std::span<const int> predicted,
                                             Averaging averaging) {
  check_pairs(gold, predicted);
  std::map<int, double> tp, gold_count, pred_count;
  double correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    gold_count[gold[i]] += 1;
    pred_count[predicted[i]] += 1;
    tp[gold[i]];
    tp[predicted[i]];
    if (gold[i] == predicted[i]) {
      tp[gold[i]] += 1;
      correct += 1;
    }
  }
  ClassificationMetrics m;
  const double n = static_cast<double>(gold.size());
  m.accuracy = correct / n;
  if (averaging == Averaging::kMicro) {
    // Single-label: total TP over total predictions equals accuracy.
    m.precision = m.recall = m.f1 = m.accuracy;
  } else {
    for (const auto& [label, hits] : tp) {
      const double pc = pred_count.count(label) ? pred_count[label] : 0.0;
      const double gc = gold_count.count(label) ? gold_count[label] : 0.0;
      const double prec = pc > 0 ? hits / pc : 0.0;
      const double rec = gc > 0 ? hits / gc : 0.0;
      m.precision += prec;
      m.recall += rec;
      m.f1 += (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    }
    const double k = static_cast<double>(tp.size());
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
  }
  try {
    m.kappa = cohen_kappa(gold, predicted);
  } catch (const UndefinedMetricError&) {
    m.kappa = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

ClusteringMetrics clustering_metrics(std::span<const int> classes,
                                     std::span<const int> clusters) {
  check_pairs(classes, clusters);
  if (classes.size() < 2) throw UndefinedMetricError("clustering metrics need at least two items");
  std::size_t kc = 0, kk = 0;
  auto c = compact(classes, kc);
  auto k = compact(clusters, kk);
  const double n = static_cast<double>(c.size());

  std::vector<double> table(kc * kk, 0.0), a(kc, 0.0), b(kk, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    table[c[i] * kk + k[i]] += 1;
    a[c[i]] += 1;
    b[k[i]] += 1;
  }
  const double h_c = entropy(a, n);
  const double h_k = entropy(b, n);
  double mi = 0.0;
  for (std::size_t i = 0; i < kc; ++i) {
    for (std::size_t j = 0; j < kk; ++j) {
      const double nij = table[i * kk + j];
      if (nij > 0) mi += (nij / n) * std::log(n * nij / (a[i] * b[j]));
    }
  }
  mi = std::max(mi, 0.0);
  // H(C|K) = H(C) - MI and vice versa.
  const double h_c_given_k = std::max(h_c - mi, 0.0);
  const double h_k_given_c = std::max(h_k - mi, 0.0);

  ClusteringMetrics m;
  m.mutual_information = mi;
  m.homogeneity = h_c > 0 ? 1.0 - h_c_given_k / h_c : 1.0;
  m.completeness = h_k > 0 ? 1.0 - h_k_given_c / h_k : 1.0;
  const double hc = m.homogeneity + m.completeness;
  m.v_measure = hc > 0 ? 2 * m.homogeneity * m.completeness / hc : 0.0;

  m.expected_mutual_information = expected_mutual_information(a, b, n);
  // When every labeling with these marginals has the same MI the chance
  // correction is 0/0; score 1 for partitions equal up to relabeling, else 0.
  const double mean_h = 0.5 * (h_c + h_k);
  const double denom = mean_h - m.expected_mutual_information;
  if (std::abs(denom) < 1e-12) {
    m.ami_raw = std::abs(mean_h - mi) < 1e-12 ? 1.0 : 0.0;
  } else {
    m.ami_raw = (mi - m.expected_mutual_information) / denom;
  }
  m.ami = std::clamp(m.ami_raw, 0.0, 1.0);
  return m;
}

double rouge_1(const std::vector<std::string>& candidate,
               const std::vector<std::vector<std::string>>& references, std::size_t word_limit,
               const std::set<std::string>& stopwords) {
  if (references.empty()) throw ArgumentError("ROUGE needs at least one reference");
  std::map<std::string, std::size_t> cand;
  std::size_t kept = 0;
  for (const auto& w : candidate) {
    if (kept >= word_limit) break;
    if (stopwords.count(w)) continue;
    ++cand[w];
    ++kept;
  }
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& ref : references) {
    std::map<std::string, std::size_t> counts;
    std::size_t len = 0;
    for (const auto& w : ref) {
      if (stopwords.count(w)) continue;
      ++counts[w];
      ++len;
    }
    if (len == 0) continue;
    std::size_t hits = 0;
    for (const auto& [w, rc] : counts) {
      auto it = cand.find(w);
      if (it != cand.end()) hits += std::min(rc, it->second);
    }
    total += static_cast<double>(hits) / static_cast<double>(len);
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("every reference is empty after stopword removal");
  return total / static_cast<double>(used);
}

std::vector<int> encode_labels(const std::vector<std::string>& labels,
                               std::map<std::string, int>* dictionary) {
  std::map<std::string, int> local;
  auto& dict = dictionary ? *dictionary : local;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = dict.try_emplace(l, static_cast<int>(dict.size()));
    out.push_back(it->second);
  }
  return out;
}

std::map<std::string, MetricSummary> summarize_runs(const std::vector<MetricMap>& runs) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& run : runs) {
    for (const auto& [k, v] : run) values[k].push_back(v);
  }
  std::map<std::string, MetricSummary> out;
  for (const auto& [k, vs] : values) {
    double mean = 0.0;
    for (double v : vs) mean += v;
    mean /= static_cast<double>(vs.size());
    double var = 0.0;
    for (double v : vs) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vs.size());
    out[k] = {mean, std::sqrt(var)};
  }
  return out;
}

namespace {
std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace

std::string MetricsReport::to_tsv() const {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + "\t" + v + "\n";
  out += "variant\tmetric\tvalue\n";
  for (const auto& [variant, metrics] : variants) {
    for (const auto& [name, value] : metrics) {
      out += variant + "\t" + name + "\t" + format_value(value) + "\n";
    }
  }
  return out;
}

std::string MetricsReport::to_jsonl() const {
  std::string out;
  if (!metadata.empty()) out += nlohmann::json{{"metadata", metadata}}.dump() + "\n";
  for (const auto& [variant, metrics] : variants) {
    for (const auto& [name, value] : metrics) {
      nlohmann::json row{{"variant", variant}, {"metric", name}};
      if (std::isfinite(value)) {
        row["value"] = value;
      } else {
        row["value"] = nullptr;
      }
      out += row.dump() + "\n";
    }
  }
  return out;
}

}  // namespace dis2vec
