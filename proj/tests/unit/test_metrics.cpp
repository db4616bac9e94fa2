#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "../oracles.hpp"
#include "dis2vec/error.hpp"
#include "dis2vec/metrics.hpp"

using namespace dis2vec;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

const std::set<std::string> kNone;

}  // namespace

TEST_CASE("kappa fixtures") {
  std::vector<int> gold{0, 1, 0, 1, 1, 0};
  CHECK(cohen_kappa(gold, gold) == 1.0);

  std::vector<int> g2{0, 0, 1, 1}, wrong{1, 1, 0, 0};
  CHECK(cohen_kappa(g2, wrong) == -1.0);

  // confusion [[2,1],[1,2]]
  std::vector<int> g3{0, 0, 0, 1, 1, 1}, p3{0, 0, 1, 0, 1, 1};
  CHECK(cohen_kappa(g3, p3) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  ClassificationMetrics m = classification_metrics(g3, p3);
  CHECK(m.accuracy == doctest::Approx(4.0 / 6));

  std::vector<int> same{2, 2, 2};
  CHECK(cohen_kappa(same, same) == 1.0);
  std::vector<int> other{2, 2, 3};
  CHECK(cohen_kappa(same, other) == 0.0);
  std::vector<int> g4{5, 5}, p4{6, 6};
  CHECK(cohen_kappa(g4, p4) == 0.0);  // disjoint constant labels: p_e = 0
}

TEST_CASE("kappa is zero when predictions match the marginals by chance") {
  std::vector<int> g{0, 0, 1, 1}, p{0, 1, 0, 1};
  CHECK(cohen_kappa(g, p) == 0.0);
}

TEST_CASE("classification metrics") {
  std::vector<int> gold{0, 1, 2, 0, 1, 2};
  ClassificationMetrics perfect = classification_metrics(gold, gold);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.kappa == 1.0);

  // class 0: P=1/2 R=1/2, class 1: P=1 R=1/2, class 2: P=1/2 R=1
  std::vector<int> pred{0, 1, 2, 2, 0, 2};
  ClassificationMetrics m = classification_metrics(gold, pred);
  CHECK(m.precision == doctest::Approx((0.5 + 1.0 + 2.0 / 3) / 3));
  CHECK(m.recall == doctest::Approx((0.5 + 0.5 + 1.0) / 3));
  CHECK(m.f1 == doctest::Approx((0.5 + 2.0 / 3 + 0.8) / 3));
  ClassificationMetrics micro = classification_metrics(gold, pred, Averaging::kMicro);
  CHECK(micro.f1 == doctest::Approx(m.accuracy));

  std::vector<int> shortp{0};
  CHECK_THROWS_AS(classification_metrics(gold, shortp), ArgumentError);
}

TEST_CASE("clustering examples") {
  std::vector<int> c{0, 0, 1, 1, 2};
  ClusteringMetrics same = clustering_metrics(c, c);
  CHECK(same.homogeneity == doctest::Approx(1.0));
  CHECK(same.completeness == doctest::Approx(1.0));
  CHECK(same.v_measure == doctest::Approx(1.0));
  CHECK(same.ami == doctest::Approx(1.0));

  std::vector<int> one(5, 0);
  ClusteringMetrics lump = clustering_metrics(c, one);
  CHECK(lump.completeness == 1.0);
  CHECK(lump.homogeneity == doctest::Approx(0.0));
  CHECK(lump.v_measure == doctest::Approx(0.0));

  std::vector<int> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  ClusteringMetrics cross = clustering_metrics(a, b);
  CHECK(cross.mutual_information == doctest::Approx(0.0));
  CHECK(cross.ami == doctest::Approx(0.0));
  CHECK(cross.ami_raw < 0);

  std::vector<int> single{0};
  CHECK_THROWS_AS(clustering_metrics(single, single), UndefinedMetricError);
  CHECK_THROWS_AS(clustering_metrics(a, single), ArgumentError);
}

TEST_CASE("clustering agrees with the brute-force oracle on small labelings") {
  for (std::size_t n = 2; n <= 5; ++n) {
    auto all = oracle::all_labelings(n, 3);
    for (const auto& x : all) {
      for (const auto& y : all) {
        ClusteringMetrics m = clustering_metrics(x, y);
        oracle::Scores o = oracle::clustering(x, y);
        CHECK(m.homogeneity == doctest::Approx(o.h).epsilon(1e-9));
        CHECK(m.completeness == doctest::Approx(o.c).epsilon(1e-9));
        CHECK(m.v_measure == doctest::Approx(o.v).epsilon(1e-9));
        CHECK(std::abs(m.expected_mutual_information - o.emi) < 1e-9);
        CHECK(std::abs(m.ami - o.ami) < 1e-9);
        if (m.homogeneity + m.completeness > 0)
          CHECK(m.v_measure == doctest::Approx(2 * m.homogeneity * m.completeness /
                                               (m.homogeneity + m.completeness)));
      }
    }
  }
}

TEST_CASE("metrics do not depend on label names") {
  std::vector<int> gold{0, 0, 1, 1, 2, 2, 0}, pred{1, 1, 1, 0, 2, 2, 0};
  std::vector<int> rg{9, 9, 4, 4, 7, 7, 9}, rp{5, 5, 5, 3, 8, 8, 3};
  ClusteringMetrics a = clustering_metrics(gold, pred), b = clustering_metrics(rg, rp);
  CHECK(a.ami == doctest::Approx(b.ami));
  CHECK(a.v_measure == doctest::Approx(b.v_measure));
  // Consistent renaming of both sides keeps classification scores.
  std::vector<int> mg{2, 2, 0, 0, 1, 1, 2}, mp{0, 0, 0, 2, 1, 1, 2};
  ClassificationMetrics c = classification_metrics(gold, pred), d = classification_metrics(mg, mp);
  CHECK(c.f1 == doctest::Approx(d.f1));
  CHECK(c.kappa == doctest::Approx(d.kappa));
}

TEST_CASE("rouge-1 examples") {
  CHECK(rouge_1(words("a b c"), {words("a b d e")}, 10, kNone) == 0.5);
  CHECK(rouge_1(words("x y"), {words("x y")}, 10, kNone) == 1.0);
  CHECK(rouge_1(words("x y"), {words("p q")}, 10, kNone) == 0.0);
  // Clipping: a repeated candidate word matches at most its reference count.
  CHECK(rouge_1(words("a a a"), {words("a b")}, 10, kNone) == 0.5);
  // Averaged over references.
  CHECK(rouge_1(words("a b"), {words("a b"), words("c d")}, 10, kNone) == 0.5);
}

TEST_CASE("rouge-1 stopwords and truncation") {
  const auto& stop = default_stopwords();
  CHECK(stop.count("the"));
  CHECK(stop.size() >= 100);
  CHECK(rouge_1(words("the cat sat"), {words("a cat sat on the mat")}, 10, stop) == doctest::Approx(2.0 / 3));
  // Truncation applies to content words: "the" does not use up the limit.
  CHECK(rouge_1(words("the cat sat"), {words("cat sat")}, 2, stop) == 1.0);
  CHECK(rouge_1(words("cat sat"), {words("cat sat")}, 1, stop) == 0.5);
  CHECK_THROWS_AS(rouge_1(words("cat"), {words("the of")}, 10, stop), UndefinedMetricError);
  CHECK(rouge_1(words("cat"), {words("the of"), words("cat")}, 10, stop) == 1.0);
}

TEST_CASE("adding a matching token never lowers recall") {
  std::vector<std::string> cand = words("k m"), ref = words("k m n p n");
  double prev = rouge_1(cand, {ref}, 100, kNone);
  for (const char* w : {"n", "x", "p", "n", "n"}) {
    cand.push_back(w);
    const double now = rouge_1(cand, {ref}, 100, kNone);
    CHECK(now >= prev);
    prev = now;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("label encoding and run summaries") {
  std::map<std::string, int> dict;
  CHECK(encode_labels({"b", "a", "b", "c"}, &dict) == std::vector<int>{0, 1, 0, 2});
  CHECK(dict.at("c") == 2);
  auto s = summarize_runs({{{"f1", 0.5}}, {{"f1", 0.7}}});
  CHECK(s.at("f1").mean == doctest::Approx(0.6));
  CHECK(s.at("f1").stddev == doctest::Approx(0.1));
}

TEST_CASE("report serialization") {
  MetricsReport r;
  r.variants["s2v"]["ami"] = 0.25;
  r.variants["s2v"]["kappa"] = std::nan("");
  r.metadata["seed"] = "7";
  const std::string tsv = r.to_tsv();
  CHECK(tsv.find("# seed\t7\n") != std::string::npos);
  CHECK(tsv.find("s2v\tami\t0.250000\n") != std::string::npos);
  std::istringstream lines(r.to_jsonl());
  int rows = 0;
  bool saw_null = false;
  for (std::string line; std::getline(lines, line);) {
    auto j = nlohmann::json::parse(line);
    if (j.contains("metric")) {
      ++rows;
      if (j["metric"] == "kappa") saw_null = j["value"].is_null();
    }
  }
  CHECK(rows == 2);
  CHECK(saw_null);
}
