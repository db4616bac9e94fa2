#include <doctest.h>

#include <numeric>

#include "../helpers.hpp"
#include "../oracles.hpp"
#include "dis2vec/error.hpp"
#include "dis2vec/ranker.hpp"

using namespace dis2vec;

namespace {

VectorTable rows(const std::vector<std::vector<double>>& r) {
  VectorTable t(r.size(), r[0].size());
  for (std::size_t i = 0; i < r.size(); ++i) std::copy(r[i].begin(), r[i].end(), t.row(i).begin());
  return t;
}

Eigen::MatrixXd dense(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) w(e.u, e.v) = w(e.v, e.u) = e.weight;
  return w;
}

}  // namespace

TEST_CASE("sentence graph threshold is inclusive") {
  Corpus c = testing::make_corpus({{"a.", "b.", "c."}});
  // Unit vectors with cosines 0.05 (0,1) and 0.10 (0,2).
  VectorTable v = rows({{1, 0, 0}, {0.05, std::sqrt(1 - 0.0025), 0}, {0.10, 0, std::sqrt(1 - 0.01)}});
  WeightedGraph g = build_sentence_graph(c.documents()[0], v, RankConfig{});
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK(g.has_edge(0, 2));
}

TEST_CASE("identical vectors give a complete unit graph") {
  Corpus c = testing::make_corpus({{"a.", "b.", "c.", "d."}});
  VectorTable v = rows({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
  WeightedGraph g = build_sentence_graph(c.documents()[0], v, RankConfig{});
  CHECK(g.edge_count() == 6);
  for (const auto& e : g.edges()) CHECK(e.weight == doctest::Approx(1.0));

  Corpus one = testing::make_corpus({{"only one sentence."}});
  WeightedGraph single = build_sentence_graph(one.documents()[0], VectorTable(1, 2), RankConfig{});
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);
}

TEST_CASE("pagerank small cases") {
  WeightedGraph pair = WeightedGraph::from_edges(2, std::vector<EdgeTriple>{{0, 1, 1}});
  auto p = pagerank(pair, RankConfig{});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  WeightedGraph single = WeightedGraph::from_edges(1, std::vector<EdgeTriple>{});
  CHECK(pagerank(single, RankConfig{})[0] == doctest::Approx(1.0));

  WeightedGraph star = WeightedGraph::from_edges(
      4, std::vector<EdgeTriple>{{0, 1, 0.5}, {0, 2, 1.0}, {0, 3, 2.0}});
  auto s = pagerank(star, RankConfig{});
  auto o = oracle::dense_pagerank(dense(star), 0.85);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(s[i] - o[i]) < 1e-8);
  CHECK(s[0] > s[3]);
  CHECK(s[3] > s[2]);
}

TEST_CASE("pagerank matches dense power iteration on every graph up to 4 nodes") {
  const std::vector<double> grid{0.0, 0.3, 1.0};
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) slots.push_back({u, v});
    auto codes = oracle::all_labelings(slots.size(), static_cast<int>(grid.size()));
    for (const auto& code : codes) {
      std::vector<EdgeTriple> e;
      for (std::size_t i = 0; i < slots.size(); ++i)
        if (grid[code[i]] > 0) e.push_back({slots[i].first, slots[i].second, grid[code[i]]});
      WeightedGraph g = WeightedGraph::from_edges(n, e);
      auto s = pagerank(g, RankConfig{});
      auto o = oracle::dense_pagerank(dense(g), 0.85);
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(s[i] - o[i]) < 1e-8);
        CHECK(s[i] >= 0);
        total += s[i];
      }
      CHECK(std::abs(total - 1) < 1e-9);
    }
  }
}

TEST_CASE("summary budget arithmetic and ties") {
  Corpus c = testing::make_corpus(
      {{"one two three four five six.", "seven eight nine ten eleven twelve.", "a b c d e f."}});
  const Document& d = c.documents()[0];
  CHECK(extract_summary(d, c, std::vector<double>{0.2, 0.5, 0.3}, 10) == std::vector<std::size_t>{1, 2});
  CHECK(extract_summary(d, c, std::vector<double>{1, 1, 1}, 10) == std::vector<std::size_t>{0, 1});
  CHECK(extract_summary(d, c, std::vector<double>{0.2, 0.5, 0.3}, 100) == std::vector<std::size_t>{0, 1, 2});
  CHECK(extract_summary(d, c, std::vector<double>{0.2, 0.5, 0.3}, 6) == std::vector<std::size_t>{1});
}

TEST_CASE("summaries are subsequences of the document") {
  Corpus c = testing::make_corpus({{"x.", "y z."}, {"p q r.", "s.", "t u v w.", "k."}});
  VectorTable v = rows({{1, 0}, {0.9, 0.1}, {0.2, 1}, {1, 1}, {0.5, 0.4}, {0.3, 0.9}});
  for (const auto& d : c.documents()) {
    auto s = extract_summary(d, c, v, RankConfig{}, 3);
    std::size_t pos = 0;
    for (auto id : s) {
      while (pos < d.sentence_ids.size() && d.sentence_ids[pos] != id) ++pos;
      CHECK(pos < d.sentence_ids.size());
    }
  }
}

TEST_CASE("top percent counts") {
  CHECK(top_percent_count(100, 2) == 2);
  CHECK(top_percent_count(10, 2) == 1);
  CHECK(top_percent_count(7, 100) == 7);
  CHECK(top_percent_count(50, 2) == 1);
  CHECK(top_percent_count(51, 2) == 2);
  CHECK_THROWS_AS(top_percent_count(5, 0), ArgumentError);
  CHECK_THROWS_AS(top_percent_count(5, 101), ArgumentError);
}

TEST_CASE("annotation labels the top sentences of labeled documents only") {
  std::vector<std::string> ten(10, "w.");
  Corpus c = testing::make_corpus({ten, {"a.", "b."}}, {"sports"});
  VectorTable v(c.sentences().size(), 3);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    v.row(i)[0] = 1;
    v.row(i)[1 + i % 2] = 0.1 * static_cast<double>(i);
  }
  Annotation a = annotate_top_sentences(c, v, 2);
  REQUIRE(a.labels.size() == 1);
  CHECK(a.labels[0].second == "sports");
  CHECK(a.warnings.size() == 1);

  Annotation all = annotate_top_sentences(c, v, 100);
  CHECK(all.labels.size() == 10);
}

TEST_CASE("rank config validation") {
  RankConfig bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(validate(bad), ArgumentError);
}
