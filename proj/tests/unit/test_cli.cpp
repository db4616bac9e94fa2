#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "../helpers.hpp"
#include "dis2vec/cli.hpp"

using testing::TempDir;
using testing::read_file;
using testing::write_file;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dis2vec::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture() { return testing::fixture("fixture6.jsonl").string(); }

// Small but trainable settings shared by every command here.
std::vector<std::string> quick(std::vector<std::string> args) {
  for (const char* a : {"--dim", "8", "--epochs", "3", "--min-count", "1", "--subsample", "0", "--seed", "7"})
    args.push_back(a);
  return args;
}

// Ten labeled documents over two topics.
std::string two_topic_corpus(const TempDir& dir) {
  const std::vector<std::string> sport{"team", "match", "goal", "coach", "league", "score", "fans", "season"};
  const std::vector<std::string> money{"bank", "rate", "market", "loan", "stock", "price", "trade", "fund"};
  std::string jsonl;
  for (int d = 0; d < 10; ++d) {
    const auto& pool = d % 2 ? money : sport;
    std::string text;
    for (int s = 0; s < 5; ++s) {
      for (int w = 0; w < 5; ++w) text += pool[(d * 3 + s * 5 + w * 7) % pool.size()] + " ";
      text.back() = '.';
      text += ' ';
    }
    jsonl += nlohmann::json{{"doc_id", "doc" + std::to_string(d)},
                            {"label", d % 2 ? "finance" : "sports"},
                            {"text", text}}
                 .dump() +
             "\n";
  }
  const fs::path p = dir / "topics.jsonl";
  write_file(p, jsonl);
  return p.string();
}

}  // namespace

TEST_CASE("train is deterministic and pins its output") {
  TempDir dir("cli");
  auto a = cli(quick({"train", "s2v-dbow", "--corpus", fixture(), "--out", (dir / "a").string()}));
  auto b = cli(quick({"train", "s2v-dbow", "--corpus", fixture(), "--out", (dir / "b").string()}));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const std::string va = read_file(dir / "a" / "vectors.txt");
  CHECK(va == read_file(dir / "b" / "vectors.txt"));
  CHECK(read_file(dir / "a" / "config.digest") == read_file(dir / "b" / "config.digest"));
  CHECK(va.rfind("6 8\n", 0) == 0);
  // Recorded from the first run of this configuration.
  CHECK(dis2vec::fnv1a_hex(va) == "93547608ad74a2d5");
  CHECK(fs::exists(dir / "a" / "metadata.json"));
  CHECK(fs::exists(dir / "a" / "config.ini"));
}

TEST_CASE("a config file and the equivalent flags give the same run") {
  TempDir dir("cli");
  write_file(dir / "run.ini",
             "[train]\ncorpus=" + fixture() + "\ndim=8\nepochs=3\nmin-count=1\nsubsample=0\nseed=7\n");
  auto f = cli(quick({"train", "s2v-dbow", "--corpus", fixture(), "--out", (dir / "f").string()}));
  auto c = cli({"train", "s2v-dbow", "--config", (dir / "run.ini").string(), "--out", (dir / "c").string()});
  REQUIRE(f.code == 0);
  REQUIRE(c.code == 0);
  CHECK(read_file(dir / "f" / "vectors.txt") == read_file(dir / "c" / "vectors.txt"));
  CHECK(read_file(dir / "f" / "config.digest") == read_file(dir / "c" / "config.digest"));

  write_file(dir / "bad.ini", "[train]\nbogus=1\n");
  auto bad = cli({"train", "s2v-dbow", "--config", (dir / "bad.ini").string(), "--corpus", fixture(), "--out",
                  (dir / "x").string()});
  CHECK(bad.code != 0);
}

TEST_CASE("missing prerequisites name the flag or path") {
  TempDir dir("cli");
  auto r = cli(quick({"train", "it-w", "--priors", fixture(), "--out", (dir / "o").string()}));
  CHECK(r.code == 2);
  CHECK(r.err.find("--graph") != std::string::npos);

  auto m = cli(quick({"train", "s2v-dbow", "--corpus", (dir / "nope.jsonl").string(), "--out",
                      (dir / "o").string()}));
  CHECK(m.code != 0);
  CHECK(m.err.find("nope.jsonl") != std::string::npos);

  auto u = cli({"train", "not-a-variant", "--out", (dir / "o").string()});
  CHECK(u.code != 0);
}

TEST_CASE("reg-uw with beta 0 writes the same vectors as s2v-dbow") {
  TempDir dir("cli");
  REQUIRE(cli(quick({"train", "s2v-dbow", "--corpus", fixture(), "--out", (dir / "dbow").string()})).code == 0);
  REQUIRE(cli({"build-graph", "--vectors", (dir / "dbow" / "vectors.txt").string(), "--corpus", fixture(),
               "--out", (dir / "g").string()})
              .code == 0);
  auto r = cli(quick({"train", "reg-uw", "--corpus", fixture(), "--graph", (dir / "g" / "graph.tsv").string(),
                      "--beta", "0", "--out", (dir / "reg").string()}));
  REQUIRE(r.code == 0);
  CHECK(read_file(dir / "reg" / "vectors.txt") == read_file(dir / "dbow" / "vectors.txt"));
}

TEST_CASE("pipeline: build-graph, it-uw, evaluate, summarize, annotate") {
  TempDir dir("cli");
  const std::string v = (dir / "s2v" / "vectors.txt").string();
  REQUIRE(cli(quick({"train", "s2v", "--corpus", fixture(), "--out", (dir / "s2v").string()})).code == 0);
  REQUIRE(cli({"build-graph", "--vectors", v, "--corpus", fixture(), "--intra-thresh", "0.0", "--across-thresh",
               "0.5", "--out", (dir / "g").string()})
              .code == 0);
  auto it = cli(quick({"train", "it-uw", "--priors", v, "--graph", (dir / "g" / "graph.tsv").string(), "--out",
                       (dir / "it").string()}));
  REQUIRE(it.code == 0);
  auto ev = cli({"evaluate", "--task", "clustering", "--vectors", (dir / "it" / "vectors.txt").string(),
                 "--corpus", fixture(), "--seed", "3", "--out", (dir / "ev").string()});
  CHECK(ev.code == 0);
  CHECK(fs::exists(dir / "ev" / "report.tsv"));
  CHECK(fs::exists(dir / "ev" / "report.jsonl"));

  auto an = cli({"annotate", "--vectors", v, "--corpus", fixture(), "--p-percent", "50", "--out",
                 (dir / "an").string()});
  CHECK(an.code == 0);
  const std::string labels = read_file(dir / "an" / "labels.tsv");
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 4);  // ceil(1.5) per document

  auto sm = cli({"summarize", "--vectors", v, "--corpus", fixture(), "--budget", "10", "--out",
                 (dir / "sm").string()});
  CHECK(sm.code == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sm" / "summaries")) ++files;
  CHECK(files == 2);
}

TEST_CASE("evaluate with predictions equal to the gold labels") {
  TempDir dir("cli");
  write_file(dir / "gold.tsv", "0\ta\n1\ta\n2\tb\n3\tb\n4\tc\n5\tc\n");
  auto r = cli({"evaluate", "--task", "clustering", "--corpus", fixture(), "--gold", (dir / "gold.tsv").string(),
                "--predicted", (dir / "gold.tsv").string(), "--out", (dir / "e").string()});
  REQUIRE(r.code == 0);
  const std::string tsv = read_file(dir / "e" / "report.tsv");
  CHECK(tsv.find("\tami\t1.000000") != std::string::npos);
  CHECK(tsv.find("\tv_measure\t1.000000") != std::string::npos);
}

TEST_CASE("summarizing a one-sentence document returns that sentence") {
  TempDir dir("cli");
  write_file(dir / "one.jsonl", R"({"doc_id": "solo", "text": "Only this sentence is here."})" "\n");
  write_file(dir / "v.txt", "1 2\n0 0.5 0.25\n");
  auto r = cli({"summarize", "--vectors", (dir / "v.txt").string(), "--corpus", (dir / "one.jsonl").string(),
                "--budget", "10", "--out", (dir / "s").string()});
  REQUIRE(r.code == 0);
  CHECK(read_file(dir / "s" / "summaries" / "0_solo.txt") == "Only this sentence is here.\n");
  auto line = nlohmann::json::parse(read_file(dir / "s" / "summaries.jsonl"));
  CHECK(line["sentence_ids"] == nlohmann::json::array({0}));
}

TEST_CASE("sweep reports every grid point and is reproducible") {
  TempDir dir("cli");
  const std::string corpus = two_topic_corpus(dir);
  auto args = [&](const std::string& out, std::vector<std::string> grid) {
    std::vector<std::string> a{"sweep", "s2v-dbow", "--task", "classification", "--corpus", corpus, "--out", out};
    for (auto& g : grid) {
      a.push_back("--grid");
      a.push_back(g);
    }
    return quick(a);
  };
  auto one = cli(args((dir / "one").string(), {"lr=0.025"}));
  REQUIRE(one.code == 0);
  auto best = nlohmann::json::parse(read_file(dir / "one" / "best.json"));
  CHECK(best["best_point"] == "lr=0.025");
  CHECK(best["points"].size() == 1);

  auto four = cli(args((dir / "four").string(), {"epochs=1,2,3,4"}));
  REQUIRE(four.code == 0);
  auto b4 = nlohmann::json::parse(read_file(dir / "four" / "best.json"));
  CHECK(b4["points"].size() == 4);
  CHECK(b4["validation_documents"] == 2);

  auto again = cli(args((dir / "again").string(), {"epochs=1,2,3,4"}));
  REQUIRE(again.code == 0);
  CHECK(read_file(dir / "four" / "sweep.tsv") == read_file(dir / "again" / "sweep.tsv"));

  auto two = cli(args((dir / "grid").string(), {"lr=0.01,0.02", "dim=4,6"}));
  REQUIRE(two.code == 0);
  CHECK(read_file(dir / "grid" / "sweep.tsv").find("lr=0.01,dim=6\t") != std::string::npos);

  auto bad = cli(args((dir / "bad").string(), {"nonsense=1"}));
  CHECK(bad.code != 0);
}

TEST_CASE("sweep rejects an unlabeled corpus") {
  TempDir dir("cli");
  write_file(dir / "u.jsonl", R"({"doc_id": "a", "text": "one two. three four."})" "\n"
                              R"({"doc_id": "b", "text": "five six. seven eight."})" "\n");
  auto r = cli(quick({"sweep", "s2v-dbow", "--task", "clustering", "--corpus", (dir / "u.jsonl").string(), "--out",
                      (dir / "o").string()}));
  CHECK(r.code != 0);
  CHECK(r.err.find("labeled") != std::string::npos);
}
