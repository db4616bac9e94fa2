#include "dis2vec/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dis2vec/error.hpp"
#include "dis2vec/evaluate.hpp"
#include "dis2vec/metrics.hpp"
#include "dis2vec/regularized.hpp"
#include "dis2vec/retrofit.hpp"
#include "dis2vec/sen2vec.hpp"

namespace dis2vec {
namespace fs = std::filesystem;
using json = nlohmann::json;

const std::vector<std::string>& train_variants() {
  static const std::vector<std::string> v = {"s2v-dbow", "s2v-dm", "s2v",   "n2v",
                                             "n2v-i",    "n2v-r",  "it-w",  "it-uw",
                                             "reg-w",    "reg-uw", "dictreg-w", "dictreg-uw"};
  return v;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

bool needs_content(const std::string& v) {
  return starts_with(v, "s2v") || starts_with(v, "reg") || starts_with(v, "dictreg");
}
bool needs_graph(const std::string& v) { return v != "s2v-dbow" && v != "s2v-dm" && v != "s2v"; }
bool needs_priors(const std::string& v) {
  return v == "n2v-i" || v == "n2v-r" || starts_with(v, "it-");
}

void require_flag(const fs::path& value, const char* flag, const std::string& variant) {
  if (value.empty()) {
    throw ArgumentError("variant " + variant + " requires " + flag);
  }
}

void require_file(const fs::path& path, const char* flag) {
  if (!fs::exists(path)) throw InputError(std::string(flag) + ": no such file: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
  if (dir.empty()) throw ArgumentError("--out is required");
  fs::create_directories(dir);
}

}  // namespace

PipelineInputs load_inputs(const PipelineOptions& opts) {
  const std::string& v = opts.variant;
  if (std::find(train_variants().begin(), train_variants().end(), v) == train_variants().end()) {
    throw ArgumentError("unknown variant '" + v + "'");
  }
  PipelineInputs in;
  if (needs_content(v)) require_flag(opts.corpus, "--corpus", v);
  if (needs_graph(v)) require_flag(opts.graph, "--graph", v);
  if (needs_priors(v)) require_flag(opts.priors, "--priors", v);
  if (starts_with(v, "dictreg")) {
    require_flag(opts.lexicon, "--lexicon", v);
    require_flag(opts.lexicon_map, "--lexicon-map", v);
  }

  if (!opts.corpus.empty()) {
    require_file(opts.corpus, "--corpus");
    in.corpus = ingest(opts.corpus, parse_corpus_format(opts.format));
    if (needs_content(v)) {
      in.vocab = build_vocab(*in.corpus, opts.min_count);
      in.corpus->index(in.vocab);
    }
  }
  if (!opts.priors.empty() && needs_priors(v)) {
    require_file(opts.priors, "--priors");
    in.priors = load_vector_table(opts.priors);
  }

  std::size_t nodes = 0;
  if (in.priors) nodes = in.priors->rows();
  if (in.corpus) {
    const std::size_t sentences = in.corpus->sentences().size();
    if (in.priors && nodes != sentences) {
      throw ValidationError("--priors has " + std::to_string(nodes) + " rows but the corpus has " +
                            std::to_string(sentences) + " sentences");
    }
    nodes = sentences;
  }
  if (needs_graph(v)) {
    require_file(opts.graph, "--graph");
    in.graph = load_edge_list(opts.graph, nodes);
    if (nodes > 0 && in.graph->node_count() > nodes) {
      throw ValidationError("--graph mentions node " + std::to_string(in.graph->node_count() - 1) +
                            " but only " + std::to_string(nodes) + " nodes exist");
    }
  }
  if (starts_with(v, "dictreg")) {
    require_file(opts.lexicon, "--lexicon");
    require_file(opts.lexicon_map, "--lexicon-map");
    LexiconLoad lex = load_lexicon(opts.lexicon, opts.lexicon_map, in.vocab);
    if (lex.skipped_edges > 0) {
      in.warnings.push_back(std::to_string(lex.skipped_edges) +
                            " lexicon edges touch words outside the vocabulary");
    }
    in.lexicon = std::move(lex.graph);
  }
  return in;
}

TrainOutcome train_variant(const PipelineOptions& opts, const PipelineInputs& in) {
  const std::string& v = opts.variant;
  TrainOutcome res;
  res.warnings = in.warnings;
  SgdReport report;
  TrainConfig cfg = opts.train;
  WalkConfig walk = opts.walk;
  if (opts.window) walk.window = *opts.window;
  const std::size_t dm_window = opts.window.value_or(kDefaultDmWindow);

  if (v == "s2v-dbow") {
    res.vectors = train_dbow(*in.corpus, in.vocab, cfg, &report).sentence_vectors;
  } else if (v == "s2v-dm") {
    res.vectors = train_dm(*in.corpus, in.vocab, cfg, dm_window, &report).sentence_vectors;
  } else if (v == "s2v") {
    SgdReport dm_report;
    Sen2VecModel dbow = train_dbow(*in.corpus, in.vocab, cfg, &report);
    Sen2VecModel dm = train_dm(*in.corpus, in.vocab, cfg, dm_window, &dm_report);
    res.vectors = concat_s2v(dbow, dm);
    report.epoch_mean_loss.insert(report.epoch_mean_loss.end(), dm_report.epoch_mean_loss.begin(),
                                  dm_report.epoch_mean_loss.end());
  } else if (v == "n2v") {
    res.vectors = train_node2vec(*in.graph, walk, cfg, std::nullopt, &report).input;
  } else if (v == "n2v-i") {
    res.vectors = train_node2vec(*in.graph, walk, cfg, in.priors, &report).input;
  } else if (v == "n2v-r") {
    res.vectors = retrofit_n2v(*in.priors, *in.graph, walk, {opts.alpha}, {opts.beta}, cfg, &report).input;
  } else if (starts_with(v, "it-")) {
    RetrofitConfig rc;
    rc.alpha = {opts.alpha};
    rc.beta = {opts.beta};
    rc.weighted = v == "it-w";
    rc.max_iterations = opts.max_iterations;
    rc.convergence_tol = opts.convergence_tol;
    RetrofitResult r = retrofit_jacobi(*in.priors, *in.graph, rc);
    res.vectors = std::move(r.vectors);
    res.sweeps = r.sweeps;
    res.converged = r.converged;
    res.warnings.insert(res.warnings.end(), r.warnings.begin(), r.warnings.end());
    return res;
  } else {
    RegConfig reg;
    reg.beta = opts.beta;
    reg.word_beta = opts.word_beta;
    reg.weighted = v.size() > 2 && v.compare(v.size() - 2, 2, "-w") == 0;
    if (starts_with(v, "reg")) {
      res.vectors = train_regularized(*in.corpus, in.vocab, *in.graph, reg, cfg, &report).sentence_vectors;
    } else {
      res.vectors = train_dictreg(*in.corpus, in.vocab, *in.graph, *in.lexicon, reg, cfg, &report)
                        .sentence_vectors;
    }
  }
  res.epoch_mean_loss = report.epoch_mean_loss;
  return res;
}

namespace {

// ---- label files and evaluation helpers ----

struct LabeledItems {
  std::vector<std::size_t> ids;
  std::vector<std::string> labels;
};

LabeledItems read_label_file(const fs::path& path, const char* flag) {
  require_file(path, flag);
  std::ifstream in(path);
  LabeledItems items;
  std::set<std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id_text, label;
    if (!std::getline(fields, id_text, '\t') || !std::getline(fields, label, '\t') || label.empty()) {
      throw ParseError("expected sentence_id<TAB>label", line_no);
    }
    std::size_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoull(id_text, &used);
      if (used != id_text.size()) throw std::invalid_argument(id_text);
    } catch (const std::exception&) {
      throw ParseError("bad sentence id '" + id_text + "'", line_no);
    }
    if (!seen.insert(id).second) throw ValidationError("sentence " + id_text + " labeled twice");
    items.ids.push_back(id);
    items.labels.push_back(label);
  }
  return items;
}

LabeledItems document_labels(const Corpus& corpus) {
  LabeledItems items;
  for (const auto& doc : corpus.documents()) {
    if (!doc.label) continue;
    for (std::size_t s : doc.sentence_ids) {
      items.ids.push_back(s);
      items.labels.push_back(*doc.label);
    }
  }
  if (items.ids.empty()) throw ValidationError("corpus has no labeled documents");
  return items;
}

std::size_t distinct(const std::vector<int>& v) {
  return std::set<int>(v.begin(), v.end()).size();
}

MetricMap classification_map(const std::vector<int>& gold, const std::vector<int>& pred,
                             Averaging avg) {
  ClassificationMetrics m = classification_metrics(gold, pred, avg);
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"accuracy", m.accuracy},   {"kappa", m.kappa}};
}

MetricMap clustering_map(const std::vector<int>& gold, const std::vector<int>& pred) {
  ClusteringMetrics m = clustering_metrics(gold, pred);
  return {{"homogeneity", m.homogeneity}, {"completeness", m.completeness},
          {"v_measure", m.v_measure},     {"ami", m.ami}};
}

struct ReferenceSet {
  std::map<std::string, std::vector<std::vector<std::string>>> by_doc;
};

ReferenceSet read_references(const fs::path& path) {
  require_file(path, "--references");
  std::ifstream in(path);
  ReferenceSet refs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("doc_id") || !rec["doc_id"].is_string() ||
        !rec.contains("references") || !rec["references"].is_array()) {
      throw ParseError("expected {\"doc_id\": str, \"references\": [str]}", line_no);
    }
    auto& list = refs.by_doc[rec["doc_id"].get<std::string>()];
    for (const auto& r : rec["references"]) {
      if (!r.is_string()) throw ParseError("references must be strings", line_no);
      list.push_back(tokenize(r.get<std::string>()));
    }
  }
  return refs;
}

std::vector<std::string> summary_words(const Corpus& corpus, const std::vector<std::size_t>& ids) {
  std::vector<std::string> words;
  for (std::size_t s : ids) {
    const auto& w = corpus.sentence(s).words;
    words.insert(words.end(), w.begin(), w.end());
  }
  return words;
}

void check_vectors_cover(const VectorTable& vectors, const Corpus& corpus) {
  if (vectors.rows() != corpus.sentences().size()) {
    throw ValidationError("vector table has " + std::to_string(vectors.rows()) +
                          " rows but the corpus has " +
                          std::to_string(corpus.sentences().size()) + " sentences");
  }
}

// Task score on the validation documents, used by the sweep.
double validation_score(const std::string& task, const VectorTable& vectors, const Corpus& corpus,
                        const std::vector<std::size_t>& train_docs,
                        const std::vector<std::size_t>& val_docs, const ReferenceSet* refs,
                        std::size_t budget, const RankConfig& rank, std::uint64_t seed) {
  const auto& docs = corpus.documents();
  auto gather = [&](const std::vector<std::size_t>& which, std::vector<std::size_t>& ids,
                    std::vector<std::string>& labels) {
    for (std::size_t d : which) {
      if (!docs[d].label) continue;
      for (std::size_t s : docs[d].sentence_ids) {
        ids.push_back(s);
        labels.push_back(*docs[d].label);
      }
    }
  };
  if (task == "classification") {
    std::vector<std::size_t> tr_ids, va_ids;
    std::vector<std::string> tr_lab, va_lab;
    gather(train_docs, tr_ids, tr_lab);
    gather(val_docs, va_ids, va_lab);
    if (tr_ids.empty() || va_ids.empty()) throw ValidationError("split leaves no labeled sentences");
    std::map<std::string, int> dict;
    std::vector<int> ytr = encode_labels(tr_lab, &dict);
    std::vector<int> yva = encode_labels(va_lab, &dict);
    LogisticRegression clf;
    clf.fit(rows_of(vectors, tr_ids), ytr);
    return classification_metrics(yva, clf.predict(rows_of(vectors, va_ids))).f1;
  }
  if (task == "clustering") {
    std::vector<std::size_t> ids;
    std::vector<std::string> labels;
    gather(val_docs, ids, labels);
    if (ids.size() < 2) throw ValidationError("validation split has fewer than two labeled sentences");
    std::vector<int> gold = encode_labels(labels);
    KMeansResult km = kmeans(rows_of(vectors, ids), distinct(gold), 10, seed);
    return clustering_metrics(gold, km.assignment).ami;
  }
  // ranking
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t d : val_docs) {
    auto it = refs->by_doc.find(docs[d].doc_id);
    if (it == refs->by_doc.end()) continue;
    auto summary = extract_summary(docs[d], corpus, vectors, rank, budget);
    try {
      total += rouge_1(summary_words(corpus, summary), it->second, budget, default_stopwords());
      ++used;
    } catch (const UndefinedMetricError&) {
    }
  }
  if (used == 0) throw ValidationError("no validation document has usable references");
  return total / static_cast<double>(used);
}

// ---- option wiring ----

struct Shared {
  PipelineOptions p;
  std::string noise = "unigram075";
  std::string loss = "ns";
  fs::path out;
  fs::path vectors;
  GraphBuildConfig graph_cfg;
  RankConfig rank;
  double p_percent = 2.0;
  std::size_t budget = 100;
  fs::path references, gold, predicted;
  std::string task = "clustering";
  std::string average = "macro";
  std::string run_name;
  std::size_t runs = 1;
  std::size_t restarts = 10;
  double test_fraction = 0.2;
  std::vector<std::string> grid;
};

void add_corpus_options(CLI::App* sub, Shared& s) {
  sub->add_option("--corpus", s.p.corpus, "corpus path (JSON lines file or directory)");
  sub->add_option("--format", s.p.format, "corpus format: jsonl or dir")->capture_default_str();
}

void add_train_options(CLI::App* sub, Shared& s) {
  add_corpus_options(sub, s);
  auto& p = s.p;
  sub->add_option("--graph", p.graph, "discourse graph edge list");
  sub->add_option("--lexicon", p.lexicon, "lexicon edge list over word indices");
  sub->add_option("--lexicon-map", p.lexicon_map, "word<TAB>index file for --lexicon");
  sub->add_option("--priors", p.priors, "prior sentence vectors");
  sub->add_option("--min-count", p.min_count, "vocabulary frequency cutoff")->capture_default_str();
  sub->add_option("--dim", p.train.dim, "embedding dimension")->capture_default_str();
  sub->add_option("--epochs", p.train.epochs, "training epochs")->capture_default_str();
  sub->add_option("--lr", p.train.learning_rate, "initial learning rate")->capture_default_str();
  sub->add_option("--min-lr", p.train.min_learning_rate, "final learning rate")->capture_default_str();
  sub->add_option("--negative", p.train.negative, "noise samples per instance")->capture_default_str();
  sub->add_option("--subsample", p.train.subsample, "frequent-word threshold, 0 disables")
      ->capture_default_str();
  sub->add_option("--noise", s.noise, "noise distribution: uniform, unigram, unigram075")
      ->capture_default_str();
  sub->add_option("--loss", s.loss, "output loss: ns or nce")->capture_default_str();
  sub->add_option("--window", p.window, "context window (DM default 5, walks default 10)");
  sub->add_option("--walk-length", p.walk.walk_length, "walk length")->capture_default_str();
  sub->add_option("--walks-per-node", p.walk.walks_per_node, "walks started per node")
      ->capture_default_str();
  sub->add_option("--return-param", p.walk.return_param, "return parameter r")->capture_default_str();
  sub->add_option("--forward-param", p.walk.forward_param, "forward parameter f")->capture_default_str();
  sub->add_option("--alpha", p.alpha, "prior strength")->capture_default_str();
  sub->add_option("--beta", p.beta, "graph strength")->capture_default_str();
  sub->add_option("--word-beta", p.word_beta, "lexicon strength")->capture_default_str();
  sub->add_option("--max-iter", p.max_iterations, "retrofit sweeps")->capture_default_str();
  sub->add_option("--tol", p.convergence_tol, "retrofit convergence tolerance")->capture_default_str();
  sub->add_option("--seed", p.train.seed, "random seed")->capture_default_str();
  sub->add_option("--workers", p.train.workers, "worker threads; 1 is deterministic")
      ->capture_default_str();
}

void add_rank_options(CLI::App* sub, Shared& s) {
  sub->add_option("--damping", s.rank.damping, "PageRank damping")->capture_default_str();
  sub->add_option("--edge-min", s.rank.edge_min_weight, "minimum sentence-graph edge weight")
      ->capture_default_str();
}

void finish_train_config(Shared& s) {
  s.p.train.noise = parse_noise_kind(s.noise);
  if (s.loss == "ns") {
    s.p.train.loss = LossKind::kNegativeSampling;
  } else if (s.loss == "nce") {
    s.p.train.loss = LossKind::kNce;
  } else {
    throw ArgumentError("--loss must be ns or nce");
  }
}

// Effective configuration minus the keys that only name where output goes.
std::string effective_config(const CLI::App* sub) {
  std::istringstream all(sub->config_to_str(true, false));
  std::string line, kept;
  while (std::getline(all, line)) {
    auto eq = line.find('=');
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    if (key == "out" || key == "config") continue;
    kept += line + "\n";
  }
  return kept;
}

void write_run_files(const fs::path& dir, const CLI::App* sub, json meta) {
  const std::string config = effective_config(sub);
  const std::string digest = fnv1a_hex(config);
  write_text(dir / "config.ini", config);
  write_text(dir / "config.digest", digest + "\n");
  meta["config_digest"] = digest;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

void write_report(const fs::path& dir, const MetricsReport& report, std::ostream& out) {
  write_text(dir / "report.tsv", report.to_tsv());
  write_text(dir / "report.jsonl", report.to_jsonl());
  out << report.to_tsv();
}

// ---- commands ----

int cmd_train(Shared& s, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  finish_train_config(s);
  prepare_dir(s.out);
  PipelineInputs in = load_inputs(s.p);
  TrainOutcome res = train_variant(s.p, in);
  save_vector_table(res.vectors, s.out / "vectors.txt");
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  json meta{{"command", "train"},
            {"variant", s.p.variant},
            {"seed", s.p.train.seed},
            {"rows", res.vectors.rows()},
            {"dim", res.vectors.dim()},
            {"epoch_mean_loss", res.epoch_mean_loss},
            {"warnings", res.warnings}};
  if (starts_with(s.p.variant, "it-")) {
    meta["sweeps"] = res.sweeps;
    meta["converged"] = res.converged;
  }
  write_run_files(s.out, sub, meta);
  out << "wrote " << (s.out / "vectors.txt").string() << " (" << res.vectors.rows() << " x "
      << res.vectors.dim() << ")\n";
  return 0;
}

int cmd_build_graph(Shared& s, const CLI::App* sub, std::ostream& out) {
  if (s.vectors.empty()) throw ArgumentError("build-graph requires --vectors");
  if (s.p.corpus.empty()) throw ArgumentError("build-graph requires --corpus");
  require_file(s.vectors, "--vectors");
  require_file(s.p.corpus, "--corpus");
  prepare_dir(s.out);
  Corpus corpus = ingest(s.p.corpus, parse_corpus_format(s.p.format));
  VectorTable vectors = load_vector_table(s.vectors);
  check_vectors_cover(vectors, corpus);
  WeightedGraph g = build_discourse_graph(vectors, corpus, s.graph_cfg, s.p.train.workers);
  save_edge_list(g, s.out / "graph.tsv");
  write_run_files(s.out, sub,
                  {{"command", "build-graph"}, {"nodes", g.node_count()}, {"edges", g.edge_count()},
                   {"components", g.component_count()}});
  out << "wrote " << (s.out / "graph.tsv").string() << " (" << g.edge_count() << " edges)\n";
  return 0;
}

// doc ids can hold path separators; anything outside [A-Za-z0-9._-] becomes
// '_' and the document index keeps names unique.
std::string summary_file_name(const std::string& doc_id, std::size_t index) {
  std::string name;
  for (char ch : doc_id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-';
    name += keep ? ch : '_';
  }
  return std::to_string(index) + "_" + name + ".txt";
}

int cmd_summarize(Shared& s, const CLI::App* sub, std::ostream& out) {
  if (s.vectors.empty()) throw ArgumentError("summarize requires --vectors");
  if (s.p.corpus.empty()) throw ArgumentError("summarize requires --corpus");
  require_file(s.vectors, "--vectors");
  require_file(s.p.corpus, "--corpus");
  validate(s.rank);
  prepare_dir(s.out);
  Corpus corpus = ingest(s.p.corpus, parse_corpus_format(s.p.format));
  VectorTable vectors = load_vector_table(s.vectors);
  check_vectors_cover(vectors, corpus);
  std::optional<ReferenceSet> refs;
  if (!s.references.empty()) refs = read_references(s.references);

  std::string lines;
  double rouge_total = 0.0;
  std::size_t rouge_docs = 0;
  fs::create_directories(s.out / "summaries");
  for (std::size_t d = 0; d < corpus.documents().size(); ++d) {
    const Document& doc = corpus.documents()[d];
    auto ids = extract_summary(doc, corpus, vectors, s.rank, s.budget);
    std::string text, per_line;
    for (std::size_t id : ids) {
      if (!text.empty()) text += ' ';
      text += corpus.sentence(id).text;
      per_line += corpus.sentence(id).text + "\n";
    }
    write_text(s.out / "summaries" / summary_file_name(doc.doc_id, d), per_line);
    lines += json{{"doc_id", doc.doc_id}, {"sentence_ids", ids}, {"summary", text}}.dump() + "\n";
    if (refs) {
      auto it = refs->by_doc.find(doc.doc_id);
      if (it == refs->by_doc.end()) continue;
      try {
        rouge_total += rouge_1(summary_words(corpus, ids), it->second, s.budget, default_stopwords());
        ++rouge_docs;
      } catch (const UndefinedMetricError&) {
      }
    }
  }
  write_text(s.out / "summaries.jsonl", lines);
  json meta{{"command", "summarize"}, {"budget", s.budget}, {"documents", corpus.documents().size()}};
  if (refs) {
    if (rouge_docs == 0) throw UndefinedMetricError("no document has usable references");
    MetricsReport report;
    report.variants[s.run_name]["rouge_1"] = rouge_total / static_cast<double>(rouge_docs);
    report.variants[s.run_name]["documents"] = static_cast<double>(rouge_docs);
    write_report(s.out, report, out);
  } else {
    out << "wrote " << (s.out / "summaries.jsonl").string() << "\n";
  }
  write_run_files(s.out, sub, meta);
  return 0;
}

int cmd_annotate(Shared& s, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  if (s.vectors.empty()) throw ArgumentError("annotate requires --vectors");
  if (s.p.corpus.empty()) throw ArgumentError("annotate requires --corpus");
  require_file(s.vectors, "--vectors");
  require_file(s.p.corpus, "--corpus");
  validate(s.rank);
  prepare_dir(s.out);
  Corpus corpus = ingest(s.p.corpus, parse_corpus_format(s.p.format));
  VectorTable vectors = load_vector_table(s.vectors);
  check_vectors_cover(vectors, corpus);
  Annotation ann = annotate_top_sentences(corpus, vectors, s.p_percent, s.rank);
  std::string text;
  for (const auto& [id, label] : ann.labels) text += std::to_string(id) + "\t" + label + "\n";
  write_text(s.out / "labels.tsv", text);
  for (const auto& w : ann.warnings) err << "warning: " << w << "\n";
  write_run_files(s.out, sub,
                  {{"command", "annotate"}, {"labeled", ann.labels.size()}, {"warnings", ann.warnings}});
  out << "wrote " << (s.out / "labels.tsv").string() << " (" << ann.labels.size() << " sentences)\n";
  return 0;
}

int cmd_evaluate(Shared& s, const CLI::App* sub, std::ostream& out) {
  if (s.task != "classification" && s.task != "clustering") {
    throw ArgumentError("--task must be classification or clustering");
  }
  const Averaging avg = s.average == "micro" ? Averaging::kMicro : Averaging::kMacro;
  if (s.average != "micro" && s.average != "macro") throw ArgumentError("--average must be macro or micro");
  prepare_dir(s.out);

  LabeledItems gold;
  if (!s.gold.empty()) {
    gold = read_label_file(s.gold, "--gold");
  } else {
    if (s.p.corpus.empty()) throw ArgumentError("evaluate requires --gold or --corpus");
    require_file(s.p.corpus, "--corpus");
    gold = document_labels(ingest(s.p.corpus, parse_corpus_format(s.p.format)));
  }
  std::map<std::string, int> dict;
  std::vector<int> y = encode_labels(gold.labels, &dict);

  std::vector<MetricMap> runs;
  if (!s.predicted.empty()) {
    LabeledItems pred = read_label_file(s.predicted, "--predicted");
    std::map<std::size_t, std::string> by_id;
    for (std::size_t i = 0; i < pred.ids.size(); ++i) by_id[pred.ids[i]] = pred.labels[i];
    std::vector<std::string> aligned;
    for (std::size_t id : gold.ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw ValidationError("--predicted lacks sentence " + std::to_string(id));
      aligned.push_back(it->second);
    }
    std::vector<int> yp = encode_labels(aligned, &dict);
    runs.push_back(s.task == "classification" ? classification_map(y, yp, avg) : clustering_map(y, yp));
  } else {
    if (s.vectors.empty()) throw ArgumentError("evaluate requires --vectors or --predicted");
    require_file(s.vectors, "--vectors");
    VectorTable vectors = load_vector_table(s.vectors);
    auto x = rows_of(vectors, gold.ids);
    for (std::size_t r = 0; r < std::max<std::size_t>(s.runs, 1); ++r) {
      const std::uint64_t seed = derive_seed(s.p.train.seed, r, 0xe7);
      if (s.task == "classification") {
        auto [train, test] = split_indices(x.size(), s.test_fraction, seed);
        if (train.empty() || test.empty()) throw ValidationError("split leaves an empty side");
        std::vector<std::vector<double>> xtr, xte;
        std::vector<int> ytr, yte;
        for (std::size_t i : train) {
          xtr.push_back(x[i]);
          ytr.push_back(y[i]);
        }
        for (std::size_t i : test) {
          xte.push_back(x[i]);
          yte.push_back(y[i]);
        }
        LogisticRegression clf;
        clf.fit(xtr, ytr);
        runs.push_back(classification_map(yte, clf.predict(xte), avg));
      } else {
        KMeansResult km = kmeans(x, distinct(y), s.restarts, seed);
        runs.push_back(clustering_map(y, km.assignment));
      }
    }
  }

  MetricsReport report;
  report.metadata["task"] = s.task;
  report.metadata["seed"] = std::to_string(s.p.train.seed);
  report.metadata["items"] = std::to_string(gold.ids.size());
  report.metadata["config_digest"] = fnv1a_hex(effective_config(sub));
  auto& row = report.variants[s.run_name];
  if (runs.size() == 1) {
    row = runs.front();
  } else {
    for (const auto& [name, summary] : summarize_runs(runs)) {
      row[name] = summary.mean;
      row[name + "_std"] = summary.stddev;
    }
  }
  write_report(s.out, report, out);
  write_run_files(s.out, sub, {{"command", "evaluate"}, {"task", s.task}, {"runs", runs.size()}});
  return 0;
}

// Grid keys a sweep may vary; each maps onto a PipelineOptions field.
using Setter = std::function<void(Shared&, double)>;
const std::map<std::string, Setter>& grid_setters() {
  static const std::map<std::string, Setter> m = {
      {"alpha", [](Shared& s, double v) { s.p.alpha = v; }},
      {"beta", [](Shared& s, double v) { s.p.beta = v; }},
      {"word-beta", [](Shared& s, double v) { s.p.word_beta = v; }},
      {"lr", [](Shared& s, double v) { s.p.train.learning_rate = v; }},
      {"dim", [](Shared& s, double v) { s.p.train.dim = static_cast<std::size_t>(v); }},
      {"epochs", [](Shared& s, double v) { s.p.train.epochs = static_cast<int>(v); }},
      {"negative", [](Shared& s, double v) { s.p.train.negative = static_cast<std::size_t>(v); }},
      {"window", [](Shared& s, double v) { s.p.window = static_cast<std::size_t>(v); }},
      {"walk-length", [](Shared& s, double v) { s.p.walk.walk_length = static_cast<std::size_t>(v); }},
      {"walks-per-node",
       [](Shared& s, double v) { s.p.walk.walks_per_node = static_cast<std::size_t>(v); }},
      {"return-param", [](Shared& s, double v) { s.p.walk.return_param = v; }},
      {"forward-param", [](Shared& s, double v) { s.p.walk.forward_param = v; }},
      {"damping", [](Shared& s, double v) { s.rank.damping = v; }},
      {"edge-min", [](Shared& s, double v) { s.rank.edge_min_weight = v; }},
  };
  return m;
}

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& specs) {
  std::vector<GridAxis> axes;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ArgumentError("--grid expects key=v1,v2,... got '" + spec + "'");
    GridAxis axis{spec.substr(0, eq), {}};
    if (!grid_setters().count(axis.key)) throw ArgumentError("--grid cannot vary '" + axis.key + "'");
    std::istringstream vals(spec.substr(eq + 1));
    std::string v;
    while (std::getline(vals, v, ',')) {
      if (v.empty()) continue;
      try {
        std::size_t used = 0;
        std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ArgumentError("--grid value '" + v + "' for " + axis.key + " is not a number");
      }
      axis.values.push_back(v);
    }
    if (axis.values.empty()) throw ArgumentError("--grid axis '" + axis.key + "' has no values");
    axes.push_back(std::move(axis));
  }
  return axes;
}

// Odometer step over the grid; false once every point has been visited.
bool advance(std::vector<std::size_t>& pos, const std::vector<GridAxis>& axes) {
  for (std::size_t a = axes.size(); a-- > 0;) {
    if (++pos[a] < axes[a].values.size()) return true;
    pos[a] = 0;
  }
  return false;
}

int cmd_sweep(Shared& s, const CLI::App* sub, std::ostream& out) {
  if (s.task != "classification" && s.task != "clustering" && s.task != "ranking") {
    throw ArgumentError("--task must be classification, clustering or ranking");
  }
  finish_train_config(s);
  if (s.p.corpus.empty()) throw ArgumentError("sweep requires --corpus");
  prepare_dir(s.out);
  std::vector<GridAxis> axes = parse_grid(s.grid);

  PipelineInputs in = load_inputs(s.p);
  const Corpus& corpus = *in.corpus;
  if (s.task != "ranking") {
    bool any = std::any_of(corpus.documents().begin(), corpus.documents().end(),
                           [](const Document& d) { return d.label.has_value(); });
    if (!any) throw ValidationError("sweep for " + s.task + " needs a labeled corpus");
  }
  std::optional<ReferenceSet> refs;
  if (s.task == "ranking") {
    if (s.references.empty()) throw ArgumentError("ranking sweep requires --references");
    refs = read_references(s.references);
  }
  auto [train_docs, val_docs] = split_indices(corpus.documents().size(), 0.2, s.p.train.seed);

  // Cartesian product, last axis fastest; an empty grid is the single base point.
  std::vector<std::size_t> pos(axes.size(), 0);
  std::string table = "point\tscore\n";
  json points = json::array();
  std::string best_point;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    Shared point = s;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string& v = axes[a].values[pos[a]];
      grid_setters().at(axes[a].key)(point, std::stod(v));
      if (!label.empty()) label += ',';
      label += axes[a].key + "=" + v;
    }
    if (label.empty()) label = "default";
    TrainOutcome res = train_variant(point.p, in);
    const double score = validation_score(s.task, res.vectors, corpus, train_docs, val_docs,
                                          refs ? &*refs : nullptr, s.budget, point.rank,
                                          point.p.train.seed);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    table += label + "\t" + buf + "\n";
    points.push_back({{"point", label}, {"score", score}});
    if (score > best_score) {  // strict: ties keep the earlier point
      best_score = score;
      best_point = label;
    }
    if (!advance(pos, axes)) break;
  }
  write_text(s.out / "sweep.tsv", table);
  json best{{"task", s.task},
            {"variant", s.p.variant},
            {"best_point", best_point},
            {"best_score", best_score},
            {"validation_documents", val_docs.size()},
            {"points", points}};
  write_text(s.out / "best.json", best.dump(2) + "\n");
  write_run_files(s.out, sub, {{"command", "sweep"}, {"task", s.task}, {"points", points.size()}});
  out << table << "best\t" << best_point << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discourse-informed sentence embeddings"};
  app.name("dis2vec");
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI/TOML config; [command] sections, flags override it");

  Shared s;
  s.run_name = "model";

  auto* train = app.add_subcommand("train", "train one model variant");
  train->add_option("variant", s.p.variant, "model variant")
      ->required()
      ->check(CLI::IsMember(train_variants()));
  add_train_options(train, s);
  train->add_option("--out", s.out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "grid search on a validation split");
  sweep->add_option("variant", s.p.variant, "model variant")
      ->required()
      ->check(CLI::IsMember(train_variants()));
  add_train_options(sweep, s);
  add_rank_options(sweep, s);
  sweep->add_option("--task", s.task, "classification, clustering or ranking")->capture_default_str();
  sweep->add_option("--grid", s.grid, "key=v1,v2,... (repeatable)");
  sweep->add_option("--references", s.references, "reference summaries (JSON lines)");
  sweep->add_option("--budget", s.budget, "summary word budget")->capture_default_str();
  sweep->add_option("--out", s.out, "output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score vectors on a labeled task");
  evaluate->add_option("--task", s.task, "classification or clustering")->capture_default_str();
  evaluate->add_option("--vectors", s.vectors, "sentence vectors");
  add_corpus_options(evaluate, s);
  evaluate->add_option("--gold", s.gold, "sentence_id<TAB>label file (default: document labels)");
  evaluate->add_option("--predicted", s.predicted, "precomputed sentence_id<TAB>label predictions");
  evaluate->add_option("--average", s.average, "macro or micro")->capture_default_str();
  evaluate->add_option("--runs", s.runs, "repeated runs with derived seeds")->capture_default_str();
  evaluate->add_option("--restarts", s.restarts, "k-means restarts")->capture_default_str();
  evaluate->add_option("--test-fraction", s.test_fraction, "held-out share for classification")
      ->capture_default_str();
  evaluate->add_option("--name", s.run_name, "variant name in the report")->capture_default_str();
  evaluate->add_option("--seed", s.p.train.seed, "random seed")->capture_default_str();
  evaluate->add_option("--out", s.out, "output directory")->required();

  auto* summarize = app.add_subcommand("summarize", "extractive summaries by PageRank");
  summarize->add_option("--vectors", s.vectors, "sentence vectors");
  add_corpus_options(summarize, s);
  add_rank_options(summarize, s);
  summarize->add_option("--budget", s.budget, "summary word budget")->capture_default_str();
  summarize->add_option("--references", s.references, "reference summaries (JSON lines)");
  summarize->add_option("--name", s.run_name, "variant name in the report")->capture_default_str();
  summarize->add_option("--out", s.out, "output directory")->required();

  auto* build = app.add_subcommand("build-graph", "discourse graph from sentence vectors");
  build->add_option("--vectors", s.vectors, "sentence vectors");
  add_corpus_options(build, s);
  build->add_option("--intra-thresh", s.graph_cfg.intra_threshold, "within-document threshold")
      ->capture_default_str();
  build->add_option("--across-thresh", s.graph_cfg.across_threshold, "cross-document threshold")
      ->capture_default_str();
  build->add_option("--top-k", s.graph_cfg.top_k, "neighbors kept per node")->capture_default_str();
  build->add_option("--workers", s.p.train.workers, "worker threads")->capture_default_str();
  build->add_option("--out", s.out, "output directory")->required();

  auto* annotate = app.add_subcommand("annotate", "label top-ranked sentences with their document label");
  annotate->add_option("--vectors", s.vectors, "sentence vectors");
  add_corpus_options(annotate, s);
  add_rank_options(annotate, s);
  annotate->add_option("--p-percent", s.p_percent, "share of sentences labeled per document")
      ->capture_default_str();
  annotate->add_option("--out", s.out, "output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (train->parsed()) return cmd_train(s, train, out, err);
    if (sweep->parsed()) return cmd_sweep(s, sweep, out);
    if (evaluate->parsed()) return cmd_evaluate(s, evaluate, out);
    if (summarize->parsed()) return cmd_summarize(s, summarize, out);
    if (build->parsed()) return cmd_build_graph(s, build, out);
    if (annotate->parsed()) return cmd_annotate(s, annotate, out, err);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dis2vec
