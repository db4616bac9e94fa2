#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "dis2vec/cli.hpp"
#include "dis2vec/corpus.hpp"
#include "dis2vec/error.hpp"
#include "dis2vec/evaluate.hpp"
#include "dis2vec/metrics.hpp"
#include "dis2vec/ranker.hpp"
#include "dis2vec/retrofit.hpp"
#include "dis2vec/vector_table.hpp"

namespace py = pybind11;
using namespace dis2vec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

VectorTable to_table(const Array& a) {
  if (a.ndim() != 2) throw ArgumentError("expected a 2-d array");
  VectorTable t(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), t.values().begin());
  return t;
}

Array to_array(const VectorTable& t) {
  Array a({t.rows(), t.dim()});
  std::copy(t.values().begin(), t.values().end(), a.mutable_data());
  return a;
}

WeightedGraph to_graph(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  std::vector<EdgeTriple> e;
  e.reserve(edges.size());
  for (const auto& [u, v, w] : edges) e.push_back({u, v, w});
  return WeightedGraph::from_edges(n, e);
}

}  // namespace

PYBIND11_MODULE(_dis2vec, m) {
  m.doc() = "Sentence representation learning with discourse graphs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<EmptyCorpusError>(m, "EmptyCorpusError", base.ptr());
  py::register_exception<EmptyVocabError>(m, "EmptyVocabError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = dis2vec::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run the command-line tool in-process; returns (code, stdout, stderr).");

  m.def("train_variants", &train_variants);

  py::class_<Document>(m, "Document")
      .def_readonly("doc_id", &Document::doc_id)
      .def_readonly("label", &Document::label)
      .def_readonly("sentence_ids", &Document::sentence_ids);
  py::class_<Sentence>(m, "Sentence")
      .def_readonly("id", &Sentence::id)
      .def_readonly("doc", &Sentence::doc)
      .def_readonly("text", &Sentence::text)
      .def_readonly("words", &Sentence::words);
  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("documents", &Corpus::documents)
      .def_property_readonly("sentences", &Corpus::sentences)
      .def("__len__", [](const Corpus& c) { return c.sentences().size(); });
  m.def("load_corpus", [](const std::filesystem::path& path, const std::string& format) {
    return ingest(path, parse_corpus_format(format));
  }, py::arg("path"), py::arg("format") = "jsonl");
  m.def("tokenize", &tokenize);
  m.def("split_sentences", &split_sentences);

  m.def("load_vectors", [](const std::filesystem::path& path) {
    VectorTable t = load_vector_table(path);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < t.rows(); ++i) ids.push_back(t.id(i));
    return py::make_tuple(to_array(t), ids);
  }, py::arg("path"), "Returns (matrix, row ids).");

  m.def("clustering_metrics", [](const std::vector<int>& classes, const std::vector<int>& clusters) {
    ClusteringMetrics r = clustering_metrics(classes, clusters);
    return py::dict(py::arg("homogeneity") = r.homogeneity, py::arg("completeness") = r.completeness,
                    py::arg("v_measure") = r.v_measure, py::arg("ami") = r.ami, py::arg("ami_raw") = r.ami_raw,
                    py::arg("mutual_information") = r.mutual_information,
                    py::arg("expected_mutual_information") = r.expected_mutual_information);
  }, py::arg("classes"), py::arg("clusters"));

  m.def("classification_metrics", [](const std::vector<int>& gold, const std::vector<int>& pred,
                                     const std::string& average) {
    if (average != "macro" && average != "micro") throw ArgumentError("average must be macro or micro");
    ClassificationMetrics r =
        classification_metrics(gold, pred, average == "micro" ? Averaging::kMicro : Averaging::kMacro);
    return py::dict(py::arg("precision") = r.precision, py::arg("recall") = r.recall, py::arg("f1") = r.f1,
                    py::arg("accuracy") = r.accuracy, py::arg("kappa") = r.kappa);
  }, py::arg("gold"), py::arg("predicted"), py::arg("average") = "macro");

  m.def("cohen_kappa", [](const std::vector<int>& g, const std::vector<int>& p) { return cohen_kappa(g, p); });

  m.def("rouge_1", [](const std::vector<std::string>& cand, const std::vector<std::vector<std::string>>& refs,
                      std::size_t limit, bool stopwords) {
    static const std::set<std::string> none;
    return rouge_1(cand, refs, limit, stopwords ? default_stopwords() : none);
  }, py::arg("candidate"), py::arg("references"), py::arg("word_limit") = 100, py::arg("stopwords") = true);

  m.def("pagerank", [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                       double damping) {
    RankConfig cfg;
    cfg.damping = damping;
    return pagerank(to_graph(n, edges), cfg);
  }, py::arg("n"), py::arg("edges"), py::arg("damping") = 0.85);

  m.def("retrofit", [](const Array& prior, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                       double alpha, double beta, bool weighted, std::size_t max_iterations, double tol) {
    VectorTable p = to_table(prior);
    RetrofitConfig cfg;
    cfg.alpha = {alpha};
    cfg.beta = {beta};
    cfg.weighted = weighted;
    cfg.max_iterations = max_iterations;
    cfg.convergence_tol = tol;
    return to_array(retrofit_jacobi(p, to_graph(p.rows(), edges), cfg).vectors);
  }, py::arg("prior"), py::arg("edges"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0,
     py::arg("weighted") = true, py::arg("max_iterations") = 20, py::arg("tol") = 1e-4);

  m.def("kmeans", [](const Array& x, std::size_t k, std::size_t restarts, std::uint64_t seed) {
    VectorTable t = to_table(x);
    std::vector<std::size_t> ids(t.rows());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    KMeansResult r = kmeans(rows_of(t, ids), k, restarts, seed);
    return py::make_tuple(r.assignment, r.inertia);
  }, py::arg("x"), py::arg("k"), py::arg("restarts") = 10, py::arg("seed") = 1);
}
