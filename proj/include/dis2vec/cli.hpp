#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dis2vec/corpus.hpp"
#include "dis2vec/embedding.hpp"
#include "dis2vec/graph.hpp"
#include "dis2vec/node2vec.hpp"
#include "dis2vec/ranker.hpp"
#include "dis2vec/vector_table.hpp"

namespace dis2vec {

// Everything a training run depends on. Defaults mirror the module defaults.
struct PipelineOptions {
  std::string variant;
  std::filesystem::path corpus, graph, lexicon, lexicon_map, priors;
  std::string format = "jsonl";
  std::size_t min_count = kDefaultMinCount;
  TrainConfig train;
  WalkConfig walk;
  std::optional<std::size_t> window;  // DM window or walk window, by variant
  double alpha = 1.0;
  double beta = 1.0;
  double word_beta = 1.0;
  std::size_t max_iterations = 20;
  double convergence_tol = 1e-4;
};

const std::vector<std::string>& train_variants();

// Inputs loaded once and shared across grid points.
struct PipelineInputs {
  std::optional<Corpus> corpus;
  Vocab vocab;
  std::optional<WeightedGraph> graph;
  std::optional<WeightedGraph> lexicon;
  std::optional<VectorTable> priors;
  std::vector<std::string> warnings;
};

// Loads what `opts.variant` needs; a missing prerequisite raises an
// ArgumentError naming the flag, an absent file an InputError naming the path.
PipelineInputs load_inputs(const PipelineOptions& opts);

struct TrainOutcome {
  VectorTable vectors;
  std::vector<double> epoch_mean_loss;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

TrainOutcome train_variant(const PipelineOptions& opts, const PipelineInputs& inputs);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

// Entry point of the command-line tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dis2vec
