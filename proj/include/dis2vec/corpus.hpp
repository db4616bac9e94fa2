#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dis2vec {

enum class CorpusFormat {
  // One JSON object per line with "doc_id", "label" (optional) and "text".
  kJsonLines,
  // Directory of plain-text files, file name = doc id, one sentence per line.
  // An optional "labels.tsv" sidecar maps doc_id<TAB>label.
  kDirectory,
};

CorpusFormat parse_corpus_format(std::string_view tag);

struct Sentence {
  std::size_t id = 0;
  std::size_t doc = 0;             // index into Corpus::documents
  std::string text;                // original segment, untokenized
  std::vector<std::string> words;  // normalized tokens
  std::vector<std::size_t> tokens; // vocabulary ids; filled by Corpus::index
};

struct Document {
  std::string doc_id;
  std::optional<std::string> label;
  std::vector<std::size_t> sentence_ids;
};

// Words ordered by descending count, ties broken lexicographically.
class Vocab {
 public:
  Vocab() = default;
  Vocab(std::vector<std::string> words, std::vector<std::size_t> counts,
        std::size_t total_tokens);

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  std::size_t count(std::size_t i) const { return counts_[i]; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t total_tokens() const { return total_tokens_; }

  std::optional<std::size_t> find(std::string_view word) const;

  // Fraction of all corpus tokens (rare words included) taken by word i.
  double frequency(std::size_t i) const {
    return static_cast<double>(counts_[i]) / static_cast<double>(total_tokens_);
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::size_t total_tokens_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

class Corpus {
 public:
  Corpus() = default;

  // Builds a corpus from (doc_id, label, sentences) triples. Sentences whose
  // token list is empty are dropped; documents left without sentences are
  // dropped too.
  void add_document(std::string doc_id, std::optional<std::string> label,
                    const std::vector<std::string>& sentence_texts);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& sentence(std::size_t id) const { return sentences_[id]; }
  const Document& document_of(std::size_t sentence_id) const {
    return documents_[sentences_[sentence_id].doc];
  }
  std::size_t total_words() const;

  // Resolves each sentence's words against the vocabulary; out-of-vocabulary
  // words are skipped.
  void index(const Vocab& vocab);
  bool indexed() const { return indexed_; }

 private:
  std::vector<Document> documents_;
  std::vector<Sentence> sentences_;
  std::unordered_map<std::string, std::size_t> doc_index_;
  bool indexed_ = false;
};

// Lowercases, splits on whitespace, strips leading/trailing punctuation and
// keeps internal hyphens and apostrophes. Tokens that end up empty vanish.
std::vector<std::string> tokenize(std::string_view text);

// Splits text after '.', '!' or '?' when followed by whitespace or the end
// of input. Segments are whitespace-trimmed; empty segments are dropped.
std::vector<std::string> split_sentences(std::string_view text);

Corpus ingest(const std::filesystem::path& path, CorpusFormat format);

constexpr std::size_t kDefaultMinCount = 5;

Vocab build_vocab(const Corpus& corpus, std::size_t min_count = kDefaultMinCount);

constexpr double kDefaultSubsampleThreshold = 1e-5;

// word2vec keep probability min(1, sqrt(t/f) + t/f).
double subsample_keep_prob(double word_freq, double threshold);

}  // namespace dis2vec
