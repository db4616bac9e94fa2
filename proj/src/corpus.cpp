#include "dis2vec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dis2vec/error.hpp"

namespace dis2vec {

namespace {

// Byte length of a whitespace code point starting at s[i], or 0.
std::size_t whitespace_length(std::string_view s, std::size_t i) {
  auto at = [&](std::size_t k) -> unsigned char {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0;
  };
  unsigned char c = at(0);
  if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
  if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
  if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
  if (c == 0xE2 && at(1) == 0x80 &&
      ((at(2) >= 0x80 && at(2) <= 0x8A) || at(2) == 0xA8 || at(2) == 0xA9 || at(2) == 0xAF))
    return 3;
  if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
  if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
  return 0;
}

bool is_ascii_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e) {
    std::size_t w = whitespace_length(s, b);
    if (w == 0) break;
    b += w;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Corpus ingest_jsonl(const std::filesystem::path& path) {
  Corpus corpus;
  std::size_t line_no = 0;
  std::map<std::string, bool> seen;
  for (const std::string& line : split_lines(read_file(path))) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record is not an object", line_no);
    if (!rec.contains("doc_id") || !rec["doc_id"].is_string())
      throw ParseError("missing string field 'doc_id'", line_no);
    if (!rec.contains("text") || !rec["text"].is_string())
      throw ParseError("missing string field 'text'", line_no);
    std::optional<std::string> label;
    if (rec.contains("label") && !rec["label"].is_null()) {
      if (!rec["label"].is_string()) throw ParseError("'label' must be a string", line_no);
      label = rec["label"].get<std::string>();
    }
    std::string doc_id = rec["doc_id"].get<std::string>();
    if (seen[doc_id]) throw ValidationError("duplicate doc_id '" + doc_id + "'");
    seen[doc_id] = true;
    corpus.add_document(doc_id, label, split_sentences(rec["text"].get<std::string>()));
  }
  return corpus;
}

Corpus ingest_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  const std::string sidecar = "labels.tsv";
  std::map<std::string, std::string> labels;
  if (fs::exists(dir / sidecar)) {
    std::size_t line_no = 0;
    for (const std::string& line : split_lines(read_file(dir / sidecar))) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("expected doc_id<TAB>label", line_no);
      labels[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name == sidecar || name.starts_with('.')) continue;
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  Corpus corpus;
  for (const std::string& name : names) {
    std::vector<std::string> sentences;
    for (const std::string& line : split_lines(read_file(dir / name))) {
      std::string t = trim(line);
      if (!t.empty()) sentences.push_back(t);
    }
    std::optional<std::string> label;
    if (auto it = labels.find(name); it != labels.end()) label = it->second;
    corpus.add_document(name, label, sentences);
  }
  return corpus;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view tag) {
  if (tag == "jsonl") return CorpusFormat::kJsonLines;
  if (tag == "dir") return CorpusFormat::kDirectory;
  throw ArgumentError("unknown corpus format '" + std::string(tag) + "' (expected jsonl or dir)");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t w = whitespace_length(text, i);
    if (w) {
      i += w;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && whitespace_length(text, i) == 0) ++i;
    std::size_t b = start, e = i;
    while (b < e && is_ascii_punct(text[b])) ++b;
    while (e > b && is_ascii_punct(text[e - 1])) --e;
    if (b == e) continue;
    std::string tok(text.substr(b, e - b));
    for (char& c : tok) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    bool boundary = i + 1 == text.size() || whitespace_length(text, i + 1) > 0;
    if (!boundary) continue;
    std::string seg = trim(text.substr(start, i + 1 - start));
    if (!seg.empty()) out.push_back(std::move(seg));
    start = i + 1;
  }
  std::string tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

void Corpus::add_document(std::string doc_id, std::optional<std::string> label,
                          const std::vector<std::string>& sentence_texts) {
  if (doc_index_.count(doc_id)) throw ValidationError("duplicate doc_id '" + doc_id + "'");
  Document doc;
  doc.doc_id = doc_id;
  doc.label = std::move(label);
  const std::size_t doc_pos = documents_.size();
  for (const std::string& text : sentence_texts) {
    auto words = tokenize(text);
    if (words.empty()) continue;
    Sentence s;
    s.id = sentences_.size();
    s.doc = doc_pos;
    s.text = text;
    s.words = std::move(words);
    doc.sentence_ids.push_back(s.id);
    sentences_.push_back(std::move(s));
  }
  if (doc.sentence_ids.empty()) return;
  doc_index_[doc_id] = doc_pos;
  documents_.push_back(std::move(doc));
  indexed_ = false;
}

std::size_t Corpus::total_words() const {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.words.size();
  return n;
}

void Corpus::index(const Vocab& vocab) {
  for (auto& s : sentences_) {
    s.tokens.clear();
    for (const auto& w : s.words) {
      if (auto id = vocab.find(w)) s.tokens.push_back(*id);
    }
  }
  indexed_ = true;
}

Corpus ingest(const std::filesystem::path& path, CorpusFormat format) {
  if (!std::filesystem::exists(path)) throw InputError("no such path: " + path.string());
  Corpus corpus = format == CorpusFormat::kJsonLines ? ingest_jsonl(path) : ingest_directory(path);
  if (corpus.documents().empty()) throw EmptyCorpusError("corpus has no documents: " + path.string());
  return corpus;
}

Vocab::Vocab(std::vector<std::string> words, std::vector<std::size_t> counts,
             std::size_t total_tokens)
    : words_(std::move(words)), counts_(std::move(counts)), total_tokens_(total_tokens) {
  for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = i;
}

std::optional<std::size_t> Vocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocab build_vocab(const Corpus& corpus, std::size_t min_count) {
  if (corpus.sentences().empty()) throw EmptyCorpusError("cannot build a vocabulary from an empty corpus");
  if (min_count == 0) throw ArgumentError("min_count must be positive");
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& s : corpus.sentences()) {
    for (const auto& w : s.words) ++counts[w];
    total += s.words.size();
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  if (kept.empty()) throw EmptyVocabError("every word is below min_count " + std::to_string(min_count));
  // std::map iteration is lexicographic, so a stable sort on count keeps ties ordered.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  std::vector<std::size_t> cnt;
  for (auto& [w, c] : kept) {
    words.push_back(w);
    cnt.push_back(c);
  }
  return Vocab(std::move(words), std::move(cnt), total);
}

double subsample_keep_prob(double word_freq, double threshold) {
  if (!(word_freq > 0.0) || word_freq > 1.0) throw ArgumentError("word frequency must be in (0, 1]");
  if (!(threshold > 0.0)) throw ArgumentError("subsampling threshold must be positive");
  double r = threshold / word_freq;
  return std::min(1.0, std::sqrt(r) + r);
}

}  // namespace dis2vec
