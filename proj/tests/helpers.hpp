#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dis2vec/corpus.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("dis2vec-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Corpus with one document per entry, each a list of sentences.
inline dis2vec::Corpus make_corpus(const std::vector<std::vector<std::string>>& docs,
                                   const std::vector<std::string>& labels = {}) {
  dis2vec::Corpus c;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::optional<std::string> label;
    if (d < labels.size()) label = labels[d];
    c.add_document("d" + std::to_string(d), label, docs[d]);
  }
  return c;
}

inline fs::path fixture(const std::string& name) {
  return fs::path(DIS2VEC_TEST_DATA) / name;
}

}  // namespace testing
