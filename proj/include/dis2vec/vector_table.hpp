#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dis2vec {

// Dense row-major table of `rows` vectors of dimension `dim`. Rows carry an
// optional string id; without explicit ids row i is labeled "i". Sentence and
// node tables use the implicit numeric ids, word tables use the words.
class VectorTable {
 public:
  VectorTable() = default;
  VectorTable(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), values_(rows * dim, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::string id(std::size_t i) const;
  bool has_explicit_ids() const { return !ids_.empty(); }
  void set_ids(std::vector<std::string> ids);

  bool operator==(const VectorTable& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<std::string> ids_;
};

// Text format: a "<count> <dim>" header, then "<id> <v1> ... <vd>" per row
// with six-decimal fixed-point values.
void save_vector_table(const VectorTable& table, const std::filesystem::path& path);
std::string format_vector_table(const VectorTable& table);

// Loads a table. When the ids are exactly a permutation of 0..count-1 the
// rows are reordered so that row(i) holds id i and the ids become implicit.
VectorTable load_vector_table(const std::filesystem::path& path);

// [a | b] per row; both tables must have the same row count.
VectorTable concat_rows(const VectorTable& a, const VectorTable& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace dis2vec
