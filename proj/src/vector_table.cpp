#include "dis2vec/vector_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dis2vec/error.hpp"

namespace dis2vec {

std::string VectorTable::id(std::size_t i) const {
  return ids_.empty() ? std::to_string(i) : ids_[i];
}

void VectorTable::set_ids(std::vector<std::string> ids) {
  if (!ids.empty() && ids.size() != rows_) throw ArgumentError("id count must equal row count");
  ids_ = std::move(ids);
}

std::string format_vector_table(const VectorTable& table) {
  std::string out = std::to_string(table.rows()) + " " + std::to_string(table.dim()) + "\n";
  char buf[64];
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out += table.id(i);
    for (double v : table.row(i)) {
      std::snprintf(buf, sizeof buf, " %.6f", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void save_vector_table(const VectorTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write vector table: " + path.string());
  out << format_vector_table(table);
  if (!out) throw InputError("failed writing vector table: " + path.string());
}

VectorTable load_vector_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read vector table: " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing vector table header", 1);
  std::size_t rows = 0, dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> dim)) throw ParseError("expected '<count> <dim>' header", 1);
  }
  VectorTable table(rows, dim);
  std::vector<std::string> ids(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError("missing vector row", line_no);
    std::istringstream fields(line);
    if (!(fields >> ids[r])) throw ParseError("missing row id", line_no);
    auto row = table.row(r);
    for (std::size_t k = 0; k < dim; ++k) {
      std::string tok;
      if (!(fields >> tok)) throw ParseError("row has fewer than dim values", line_no);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw ParseError("bad vector value '" + tok + "'", line_no);
      row[k] = v;
    }
    std::string extra;
    if (fields >> extra) throw ParseError("row has more than dim values", line_no);
  }

  // Reorder numeric tables so that row(i) is id i.
  std::vector<std::size_t> position(rows, rows);
  bool numeric = true;
  for (std::size_t r = 0; r < rows && numeric; ++r) {
    std::size_t id = 0;
    const std::string& s = ids[r];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc() || ptr != s.data() + s.size() || id >= rows ||
        position[id] != rows) {
      numeric = false;
    } else {
      position[id] = r;
    }
  }
  if (!numeric) {
    table.set_ids(std::move(ids));
    return table;
  }
  VectorTable ordered(rows, dim);
  for (std::size_t id = 0; id < rows; ++id) {
    auto src = table.row(position[id]);
    std::copy(src.begin(), src.end(), ordered.row(id).begin());
  }
  return ordered;
}

VectorTable concat_rows(const VectorTable& a, const VectorTable& b) {
  if (a.rows() != b.rows()) throw ArgumentError("concat: row counts differ");
  VectorTable out(a.rows(), a.dim() + b.dim());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), dst.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), dst.begin() + a.dim());
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace dis2vec
