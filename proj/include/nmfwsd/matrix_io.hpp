#pragma once

// Text triplet format shared by every matrix dump:
//
//   rows cols nnz
//   row col value      (nnz lines, 0-based indices)
//
// ASCII, LF-terminated, values in shortest round-trip decimal form.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nmfwsd/matrix.hpp"

namespace nmfwsd {

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw ParseError(line, "bad numeric field '" + std::string(field) + "'");
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Scalar>
void write_triplet_stream(std::ostream& os, Index rows, Index cols,
                          const std::vector<Triplet<Scalar>>& entries) {
  os << rows << ' ' << cols << ' ' << entries.size() << '\n';
  for (const auto& t : entries)
    os << t.row() << ' ' << t.col() << ' '
       << format_real(static_cast<double>(t.value())) << '\n';
}

template <typename Scalar>
std::vector<Triplet<Scalar>> read_triplet_stream(std::istream& is, Index& rows,
                                                 Index& cols) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  auto header = split_fields(line);
  if (header.size() != 3) throw ParseError(1, "header must be 'rows cols nnz'");
  rows = parse_field<Index>(header[0], 1);
  cols = parse_field<Index>(header[1], 1);
  const auto nnz = parse_field<std::size_t>(header[2], 1);
  std::vector<Triplet<Scalar>> entries;
  entries.reserve(nnz);
  while (entries.size() < nnz) {
    ++line_no;
    if (!std::getline(is, line))
      throw ParseError(line_no, "expected " + std::to_string(nnz) +
                                    " entries, found " +
                                    std::to_string(entries.size()));
    auto f = split_fields(line);
    if (f.size() != 3) throw ParseError(line_no, "entry must be 'row col value'");
    entries.emplace_back(parse_field<Index>(f[0], line_no),
                         parse_field<Index>(f[1], line_no),
                         static_cast<Scalar>(parse_field<double>(f[2], line_no)));
  }
  return entries;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  return is;
}

}  // namespace detail

template <typename Scalar>
void write_matrix(std::ostream& os, const SparseMatrix<Scalar>& m) {
  detail::write_triplet_stream(os, m.rows(), m.cols(), m.triplets());
}

/// Dense factors are written as their nonzero entries.
template <typename Derived>
void write_matrix(std::ostream& os, const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  std::vector<Triplet<Scalar>> entries;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != Scalar(0)) entries.emplace_back(i, j, m(i, j));
  detail::write_triplet_stream(os, m.rows(), m.cols(), entries);
}

template <typename Scalar = double>
SparseMatrix<Scalar> read_sparse(std::istream& is) {
  Index rows = 0, cols = 0;
  auto entries = detail::read_triplet_stream<Scalar>(is, rows, cols);
  try {
    return SparseMatrix<Scalar>::from_triplets(rows, cols, entries);
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
}

template <typename Scalar = double>
DenseMatrix<Scalar> read_dense(std::istream& is) {
  // Going through the sparse path gives index and sign validation for free.
  return read_sparse<Scalar>(is).densify();
}

template <typename M>
void save_matrix(const std::filesystem::path& path, const M& m) {
  auto os = detail::open_for_write(path);
  write_matrix(os, m);
  if (!os) throw IoError("failed writing " + path.string());
}

template <typename Scalar = double>
SparseMatrix<Scalar> load_sparse(const std::filesystem::path& path) {
  auto is = detail::open_for_read(path);
  try {
    return read_sparse<Scalar>(is);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  }
}

template <typename Scalar = double>
DenseMatrix<Scalar> load_dense(const std::filesystem::path& path) {
  return load_sparse<Scalar>(path).densify();
}

}  // namespace nmfwsd
