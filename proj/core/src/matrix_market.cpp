#include "agdlab/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace agdlab {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::runtime_error("matrix market (" + context + "): " + what);
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = line.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) continue;
    if (line[i] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& context) {
  std::string header;
  if (!std::getline(in, header)) fail(context, "empty input");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(context, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(context, "unsupported object '" + object + "'");
  if (field != "real" && field != "integer") fail(context, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    fail(context, "unsupported symmetry '" + symmetry + "'");

  std::string line;
  if (!next_data_line(in, line)) fail(context, "missing size line");
  std::istringstream ss(line);

  if (format == "coordinate") {
    long rows = 0, cols = 0, nnz = 0;
    ss >> rows >> cols >> nnz;
    if (ss.fail() || rows <= 0 || cols <= 0 || nnz < 0) fail(context, "bad size line");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (long e = 0; e < nnz; ++e) {
      if (!next_data_line(in, line)) fail(context, "truncated entry list");
      std::istringstream es(line);
      long i = 0, j = 0;
      double v = 0.0;
      es >> i >> j >> v;
      if (es.fail() || i < 1 || i > rows || j < 1 || j > cols) fail(context, "bad entry line");
      m(i - 1, j - 1) = v;
      if (symmetry == "symmetric" && i != j) m(j - 1, i - 1) = v;
    }
    return m;
  }
  if (format == "array") {
    long rows = 0, cols = 0;
    ss >> rows >> cols;
    if (ss.fail() || rows <= 0 || cols <= 0) fail(context, "bad size line");
    Eigen::MatrixXd m(rows, cols);
    // Array storage is column-major; symmetric stores the lower triangle.
    for (long j = 0; j < cols; ++j) {
      const long start = symmetry == "symmetric" ? j : 0;
      for (long i = start; i < rows; ++i) {
        if (!next_data_line(in, line)) fail(context, "truncated array data");
        std::istringstream es(line);
        double v = 0.0;
        es >> v;
        if (es.fail()) fail(context, "bad array value");
        m(i, j) = v;
        if (symmetry == "symmetric") m(j, i) = v;
      }
    }
    return m;
  }
  fail(context, "unsupported format '" + format + "'");
}

Eigen::MatrixXd read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  long nnz = 0;
  for (long j = 0; j < m.cols(); ++j)
    for (long i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << m.rows() << " " << m.cols() << " " << nnz << "\n";
  char buf[64];
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = 0; i < m.rows(); ++i) {
      if (m(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
    }
  }
}

void write_matrix_market_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + path);
  write_matrix_market(out, m);
}

std::vector<double> read_vector(std::istream& in, const std::string& context) {
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t i = line.find_first_not_of(" \t\r\n");
    if (i == std::string::npos || line[i] == '#' || line[i] == '%') continue;
    std::istringstream ss(line);
    double x = 0.0;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) fail(context, "bad vector value");
  }
  return v;
}

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  return read_vector(in, path);
}

void write_vector(std::ostream& out, const std::vector<double>& v) {
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf << "\n";
  }
}

void write_vector_file(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vector file: " + path);
  write_vector(out, v);
}

}  // namespace agdlab
