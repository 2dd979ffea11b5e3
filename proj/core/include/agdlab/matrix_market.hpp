#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace agdlab {

/// Reads a Matrix Market file (coordinate or array, real/integer entries,
/// general or symmetric) into a dense matrix. Symmetric storage is expanded.
Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& context = "<stream>");
Eigen::MatrixXd read_matrix_market_file(const std::string& path);

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_market_file(const std::string& path, const Eigen::MatrixXd& m);

/// Whitespace-separated decimal text vectors (one or more values per line).
std::vector<double> read_vector(std::istream& in, const std::string& context = "<stream>");
std::vector<double> read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const std::vector<double>& v);
void write_vector_file(const std::string& path, const std::vector<double>& v);

}  // namespace agdlab
