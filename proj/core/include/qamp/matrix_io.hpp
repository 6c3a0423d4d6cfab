#pragma once

#include <Eigen/Dense>
#include <filesystem>

namespace qamp {

// CSV matrices carry no header: one row per line, columns comma-separated,
// doubles printed in shortest round-trip form.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& file);
void write_csv_matrix(const std::filesystem::path& file, const Eigen::MatrixXd& m);

// Single-column CSV convenience wrappers.
Eigen::VectorXd read_csv_vector(const std::filesystem::path& file);
void write_csv_vector(const std::filesystem::path& file, const Eigen::VectorXd& v);

// Binary matrix format (little-endian):
//   bytes 0..7   magic "QAMPMAT1"
//   bytes 8..15  uint64 row count
//   bytes 16..23 uint64 column count
//   then rows*cols IEEE-754 doubles, row-major.
Eigen::MatrixXd read_binary_matrix(const std::filesystem::path& file);
void write_binary_matrix(const std::filesystem::path& file, const Eigen::MatrixXd& m);

}  // namespace qamp
