#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "qamp/matrix_io.hpp"
#include "qamp/synthetic.hpp"

using namespace qamp;

namespace {

std::filesystem::path temp_file(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "qamp_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("csv matrices round-trip bit-exactly") {
  const Eigen::MatrixXd m = gen_features(17, 5, 123);
  const auto file = temp_file("m.csv");
  write_csv_matrix(file, m);
  const Eigen::MatrixXd back = read_csv_matrix(file);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);  // shortest round-trip formatting
}

TEST_CASE("csv vectors round-trip") {
  Eigen::VectorXd v(4);
  v << 1.0, -2.5, 1e-17, 3.0e200;
  const auto file = temp_file("v.csv");
  write_csv_vector(file, v);
  CHECK((read_csv_vector(file) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv reader rejects malformed input") {
  const auto file = temp_file("bad.csv");
  {
    std::ofstream out(file);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_csv_matrix(file), std::runtime_error);
  {
    std::ofstream out(file);
    out << "1,abc\n";
  }
  CHECK_THROWS_AS(read_csv_matrix(file), std::runtime_error);
  CHECK_THROWS_AS(read_csv_matrix(temp_file("missing.csv")), std::runtime_error);
}

TEST_CASE("binary matrices round-trip bit-exactly") {
  const Eigen::MatrixXd m = gen_features(23, 9, 321);
  const auto file = temp_file("m.bin");
  write_binary_matrix(file, m);
  const Eigen::MatrixXd back = read_binary_matrix(file);
  REQUIRE(back.rows() == 23);
  REQUIRE(back.cols() == 9);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary reader rejects a corrupted header") {
  const auto file = temp_file("bad.bin");
  {
    std::ofstream out(file, std::ios::binary);
    out << "NOTMAGIC" << std::string(16, '\0');
  }
  CHECK_THROWS_AS(read_binary_matrix(file), std::runtime_error);
}
