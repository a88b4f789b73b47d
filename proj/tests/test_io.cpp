#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "partialreg/io.hpp"

using namespace partialreg;

namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("partialreg_test_" + name);
}

}  // namespace

TEST_CASE("matrix and vector CSV round trip") {
  Eigen::MatrixXd M(2, 3);
  M << 1.0 / 3.0, -2.5e-300, 7, 0, 1e300, -0.1;
  const auto path = scratch("m.csv");
  write_matrix_csv(path, M);
  CHECK(read_matrix_csv(path) == M);

  Eigen::VectorXd v(3);
  v << M(0, 0), M(0, 1), M(1, 2);
  write_vector_csv(path, v);
  CHECK(read_vector_csv(path) == v);
  {
    std::ofstream out(path);
    out << "1, 2 ,3\n\n";
  }
  CHECK(read_vector_csv(path) == Eigen::Vector3d(1, 2, 3));
  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "1,x\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "1,2\n3,4\n";
  }
  CHECK_THROWS_AS(read_vector_csv(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_matrix_csv(path), std::runtime_error);
}

TEST_CASE("key=value parsing") {
  const auto kv = parse_key_values("a=1 b=two  # comment\n\nc=3\na=4\n");
  CHECK(kv.at("a") == "4");
  CHECK(kv.at("b") == "two");
  CHECK(kv.size() == 3);
  CHECK(kv.at("c") == "3");
  CHECK_THROWS(parse_key_values("novalue"));
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -1e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
