#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace partialreg {

/// Dense row-major CSV without a header. Throws std::runtime_error on ragged
/// rows or unparsable cells.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Reads a single column or single row as a vector.
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& M);
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);

/// Flat `key=value` settings. Several pairs may share a line separated by
/// whitespace; `#` starts a comment. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace partialreg
