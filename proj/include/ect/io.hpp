#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ect/grid.hpp"

namespace ect {

/// Writes "rows,cols" then one comma-separated line per row, full precision.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

/// Electrode pair list, one "i,j" line per measurement row.
void write_pairs_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<int, int>>& pairs);
std::vector<std::pair<int, int>> read_pairs_csv(const std::filesystem::path& path);

/// Trace table with an explicit header row naming the columns.
void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

/// 8-bit binary PGM of a region image embedded in the full lattice; values are
/// clamped to [0,1] and scaled to 255, exterior renders black.
void write_pgm(const std::filesystem::path& path, const Grid& grid,
               const Eigen::VectorXd& x_roi);

/// Hex-encoded SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
/// Hex-encoded SHA-256 of a string.
std::string sha256_string(const std::string& data);

}  // namespace ect
