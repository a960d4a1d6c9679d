#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "specmix/netmodels.hpp"

namespace specmix::io {

// 12 significant digits; shared by every text format the tools emit.
std::string format_double(double v);

// Edge list: line 1 "n m", then m lines "i j" with 0-based i < j, ASCII
// decimal, newline-terminated.
void write_edge_list(const std::filesystem::path& path,
                     const models::Adjacency& a);
models::Adjacency read_edge_list(const std::filesystem::path& path);

// One row per line, comma-separated, 12 significant digits.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Membership file (row-stochastic rows; rows are renormalized against the
// serialized rounding before validation).
void write_membership(const std::filesystem::path& path,
                      const models::Membership& pi);
models::Membership read_membership(const std::filesystem::path& path);

// Degree parameters, one value per line.
void write_theta(const std::filesystem::path& path,
                 const models::DegreeVector& theta);
models::DegreeVector read_theta(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace specmix::io
