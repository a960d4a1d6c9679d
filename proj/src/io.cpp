#include "specmix/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace specmix::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_edge_list(const std::filesystem::path& path,
                     const models::Adjacency& a) {
  auto out = open_out(path);
  out << a.n() << ' ' << a.edge_count() << '\n';
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    for (Eigen::Index j = i + 1; j < a.n(); ++j) {
      if (a.sym()(i, j) == 1.0) out << i << ' ' << j << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

models::Adjacency read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  Eigen::Index n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 0) {
    throw IoError("edge list header malformed: " + path.string());
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index e = 0; e < m; ++e) {
    Eigen::Index i = 0, j = 0;
    if (!(in >> i >> j) || i < 0 || j <= i || j >= n) {
      throw IoError("edge list entry " + std::to_string(e) +
                    " malformed: " + path.string());
    }
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return models::Adjacency(linalg::SymMatrix(std::move(a)));
}

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw IoError("non-numeric field in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file: " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_membership(const std::filesystem::path& path,
                      const models::Membership& pi) {
  write_matrix_csv(path, pi.mat());
}

models::Membership read_membership(const std::filesystem::path& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-9) {
      throw IoError("membership row " + std::to_string(i) +
                    " does not sum to 1: " + path.string());
    }
    m.row(i) /= sum;
  }
  return models::Membership(std::move(m));
}

void write_theta(const std::filesystem::path& path,
                 const models::DegreeVector& theta) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < theta.n(); ++i) {
    out << format_double(theta.vec()(i)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

models::DegreeVector read_theta(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> vals;
  double v = 0.0;
  while (in >> v) vals.push_back(v);
  if (vals.empty()) throw IoError("empty theta file: " + path.string());
  Eigen::VectorXd theta(static_cast<Eigen::Index>(vals.size()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    theta(i) = vals[static_cast<std::size_t>(i)];
  }
  return models::DegreeVector(std::move(theta));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace specmix::io
