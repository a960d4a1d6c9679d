#include "specmix/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specmix/rng.hpp"

namespace specmix::linalg {

SymMatrix::SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw InvalidArgumentError("symmetric matrix must be square, n >= 1");
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      m_(j, i) = m_(i, j);
    }
  }
}

SymMatrix SymMatrix::Zero(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Zero(n, n));
}

namespace {

// "Largest absolute entry positive" sign rule, ties by lowest row index.
void apply_sign_rule(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors(best, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace

EigenDecomp sym_eigen_topk(const SymMatrix& m, Eigen::Index k) {
  const Eigen::Index n = m.size();
  if (k < 1 || k > n) {
    throw InvalidArgumentError("sym_eigen_topk: K must satisfy 1 <= K <= n");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw NumericFailureError("sym_eigen_topk: eigensolver did not converge");
  }
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double aa = std::abs(vals(a));
                     const double ab = std::abs(vals(b));
                     if (aa != ab) return aa > ab;
                     return vals(a) > vals(b);
                   });

  EigenDecomp out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    out.values(c) = vals(order[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = vecs.col(order[static_cast<std::size_t>(c)]);
  }
  apply_sign_rule(out.vectors);
  return out;
}

namespace {

double power_iteration_sq(const Eigen::MatrixXd& m, Eigen::VectorXd v) {
  constexpr int kMaxIter = 10000;
  constexpr double kTol = 1e-10;
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;
  double rq_prev = -1.0;
  Eigen::VectorXd w(v.size());
  for (int it = 0; it < kMaxIter; ++it) {
    w.noalias() = m * v;
    w = m * w;  // apply twice: iterate M^2
    const double rq = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(rq - rq_prev) <= kTol * std::max(1.0, std::abs(rq))) {
      return std::sqrt(std::max(rq, 0.0));
    }
    rq_prev = rq;
  }
  return std::sqrt(std::max(rq_prev, 0.0));
}

}  // namespace

double spectral_norm(const SymMatrix& m) {
  const Eigen::Index n = m.size();
  const double ones_est =
      power_iteration_sq(m.mat(), Eigen::VectorXd::Ones(n));
  // Fixed pseudo-random start; covers inputs whose dominant eigenspace is
  // orthogonal to the all-ones vector.
  Rng rng(0x5eedf00dULL);
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = 2.0 * rng.next_double() - 1.0;
  const double random_est = power_iteration_sq(m.mat(), std::move(r));
  return std::max(ones_est, random_est);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> row_normalize(
    const Eigen::MatrixXd& u) {
  Eigen::MatrixXd out(u.rows(), u.cols());
  Eigen::VectorXd norms(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double nrm = u.row(i).norm();
    if (nrm < 1e-14) {
      throw DegenerateRowError(static_cast<std::size_t>(i),
                               "row_normalize: zero row");
    }
    norms(i) = nrm;
    out.row(i) = u.row(i) / nrm;
  }
  return {std::move(out), std::move(norms)};
}

double two_to_infty_norm(const Eigen::MatrixXd& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    best = std::max(best, m.row(i).norm());
  }
  return best;
}

Eigen::MatrixXd invert_small(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgumentError("invert_small: matrix must be square");
  }
  if (m.rows() > 64) {
    throw InvalidArgumentError("invert_small: K must be <= 64");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(m.rows() - 1);
  if (!(smin > 0.0) || smax / smin > 1e12) {
    throw IllConditionedError("invert_small: condition number above 1e12");
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m)
      .solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace specmix::linalg
