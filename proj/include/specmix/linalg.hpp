#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "specmix/errors.hpp"

namespace specmix::linalg {

// Dense real symmetric matrix. Symmetry is a storage invariant: construction
// mirrors the lower triangle to the upper one, and set() writes both entries,
// so entries(i,j) == entries(j,i) holds exactly.
class SymMatrix {
 public:
  // Mirrors the lower triangle (column <= row is authoritative).
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix Zero(Eigen::Index n);

  Eigen::Index size() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  void set(Eigen::Index i, Eigen::Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Eigen::MatrixXd& mat() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// Top-K eigenpairs ordered by decreasing |eigenvalue|. Columns of `vectors`
// are orthonormal and sign-fixed: the entry of largest absolute value in each
// column is positive (ties broken by lowest row index).
struct EigenDecomp {
  Eigen::VectorXd values;   // K entries, |values[0]| >= ... >= |values[K-1]|
  Eigen::MatrixXd vectors;  // n x K
};

// Top-K eigenpairs of a symmetric matrix by eigenvalue magnitude.
// Deterministic for identical input. Throws InvalidArgumentError when K is
// out of range and NumericFailureError if the solver does not converge.
EigenDecomp sym_eigen_topk(const SymMatrix& m, Eigen::Index k);

// max_k |lambda_k(M)| via power iteration on M^2 (two applications of M per
// step handle +/-lambda pairs). All-ones start vector, a second fixed
// pseudo-random start guards against a start exactly orthogonal to the
// dominant eigenspace; Rayleigh-quotient convergence 1e-10, cap 10000 steps.
double spectral_norm(const SymMatrix& m);

// Normalizes every row to unit l2 norm; returns the normalized matrix and the
// original row norms. A row with norm < 1e-14 raises DegenerateRowError
// carrying the row index.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> row_normalize(
    const Eigen::MatrixXd& u);

// Maximum l2 norm over the rows of M.
double two_to_infty_norm(const Eigen::MatrixXd& m);

// Inverse of a small (K <= 64) square matrix by partial-pivot elimination.
// The condition number is estimated first (SVD); values above 1e12 raise
// IllConditionedError, which upstream callers treat as a failed corner hunt.
Eigen::MatrixXd invert_small(const Eigen::MatrixXd& m);

}  // namespace specmix::linalg
