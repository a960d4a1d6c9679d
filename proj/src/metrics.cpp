#include "specmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specmix/linalg.hpp"

namespace specmix::metrics {

namespace {

void check_row_stochastic(const Eigen::MatrixXd& m, const char* label) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i).minCoeff() < -1e-9 || std::abs(m.row(i).sum() - 1.0) > 1e-8) {
      throw InvalidArgumentError(std::string("membership_error: ") + label +
                                 " is not row-stochastic at row " +
                                 std::to_string(i));
    }
  }
}

// per_col_diff[c][l](i) = |est(i,c) - truth(i,l)|
std::vector<std::vector<Eigen::VectorXd>> column_diffs(
    const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  const Eigen::Index k = est.cols();
  std::vector<std::vector<Eigen::VectorXd>> d(static_cast<std::size_t>(k));
  for (Eigen::Index c = 0; c < k; ++c) {
    d[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(k));
    for (Eigen::Index l = 0; l < k; ++l) {
      d[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)] =
          (est.col(c) - truth.col(l)).cwiseAbs();
    }
  }
  return d;
}

ErrorReport finish_report(const Eigen::MatrixXd& est,
                          const Eigen::MatrixXd& truth,
                          std::vector<Eigen::Index> perm, bool exact) {
  const Eigen::Index n = est.rows();
  const Eigen::Index k = est.cols();
  ErrorReport rep;
  rep.permutation = std::move(perm);
  rep.exact_matching = exact;
  rep.per_node_errors = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < k; ++c) {
    rep.per_node_errors +=
        (est.col(c) - truth.col(rep.permutation[static_cast<std::size_t>(c)]))
            .cwiseAbs();
  }
  rep.max_l1_error = rep.per_node_errors.maxCoeff();
  rep.mean_l1_error = rep.per_node_errors.mean();
  return rep;
}

void check_shapes(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw InvalidArgumentError("membership_error: shape mismatch");
  }
  if (est.rows() < 1 || est.cols() < 1) {
    throw InvalidArgumentError("membership_error: empty input");
  }
  check_row_stochastic(est, "estimate");
  check_row_stochastic(truth, "truth");
}

}  // namespace

ErrorReport membership_error_exhaustive(const Eigen::MatrixXd& est,
                                        const Eigen::MatrixXd& truth) {
  check_shapes(est, truth);
  const Eigen::Index k = est.cols();
  if (k > 8) {
    throw InvalidArgumentError("exhaustive matching supports K <= 8 only");
  }
  const auto diffs = column_diffs(est, truth);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::vector<Eigen::Index> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd acc(est.rows());
  do {
    acc.setZero();
    for (Eigen::Index c = 0; c < k; ++c) {
      acc += diffs[static_cast<std::size_t>(c)]
                  [static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
    }
    const double worst = acc.maxCoeff();
    if (worst < best) {
      best = worst;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return finish_report(est, truth, std::move(best_perm), true);
}

ErrorReport membership_error_greedy(const Eigen::MatrixXd& est,
                                    const Eigen::MatrixXd& truth) {
  check_shapes(est, truth);
  const Eigen::Index k = est.cols();
  Eigen::MatrixXd cost(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index l = 0; l < k; ++l) {
      cost(c, l) = (est.col(c) - truth.col(l)).cwiseAbs().sum();
    }
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k), -1);
  std::vector<bool> col_used(static_cast<std::size_t>(k), false);
  std::vector<bool> row_used(static_cast<std::size_t>(k), false);
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bc = -1, bl = -1;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (row_used[static_cast<std::size_t>(c)]) continue;
      for (Eigen::Index l = 0; l < k; ++l) {
        if (col_used[static_cast<std::size_t>(l)]) continue;
        if (cost(c, l) < best) {
          best = cost(c, l);
          bc = c;
          bl = l;
        }
      }
    }
    perm[static_cast<std::size_t>(bc)] = bl;
    row_used[static_cast<std::size_t>(bc)] = true;
    col_used[static_cast<std::size_t>(bl)] = true;
  }
  return finish_report(est, truth, std::move(perm), false);
}

ErrorReport membership_error(const Eigen::MatrixXd& est,
                             const Eigen::MatrixXd& truth) {
  if (est.cols() <= 8) return membership_error_exhaustive(est, truth);
  return membership_error_greedy(est, truth);
}

EigenspaceReport eigenspace_error(const Eigen::MatrixXd& u_hat,
                                  const Eigen::MatrixXd& u) {
  if (u_hat.rows() != u.rows() || u_hat.cols() != u.cols()) {
    throw InvalidArgumentError("eigenspace_error: shape mismatch");
  }
  const Eigen::Index k = u.cols();
  const auto check_orthonormal = [&](const Eigen::MatrixXd& m,
                                     const char* label) {
    const Eigen::MatrixXd gram = m.transpose() * m;
    const double dev =
        (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (dev > 1e-8) {
      throw InvalidArgumentError(
          std::string("eigenspace_error: columns of ") + label +
          " are not orthonormal");
    }
  };
  check_orthonormal(u_hat, "u_hat");
  check_orthonormal(u, "u");

  const Eigen::Index n = u.rows();
  constexpr Eigen::Index kBlock = 256;
  double worst = 0.0;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - start);
    const Eigen::MatrixXd block =
        u_hat.middleRows(start, rows) * u_hat.transpose() -
        u.middleRows(start, rows) * u.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      worst = std::max(worst, block.row(i).norm());
    }
  }
  return {worst};
}

double bernstein_constant(double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidArgumentError("bernstein_constant: alpha must be > 0");
  }
  return (alpha + 1.0 + std::sqrt((alpha + 1.0) * (alpha + 19.0))) / 3.0;
}

DeviationReport spectral_deviation(const models::Adjacency& a,
                                   const models::PopulationMatrix& omega,
                                   double alpha) {
  if (a.n() != omega.n()) {
    throw InvalidArgumentError("spectral_deviation: shape mismatch");
  }
  const double n = static_cast<double>(a.n());
  const double logn = std::log(n);
  const double c = bernstein_constant(alpha);
  DeviationReport rep;
  rep.spectral_dev =
      linalg::spectral_norm(linalg::SymMatrix(a.mat() - omega.omega().mat()));
  double radicand = 0.0;
  if (omega.model() == models::ModelKind::kMmsb) {
    radicand = *omega.rho() * n * logn;
  } else {
    const auto& theta = *omega.theta();
    radicand = omega.ptilde().max_entry() * theta.max() * theta.l1() * logn;
  }
  rep.bound = c * std::sqrt(radicand);
  if (rep.spectral_dev == 0.0) {
    rep.ratio = 0.0;
  } else if (rep.bound == 0.0) {
    rep.ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.ratio = rep.spectral_dev / rep.bound;
  }
  return rep;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(Eigen::Index n)
      : parent_(static_cast<std::size_t>(n)), components_(n) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(
              parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent_[static_cast<std::size_t>(a)] = b;
      --components_;
    }
  }
  Eigen::Index components() const { return components_; }

 private:
  std::vector<Eigen::Index> parent_;
  Eigen::Index components_;
};

}  // namespace

bool is_connected(const models::Adjacency& a) {
  const Eigen::Index n = a.n();
  UnionFind uf(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (a.sym()(i, j) == 1.0) uf.unite(i, j);
    }
  }
  return uf.components() == 1;
}

namespace {

// Symmetric PSD square root of a K x K matrix.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& g) {
  const auto dec = linalg::sym_eigen_topk(linalg::SymMatrix(g), g.rows());
  Eigen::VectorXd roots(dec.values.size());
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    roots(i) = std::sqrt(std::max(dec.values(i), 0.0));
  }
  return dec.vectors * roots.asDiagonal() * dec.vectors.transpose();
}

// Smallest |eigenvalue| of G^{1/2} Ptilde G^{1/2}: the K-th singular value of
// the population matrix built from factors with Gram matrix G.
double sigma_k_from_gram(const Eigen::MatrixXd& gram,
                         const models::MixingMatrix& ptilde) {
  const Eigen::MatrixXd root = psd_sqrt(gram);
  const Eigen::MatrixXd core = root * ptilde.mat() * root;
  const auto dec = linalg::sym_eigen_topk(linalg::SymMatrix(core), core.rows());
  return std::abs(dec.values(core.rows() - 1));
}

DiagnosticRecord base_diagnostics(const models::Membership& pi,
                                  const models::MixingMatrix& ptilde) {
  DiagnosticRecord rec;
  rec.sigma_k_p = ptilde.sigma_k();
  const Eigen::MatrixXd gram = pi.mat().transpose() * pi.mat();
  const auto dec =
      linalg::sym_eigen_topk(linalg::SymMatrix(gram), gram.rows());
  rec.lambda_1_gram = dec.values(0);
  rec.lambda_k_gram = dec.values(gram.rows() - 1);
  rec.kappa_gram = rec.lambda_k_gram > 0.0
                       ? rec.lambda_1_gram / rec.lambda_k_gram
                       : std::numeric_limits<double>::infinity();
  rec.pi_min = pi.mat().colwise().sum().minCoeff();
  return rec;
}

}  // namespace

DiagnosticRecord instance_diagnostics(const models::Membership& pi,
                                      const models::MixingMatrix& ptilde,
                                      double rho) {
  DiagnosticRecord rec = base_diagnostics(pi, ptilde);
  const Eigen::MatrixXd gram = pi.mat().transpose() * pi.mat();
  rec.sigma_k_omega = rho * sigma_k_from_gram(gram, ptilde);
  return rec;
}

DiagnosticRecord instance_diagnostics(const models::Membership& pi,
                                      const models::MixingMatrix& ptilde,
                                      const models::DegreeVector& theta) {
  DiagnosticRecord rec = base_diagnostics(pi, ptilde);
  const Eigen::MatrixXd weighted =
      theta.vec().asDiagonal() * pi.mat();  // Theta * Pi
  const Eigen::MatrixXd gram = weighted.transpose() * weighted;
  rec.sigma_k_omega = sigma_k_from_gram(gram, ptilde);
  rec.theta_max = theta.max();
  rec.theta_min = theta.min();
  rec.theta_l1 = theta.l1();
  return rec;
}

}  // namespace specmix::metrics
