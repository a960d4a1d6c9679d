#include "specmix/netmodels.hpp"

#include <cmath>

#include "specmix/rng.hpp"

namespace specmix::models {

MixingMatrix::MixingMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw InvalidArgumentError("mixing matrix must be square, K >= 1");
  }
  if (!entries_.isApprox(entries_.transpose(), 0.0)) {
    throw InvalidArgumentError("mixing matrix must be symmetric");
  }
  if (entries_.minCoeff() < 0.0) {
    throw InvalidArgumentError("mixing matrix entries must be nonnegative");
  }
}

bool MixingMatrix::is_mmsb_normalized() const { return max_entry() == 1.0; }

bool MixingMatrix::has_unit_diagonal() const {
  return (entries_.diagonal().array() == 1.0).all();
}

double MixingMatrix::sigma_k() const {
  const auto dec =
      linalg::sym_eigen_topk(linalg::SymMatrix(entries_), entries_.rows());
  return std::abs(dec.values(entries_.rows() - 1));
}

MixingMatrix build_ptilde_standard(Eigen::Index k, double omega) {
  if (k < 1) throw InvalidArgumentError("build_ptilde_standard: K >= 1");
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw InvalidArgumentError("build_ptilde_standard: omega must be in (0,1]");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(k, k, 1.0 - omega);
  p.diagonal().setOnes();
  return MixingMatrix(std::move(p));
}

MixingMatrix build_ptilde_offdiag(Eigen::Index k, double beta) {
  if (k < 1) throw InvalidArgumentError("build_ptilde_offdiag: K >= 1");
  if (beta == 2.0) {
    throw SingularMixingError("build_ptilde_offdiag: beta = 2 is rank 1");
  }
  if (beta < 1.0) {
    throw InvalidArgumentError(
        "build_ptilde_offdiag: beta must be in [1,2) or (2,inf)");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(k, k, beta - 1.0);
  p.diagonal().setOnes();
  return MixingMatrix(std::move(p));
}

Membership::Membership(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  const Eigen::Index n = rows_.rows();
  const Eigen::Index k = rows_.cols();
  if (n < 1 || k < 1 || n < k) {
    throw InvalidArgumentError("membership: need n >= K >= 1");
  }
  if (rows_.minCoeff() < 0.0) {
    throw InvalidArgumentError("membership: entries must be nonnegative");
  }
  std::vector<bool> has_pure(static_cast<std::size_t>(k), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sum = rows_.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InvalidArgumentError("membership: row " + std::to_string(i) +
                                 " does not sum to 1");
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (rows_(i, c) == 1.0) has_pure[static_cast<std::size_t>(c)] = true;
    }
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!has_pure[static_cast<std::size_t>(c)]) {
      throw InvalidArgumentError("membership: community " + std::to_string(c) +
                                 " has no pure node");
    }
  }
}

Membership sample_membership(Eigen::Index n, Eigen::Index k, double frac_pure,
                             double dirichlet_a, std::uint64_t seed) {
  if (n < k) throw InvalidArgumentError("sample_membership: need n >= K");
  if (k < 1) throw InvalidArgumentError("sample_membership: need K >= 1");
  if (frac_pure < 0.0 || frac_pure > 1.0) {
    throw InvalidArgumentError("sample_membership: frac_pure must be in [0,1]");
  }
  if (!(dirichlet_a > 0.0)) {
    throw InvalidArgumentError("sample_membership: dirichlet_a must be > 0");
  }
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, k);
  // Pinned pure block makes identifiability hold surely, not just w.h.p.
  for (Eigen::Index i = 0; i < k; ++i) rows(i, i) = 1.0;
  Rng rng(seed);
  for (Eigen::Index i = k; i < n; ++i) {
    if (rng.next_double() < frac_pure) {
      rows(i, static_cast<Eigen::Index>(rng.next_below(
                  static_cast<std::uint64_t>(k)))) = 1.0;
      continue;
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      rows(i, c) = rng.next_gamma(dirichlet_a);
      sum += rows(i, c);
    }
    if (sum <= 0.0 || !std::isfinite(sum)) {
      rows.row(i).setConstant(1.0 / static_cast<double>(k));
    } else {
      rows.row(i) /= sum;
    }
  }
  return Membership(std::move(rows));
}

DegreeVector::DegreeVector(Eigen::VectorXd theta) : theta_(std::move(theta)) {
  if (theta_.size() < 1) {
    throw InvalidArgumentError("degree vector must be nonempty");
  }
  if (!(theta_.minCoeff() > 0.0)) {
    throw InvalidArgumentError("degree parameters must be strictly positive");
  }
}

DegreeVector sample_theta(Eigen::Index n, double rho, double lo_ratio,
                          std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw InvalidArgumentError("sample_theta: rho must be in (0,1]");
  }
  if (!(lo_ratio > 0.0 && lo_ratio <= 1.0)) {
    throw InvalidArgumentError("sample_theta: lo_ratio must be in (0,1]");
  }
  Rng rng(seed);
  Eigen::VectorXd theta(n);
  const double root = std::sqrt(rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    theta(i) = root * rng.next_uniform(lo_ratio, 1.0);
  }
  return DegreeVector(std::move(theta));
}

namespace {

// Mirrors the lower triangle so Omega is exactly symmetric despite
// floating-point evaluation order.
linalg::SymMatrix symmetrize(Eigen::MatrixXd m) {
  return linalg::SymMatrix(std::move(m));
}

}  // namespace

PopulationMatrix omega_mmsb(double rho, const MixingMatrix& ptilde,
                            const Membership& pi) {
  if (pi.k() != ptilde.k()) {
    throw InvalidArgumentError("omega_mmsb: Pi and Ptilde disagree on K");
  }
  if (rho < 0.0) throw InvalidArgumentError("omega_mmsb: rho must be >= 0");
  if (rho * ptilde.max_entry() > 1.0) {
    throw InvalidProbabilityError(
        "omega_mmsb: rho * max(Ptilde) exceeds 1");
  }
  if (!ptilde.is_mmsb_normalized() && rho > 0.0) {
    throw InvalidArgumentError(
        "omega_mmsb: Ptilde must have maximum entry 1 under MMSB");
  }
  Eigen::MatrixXd om = rho * (pi.mat() * ptilde.mat() * pi.mat().transpose());
  return PopulationMatrix(ModelKind::kMmsb, symmetrize(std::move(om)), ptilde,
                          pi, rho, std::nullopt);
}

PopulationMatrix omega_dcmm(const DegreeVector& theta,
                            const MixingMatrix& ptilde, const Membership& pi) {
  if (pi.k() != ptilde.k()) {
    throw InvalidArgumentError("omega_dcmm: Pi and Ptilde disagree on K");
  }
  if (theta.n() != pi.n()) {
    throw InvalidArgumentError("omega_dcmm: theta and Pi disagree on n");
  }
  if (!ptilde.has_unit_diagonal()) {
    throw InvalidArgumentError(
        "omega_dcmm: Ptilde must have unit diagonals under DCMM");
  }
  if (theta.max() * ptilde.max_entry() > 1.0) {
    throw InvalidProbabilityError(
        "omega_dcmm: theta_max * max(Ptilde) exceeds 1");
  }
  Eigen::MatrixXd core = pi.mat() * ptilde.mat() * pi.mat().transpose();
  Eigen::MatrixXd om =
      theta.vec().asDiagonal() * core * theta.vec().asDiagonal();
  return PopulationMatrix(ModelKind::kDcmm, symmetrize(std::move(om)), ptilde,
                          pi, std::nullopt, theta);
}

Adjacency::Adjacency(linalg::SymMatrix a) : a_(std::move(a)) {
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    if (a_(i, i) != 0.0) {
      throw InvalidArgumentError("adjacency: diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = a_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw InvalidArgumentError("adjacency: entries must be 0 or 1");
      }
    }
  }
}

Eigen::Index Adjacency::edge_count() const {
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < n(); ++i) {
    for (Eigen::Index j = i + 1; j < n(); ++j) {
      if (a_(i, j) == 1.0) ++m;
    }
  }
  return m;
}

Adjacency sample_adjacency(const PopulationMatrix& omega, std::uint64_t seed) {
  const Eigen::Index n = omega.n();
  Rng rng(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double p = omega.omega()(i, j);
      const double u = rng.next_double();
      if (u < p) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return Adjacency(linalg::SymMatrix(std::move(a)));
}

Adjacency sample_er(Eigen::Index n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) {
    throw InvalidProbabilityError("sample_er: p must be in [0,1]");
  }
  const MixingMatrix unit{Eigen::MatrixXd::Ones(1, 1)};
  const Membership all_ones{Eigen::MatrixXd::Ones(n, 1)};
  return sample_adjacency(omega_mmsb(p, unit, all_ones), seed);
}

bool gate_a1(double rho, Eigen::Index n) {
  return rho * static_cast<double>(n) >= std::log(static_cast<double>(n));
}

bool gate_a2(double ptilde_max, const DegreeVector& theta) {
  return ptilde_max * theta.max() * theta.l1() >=
         std::log(static_cast<double>(theta.n()));
}

}  // namespace specmix::models
