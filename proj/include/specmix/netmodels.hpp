#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "specmix/errors.hpp"
#include "specmix/linalg.hpp"

namespace specmix::models {

enum class ModelKind { kMmsb, kDcmm };

inline std::string to_string(ModelKind m) {
  return m == ModelKind::kMmsb ? "mmsb" : "dcmm";
}

// K x K symmetric community connectivity matrix.
class MixingMatrix {
 public:
  explicit MixingMatrix(Eigen::MatrixXd entries);

  Eigen::Index k() const { return entries_.rows(); }
  const Eigen::MatrixXd& mat() const { return entries_; }
  double max_entry() const { return entries_.maxCoeff(); }
  double min_entry() const { return entries_.minCoeff(); }

  // Model-identifiability predicates: the MMSB flavor normalizes the largest
  // entry to 1, the DCMM flavor requires unit diagonals.
  bool is_mmsb_normalized() const;
  bool has_unit_diagonal() const;

  // Smallest singular value (separation parameter).
  double sigma_k() const;

 private:
  Eigen::MatrixXd entries_;
};

// Standard network: unit diagonal, off-diagonal 1 - omega; sigma_K = omega.
MixingMatrix build_ptilde_standard(Eigen::Index k, double omega);

// Off-diagonal-dominant variant: unit diagonal, off-diagonal beta - 1;
// sigma_K = |beta - 2|. beta == 2 is singular.
MixingMatrix build_ptilde_offdiag(Eigen::Index k, double beta);

// n x K row-stochastic membership matrix with at least one pure row per
// community (rows 0..K-1 are pinned to the standard basis by the sampler).
class Membership {
 public:
  explicit Membership(Eigen::MatrixXd rows);

  Eigen::Index n() const { return rows_.rows(); }
  Eigen::Index k() const { return rows_.cols(); }
  const Eigen::MatrixXd& mat() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// Rows 0..K-1 are e_0..e_{K-1}; each remaining row is pure with probability
// frac_pure (community chosen uniformly) and otherwise drawn from a symmetric
// Dirichlet(dirichlet_a). Deterministic per seed.
Membership sample_membership(Eigen::Index n, Eigen::Index k, double frac_pure,
                             double dirichlet_a, std::uint64_t seed);

// Per-node degree parameters, all strictly positive.
class DegreeVector {
 public:
  explicit DegreeVector(Eigen::VectorXd theta);

  Eigen::Index n() const { return theta_.size(); }
  const Eigen::VectorXd& vec() const { return theta_; }
  double max() const { return theta_.maxCoeff(); }
  double min() const { return theta_.minCoeff(); }
  double l1() const { return theta_.sum(); }

 private:
  Eigen::VectorXd theta_;
};

// theta(i) = sqrt(rho) * u_i with u_i ~ Uniform[lo_ratio, 1].
DegreeVector sample_theta(Eigen::Index n, double rho, double lo_ratio,
                          std::uint64_t seed);

// Expected adjacency Omega together with the generating parameters.
class PopulationMatrix {
 public:
  ModelKind model() const { return model_; }
  const linalg::SymMatrix& omega() const { return omega_; }
  Eigen::Index n() const { return omega_.size(); }
  Eigen::Index k() const { return ptilde_.k(); }
  const MixingMatrix& ptilde() const { return ptilde_; }
  const Membership& membership() const { return membership_; }
  // Set for MMSB instances.
  std::optional<double> rho() const { return rho_; }
  // Set for DCMM instances.
  const std::optional<DegreeVector>& theta() const { return theta_; }

  friend PopulationMatrix omega_mmsb(double rho, const MixingMatrix& ptilde,
                                     const Membership& pi);
  friend PopulationMatrix omega_dcmm(const DegreeVector& theta,
                                     const MixingMatrix& ptilde,
                                     const Membership& pi);

 private:
  PopulationMatrix(ModelKind model, linalg::SymMatrix omega,
                   MixingMatrix ptilde, Membership membership,
                   std::optional<double> rho, std::optional<DegreeVector> theta)
      : model_(model),
        omega_(std::move(omega)),
        ptilde_(std::move(ptilde)),
        membership_(std::move(membership)),
        rho_(rho),
        theta_(std::move(theta)) {}

  ModelKind model_;
  linalg::SymMatrix omega_;
  MixingMatrix ptilde_;
  Membership membership_;
  std::optional<double> rho_;
  std::optional<DegreeVector> theta_;
};

// Omega = rho * Pi * Ptilde * Pi'.
PopulationMatrix omega_mmsb(double rho, const MixingMatrix& ptilde,
                            const Membership& pi);

// Omega = Theta * Pi * Ptilde * Pi' * Theta.
PopulationMatrix omega_dcmm(const DegreeVector& theta,
                            const MixingMatrix& ptilde, const Membership& pi);

// Symmetric binary adjacency matrix with zero diagonal.
class Adjacency {
 public:
  explicit Adjacency(linalg::SymMatrix a);

  Eigen::Index n() const { return a_.size(); }
  const linalg::SymMatrix& sym() const { return a_; }
  const Eigen::MatrixXd& mat() const { return a_.mat(); }
  Eigen::Index edge_count() const;

 private:
  linalg::SymMatrix a_;
};

// A(i,j) ~ Bernoulli(Omega(i,j)) independently for i < j, mirrored, zero
// diagonal. One uniform deviate is consumed per i < j pair in row-major
// order, so a shared seed couples samples across different edge
// probabilities (edge sets are nested as probabilities grow).
Adjacency sample_adjacency(const PopulationMatrix& omega, std::uint64_t seed);

// Erdos-Renyi G(n, p) realized as the K = 1 model with Ptilde = [[1]],
// rho = p.
Adjacency sample_er(Eigen::Index n, double p, std::uint64_t seed);

// Assumption gates exposed as predicates so harness configs can assert them.
// (A1): rho * n >= log(n).
bool gate_a1(double rho, Eigen::Index n);
// (A2): Ptilde_max * theta_max * |theta|_1 >= log(n).
bool gate_a2(double ptilde_max, const DegreeVector& theta);

}  // namespace specmix::models
