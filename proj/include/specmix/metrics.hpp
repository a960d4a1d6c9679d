#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "specmix/netmodels.hpp"

namespace specmix::metrics {

// Permutation-matched membership error, max over nodes of the per-node l1
// difference.
struct ErrorReport {
  double max_l1_error = 0.0;
  double mean_l1_error = 0.0;
  // permutation[c] = truth column matched to estimate column c.
  std::vector<Eigen::Index> permutation;
  Eigen::VectorXd per_node_errors;
  bool exact_matching = true;  // false when the greedy K > 8 path was used
};

// min over column permutations of max_i |est(i,:) - truth*P (i,:)|_1.
// Exhaustive search for K <= 8, greedy column matching above that (flagged
// via exact_matching = false).
ErrorReport membership_error(const Eigen::MatrixXd& est,
                             const Eigen::MatrixXd& truth);

// Test hooks: the two matching strategies, callable at any K <= 8 so they
// can be cross-checked.
ErrorReport membership_error_exhaustive(const Eigen::MatrixXd& est,
                                        const Eigen::MatrixXd& truth);
ErrorReport membership_error_greedy(const Eigen::MatrixXd& est,
                                    const Eigen::MatrixXd& truth);

struct EigenspaceReport {
  double value = 0.0;  // |UhatUhat' - UU'|_{2->infty}
};

// Row-wise eigenspace error between two column-orthonormal bases, evaluated
// blockwise without materializing the n x n projectors.
EigenspaceReport eigenspace_error(const Eigen::MatrixXd& u_hat,
                                  const Eigen::MatrixXd& u);

// (alpha + 1 + sqrt((alpha+1)(alpha+19))) / 3.
double bernstein_constant(double alpha);

struct DeviationReport {
  double spectral_dev = 0.0;  // |A - Omega|
  double bound = 0.0;         // model-appropriate concentration bound
  double ratio = 0.0;         // spectral_dev / bound
};

// |A - Omega| against the Bernstein bound: sqrt(rho n log n) under MMSB,
// sqrt(Ptilde_max theta_max |theta|_1 log n) under DCMM.
DeviationReport spectral_deviation(const models::Adjacency& a,
                                   const models::PopulationMatrix& omega,
                                   double alpha);

// Single connected component (union-find).
bool is_connected(const models::Adjacency& a);

// Bound ingredients attached to every trial record.
struct DiagnosticRecord {
  double sigma_k_p = 0.0;       // smallest singular value of Ptilde
  double lambda_k_gram = 0.0;   // lambda_K(Pi'Pi)
  double lambda_1_gram = 0.0;   // lambda_1(Pi'Pi)
  double kappa_gram = 0.0;      // condition number of Pi'Pi
  double pi_min = 0.0;          // min column sum of Pi
  double sigma_k_omega = 0.0;   // smallest nonzero singular value of Omega
  std::optional<double> theta_max;
  std::optional<double> theta_min;
  std::optional<double> theta_l1;
};

// Scale is either rho (MMSB) or the degree vector (DCMM); sigma_K(Omega) is
// computed from the K x K compressed form of the generating factors.
DiagnosticRecord instance_diagnostics(const models::Membership& pi,
                                      const models::MixingMatrix& ptilde,
                                      double rho);
DiagnosticRecord instance_diagnostics(const models::Membership& pi,
                                      const models::MixingMatrix& ptilde,
                                      const models::DegreeVector& theta);

}  // namespace specmix::metrics
