#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "specmix/cornerhunt.hpp"
#include "specmix/netmodels.hpp"

namespace specmix::estimators {

struct EstimateDiagnostics {
  double corner_condition = 0.0;   // condition number of the corner matrix
  Eigen::Index clipped_rows = 0;   // rows with a negative entry clipped to 0
  Eigen::Index fallback_rows = 0;  // zero-sum rows reset to uniform 1/K
  Eigen::Index clipped_scale = 0;  // negative rescaling diagonals clipped
};

// Estimated membership matrix: nonnegative rows, each l1-normalized.
struct MembershipEstimate {
  Eigen::MatrixXd rows;
  corners::CornerSet corner_set;
  EstimateDiagnostics diagnostics;
};

// Simplex route: top-K eigendecomposition, successive projection for the
// corner rows, Z = U * U(I,:)^{-1}, clip negatives, l1-normalize.
MembershipEstimate spacl(const models::Adjacency& a, Eigen::Index k);

// Same pipeline on the population matrix; recovers the generating membership
// up to column permutation.
MembershipEstimate ideal_spacl(const models::PopulationMatrix& omega,
                               Eigen::Index k);

// Cone route: row-normalized eigenvectors, SVM-cone corner hunt, rescaling
// J = sqrt(diag(U*(I,:) Lambda U*'(I,:))) (negative diagonals clipped before
// the root), Z = U * U*(I,:)^{-1} * J, clip, l1-normalize.
MembershipEstimate svmcone_dcmm(const models::Adjacency& a, Eigen::Index k,
                                std::uint64_t seed);

MembershipEstimate ideal_svmcone_dcmm(const models::PopulationMatrix& omega,
                                      Eigen::Index k, std::uint64_t seed);

}  // namespace specmix::estimators
