#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "specmix/errors.hpp"

namespace specmix::corners {

// Row indices of the hunted corners, in selection order.
struct CornerSet {
  std::vector<Eigen::Index> indices;
};

// Supporting hyperplane w . x = b of the input rows: w is a unit direction,
// b = min_i w . x_i.
struct SvmSolution {
  Eigen::VectorXd w;
  double b = 0.0;
};

// Successive projection: repeatedly selects the row of maximum residual norm
// (ties by lowest index) and projects all rows onto its orthogonal
// complement. Raises RankDeficientInputError when the residual matrix
// vanishes before r picks.
CornerSet successive_projection(const Eigen::MatrixXd& y, Eigen::Index r);

// Minimum-norm point of the convex hull of the rows (hard-margin one-class
// SVM dual) via Frank-Wolfe with away steps; duality gap 1e-9, cap 50000
// iterations. Raises DegenerateConeError when the hull contains the origin.
SvmSolution min_norm_point(const Eigen::MatrixXd& x);

struct KmeansResult {
  std::vector<Eigen::Index> assignments;
  Eigen::MatrixXd centers;
  double objective = 0.0;  // within-cluster sum of squares
};

// Lloyd iterations from k-means++ seeding, 10 restarts, best objective kept
// (strict comparison, earlier restart wins ties). All K clusters are
// nonempty in the returned result; if every restart produces an empty
// cluster, raises ClusteringFailureError.
KmeansResult kmeans(const Eigen::MatrixXd& x, Eigen::Index k,
                    std::uint64_t seed);

// Cone corner hunting: one-class SVM for the supporting hyperplane, then
// k-means over the rows nearest the hyperplane, sweeping the inclusion
// margin gamma over the sorted unique margins until K nonempty clusters
// emerge. From each cluster the deepest point (smallest margin, ties by
// lowest index) is returned.
CornerSet svm_cone(const Eigen::MatrixXd& s, Eigen::Index k,
                   std::uint64_t seed);

}  // namespace specmix::corners
