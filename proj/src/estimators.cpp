#include "specmix/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "specmix/linalg.hpp"

namespace specmix::estimators {

namespace {

std::string corner_list(const corners::CornerSet& c) {
  std::string s;
  for (auto i : c.indices) {
    if (!s.empty()) s += ",";
    s += std::to_string(i);
  }
  return s;
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smin = svd.singularValues()(m.rows() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues()(0) / smin;
}

// Clip negatives to zero and l1-normalize each row; zero-sum rows fall back
// to uniform 1/K.
void finalize_rows(Eigen::MatrixXd& z, EstimateDiagnostics& diag) {
  const Eigen::Index k = z.cols();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    bool clipped = false;
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (z(i, c) < 0.0) {
        z(i, c) = 0.0;
        clipped = true;
      }
      sum += z(i, c);
    }
    if (clipped) ++diag.clipped_rows;
    if (sum < 1e-300) {
      z.row(i).setConstant(1.0 / static_cast<double>(k));
      ++diag.fallback_rows;
    } else {
      z.row(i) /= sum;
    }
  }
}

MembershipEstimate simplex_pipeline(const linalg::SymMatrix& m,
                                    Eigen::Index k) {
  const auto dec = linalg::sym_eigen_topk(m, k);
  corners::CornerSet corner;
  try {
    corner = corners::successive_projection(dec.vectors, k);
  } catch (const RankDeficientInputError& e) {
    throw EstimationFailureError(e.what());
  }
  Eigen::MatrixXd corner_rows(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    corner_rows.row(c) = dec.vectors.row(corner.indices[static_cast<std::size_t>(c)]);
  }
  MembershipEstimate out;
  out.corner_set = corner;
  out.diagnostics.corner_condition = condition_number(corner_rows);
  Eigen::MatrixXd inv;
  try {
    inv = linalg::invert_small(corner_rows);
  } catch (const IllConditionedError& e) {
    throw EstimationFailureError(std::string(e.what()) + "; corners " +
                                 corner_list(corner));
  }
  out.rows = dec.vectors * inv;
  finalize_rows(out.rows, out.diagnostics);
  return out;
}

MembershipEstimate cone_pipeline(const linalg::SymMatrix& m, Eigen::Index k,
                                 std::uint64_t seed) {
  const auto dec = linalg::sym_eigen_topk(m, k);
  const auto [u_star, norms] = linalg::row_normalize(dec.vectors);
  const corners::CornerSet corner = corners::svm_cone(u_star, k, seed);
  Eigen::MatrixXd corner_rows(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    corner_rows.row(c) = u_star.row(corner.indices[static_cast<std::size_t>(c)]);
  }
  MembershipEstimate out;
  out.corner_set = corner;
  out.diagnostics.corner_condition = condition_number(corner_rows);

  Eigen::VectorXd scale(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      d += dec.values(j) * corner_rows(c, j) * corner_rows(c, j);
    }
    if (d < 0.0) {
      d = 0.0;
      ++out.diagnostics.clipped_scale;
    }
    scale(c) = std::sqrt(d);
  }
  Eigen::MatrixXd inv;
  try {
    inv = linalg::invert_small(corner_rows);
  } catch (const IllConditionedError& e) {
    throw EstimationFailureError(std::string(e.what()) + "; corners " +
                                 corner_list(corner));
  }
  out.rows = (dec.vectors * inv) * scale.asDiagonal();
  finalize_rows(out.rows, out.diagnostics);
  return out;
}

}  // namespace

MembershipEstimate spacl(const models::Adjacency& a, Eigen::Index k) {
  return simplex_pipeline(a.sym(), k);
}

MembershipEstimate ideal_spacl(const models::PopulationMatrix& omega,
                               Eigen::Index k) {
  return simplex_pipeline(omega.omega(), k);
}

MembershipEstimate svmcone_dcmm(const models::Adjacency& a, Eigen::Index k,
                                std::uint64_t seed) {
  return cone_pipeline(a.sym(), k, seed);
}

MembershipEstimate ideal_svmcone_dcmm(const models::PopulationMatrix& omega,
                                      Eigen::Index k, std::uint64_t seed) {
  return cone_pipeline(omega.omega(), k, seed);
}

}  // namespace specmix::estimators
