#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "specmix/estimators.hpp"
#include "specmix/metrics.hpp"

using namespace specmix;

namespace {

void check_rows_normalized(const Eigen::MatrixXd& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    CHECK(rows.row(i).minCoeff() >= 0.0);
    CHECK(std::abs(rows.row(i).sum() - 1.0) <= 1e-12);
  }
}

models::PopulationMatrix mmsb_instance(Eigen::Index n, Eigen::Index k,
                                       double rho, double omega,
                                       std::uint64_t seed,
                                       double frac_pure = 0.5) {
  const auto ptilde = models::build_ptilde_standard(k, omega);
  const auto pi = models::sample_membership(n, k, frac_pure, 1.0, seed);
  return models::omega_mmsb(rho, ptilde, pi);
}

}  // namespace

TEST_CASE("spacl on two disjoint cliques recovers pure communities") {
  const Eigen::Index n1 = 12, n2 = 8;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1).setOnes();
  a.bottomRightCorner(n2, n2).setOnes();
  a.diagonal().setZero();
  const models::Adjacency adj{linalg::SymMatrix(a)};
  const auto est = estimators::spacl(adj, 2);
  check_rows_normalized(est.rows);
  // Closed-form eigenvectors of two disjoint cliques: scaled indicators, so
  // every membership row is a basis vector.
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(n1 + n2, 2);
  truth.col(0).head(n1).setOnes();
  truth.col(1).tail(n2).setOnes();
  const auto rep = metrics::membership_error(est.rows, truth);
  CHECK(rep.max_l1_error <= 1e-6);
}

TEST_CASE("spacl with one community returns the constant estimate") {
  const auto a = models::sample_er(40, 0.4, 3);
  const auto est = estimators::spacl(a, 1);
  for (Eigen::Index i = 0; i < 40; ++i) CHECK(est.rows(i, 0) == 1.0);
}

TEST_CASE("spacl error on a sampled MMSB instance") {
  const auto omega = mmsb_instance(400, 2, 0.5, 0.9, 2024);
  const auto a = models::sample_adjacency(omega, 77);
  const auto est = estimators::spacl(a, 2);
  check_rows_normalized(est.rows);
  const auto rep =
      metrics::membership_error(est.rows, omega.membership().mat());
  // Monte Carlo oracle over this instance family: mean l1 about 0.06-0.12,
  // max l1 about 0.30-0.41.
  CHECK(rep.mean_l1_error < 0.15);
  CHECK(rep.max_l1_error < 0.5);
}

TEST_CASE("ideal spacl is exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::Index k = seed % 2 == 0 ? 2 : 3;
    const auto omega = mmsb_instance(200, k, 0.4, 0.8, 1000 + seed);
    const auto est = estimators::ideal_spacl(omega, k);
    check_rows_normalized(est.rows);
    const auto rep =
        metrics::membership_error(est.rows, omega.membership().mat());
    CHECK(rep.max_l1_error <= 1e-8);
  }
}

TEST_CASE("ideal spacl on the vertex-only simplex") {
  const models::MixingMatrix p{Eigen::MatrixXd::Identity(3, 3)};
  const models::Membership pi{Eigen::MatrixXd::Identity(3, 3)};
  const auto omega = models::omega_mmsb(0.9, p, pi);
  const auto est = estimators::ideal_spacl(omega, 3);
  const auto rep = metrics::membership_error(est.rows, pi.mat());
  CHECK(rep.max_l1_error <= 1e-12);
}

TEST_CASE("ideal spacl is scale invariant") {
  const auto ptilde = models::build_ptilde_standard(3, 0.7);
  const auto pi = models::sample_membership(150, 3, 0.5, 1.0, 5);
  const auto full = models::omega_mmsb(0.6, ptilde, pi);
  const auto half = models::omega_mmsb(0.3, ptilde, pi);
  const auto est_full = estimators::ideal_spacl(full, 3);
  const auto est_half = estimators::ideal_spacl(half, 3);
  CHECK((est_full.rows - est_half.rows).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("svmcone on a sampled DCMM instance") {
  const auto ptilde = models::build_ptilde_standard(2, 0.9);
  const auto pi = models::sample_membership(400, 2, 0.5, 1.0, 31);
  const auto theta = models::sample_theta(400, 0.5, 0.5, 32);
  const auto omega = models::omega_dcmm(theta, ptilde, pi);
  const auto a = models::sample_adjacency(omega, 33);
  const auto est = estimators::svmcone_dcmm(a, 2, 34);
  check_rows_normalized(est.rows);
  const auto rep = metrics::membership_error(est.rows, pi.mat());
  // Monte Carlo oracle over this instance family: mean l1 about 0.19-0.22,
  // max l1 about 0.47-0.62 (the single-point corner rule pays a noise
  // premium over the simplex route).
  CHECK(rep.mean_l1_error < 0.3);
  CHECK(rep.max_l1_error < 0.75);
}

TEST_CASE("svmcone matches spacl when DCMM degenerates to MMSB") {
  const auto ptilde = models::build_ptilde_standard(2, 0.95);
  double spacl_sum = 0.0, cone_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pi = models::sample_membership(1000, 2, 0.5, 1.0, 500 + seed);
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(1000, std::sqrt(0.8));
    const auto omega = models::omega_dcmm(models::DegreeVector(t), ptilde, pi);
    const auto a = models::sample_adjacency(omega, 600 + seed);
    spacl_sum +=
        metrics::membership_error(estimators::spacl(a, 2).rows, pi.mat())
            .mean_l1_error;
    cone_sum += metrics::membership_error(
                    estimators::svmcone_dcmm(a, 2, 700 + seed).rows, pi.mat())
                    .mean_l1_error;
  }
  CHECK(std::abs(spacl_sum - cone_sum) / 5.0 < 0.06);
}

TEST_CASE("svmcone with one community returns the constant estimate") {
  const auto a = models::sample_er(40, 0.5, 9);
  const auto est = estimators::svmcone_dcmm(a, 1, 10);
  for (Eigen::Index i = 0; i < 40; ++i) CHECK(est.rows(i, 0) == 1.0);
}

TEST_CASE("svmcone rejects isolated nodes by name") {
  // Two triangles plus an isolated vertex: the isolated row of the top-2
  // eigenvector matrix is zero.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(7, 7);
  const auto triangle = [&](Eigen::Index base) {
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = i + 1; j < 3; ++j) {
        a(base + i, base + j) = a(base + j, base + i) = 1.0;
      }
    }
  };
  triangle(0);
  triangle(3);
  try {
    estimators::svmcone_dcmm(models::Adjacency(linalg::SymMatrix(a)), 2, 1);
    FAIL("expected degenerate-row");
  } catch (const DegenerateRowError& e) {
    CHECK(e.row() == 6);
  }
}

TEST_CASE("ideal svmcone is exact under heterogeneous degrees") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::Index k = seed % 2 == 0 ? 3 : 2;
    const auto ptilde = models::build_ptilde_standard(k, 0.8);
    const auto pi = models::sample_membership(200, k, 0.5, 1.0, 2000 + seed);
    const auto theta = models::sample_theta(200, 0.5, 0.25, 3000 + seed);
    const auto omega = models::omega_dcmm(theta, ptilde, pi);
    const auto est = estimators::ideal_svmcone_dcmm(omega, k, 4000 + seed);
    check_rows_normalized(est.rows);
    const auto rep = metrics::membership_error(est.rows, pi.mat());
    CHECK(rep.max_l1_error <= 1e-6);
  }
}

TEST_CASE("ideal svmcone is exact on the off-diagonal mixing branch") {
  // beta > 2: the second population eigenvalue is negative.
  const auto ptilde = models::build_ptilde_offdiag(2, 3.0);
  const auto pi = models::sample_membership(200, 2, 0.5, 1.0, 21);
  const auto theta = models::sample_theta(200, 0.12, 0.5, 22);
  const auto omega = models::omega_dcmm(theta, ptilde, pi);
  const auto est = estimators::ideal_svmcone_dcmm(omega, 2, 23);
  const auto rep = metrics::membership_error(est.rows, pi.mat());
  CHECK(rep.max_l1_error <= 1e-6);
  CHECK(est.diagnostics.clipped_scale == 0);
}

TEST_CASE("ideal svmcone on the all-pure degeneration") {
  const auto ptilde = models::build_ptilde_standard(3, 0.7);
  const auto pi = models::sample_membership(90, 3, 1.0, 1.0, 8);
  const auto theta = models::sample_theta(90, 0.6, 0.4, 9);
  const auto omega = models::omega_dcmm(theta, ptilde, pi);
  const auto est = estimators::ideal_svmcone_dcmm(omega, 3, 10);
  const auto rep = metrics::membership_error(est.rows, pi.mat());
  CHECK(rep.max_l1_error <= 1e-8);
}

TEST_CASE("ideal svmcone with constant theta matches ideal spacl") {
  const auto ptilde = models::build_ptilde_standard(2, 0.8);
  const auto pi = models::sample_membership(150, 2, 0.5, 1.0, 12);
  const auto rho = 0.4;
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(150, std::sqrt(rho));
  const auto om_d = models::omega_dcmm(models::DegreeVector(t), ptilde, pi);
  const auto om_m = models::omega_mmsb(rho, ptilde, pi);
  const auto cone = estimators::ideal_svmcone_dcmm(om_d, 2, 13);
  const auto simplex = estimators::ideal_spacl(om_m, 2);
  const auto rep = metrics::membership_error(cone.rows, simplex.rows);
  CHECK(rep.max_l1_error <= 1e-8);
}

TEST_CASE("ideal svmcone scale invariance") {
  const auto ptilde = models::build_ptilde_standard(2, 0.8);
  const auto pi = models::sample_membership(120, 2, 0.5, 1.0, 14);
  const auto theta = models::sample_theta(120, 0.5, 0.5, 15);
  Eigen::VectorXd scaled_vec = theta.vec() * std::sqrt(0.5);
  const models::DegreeVector scaled(scaled_vec);
  const auto base = estimators::ideal_svmcone_dcmm(
      models::omega_dcmm(theta, ptilde, pi), 2, 16);
  const auto shrunk = estimators::ideal_svmcone_dcmm(
      models::omega_dcmm(scaled, ptilde, pi), 2, 16);
  CHECK((base.rows - shrunk.rows).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("mean error improves with n") {
  const auto run = [](Eigen::Index n, std::uint64_t seed) {
    const auto omega = mmsb_instance(n, 2, 0.3, 0.9, seed);
    const auto a = models::sample_adjacency(omega, seed + 1);
    return metrics::membership_error(estimators::spacl(a, 2).rows,
                                     omega.membership().mat())
        .mean_l1_error;
  };
  double small = 0.0, large = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    small += run(400, 9000 + 10 * s);
    large += run(1600, 9001 + 10 * s);
  }
  CHECK(large / 5.0 < small / 5.0);
}
