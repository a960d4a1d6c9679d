#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "specmix/linalg.hpp"
#include "specmix/metrics.hpp"

using namespace specmix;

TEST_CASE("membership error identity and permutation invariance") {
  specmix::Rng rng(1);
  const Eigen::MatrixXd x = oracles::random_row_stochastic(20, 3, rng);
  const auto same = metrics::membership_error(x, x);
  CHECK(same.max_l1_error == 0.0);
  CHECK(same.permutation == std::vector<Eigen::Index>{0, 1, 2});

  Eigen::MatrixXd swapped(20, 3);
  swapped.col(0) = x.col(2);
  swapped.col(1) = x.col(0);
  swapped.col(2) = x.col(1);
  const auto rep = metrics::membership_error(swapped, x);
  CHECK(rep.max_l1_error <= 1e-15);
  CHECK(rep.permutation == std::vector<Eigen::Index>{2, 0, 1});
}

TEST_CASE("membership error hand-evaluated 2x2 case") {
  Eigen::MatrixXd truth(2, 2);
  truth << 1, 0, 0, 1;
  Eigen::MatrixXd est(2, 2);
  est << 0.9, 0.1, 0.2, 0.8;
  const auto rep = metrics::membership_error(est, truth);
  CHECK(rep.max_l1_error == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(rep.per_node_errors(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.per_node_errors(1) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(rep.mean_l1_error == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("membership error rejects shape mismatch and non-stochastic input") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(3, 2);
  CHECK_THROWS_AS(metrics::membership_error(a, b), InvalidArgumentError);
  Eigen::MatrixXd c = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(metrics::membership_error(c, a), InvalidArgumentError);
}

TEST_CASE("membership error column permutation of the estimate is neutral") {
  specmix::Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd truth = oracles::random_row_stochastic(15, 4, rng);
    const Eigen::MatrixXd est = oracles::random_row_stochastic(15, 4, rng);
    const double base = metrics::membership_error(est, truth).max_l1_error;
    Eigen::MatrixXd shuffled(15, 4);
    shuffled.col(0) = est.col(3);
    shuffled.col(1) = est.col(1);
    shuffled.col(2) = est.col(0);
    shuffled.col(3) = est.col(2);
    CHECK(metrics::membership_error(shuffled, truth).max_l1_error ==
          doctest::Approx(base).epsilon(1e-13));
  }
}

TEST_CASE("greedy matching agrees with exhaustive matching for small K") {
  // Estimates in the wild are noisy permuted copies of the truth; on that
  // distribution the two matchers pick the same permutation.
  specmix::Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.next_below(3));
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.next_below(20));
    const Eigen::MatrixXd truth = oracles::random_row_stochastic(n, k, rng);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.next_below(i + 1)]);
    }
    Eigen::MatrixXd est(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      est.col(c) = truth.col(perm[static_cast<std::size_t>(c)]);
    }
    const double eps = 0.3 * rng.next_double();
    est = (1.0 - eps) * est + eps * oracles::random_row_stochastic(n, k, rng);
    const auto g = metrics::membership_error_greedy(est, truth);
    const auto e = metrics::membership_error_exhaustive(est, truth);
    CHECK(g.max_l1_error == doctest::Approx(e.max_l1_error).epsilon(1e-12));
    CHECK(g.mean_l1_error == doctest::Approx(e.mean_l1_error).epsilon(1e-12));
  }
}

TEST_CASE("greedy matching never beats the exhaustive minimum") {
  specmix::Rng rng(33);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.next_below(3));
    const Eigen::MatrixXd truth = oracles::random_row_stochastic(12, k, rng);
    const Eigen::MatrixXd est = oracles::random_row_stochastic(12, k, rng);
    const auto g = metrics::membership_error_greedy(est, truth);
    const auto e = metrics::membership_error_exhaustive(est, truth);
    CHECK(g.max_l1_error >= e.max_l1_error - 1e-13);
  }
}

TEST_CASE("eigenspace error zero, rotation invariance, dense oracle") {
  specmix::Rng rng(4);
  const Eigen::MatrixXd u = oracles::random_orthonormal(20, 4, rng);
  CHECK(metrics::eigenspace_error(u, u).value == 0.0);

  const Eigen::MatrixXd rot = oracles::random_orthonormal(4, 4, rng);
  CHECK(metrics::eigenspace_error(u * rot, u).value <= 1e-12);

  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::MatrixXd a = oracles::random_orthonormal(6, 2, rng);
    const Eigen::MatrixXd b = oracles::random_orthonormal(6, 2, rng);
    const Eigen::MatrixXd dense =
        a * a.transpose() - b * b.transpose();
    double want = 0.0;
    for (Eigen::Index i = 0; i < 6; ++i) {
      want = std::max(want, dense.row(i).norm());
    }
    CHECK(metrics::eigenspace_error(a, b).value ==
          doctest::Approx(want).epsilon(1e-12));
  }

  Eigen::MatrixXd bad = 2.0 * u;
  CHECK_THROWS_AS(metrics::eigenspace_error(bad, u), InvalidArgumentError);
}

TEST_CASE("bernstein constant closed form") {
  CHECK(metrics::bernstein_constant(1.0) ==
        doctest::Approx((2.0 + std::sqrt(40.0)) / 3.0).epsilon(1e-15));
  CHECK(metrics::bernstein_constant(1.0) ==
        doctest::Approx(2.77485).epsilon(1e-5));
  CHECK(metrics::bernstein_constant(1e-12) ==
        doctest::Approx((1.0 + std::sqrt(19.0)) / 3.0).epsilon(1e-9));
  CHECK(metrics::bernstein_constant(5.0) ==
        doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(metrics::bernstein_constant(0.0), InvalidArgumentError);
  double prev = 0.0;
  for (double a : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
    const double c = metrics::bernstein_constant(a);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("spectral deviation zero case and model bounds") {
  const models::MixingMatrix one{Eigen::MatrixXd::Ones(1, 1)};
  const models::Membership ones{Eigen::MatrixXd::Ones(8, 1)};
  const auto om0 = models::omega_mmsb(0.0, one, ones);
  const auto a0 = models::sample_adjacency(om0, 1);
  const auto rep0 = metrics::spectral_deviation(a0, om0, 1.0);
  CHECK(rep0.spectral_dev == 0.0);
  CHECK(rep0.ratio == 0.0);

  // The concentration bound holds comfortably on a handful of seeds.
  const auto ptilde = models::build_ptilde_standard(2, 0.8);
  const auto pi = models::sample_membership(200, 2, 0.5, 1.0, 11);
  const auto om = models::omega_mmsb(0.2, ptilde, pi);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = models::sample_adjacency(om, seed);
    const auto rep = metrics::spectral_deviation(a, om, 1.0);
    CHECK(rep.ratio < 1.0);
    CHECK(rep.ratio > 0.0);
  }

  // DCMM with constant theta = sqrt(rho): same bound as MMSB.
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(200, std::sqrt(0.2));
  const auto omd = models::omega_dcmm(models::DegreeVector(t), ptilde, pi);
  const auto am = models::sample_adjacency(om, 3);
  const auto r_mmsb = metrics::spectral_deviation(am, om, 1.0);
  const auto r_dcmm = metrics::spectral_deviation(am, omd, 1.0);
  CHECK(std::abs(r_mmsb.bound - r_dcmm.bound) <= 1e-12 * r_mmsb.bound);
}

TEST_CASE("connectivity") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = m(1, 0) = 1.0;
  CHECK_FALSE(metrics::is_connected(
      models::Adjacency(linalg::SymMatrix(m))));

  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(5, 5);
  for (Eigen::Index i = 0; i + 1 < 5; ++i) path(i, i + 1) = path(i + 1, i) = 1.0;
  CHECK(metrics::is_connected(models::Adjacency(linalg::SymMatrix(path))));

  // Monotone under edge additions: once connected, stays connected.
  specmix::Rng rng(6);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(12, 12);
  bool was_connected = false;
  for (int add = 0; add < 60; ++add) {
    const auto i = static_cast<Eigen::Index>(rng.next_below(12));
    const auto j = static_cast<Eigen::Index>(rng.next_below(12));
    if (i == j) continue;
    g(i, j) = g(j, i) = 1.0;
    const bool now =
        metrics::is_connected(models::Adjacency(linalg::SymMatrix(g)));
    CHECK((now || !was_connected));
    was_connected = now;
  }
}

TEST_CASE("sub-threshold ER graphs are mostly disconnected") {
  const Eigen::Index n = 1000;
  const double p = 0.5 * std::log(static_cast<double>(n)) / n;
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    if (metrics::is_connected(models::sample_er(n, p, seed))) ++connected;
  }
  CHECK(connected <= 20);
}

TEST_CASE("instance diagnostics") {
  const models::Membership idk{Eigen::MatrixXd::Identity(3, 3)};
  const auto p3 = models::build_ptilde_standard(3, 0.4);
  const auto d1 = metrics::instance_diagnostics(idk, p3, 0.5);
  CHECK(d1.lambda_1_gram == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d1.lambda_k_gram == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d1.kappa_gram == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d1.pi_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d1.sigma_k_p == doctest::Approx(0.4).epsilon(1e-12));

  // Balanced pure membership: 50 nodes per community.
  Eigen::MatrixXd bal = Eigen::MatrixXd::Zero(100, 2);
  for (Eigen::Index i = 0; i < 100; ++i) bal(i, i % 2) = 1.0;
  const auto p2 = models::build_ptilde_standard(2, 0.7);
  const auto d2 = metrics::instance_diagnostics(models::Membership(bal), p2, 0.5);
  CHECK(d2.lambda_k_gram == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(d2.pi_min == doctest::Approx(50.0).epsilon(1e-12));
  CHECK_FALSE(d2.theta_max.has_value());

  // sigma_K(Omega) from the K x K compression matches the dense spectrum.
  const auto pi = models::sample_membership(80, 3, 0.5, 1.0, 21);
  const auto ptilde = models::build_ptilde_standard(3, 0.6);
  const auto om = models::omega_mmsb(0.4, ptilde, pi);
  const auto diag = metrics::instance_diagnostics(pi, ptilde, 0.4);
  const auto dec = linalg::sym_eigen_topk(om.omega(), 3);
  CHECK(diag.sigma_k_omega ==
        doctest::Approx(std::abs(dec.values(2))).epsilon(1e-9));

  const auto theta = models::sample_theta(80, 0.4, 0.5, 22);
  const auto omd = models::omega_dcmm(theta, ptilde, pi);
  const auto diagd = metrics::instance_diagnostics(pi, ptilde, theta);
  const auto decd = linalg::sym_eigen_topk(omd.omega(), 3);
  CHECK(diagd.sigma_k_omega ==
        doctest::Approx(std::abs(decd.values(2))).epsilon(1e-9));
  CHECK(*diagd.theta_max == theta.max());
  CHECK(*diagd.theta_l1 == theta.l1());
}
