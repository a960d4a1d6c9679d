#include "specmix/cornerhunt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specmix/rng.hpp"

namespace specmix::corners {

CornerSet successive_projection(const Eigen::MatrixXd& y, Eigen::Index r) {
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  if (r < 1 || r > std::min(n, m)) {
    throw InvalidArgumentError(
        "successive_projection: need 1 <= r <= min(n,m)");
  }
  Eigen::MatrixXd residual = y;
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) norms(i) = residual.row(i).norm();
  const double vanish_tol = 1e-12 * std::max(1.0, norms.maxCoeff());

  CornerSet out;
  out.indices.reserve(static_cast<std::size_t>(r));
  std::vector<bool> picked(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < r; ++step) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (picked[static_cast<std::size_t>(i)]) continue;
      if (norms(i) > best_norm) {
        best_norm = norms(i);
        best = i;
      }
    }
    if (best < 0 || best_norm <= vanish_tol) {
      throw RankDeficientInputError(
          "successive_projection: residuals vanished after " +
          std::to_string(step) + " of " + std::to_string(r) + " picks");
    }
    out.indices.push_back(best);
    picked[static_cast<std::size_t>(best)] = true;
    const Eigen::RowVectorXd unit = residual.row(best) / best_norm;
    residual.noalias() -= (residual * unit.transpose()) * unit;
    for (Eigen::Index i = 0; i < n; ++i) norms(i) = residual.row(i).norm();
  }
  return out;
}

SvmSolution min_norm_point(const Eigen::MatrixXd& x) {
  const Eigen::Index q = x.rows();
  if (q < 1) throw InvalidArgumentError("min_norm_point: need q >= 1");
  constexpr int kMaxIter = 50000;
  constexpr double kGapTol = 1e-9;
  constexpr double kOriginTol = 1e-10;

  // Frank-Wolfe with away steps on min |v|^2 over conv(rows of x).
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(q);
  weights(0) = 1.0;
  Eigen::VectorXd v = x.row(0).transpose();

  bool converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    if (it > 0 && it % 1024 == 0) {
      v.noalias() = x.transpose() * weights;  // curb incremental drift
    }
    const Eigen::VectorXd dots = x * v;
    Eigen::Index fw = 0;
    double fw_dot = std::numeric_limits<double>::infinity();
    Eigen::Index away = -1;
    double away_dot = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < q; ++i) {
      if (dots(i) < fw_dot) {
        fw_dot = dots(i);
        fw = i;
      }
      if (weights(i) > 0.0 && dots(i) > away_dot) {
        away_dot = dots(i);
        away = i;
      }
    }
    const double vv = v.squaredNorm();
    const double gap = 2.0 * (vv - fw_dot);
    if (gap <= kGapTol) {
      converged = true;
      break;
    }
    const double fw_decrease = vv - fw_dot;      // along x_fw - v
    const double away_decrease = away_dot - vv;  // along v - x_away
    if (fw_decrease >= away_decrease) {
      const Eigen::VectorXd d = x.row(fw).transpose() - v;
      const double dd = d.squaredNorm();
      if (dd == 0.0) {
        converged = true;
        break;
      }
      const double step = std::clamp(-v.dot(d) / dd, 0.0, 1.0);
      weights *= (1.0 - step);
      weights(fw) += step;
      v += step * d;
    } else {
      const Eigen::VectorXd d = v - x.row(away).transpose();
      const double dd = d.squaredNorm();
      const double wa = weights(away);
      if (dd == 0.0 || wa >= 1.0) {
        converged = true;  // single-vertex iterate cannot move away
        break;
      }
      const double max_step = wa / (1.0 - wa);
      const double step = std::clamp(-v.dot(d) / dd, 0.0, max_step);
      weights *= (1.0 + step);
      weights(away) -= step;
      if (weights(away) < 0.0) weights(away) = 0.0;
      v += step * d;
    }
  }
  if (!converged) {
    throw NumericFailureError("min_norm_point: duality gap did not converge");
  }
  const double vnorm = v.norm();
  if (vnorm < kOriginTol) {
    throw DegenerateConeError(
        "min_norm_point: convex hull contains the origin");
  }
  SvmSolution sol;
  sol.w = v / vnorm;
  sol.b = (x * sol.w).minCoeff();
  return sol;
}

namespace {

struct LloydOutcome {
  bool valid = false;
  std::vector<Eigen::Index> assignments;
  Eigen::MatrixXd centers;
  double objective = std::numeric_limits<double>::infinity();
};

LloydOutcome run_one_kmeans(const Eigen::MatrixXd& x, Eigen::Index k,
                            Rng& rng) {
  const Eigen::Index q = x.rows();
  const Eigen::Index m = x.cols();
  LloydOutcome out;
  out.centers.resize(k, m);

  // k-means++ seeding.
  Eigen::Index first =
      static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(q)));
  out.centers.row(0) = x.row(first);
  Eigen::VectorXd dist2(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    dist2(i) = (x.row(i) - out.centers.row(0)).squaredNorm();
  }
  for (Eigen::Index c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen;
    if (total <= 0.0) {
      chosen = static_cast<Eigen::Index>(
          rng.next_below(static_cast<std::uint64_t>(q)));
    } else {
      double t = rng.next_double() * total;
      chosen = q - 1;
      for (Eigen::Index i = 0; i < q; ++i) {
        t -= dist2(i);
        if (t <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    out.centers.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < q; ++i) {
      dist2(i) =
          std::min(dist2(i), (x.row(i) - out.centers.row(c)).squaredNorm());
    }
  }

  out.assignments.assign(static_cast<std::size_t>(q), -1);
  constexpr int kMaxLloyd = 100;
  for (int round = 0; round < kMaxLloyd; ++round) {
    bool changed = false;
    for (Eigen::Index i = 0; i < q; ++i) {
      Eigen::Index best = 0;
      double best_d = (x.row(i) - out.centers.row(0)).squaredNorm();
      for (Eigen::Index c = 1; c < k; ++c) {
        const double d = (x.row(i) - out.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.assignments[static_cast<std::size_t>(i)] != best) {
        out.assignments[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, m);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < q; ++i) {
      sums.row(out.assignments[static_cast<std::size_t>(i)]) += x.row(i);
      counts(out.assignments[static_cast<std::size_t>(i)]) += 1.0;
    }
    if ((counts.array() == 0.0).any()) return out;  // invalid restart
    for (Eigen::Index c = 0; c < k; ++c) out.centers.row(c) = sums.row(c) / counts(c);
    if (!changed) break;
  }
  out.objective = 0.0;
  for (Eigen::Index i = 0; i < q; ++i) {
    out.objective +=
        (x.row(i) - out.centers.row(out.assignments[static_cast<std::size_t>(i)]))
            .squaredNorm();
  }
  out.valid = true;
  return out;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& x, Eigen::Index k,
                    std::uint64_t seed) {
  const Eigen::Index q = x.rows();
  if (k < 1) throw InvalidArgumentError("kmeans: need K >= 1");
  if (q < k) throw InvalidArgumentError("kmeans: need q >= K");
  constexpr int kRestarts = 10;
  LloydOutcome best;
  for (int r = 0; r < kRestarts; ++r) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(r)));
    LloydOutcome cand = run_one_kmeans(x, k, rng);
    if (cand.valid && cand.objective < best.objective) best = std::move(cand);
  }
  if (!best.valid) {
    throw ClusteringFailureError(
        "kmeans: every restart produced an empty cluster");
  }
  return {std::move(best.assignments), std::move(best.centers),
          best.objective};
}

CornerSet svm_cone(const Eigen::MatrixXd& s, Eigen::Index k,
                   std::uint64_t seed) {
  const Eigen::Index n = s.rows();
  if (k < 1) throw InvalidArgumentError("svm_cone: need K >= 1");
  if (n < k) throw InvalidArgumentError("svm_cone: need n >= K");
  const SvmSolution sol = min_norm_point(s);
  Eigen::VectorXd margins = s * sol.w;
  margins.array() -= sol.b;

  // Sweep gamma over the distinct margin values, ascending. Values closer
  // than the dedupe tolerance count as one step so that exact corner copies
  // (which differ only by eigensolver round-off) enter the candidate set
  // together.
  constexpr double kDedupeTol = 1e-8;
  std::vector<double> sorted(margins.data(), margins.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gammas;
  double group_start = sorted.front();
  double group_max = sorted.front();
  for (double v : sorted) {
    if (v - group_start <= kDedupeTol) {
      group_max = v;
    } else {
      gammas.push_back(group_max);
      group_start = v;
      group_max = v;
    }
  }
  gammas.push_back(group_max);

  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const double gamma = gammas[gi];
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (margins(i) <= gamma + 1e-12) candidates.push_back(i);
    }
    if (static_cast<Eigen::Index>(candidates.size()) < k) continue;
    Eigen::MatrixXd cand_rows(candidates.size(), s.cols());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      cand_rows.row(static_cast<Eigen::Index>(i)) = s.row(candidates[i]);
    }
    KmeansResult clusters;
    try {
      clusters = kmeans(cand_rows, k, derive_stream(seed, gi));
    } catch (const ClusteringFailureError&) {
      continue;
    }
    CornerSet out;
    out.indices.assign(static_cast<std::size_t>(k), -1);
    std::vector<double> best_margin(static_cast<std::size_t>(k),
                                    std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto c = static_cast<std::size_t>(clusters.assignments[i]);
      const double mg = margins(candidates[i]);
      if (mg < best_margin[c]) {
        best_margin[c] = mg;
        out.indices[c] = candidates[i];
      }
    }
    return out;
  }
  throw CornerFailureError(
      "svm_cone: gamma sweep exhausted without K clusters");
}

}  // namespace specmix::corners
