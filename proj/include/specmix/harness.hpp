#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specmix/metrics.hpp"
#include "specmix/netmodels.hpp"

namespace specmix::harness {

enum class SweptParam { kRho, kOmega, kBeta, kN };
enum class EstimatorKind { kSpacl, kSvmCone };

std::string to_string(SweptParam p);
std::string to_string(EstimatorKind e);

struct SweepConfig {
  models::ModelKind model = models::ModelKind::kMmsb;
  EstimatorKind estimator = EstimatorKind::kSpacl;
  Eigen::Index n = 1000;
  Eigen::Index k = 2;
  SweptParam param = SweptParam::kRho;
  std::vector<double> grid;  // strictly increasing, >= 3 points
  int trials = 30;
  std::uint64_t seed = 0;
  double rho = 0.1;    // fixed value when rho is not swept
  double omega = 0.9;  // standard mixing matrix, when beta is not swept
  double frac_pure = 0.5;
  double dirichlet_a = 1.0;
  double theta_lo_ratio = 0.5;  // theta ~ sqrt(rho) * U[ratio, 1] under DCMM
  double alpha = 1.0;           // deviation bound parameter
  bool record_eig_error = false;
  bool record_dev_ratio = false;
  // Planted power-law test mode: errors are replaced by
  // coeff / (fit abscissa), no graphs are generated.
  std::optional<double> planted_coeff;
};

// One Monte Carlo measurement row; reproducible from (config, trial index).
struct TrialRecord {
  std::string param;
  double value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> max_l1;
  std::optional<double> mean_l1;
  std::optional<double> eig_error;
  std::optional<double> dev_ratio;
  std::optional<bool> connected;
  std::optional<metrics::DiagnosticRecord> diag;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Ordinary least squares on (log x, log y); inputs must be positive.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pts);

struct AggregatedPoint {
  double grid_value = 0.0;
  double x = 0.0;           // fit abscissa (rho, omega, beta - 2, or n)
  double mean_error = 0.0;  // mean over trials of mean_l1_error
};

struct SweepResult {
  SweepConfig config;
  std::vector<TrialRecord> records;  // sorted by (grid value, trial)
  std::vector<AggregatedPoint> points;
  SlopeFit fit;
  // Populated for separation sweeps: omega * sqrt(rho) and the relative
  // in/out edge-intensity gap, per grid point.
  std::vector<double> separation_stat;
  std::vector<double> alt_separation_stat;
};

// Error decay against sparsity rho; expected log-log slope about -1/2.
SweepResult sweep_sparsity(const SweepConfig& cfg, int threads = 0);
// Error decay against the separation parameter omega; expected slope -1.
SweepResult sweep_separation(const SweepConfig& cfg, int threads = 0);
// Error decay against beta - 2 for the off-diagonal mixing matrix (beta > 2);
// expected slope -1.
SweepResult sweep_beta(const SweepConfig& cfg, int threads = 0);
// Error decay against n at fixed (K, rho, omega).
SweepResult sweep_size(const SweepConfig& cfg, int threads = 0);
// Dispatch on cfg.param.
SweepResult run_sweep(const SweepConfig& cfg, int threads = 0);

struct ThresholdResult {
  Eigen::Index n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> c_grid;
  std::vector<double> p_values;
  std::vector<double> frequency;  // fraction of connected samples per c
  std::vector<TrialRecord> records;
};

// Connectivity frequency at p = c log(n)/n. Trials share seeds across the c
// grid (one deviate per potential edge), so per-seed edge sets are nested
// and connectivity is monotone in c.
ThresholdResult threshold_scan(Eigen::Index n, const std::vector<double>& c_grid,
                               int trials, std::uint64_t seed,
                               int threads = 0);

struct CheckVerdict {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

// Four-stage verdict: the first two stages are recorded configuration
// assertions, stage 3 checks the fitted slopes, stage 4 checks the
// connectivity crossing against [0.5, 2] times log(n)/n.
struct CriterionReport {
  std::string stage1;  // error bound carries the separation parameter
  std::string stage2;  // balanced standard-network setup
  std::vector<CheckVerdict> checks;
  bool all_pass = false;
};

CriterionReport criterion_report(const SlopeFit& sparsity,
                                 const SlopeFit& separation,
                                 const ThresholdResult& threshold);

std::string render_report_text(const CriterionReport& report);

// Results CSV, one TrialRecord per line; fixed header, empty fields for
// non-applicable columns, 12 significant digits.
std::string records_to_csv(const std::vector<TrialRecord>& records);

// Effective worker count: `requested` if positive, else SPECMIX_THREADS,
// else hardware concurrency.
int resolve_thread_count(int requested);

}  // namespace specmix::harness
