// specmix: generate synthetic mixed-membership networks, estimate
// memberships, and run the sweep/threshold verification harness.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specmix/estimators.hpp"
#include "specmix/harness.hpp"
#include "specmix/io.hpp"
#include "specmix/metrics.hpp"
#include "specmix/netmodels.hpp"
#include "specmix/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specmix;

namespace {

struct GenerateOptions {
  std::string model = "mmsb";
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  double rho = 0.0;
  double omega = 0.9;
  double beta = 0.0;
  bool has_beta = false;
  double theta_ratio = 0.5;
  double frac_pure = 0.5;
  double dirichlet_a = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateOptions& opt) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  const auto ptilde = opt.has_beta
                          ? models::build_ptilde_offdiag(opt.k, opt.beta)
                          : models::build_ptilde_standard(opt.k, opt.omega);
  const auto pi = models::sample_membership(opt.n, opt.k, opt.frac_pure,
                                            opt.dirichlet_a,
                                            derive_stream(opt.seed, 1));
  std::optional<models::DegreeVector> theta;
  std::optional<models::PopulationMatrix> population;
  if (opt.model == "dcmm") {
    theta = models::sample_theta(opt.n, opt.rho, opt.theta_ratio,
                                 derive_stream(opt.seed, 2));
    population = models::omega_dcmm(*theta, ptilde, pi);
  } else if (opt.model == "mmsb") {
    population = models::omega_mmsb(opt.rho, ptilde, pi);
  } else {
    throw InvalidArgumentError("unknown model: " + opt.model);
  }
  const auto a = models::sample_adjacency(*population,
                                          derive_stream(opt.seed, 3));

  io::write_edge_list(dir / "edgelist.txt", a);
  io::write_membership(dir / "membership.csv", pi);
  json manifest;
  manifest["model"] = opt.model;
  manifest["n"] = opt.n;
  manifest["k"] = opt.k;
  manifest["rho"] = opt.rho;
  if (opt.has_beta) {
    manifest["beta"] = opt.beta;
  } else {
    manifest["omega"] = opt.omega;
  }
  manifest["frac_pure"] = opt.frac_pure;
  manifest["dirichlet_a"] = opt.dirichlet_a;
  manifest["seed"] = opt.seed;
  manifest["files"]["edges"] = "edgelist.txt";
  manifest["files"]["membership"] = "membership.csv";
  if (theta) {
    manifest["theta_ratio"] = opt.theta_ratio;
    manifest["files"]["theta"] = "theta.txt";
    io::write_theta(dir / "theta.txt", *theta);
  }
  io::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << fs::absolute(dir).string() << "\n";
  return 0;
}

int run_estimate(const std::string& edges, Eigen::Index k,
                 const std::string& algo, std::uint64_t seed,
                 const std::string& out, const std::string& truth,
                 const std::string& scores) {
  const auto a = io::read_edge_list(edges);
  estimators::MembershipEstimate est;
  if (algo == "spacl") {
    est = estimators::spacl(a, k);
  } else if (algo == "svmcone") {
    est = estimators::svmcone_dcmm(a, k, derive_stream(seed, 4));
  } else {
    throw InvalidArgumentError("unknown algorithm: " + algo);
  }
  io::write_matrix_csv(out, est.rows);
  if (!truth.empty()) {
    const auto pi = io::read_membership(truth);
    const auto rep = metrics::membership_error(est.rows, pi.mat());
    const bool fresh = !fs::exists(scores) || fs::file_size(scores) == 0;
    std::ofstream sc(scores, std::ios::app);
    if (!sc) throw IoError("cannot open scores file: " + scores);
    if (fresh) sc << "algo,max_l1_error,mean_l1_error,permutation\n";
    std::string perm;
    for (auto p : rep.permutation) {
      if (!perm.empty()) perm += '|';
      perm += std::to_string(p);
    }
    sc << algo << ',' << io::format_double(rep.max_l1_error) << ','
       << io::format_double(rep.mean_l1_error) << ',' << perm << '\n';
  }
  std::cout << out << "\n";
  return 0;
}

harness::SweepConfig sweep_config_from_json(const json& j) {
  harness::SweepConfig cfg;
  const auto model = j.value("model", std::string("mmsb"));
  cfg.model = model == "dcmm" ? models::ModelKind::kDcmm
                              : models::ModelKind::kMmsb;
  const auto estimator = j.value("estimator", std::string("spacl"));
  cfg.estimator = estimator == "svmcone" ? harness::EstimatorKind::kSvmCone
                                         : harness::EstimatorKind::kSpacl;
  cfg.n = j.value("n", 1000);
  cfg.k = j.value("k", 2);
  const auto param = j.value("param", std::string("rho"));
  if (param == "rho") {
    cfg.param = harness::SweptParam::kRho;
  } else if (param == "omega") {
    cfg.param = harness::SweptParam::kOmega;
  } else if (param == "beta") {
    cfg.param = harness::SweptParam::kBeta;
  } else if (param == "n") {
    cfg.param = harness::SweptParam::kN;
  } else {
    throw ConfigRejectedError("unknown swept parameter: " + param);
  }
  cfg.grid = j.value("grid", std::vector<double>{});
  cfg.trials = j.value("trials", 30);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.rho = j.value("rho", 0.1);
  cfg.omega = j.value("omega", 0.9);
  cfg.frac_pure = j.value("frac_pure", 0.5);
  cfg.dirichlet_a = j.value("dirichlet_a", 1.0);
  cfg.theta_lo_ratio = j.value("theta_lo_ratio", 0.5);
  cfg.alpha = j.value("alpha", 1.0);
  cfg.record_eig_error = j.value("record_eig_error", false);
  cfg.record_dev_ratio = j.value("record_dev_ratio", false);
  if (j.contains("planted_coeff") && !j["planted_coeff"].is_null()) {
    cfg.planted_coeff = j["planted_coeff"].get<double>();
  }
  return cfg;
}

json fit_to_json(const harness::SlopeFit& fit) {
  return json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r_squared", fit.r_squared},
              {"points", fit.points}};
}

// Minimal log-log scatter plus the fitted line, mapped through log10.
std::string render_sweep_svg(const harness::SweepResult& res,
                             const std::string& param_label) {
  const double width = 480, height = 360, margin = 56;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : res.points) {
    xmin = std::min(xmin, std::log10(p.x));
    xmax = std::max(xmax, std::log10(p.x));
    ymin = std::min(ymin, std::log10(p.mean_error));
    ymax = std::max(ymax, std::log10(p.mean_error));
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  const auto sx = [&](double lx) {
    return margin + (lx - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  const auto sy = [&](double ly) {
    return height - margin -
           (ly - ymin) / (ymax - ymin) * (height - 2 * margin);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin
      << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
      << margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  for (const auto& p : res.points) {
    svg << "<circle cx=\"" << sx(std::log10(p.x)) << "\" cy=\""
        << sy(std::log10(p.mean_error)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    svg << "<text x=\"" << sx(std::log10(p.x)) + 6 << "\" y=\""
        << height - margin + 16 << "\" font-size=\"10\">"
        << io::format_double(p.grid_value) << "</text>\n";
  }
  const auto fit_ly = [&](double lx) {
    const double lnx = lx * std::log(10.0);
    return (res.fit.intercept + res.fit.slope * lnx) / std::log(10.0);
  };
  svg << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(fit_ly(xmin))
      << "\" x2=\"" << sx(xmax) << "\" y2=\"" << sy(fit_ly(xmax))
      << "\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << margin - 16
      << "\" font-size=\"12\">log(mean_l1_error) vs log(" << param_label
      << "), slope " << io::format_double(res.fit.slope) << " (R^2 "
      << io::format_double(res.fit.r_squared) << ")</text>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"12\">" << param_label << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

int run_sweep_cmd(const harness::SweepConfig& cfg, const std::string& out,
                  bool plot) {
  const fs::path dir(out);
  fs::create_directories(dir);
  const auto res = harness::run_sweep(cfg, 0);
  io::write_text_file(dir / "results.csv",
                      harness::records_to_csv(res.records));
  json fit = fit_to_json(res.fit);
  fit["param"] = harness::to_string(cfg.param);
  fit["points_xy"] = json::array();
  for (const auto& p : res.points) {
    fit["points_xy"].push_back({{"grid_value", p.grid_value},
                                {"x", p.x},
                                {"mean_error", p.mean_error}});
  }
  if (!res.separation_stat.empty()) {
    fit["separation_stat"] = res.separation_stat;
    fit["alt_separation_stat"] = res.alt_separation_stat;
  }
  io::write_text_file(dir / "fit.json", fit.dump(2) + "\n");
  if (plot) {
    io::write_text_file(dir / "sweep.svg",
                        render_sweep_svg(res, harness::to_string(cfg.param)));
  }
  std::cout << "slope " << io::format_double(res.fit.slope) << " r_squared "
            << io::format_double(res.fit.r_squared) << "\n";
  return 0;
}

int run_threshold_cmd(Eigen::Index n, const std::vector<double>& c_grid,
                      int trials, std::uint64_t seed, const std::string& out) {
  const fs::path dir(out);
  fs::create_directories(dir);
  const auto res = harness::threshold_scan(n, c_grid, trials, seed, 0);
  io::write_text_file(dir / "results.csv",
                      harness::records_to_csv(res.records));
  json j;
  j["n"] = n;
  j["trials"] = trials;
  j["seed"] = seed;
  j["c_grid"] = res.c_grid;
  j["p_values"] = res.p_values;
  j["frequency"] = res.frequency;
  io::write_text_file(dir / "threshold.json", j.dump(2) + "\n");
  for (std::size_t i = 0; i < res.c_grid.size(); ++i) {
    std::cout << "c " << io::format_double(res.c_grid[i]) << " frequency "
              << io::format_double(res.frequency[i]) << "\n";
  }
  return 0;
}

harness::SlopeFit fit_from_json_file(const std::string& path) {
  const json j = json::parse(io::read_text_file(path));
  harness::SlopeFit fit;
  fit.slope = j.at("slope").get<double>();
  fit.intercept = j.value("intercept", 0.0);
  fit.r_squared = j.value("r_squared", 0.0);
  fit.points = j.value("points", 0);
  return fit;
}

int run_report_cmd(const std::string& sparsity_path,
                   const std::string& separation_path,
                   const std::string& threshold_path, const std::string& out) {
  const fs::path dir(out);
  fs::create_directories(dir);
  const auto sparsity = fit_from_json_file(sparsity_path);
  const auto separation = fit_from_json_file(separation_path);
  const json tj = json::parse(io::read_text_file(threshold_path));
  harness::ThresholdResult threshold;
  threshold.c_grid = tj.at("c_grid").get<std::vector<double>>();
  threshold.frequency = tj.at("frequency").get<std::vector<double>>();
  threshold.p_values = tj.value("p_values", std::vector<double>{});

  const auto rep = harness::criterion_report(sparsity, separation, threshold);
  json out_json;
  out_json["stage1"] = rep.stage1;
  out_json["stage2"] = rep.stage2;
  out_json["all_pass"] = rep.all_pass;
  out_json["checks"] = json::array();
  for (const auto& c : rep.checks) {
    out_json["checks"].push_back({{"name", c.name},
                                  {"value", c.value},
                                  {"lo", c.lo},
                                  {"hi", c.hi},
                                  {"verdict", c.pass ? "PASS" : "FLAG"}});
  }
  io::write_text_file(dir / "verdict.json", out_json.dump(2) + "\n");
  const std::string text = harness::render_report_text(rep);
  io::write_text_file(dir / "verdict.txt", text);
  std::cout << text;
  return 0;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    grid.push_back(std::stod(field));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral mixed-membership estimators and verification harness"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand(
      "generate",
      "sample a ground-truth bundle (edge list, membership, manifest)");
  generate->add_option("--model", gen.model, "mmsb or dcmm");
  generate->add_option("--n", gen.n, "number of nodes")->required();
  generate->add_option("--k", gen.k, "number of communities")->required();
  generate->add_option("--rho", gen.rho, "sparsity parameter")->required();
  generate->add_option("--omega", gen.omega,
                       "standard mixing matrix parameter");
  auto* gen_beta = generate->add_option(
      "--beta", gen.beta, "off-diagonal mixing matrix parameter (beta > 2)");
  generate->add_option("--theta-ratio", gen.theta_ratio,
                       "lower ratio of the degree sampler (dcmm)");
  generate->add_option("--frac-pure", gen.frac_pure, "fraction of pure rows");
  generate->add_option("--dirichlet-a", gen.dirichlet_a,
                       "Dirichlet concentration for mixed rows");
  generate->add_option("--seed", gen.seed, "master seed")->required();
  generate->add_option("--out", gen.out, "output directory")->required();

  std::string est_edges, est_algo = "spacl", est_out, est_truth, est_scores;
  Eigen::Index est_k = 0;
  std::uint64_t est_seed = 0;
  auto* estimate =
      app.add_subcommand("estimate", "estimate memberships from an edge list");
  estimate->add_option("--edges", est_edges, "edge list file")->required();
  estimate->add_option("--k", est_k, "number of communities")->required();
  estimate->add_option("--algo", est_algo, "spacl or svmcone");
  estimate->add_option("--seed", est_seed, "seed (svmcone clustering)")
      ->required();
  estimate->add_option("--out", est_out, "membership CSV to write")
      ->required();
  estimate->add_option("--truth", est_truth, "ground-truth membership CSV");
  estimate->add_option("--scores", est_scores,
                       "scores CSV to append the error report to");

  std::string sweep_config_path, sweep_param, sweep_grid_csv, sweep_out;
  std::string sweep_model, sweep_estimator;
  Eigen::Index sweep_n = 0, sweep_k = 0;
  int sweep_trials = 0;
  std::uint64_t sweep_seed = 0;
  double sweep_rho = 0.0, sweep_omega = 0.0, sweep_planted = 0.0;
  bool sweep_plot = false;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--config", sweep_config_path, "sweep config JSON file");
  auto* opt_param = sweep->add_option("--param", sweep_param,
                                      "swept parameter: rho|omega|beta|n");
  auto* opt_grid = sweep->add_option("--grid", sweep_grid_csv,
                                     "comma-separated grid values");
  auto* opt_n = sweep->add_option("--n", sweep_n, "nodes");
  auto* opt_k = sweep->add_option("--k", sweep_k, "communities");
  auto* opt_trials = sweep->add_option("--trials", sweep_trials, "trials");
  auto* opt_seed = sweep->add_option("--seed", sweep_seed, "master seed");
  auto* opt_rho = sweep->add_option("--rho", sweep_rho, "fixed rho");
  auto* opt_omega = sweep->add_option("--omega", sweep_omega, "fixed omega");
  auto* opt_model = sweep->add_option("--model", sweep_model, "mmsb|dcmm");
  auto* opt_estimator =
      sweep->add_option("--estimator", sweep_estimator, "spacl|svmcone");
  auto* opt_planted = sweep->add_option(
      "--planted", sweep_planted, "planted power-law coefficient (test mode)");
  sweep->add_flag("--plot", sweep_plot, "emit a log-log SVG plot");
  sweep->add_option("--out", sweep_out, "output directory")->required();

  Eigen::Index th_n = 0;
  std::string th_grid_csv, th_out;
  int th_trials = 0;
  std::uint64_t th_seed = 0;
  auto* threshold = app.add_subcommand(
      "threshold", "connectivity frequency scan at p = c log(n)/n");
  threshold->add_option("--n", th_n, "nodes")->required();
  threshold->add_option("--c-grid", th_grid_csv, "comma-separated multipliers")
      ->required();
  threshold->add_option("--trials", th_trials, "trials per c")->required();
  threshold->add_option("--seed", th_seed, "master seed")->required();
  threshold->add_option("--out", th_out, "output directory")->required();

  std::string rep_sparsity, rep_separation, rep_threshold, rep_out;
  auto* report = app.add_subcommand(
      "report", "four-stage verdict from two sweeps and a threshold scan");
  report->add_option("--sparsity", rep_sparsity, "sparsity fit.json")
      ->required();
  report->add_option("--separation", rep_separation, "separation fit.json")
      ->required();
  report->add_option("--threshold", rep_threshold, "threshold.json")
      ->required();
  report->add_option("--out", rep_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      gen.has_beta = gen_beta->count() > 0;
      return run_generate(gen);
    }
    if (estimate->parsed()) {
      return run_estimate(est_edges, est_k, est_algo, est_seed, est_out,
                          est_truth, est_scores);
    }
    if (sweep->parsed()) {
      json j = json::object();
      if (!sweep_config_path.empty()) {
        j = json::parse(io::read_text_file(sweep_config_path));
      }
      if (opt_param->count()) j["param"] = sweep_param;
      if (opt_grid->count()) j["grid"] = parse_grid(sweep_grid_csv);
      if (opt_n->count()) j["n"] = sweep_n;
      if (opt_k->count()) j["k"] = sweep_k;
      if (opt_trials->count()) j["trials"] = sweep_trials;
      if (opt_seed->count()) j["seed"] = sweep_seed;
      if (opt_rho->count()) j["rho"] = sweep_rho;
      if (opt_omega->count()) j["omega"] = sweep_omega;
      if (opt_model->count()) j["model"] = sweep_model;
      if (opt_estimator->count()) j["estimator"] = sweep_estimator;
      if (opt_planted->count()) j["planted_coeff"] = sweep_planted;
      if (!j.contains("seed")) {
        throw ConfigRejectedError("sweep config must carry a seed");
      }
      return run_sweep_cmd(sweep_config_from_json(j), sweep_out, sweep_plot);
    }
    if (threshold->parsed()) {
      return run_threshold_cmd(th_n, parse_grid(th_grid_csv), th_trials,
                               th_seed, th_out);
    }
    if (report->parsed()) {
      return run_report_cmd(rep_sparsity, rep_separation, rep_threshold,
                            rep_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
