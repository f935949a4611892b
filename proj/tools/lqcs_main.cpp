// lqcs: command-line front end for the lq sparse recovery toolkit.
//
// Subcommands: ric, certify, bound, recover, decompose, phase, audit.
// Every command prints a single JSON document to stdout (phase and audit also
// write CSV/JSON artifacts under --out). Outputs are byte-identical across
// runs and thread counts for fixed seeds. Exit codes: 0 ok, 2 domain or
// validation error, 3 budget refusal, 4 internal numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqcs/errors.hpp"
#include "lqcs/guarantee.hpp"
#include "lqcs/harness.hpp"
#include "lqcs/io.hpp"
#include "lqcs/polytope.hpp"
#include "lqcs/ric.hpp"
#include "lqcs/rng.hpp"
#include "lqcs/solver.hpp"

namespace {

using lqcs::Matrix;
using lqcs::Vector;
using ordered_json = nlohmann::ordered_json;

const char* mode_name(lqcs::RicMode mode) {
  return mode == lqcs::RicMode::Exact ? "exact" : "lower_bound";
}

ordered_json ric_to_json(const lqcs::RicEstimate& est) {
  ordered_json j;
  j["order"] = est.order;
  j["value"] = est.value;
  j["mode"] = mode_name(est.mode);
  j["supports_examined"] = est.supports_examined;
  return j;
}

ordered_json certificate_to_json(const lqcs::GuaranteeCertificate& cert) {
  ordered_json j;
  j["q"] = cert.q;
  j["k"] = cert.k;
  j["satisfied"] = cert.satisfied;
  j["margin"] = cert.margin;
  j["s_star"] = cert.s_star ? ordered_json(*cert.s_star) : ordered_json(nullptr);
  j["order_m"] = cert.order_m ? ordered_json(*cert.order_m) : ordered_json(nullptr);
  j["delta_m"] = cert.delta_m ? ordered_json(*cert.delta_m) : ordered_json(nullptr);
  j["threshold"] = cert.threshold ? ordered_json(*cert.threshold) : ordered_json(nullptr);
  j["estimates_mode"] = mode_name(cert.estimates_mode);
  j["sound"] = lqcs::certificate_is_sound(cert);
  return j;
}

ordered_json bound_to_json(const lqcs::ErrorBoundReport& rep) {
  ordered_json j;
  j["model"] = rep.model == lqcs::NoiseShape::L2Ball ? "l2" : "dantzig";
  j["epsilon"] = rep.epsilon;
  j["eta"] = rep.eta;
  j["delta"] = rep.delta;
  j["s"] = rep.s;
  j["q"] = rep.q;
  if (rep.model == lqcs::NoiseShape::Dantzig) j["k"] = rep.k;
  j["sigma"] = rep.sigma;
  j["tail2"] = rep.tail2;
  j["root_factor"] = rep.root_factor;
  j["threshold"] = rep.threshold;
  j["amplifier"] = rep.amplifier;
  j["bound"] = rep.bound;
  return j;
}

ordered_json solver_result_to_json(const lqcs::SolverResult& res) {
  ordered_json j;
  j["x_hat"] = std::vector<double>(res.x_hat.data(), res.x_hat.data() + res.x_hat.size());
  j["objective"] = res.objective;
  j["residual2"] = res.residual2;
  j["iterations"] = res.iterations;
  j["eps_final"] = res.eps_final;
  j["converged"] = res.converged;
  j["degenerate"] = res.degenerate;
  j["atr_inf"] = res.atr_inf;
  return j;
}

lqcs::ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lqcs::domain_error("cannot open config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw lqcs::domain_error(std::string("config parse error: ") + e.what());
  }

  lqcs::ExperimentConfig config;
  try {
    config.n = j.at("n").get<int>();
    config.p = j.at("p").get<int>();
    config.k_grid = j.at("k_grid").get<std::vector<int>>();
    config.q_grid = j.at("q_grid").get<std::vector<double>>();
    config.trials = j.at("trials").get<int>();
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("success_rtol")) config.success_rtol = j.at("success_rtol").get<double>();
    if (j.contains("noise")) {
      const auto& noise = j.at("noise");
      const std::string type = noise.at("type").get<std::string>();
      if (type == "l2ball") {
        config.noise.enabled = true;
        config.noise.eta = noise.at("eta").get<double>();
        config.noise.eps = noise.at("eps").get<double>();
      } else if (type != "none") {
        throw lqcs::domain_error("config: unknown noise type '" + type + "'");
      }
    }
    if (j.contains("matrix_ensemble")) {
      const std::string name = j.at("matrix_ensemble").get<std::string>();
      if (name == "gaussian_iid")
        config.matrix_ensemble = lqcs::MatrixEnsemble::GaussianIID;
      else if (name == "gaussian_column_normalized")
        config.matrix_ensemble = lqcs::MatrixEnsemble::GaussianColumnNormalized;
      else if (name == "row_orthonormal")
        config.matrix_ensemble = lqcs::MatrixEnsemble::RowOrthonormal;
      else
        throw lqcs::domain_error("config: unknown matrix_ensemble '" + name + "'");
    }
  } catch (const ordered_json::exception& e) {
    throw lqcs::domain_error(std::string("config: ") + e.what());
  }
  return config;
}

lqcs::SolverOptions parse_solver_options(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lqcs::domain_error("cannot open options file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw lqcs::domain_error(std::string("options parse error: ") + e.what());
  }
  lqcs::SolverOptions opts;
  if (j.contains("max_outer")) opts.max_outer = j.at("max_outer").get<int>();
  if (j.contains("max_inner")) opts.max_inner = j.at("max_inner").get<int>();
  if (j.contains("eps0")) opts.eps0 = j.at("eps0").get<double>();
  if (j.contains("eps_decay")) opts.eps_decay = j.at("eps_decay").get<double>();
  if (j.contains("eps_floor")) opts.eps_floor = j.at("eps_floor").get<double>();
  if (j.contains("step_tol")) opts.step_tol = j.at("step_tol").get<double>();
  if (j.contains("seed")) opts.seed = j.at("seed").get<std::uint64_t>();
  lqcs::validate(opts);
  return opts;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw lqcs::domain_error("cannot write file: " + path);
  out << content;
}

struct GlobalFlags {
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run(int argc, char** argv) {
  CLI::App app{"lq sparse recovery toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--threads", flags.threads, "worker threads (never affects outputs)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out_dir, "output directory for file artifacts");
  app.add_option("--format", flags.format, "stdout summary format for phase/audit")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", flags.seed, "seed override for randomized commands");

  // --- ric ---------------------------------------------------------------
  auto* ric_cmd = app.add_subcommand("ric", "restricted isometry constant of a matrix");
  std::string ric_matrix;
  int ric_order_k = 0;
  bool ric_exact = false;
  std::uint64_t ric_mc_trials = 0;
  std::uint64_t ric_budget = lqcs::kDefaultEnumerationBudget;
  ric_cmd->add_option("--matrix", ric_matrix, "CSV matrix file")->required();
  ric_cmd->add_option("--order", ric_order_k, "RIC order k")->required();
  auto* exact_flag = ric_cmd->add_flag("--exact", ric_exact, "exhaustive enumeration (default)");
  auto* mc_opt = ric_cmd->add_option("--mc", ric_mc_trials, "Monte Carlo lower bound, N trials");
  exact_flag->excludes(mc_opt);
  ric_cmd->add_option("--budget", ric_budget, "support enumeration budget");

  // --- certify -----------------------------------------------------------
  auto* cert_cmd = app.add_subcommand("certify", "search for a recovery certificate");
  std::string cert_matrix;
  int cert_k = 0;
  double cert_q = 0.0;
  int cert_max_order = 0;
  std::uint64_t cert_mc_trials = 0;
  std::uint64_t cert_budget = lqcs::kDefaultEnumerationBudget;
  cert_cmd->add_option("--matrix", cert_matrix, "CSV matrix file")->required();
  cert_cmd->add_option("-k,--k", cert_k, "sparsity level")->required();
  cert_cmd->add_option("-q,--q", cert_q, "quasi-norm exponent in (0, 1]")->required();
  cert_cmd->add_option("--max-order", cert_max_order, "largest RIC order to try (default 2k+2)");
  auto* cert_mc = cert_cmd->add_option("--mc", cert_mc_trials,
                                       "use Monte Carlo RIC lower bounds, N trials per order");
  cert_cmd->add_option("--budget", cert_budget, "support enumeration budget");

  // --- bound -------------------------------------------------------------
  auto* bound_cmd = app.add_subcommand("bound", "evaluate a stability error bound");
  std::string bound_model;
  double bound_delta = 0.0, bound_s = 0.0, bound_q = 0.0;
  int bound_k = 0;
  double bound_eps = 0.0, bound_eta = 0.0, bound_sigma = 0.0, bound_tail = 0.0;
  bound_cmd->add_option("--model", bound_model, "noise model")
      ->required()
      ->check(CLI::IsMember({"l2", "dantzig"}));
  bound_cmd->add_option("--delta", bound_delta, "RIC value at order (s^q+1)k")->required();
  bound_cmd->add_option("--s", bound_s, "sparsity ratio s > 0")->required();
  bound_cmd->add_option("--q", bound_q, "quasi-norm exponent")->required();
  auto* bound_k_opt = bound_cmd->add_option("-k,--k", bound_k, "sparsity level (dantzig only)");
  bound_cmd->add_option("--eps", bound_eps, "measurement noise level epsilon")->required();
  bound_cmd->add_option("--eta", bound_eta, "solver constraint radius eta")->required();
  bound_cmd->add_option("--sigma", bound_sigma, "spectral norm of A")->required();
  bound_cmd->add_option("--tail", bound_tail, "l2 norm of the best-k-term tail")->required();

  // --- recover -----------------------------------------------------------
  auto* rec_cmd = app.add_subcommand("recover", "lq minimization from measurements");
  std::string rec_matrix, rec_measurements, rec_opts_path;
  double rec_q = 0.0;
  double rec_eta = 0.0;
  rec_cmd->add_option("--matrix", rec_matrix, "CSV matrix file")->required();
  rec_cmd->add_option("--measurements", rec_measurements, "measurement vector file")->required();
  rec_cmd->add_option("-q,--q", rec_q, "quasi-norm exponent in (0, 1]")->required();
  auto* rec_eta_opt =
      rec_cmd->add_option("--eta", rec_eta, "noise radius; omit for equality constraints");
  rec_cmd->add_option("--opts", rec_opts_path, "JSON solver options file");

  // --- decompose ---------------------------------------------------------
  auto* dec_cmd = app.add_subcommand("decompose", "sparse convex decomposition of a vector");
  std::string dec_vector;
  double dec_alpha = 0.0;
  int dec_t = 0;
  dec_cmd->add_option("--vector", dec_vector, "vector file")->required();
  dec_cmd->add_option("--alpha", dec_alpha, "sup-norm cap alpha")->required();
  dec_cmd->add_option("--t", dec_t, "sparsity budget t")->required();

  // --- phase -------------------------------------------------------------
  auto* phase_cmd = app.add_subcommand("phase", "success-rate grid over (k, q)");
  std::string phase_config;
  phase_cmd->add_option("--config", phase_config, "experiment config JSON")->required();

  // --- audit -------------------------------------------------------------
  auto* audit_cmd = app.add_subcommand("audit", "certified stability-bound audit");
  std::string audit_config;
  int audit_max_order = 0;
  audit_cmd->add_option("--config", audit_config, "experiment config JSON")->required();
  audit_cmd->add_option("--max-order", audit_max_order, "largest RIC order to certify")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  flags.seed_given = seed_opt->count() > 0;

  if (ric_cmd->parsed()) {
    const Matrix a = lqcs::read_matrix_csv(ric_matrix);
    lqcs::RicEstimate est;
    if (mc_opt->count() > 0)
      est = lqcs::mc_ric_lower(a, ric_order_k, ric_mc_trials, flags.seed);
    else
      est = lqcs::exact_ric(a, ric_order_k, ric_budget, flags.threads);
    std::cout << ric_to_json(est).dump(2) << "\n";
    return 0;
  }

  if (cert_cmd->parsed()) {
    const Matrix a = lqcs::read_matrix_csv(cert_matrix);
    if (cert_max_order == 0)
      cert_max_order = std::min<int>(static_cast<int>(a.cols()), 2 * cert_k + 2);
    lqcs::GuaranteeCertificate cert;
    if (cert_mc->count() > 0) {
      std::map<int, lqcs::RicEstimate> oracle;
      for (int m = cert_k + 1; m <= cert_max_order; ++m)
        oracle[m] = lqcs::mc_ric_lower(a, m, cert_mc_trials, lqcs::mix64(flags.seed, m));
      cert = lqcs::certify(oracle, cert_k, cert_q, cert_max_order);
    } else {
      cert = lqcs::certify_exact(a, cert_k, cert_q, cert_max_order, cert_budget, flags.threads);
    }
    std::cout << certificate_to_json(cert).dump(2) << "\n";
    return 0;
  }

  if (bound_cmd->parsed()) {
    lqcs::ErrorBoundReport rep;
    if (bound_model == "l2") {
      rep = lqcs::error_bound_l2(bound_delta, bound_s, bound_q, bound_eps, bound_eta, bound_sigma,
                                 bound_tail);
    } else {
      if (bound_k_opt->count() == 0)
        throw lqcs::domain_error("bound: the dantzig model requires -k");
      rep = lqcs::error_bound_dantzig(bound_delta, bound_s, bound_q, bound_k, bound_eps,
                                      bound_eta, bound_sigma, bound_tail);
    }
    std::cout << bound_to_json(rep).dump(2) << "\n";
    return 0;
  }

  if (rec_cmd->parsed()) {
    const Matrix a = lqcs::read_matrix_csv(rec_matrix);
    const Vector y = lqcs::read_vector(rec_measurements);
    lqcs::SolverOptions opts;
    if (!rec_opts_path.empty()) opts = parse_solver_options(rec_opts_path);
    if (flags.seed_given) opts.seed = flags.seed;
    const lqcs::SolverResult res = rec_eta_opt->count() > 0
                                       ? lqcs::irls_lq_denoise(a, y, rec_q, rec_eta, opts)
                                       : lqcs::irls_lq(a, y, rec_q, opts);
    std::cout << solver_result_to_json(res).dump(2) << "\n";
    return 0;
  }

  if (dec_cmd->parsed()) {
    const Vector v = lqcs::read_vector(dec_vector);
    const lqcs::PolytopeDecomposition dec = lqcs::decompose(v, dec_alpha, dec_t);
    const lqcs::DecompositionCheck check = lqcs::verify_decomposition(dec);
    ordered_json j;
    j["alpha"] = dec.alpha;
    j["t"] = dec.t;
    ordered_json lambdas = ordered_json::array();
    ordered_json terms = ordered_json::array();
    for (const auto& [lambda, u] : dec.terms) {
      lambdas.push_back(lambda);
      terms.push_back(std::vector<double>(u.data(), u.data() + u.size()));
    }
    j["lambdas"] = lambdas;
    j["terms"] = terms;
    j["checks"] = {{"reconstruction_error", check.reconstruction_error},
                   {"weight_sum_error", check.weight_sum_error},
                   {"all_members", check.all_members}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (phase_cmd->parsed()) {
    lqcs::ExperimentConfig config = parse_config(phase_config);
    if (flags.seed_given) config.master_seed = flags.seed;
    const lqcs::PhaseResult result = lqcs::run_phase(config, {}, flags.threads);
    for (const std::string& warning : result.warnings)
      std::cerr << "warning: " << warning << "\n";

    namespace fs = std::filesystem;
    fs::create_directories(flags.out_dir);
    write_file(flags.out_dir + "/phase_trials.csv", lqcs::trials_to_csv(result.records));
    write_file(flags.out_dir + "/phase_summary.csv", lqcs::phase_summary_to_csv(result));
    write_file(flags.out_dir + "/phase_summary.json",
               lqcs::phase_summary_to_json(config, result));
    if (flags.format == "json")
      std::cout << lqcs::phase_summary_to_json(config, result);
    else
      std::cout << lqcs::phase_summary_to_csv(result);
    return 0;
  }

  if (audit_cmd->parsed()) {
    lqcs::ExperimentConfig config = parse_config(audit_config);
    if (flags.seed_given) config.master_seed = flags.seed;
    namespace fs = std::filesystem;
    fs::create_directories(flags.out_dir);
    const lqcs::AuditReport report = lqcs::run_bound_audit(
        config, audit_max_order, flags.out_dir + "/violations", {}, flags.threads);
    write_file(flags.out_dir + "/audit_trials.csv", lqcs::trials_to_csv(report.records));
    const std::string report_json = lqcs::audit_report_to_json(config, audit_max_order, report);
    write_file(flags.out_dir + "/audit_report.json", report_json);
    if (flags.format == "csv") {
      std::cout << "trials,certified,uncertified,bound_held,bound_violated,solver_failed\n"
                << report.trials_total << ',' << report.certified << ',' << report.uncertified
                << ',' << report.bound_held << ',' << report.bound_violated << ','
                << report.solver_failed << "\n";
    } else {
      std::cout << report_json;
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lqcs::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lqcs::budget_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 4;
  }
}
