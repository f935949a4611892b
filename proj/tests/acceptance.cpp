// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Criterion 11 drives the installed CLI, whose path arrives
// as argv[1].

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lqcs/guarantee.hpp"
#include "lqcs/harness.hpp"
#include "lqcs/io.hpp"
#include "lqcs/polytope.hpp"
#include "lqcs/ric.hpp"
#include "lqcs/rng.hpp"
#include "lqcs/solver.hpp"

namespace fs = std::filesystem;
using lqcs::Matrix;
using lqcs::Vector;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << number << ": " << name;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. threshold generalization
void criterion1() {
  bool pass = true;
  std::ostringstream detail;
  for (double t : {1.5, 2.0, 3.0, 4.0, 10.0}) {
    const double lhs = lqcs::lq_threshold(1.0, t - 1.0);
    const double rhs = lqcs::l1_threshold(t);
    if (std::abs(lhs - rhs) > 1e-12) {
      pass = false;
      detail << "t=" << t << " gap=" << std::abs(lhs - rhs) << " ";
    }
  }
  report(1, "lq threshold at q=1 equals the sharp l1 threshold", pass, detail.str());
}

// 2. relaxation property
void criterion2() {
  bool pass = true;
  double min_relax = 1e300;
  for (double q : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    for (double t : {2.1, 2.5, 3.0, 4.0, 6.0, 10.0}) {
      const double relax = lqcs::compare_thresholds(q, t).relaxation;
      min_relax = std::min(min_relax, relax);
      if (!(relax > 0.0)) pass = false;
    }
  }
  std::ostringstream detail;
  detail << "min relaxation on grid = " << min_relax;
  report(2, "lq condition is strictly more relaxed than l1 on the (q, t) grid", pass,
         detail.str());
}

// 3. spot values
void criterion3() {
  const double a = lqcs::lq_threshold(1.0, 1.0);
  const double b = lqcs::lq_threshold(0.5, 4.0);
  const bool pass = std::abs(a - 0.7071067812) <= 1e-9 && std::abs(b - 0.9428090416) <= 1e-9;
  std::ostringstream detail;
  detail << "thr(1,1)=" << a << " thr(0.5,4)=" << b;
  report(3, "threshold spot values", pass, detail.str());
}

// 4. exact RIC oracle
void criterion4() {
  bool pass = true;
  std::ostringstream detail;

  if (std::abs(lqcs::exact_ric(Matrix::Identity(6, 6), 3).value) > 1e-12) {
    pass = false;
    detail << "identity nonzero ";
  }

  Matrix dup = Matrix::Identity(4, 5);
  dup.col(4) = dup.col(1);
  if (std::abs(lqcs::exact_ric(dup, 2).value - 1.0) > 1e-12) {
    pass = false;
    detail << "duplicate-column delta != 1 ";
  }

  lqcs::SplitMix64 rng(2301);
  Matrix a(6, 8);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = rng.next_gaussian() / std::sqrt(6.0);
  const Matrix gram = a.transpose() * a;
  double brute = 0.0;
  int supports = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      const double mean = 0.5 * (gram(i, i) + gram(j, j));
      const double radius =
          std::sqrt(0.25 * (gram(i, i) - gram(j, j)) * (gram(i, i) - gram(j, j)) +
                    gram(i, j) * gram(i, j));
      brute = std::max(brute, std::max(mean + radius - 1.0, 1.0 - (mean - radius)));
      ++supports;
    }
  }
  const auto est = lqcs::exact_ric(a, 2);
  if (supports != 28 || est.supports_examined != 28 || std::abs(est.value - brute) > 1e-10) {
    pass = false;
    detail << "6x8 mismatch: " << est.value << " vs brute " << brute;
  }
  report(4, "exact RIC oracle (identity, duplicated column, 6x8 closed-form brute force)", pass,
         detail.str());
}

// 5. RIC monotonicity
void criterion5() {
  bool pass = true;
  std::ostringstream detail;
  lqcs::SplitMix64 rng(2302);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(8, 12);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 12; ++j) a(i, j) = rng.next_gaussian() / std::sqrt(8.0);
    double prev = -1.0;
    for (int k = 1; k <= 4; ++k) {
      const double value = lqcs::exact_ric(a, k).value;
      if (value < prev - 1e-12) {
        pass = false;
        detail << "trial " << trial << " k=" << k << " ";
      }
      prev = value;
    }
  }
  report(5, "RIC monotonicity over 50 random 8x12 matrices, k = 1..4", pass, detail.str());
}

// 6. polytope round-trip
void criterion6() {
  bool pass = true;
  std::ostringstream detail;
  lqcs::SplitMix64 rng(2303);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_below(12));
    const int p = d + static_cast<int>(rng.next_below(5));
    const int t = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d)));
    const double alpha = 0.05 + 3.0 * rng.next_double();

    Vector v = Vector::Zero(p);
    std::vector<int> support;
    for (int j = p - d; j < p; ++j) {
      const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
      bool taken = false;
      for (int s : support) taken = taken || s == cand;
      support.push_back(taken ? j : cand);
    }
    double l1 = 0.0;
    for (int idx : support) {
      const double mag = alpha * rng.next_open_double();
      v[idx] = (rng.next_u64() & 1u) ? mag : -mag;
      l1 += mag;
    }
    const bool boundary = trial % 10 == 0;
    const double max_up = alpha / v.cwiseAbs().maxCoeff() * l1;
    double target = boundary ? t * alpha : t * alpha * (0.2 + 0.8 * rng.next_double());
    target = std::min(target, boundary ? max_up : 0.999 * max_up);
    v *= target / l1;

    const auto dec = lqcs::decompose(v, alpha, t);
    const auto check = lqcs::verify_decomposition(dec);
    bool ok = check.ok && check.weight_sum_error <= 1e-12 &&
              check.reconstruction_error <= 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff()) &&
              static_cast<int>(dec.terms.size()) <= 2 * lqcs::l0_count(v, 0.0);
    for (const auto& [lambda, u] : dec.terms) ok = ok && lqcs::in_u_set(u, alpha, t, v);
    if (!ok) {
      pass = false;
      ++failures;
    }
  }
  if (failures) detail << failures << "/1000 instances failed";
  report(6, "polytope decomposition round-trip on 1000 random instances", pass, detail.str());
}

// 7. polarization identity
void criterion7() {
  bool pass = true;
  double worst = 0.0;
  lqcs::SplitMix64 rng(2304);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    const int p = 1 + static_cast<int>(rng.next_below(5));
    const int count = 1 + static_cast<int>(rng.next_below(8));
    Matrix b(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) b(i, j) = rng.next_gaussian();
    std::vector<Vector> betas;
    std::vector<double> lambdas(static_cast<std::size_t>(count));
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
      Vector beta(p);
      for (int j = 0; j < p; ++j) beta[j] = 3.0 * rng.next_gaussian();
      betas.push_back(beta);
      lambdas[static_cast<std::size_t>(i)] = rng.next_open_double();
      sum += lambdas[static_cast<std::size_t>(i)];
    }
    for (double& l : lambdas) l /= sum;
    const double c = rng.next_double();
    double scale = 0.0;
    for (int i = 0; i < count; ++i)
      scale += lambdas[static_cast<std::size_t>(i)] *
               (b * betas[static_cast<std::size_t>(i)]).squaredNorm();
    const double residual = std::abs(lqcs::polarization_residual(b, betas, lambdas, c));
    worst = std::max(worst, residual / std::max(scale, 1e-30));
    if (residual > 1e-10 * std::max(scale, 1e-30)) pass = false;
  }
  std::ostringstream detail;
  detail << "worst |residual|/scale = " << worst;
  report(7, "polarization identity over 1000 random instances", pass, detail.str());
}

// 8. exact-recovery validation on the pinned instance
void criterion8() {
  bool pass = true;
  std::ostringstream detail;

  Matrix raw = lqcs::gen_gaussian(24, 32, 9001, lqcs::MatrixEnsemble::RowOrthonormal);
  const double c = lqcs::rip_centering_scale(raw, 4);
  const Matrix a = c * raw;

  const auto cert = lqcs::certify_exact(a, 1, 0.5, 4);
  if (!cert.satisfied || !lqcs::certificate_is_sound(cert)) {
    pass = false;
    detail << "certificate not satisfied ";
  }

  const Vector x = lqcs::gen_sparse(32, 1, 9501, lqcs::SparseDist::Gaussian);
  const Vector y = a * x;

  const auto oracle = lqcs::l0_oracle(a, y, 2, 1e-8);
  const bool unique = oracle.has_value() && oracle->k == 1 &&
                      lqcs::l0_fit_count(a, y, 1, 1e-8) == 1;
  if (!unique) {
    pass = false;
    detail << "planted signal not the unique sparsest solution ";
  }

  const auto probe =
      lqcs::null_space_probe(a, x, 0.5, 10000, std::max(1.0, 2.0 * x.norm()), 9901);
  if (probe.violations != 0) {
    pass = false;
    detail << probe.violations << " null-space violations ";
  }

  const auto sol = lqcs::irls_lq(a, y, 0.5, {});
  const double rel = (sol.x_hat - x).norm() / x.norm();
  if (!(sol.converged && rel <= 1e-6)) {
    pass = false;
    detail << "recovery rel error " << rel << " ";
  }
  if (pass) {
    detail << "margin=" << cert.margin << ", probe min gap=" << probe.min_gap << ", rel=" << rel;
  }
  report(8, "exact recovery on the pinned certified 24x32 instance", pass, detail.str());
}

// 9. stability bound audit
void criterion9() {
  bool pass = true;
  std::ostringstream detail;

  lqcs::ExperimentConfig config;
  config.n = 24;
  config.p = 32;
  config.k_grid = {1};
  config.q_grid = {0.5};
  config.trials = 200;
  config.master_seed = 2025;
  config.matrix_ensemble = lqcs::MatrixEnsemble::RowOrthonormal;
  config.noise.enabled = true;
  config.noise.eps = 1e-3;
  config.noise.eta = 2e-3;
  const auto noisy = lqcs::run_bound_audit(config, 4, "", {}, 4);
  if (noisy.bound_violated != 0 || noisy.certified == 0) pass = false;

  lqcs::ExperimentConfig clean = config;
  clean.noise = lqcs::NoiseModel{};
  clean.trials = 50;
  clean.master_seed = 2026;
  const auto noiseless = lqcs::run_bound_audit(clean, 4, "", {}, 4);
  if (noiseless.bound_violated != 0) pass = false;
  for (const auto& rec : noiseless.records) {
    if (rec.bound_value && rec.solver_converged && rec.rel_error > clean.success_rtol)
      pass = false;  // the zero-noise limit of the bound demands exact recovery
  }

  detail << "noisy: certified=" << noisy.certified << " held=" << noisy.bound_held
         << " violated=" << noisy.bound_violated << " solver_failed=" << noisy.solver_failed
         << "; noiseless: certified=" << noiseless.certified
         << " violated=" << noiseless.bound_violated;
  report(9, "stability bound audit (200 noisy + 50 noiseless trials)", pass,
         detail.str());
}

// 10. phase-transition sanity
void criterion10() {
  lqcs::ExperimentConfig config;
  config.n = 64;
  config.p = 128;
  config.k_grid = {20};
  config.q_grid = {0.5, 1.0};
  config.trials = 50;
  config.master_seed = 7;
  config.matrix_ensemble = lqcs::MatrixEnsemble::GaussianIID;
  const auto result = lqcs::run_phase(config, {}, 4);

  const double r_half = result.cells[0].rate;
  const double r_one = result.cells[1].rate;
  const double n = static_cast<double>(config.trials);
  const double se = std::sqrt(r_half * (1.0 - r_half) / n + r_one * (1.0 - r_one) / n);
  const bool pass = r_half >= r_one - 2.0 * se;
  std::ostringstream detail;
  detail << "rate(q=0.5)=" << r_half << " rate(q=1)=" << r_one << " se=" << se;
  report(10, "phase sanity at k=20: lq success dominates l1 within 2 standard errors", pass,
         detail.str());
}

// 11. CLI determinism
struct CliRunner {
  std::string cli;
  fs::path dir;
  bool ok = true;
  std::string detail;

  std::string path(const std::string& name) const { return (dir / name).string(); }

  int exec(const std::string& args, const std::string& stdout_name) {
    const std::string cmd = cli + " " + args + " > " + path(stdout_name) + " 2> " +
                            path(stdout_name + ".err");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void expect_identical(const std::string& what, const std::string& f1, const std::string& f2) {
    if (slurp(f1) != slurp(f2)) {
      ok = false;
      detail += what + " differs; ";
    }
  }

  // Run the same command twice, demand exit 0 and identical bytes.
  void twice(const std::string& what, const std::string& args) {
    const int c1 = exec(args, what + ".1");
    const int c2 = exec(args, what + ".2");
    if (c1 != 0 || c2 != 0) {
      ok = false;
      detail += what + " exited " + std::to_string(c1) + "/" + std::to_string(c2) + "; ";
      return;
    }
    expect_identical(what, path(what + ".1"), path(what + ".2"));
  }
};

void criterion11(const std::string& cli) {
  CliRunner runner;
  runner.cli = cli;
  runner.dir = fs::temp_directory_path() / "lqcs_acceptance";
  fs::remove_all(runner.dir);
  fs::create_directories(runner.dir);

  // Shared inputs.
  const Matrix a = lqcs::gen_gaussian(8, 12, 3104, lqcs::MatrixEnsemble::RowOrthonormal);
  const double c = lqcs::rip_centering_scale(a, 3);
  lqcs::write_matrix_csv(runner.path("A.csv"), c * a);
  const Vector x = lqcs::gen_sparse(12, 1, 3105, lqcs::SparseDist::Gaussian);
  lqcs::write_vector(runner.path("y.txt"), (c * a) * x);
  Vector v(5);
  v << 0.4, -0.3, 0.25, 0.0, 0.35;
  lqcs::write_vector(runner.path("v.txt"), v);
  {
    std::ofstream cfg(runner.path("phase.json"));
    cfg << R"({"n": 6, "p": 6, "k_grid": [1, 2], "q_grid": [0.5, 1.0], "trials": 3,
               "master_seed": 11, "matrix_ensemble": "row_orthonormal"})";
    std::ofstream acfg(runner.path("audit.json"));
    acfg << R"({"n": 12, "p": 16, "k_grid": [1], "q_grid": [0.5], "trials": 4,
                "master_seed": 17, "matrix_ensemble": "row_orthonormal",
                "noise": {"type": "l2ball", "eta": 0.002, "eps": 0.001}})";
  }

  runner.twice("ric_exact", "ric --matrix " + runner.path("A.csv") + " --order 2 --exact");
  runner.twice("ric_mc", "--seed 5 ric --matrix " + runner.path("A.csv") + " --order 2 --mc 100");
  {
    const int t1 = runner.exec("--threads 1 ric --matrix " + runner.path("A.csv") +
                                   " --order 3 --exact",
                               "ric.t1");
    const int t4 = runner.exec("--threads 4 ric --matrix " + runner.path("A.csv") +
                                   " --order 3 --exact",
                               "ric.t4");
    if (t1 != 0 || t4 != 0) {
      runner.ok = false;
      runner.detail += "ric thread exit codes; ";
    } else {
      runner.expect_identical("ric threads", runner.path("ric.t1"), runner.path("ric.t4"));
    }
  }
  runner.twice("certify",
               "certify --matrix " + runner.path("A.csv") + " -k 1 -q 0.5 --max-order 3");
  runner.twice("bound_l2",
               "bound --model l2 --delta 0.5 --s 4 --q 0.5 --eps 0.1 --eta 0.2 --sigma 1.2 "
               "--tail 0.05");
  runner.twice("bound_dz",
               "bound --model dantzig --delta 0.5 --s 4 --q 0.5 -k 2 --eps 0.1 --eta 0.5 "
               "--sigma 1 --tail 0.1");
  runner.twice("recover", "recover --matrix " + runner.path("A.csv") + " --measurements " +
                              runner.path("y.txt") + " -q 0.5");
  runner.twice("recover_eta", "recover --matrix " + runner.path("A.csv") + " --measurements " +
                                  runner.path("y.txt") + " -q 0.5 --eta 0.001");
  runner.twice("decompose",
               "decompose --vector " + runner.path("v.txt") + " --alpha 0.45 --t 3");

  // Thread-count independence of the heavier commands, files included.
  const int p1 = runner.exec("--threads 1 --out " + runner.path("ph1") + " phase --config " +
                                 runner.path("phase.json"),
                             "phase.t1");
  const int p4 = runner.exec("--threads 4 --out " + runner.path("ph4") + " phase --config " +
                                 runner.path("phase.json"),
                             "phase.t4");
  if (p1 != 0 || p4 != 0) {
    runner.ok = false;
    runner.detail += "phase exit codes; ";
  } else {
    runner.expect_identical("phase stdout", runner.path("phase.t1"), runner.path("phase.t4"));
    for (const char* name : {"phase_trials.csv", "phase_summary.csv", "phase_summary.json"})
      runner.expect_identical(name, (runner.dir / "ph1" / name).string(),
                              (runner.dir / "ph4" / name).string());
  }

  const int a1 = runner.exec("--threads 1 --out " + runner.path("au1") + " audit --config " +
                                 runner.path("audit.json") + " --max-order 3",
                             "audit.t1");
  const int a2 = runner.exec("--threads 3 --out " + runner.path("au3") + " audit --config " +
                                 runner.path("audit.json") + " --max-order 3",
                             "audit.t3");
  if (a1 != 0 || a2 != 0) {
    runner.ok = false;
    runner.detail += "audit exit codes; ";
  } else {
    runner.expect_identical("audit stdout", runner.path("audit.t1"), runner.path("audit.t3"));
    for (const char* name : {"audit_trials.csv", "audit_report.json"})
      runner.expect_identical(name, (runner.dir / "au1" / name).string(),
                              (runner.dir / "au3" / name).string());
  }

  // Exit-code contract spot checks (domain error 2, budget refusal 3).
  if (runner.exec("ric --matrix " + runner.path("A.csv") + " --order 99", "ec_domain") != 2) {
    runner.ok = false;
    runner.detail += "domain error exit code != 2; ";
  }
  {
    std::ofstream wide(runner.path("wide.csv"));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 40; ++j) wide << (j ? "," : "") << ((i + j) % 3 == 0 ? "1" : "0");
      wide << "\n";
    }
  }
  if (runner.exec("ric --matrix " + runner.path("wide.csv") + " --order 20 --budget 1000",
                  "ec_budget") != 3) {
    runner.ok = false;
    runner.detail += "budget refusal exit code != 3; ";
  }
  {
    Matrix deficient(2, 3);
    deficient << 1, 2, 3, 2, 4, 6;  // rank 1
    lqcs::write_matrix_csv(runner.path("deficient.csv"), deficient);
    lqcs::write_vector(runner.path("y2.txt"), Vector::Ones(2));
  }
  if (runner.exec("recover --matrix " + runner.path("deficient.csv") + " --measurements " +
                      runner.path("y2.txt") + " -q 0.5",
                  "ec_numeric") != 4) {
    runner.ok = false;
    runner.detail += "numeric failure exit code != 4; ";
  }

  report(11, "CLI determinism across repeat runs and thread counts", runner.ok, runner.detail);
  if (runner.ok) fs::remove_all(runner.dir);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-lqcs-cli>\n";
    return 64;
  }
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11(argv[1]);

  if (g_failures == 0)
    std::cout << "all 11 criteria passed" << std::endl;
  else
    std::cout << g_failures << " criteria FAILED" << std::endl;
  return g_failures;
}
