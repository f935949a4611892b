#include "lqcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>
#include <thread>

#include "lqcs/errors.hpp"
#include "lqcs/guarantee.hpp"
#include "lqcs/io.hpp"
#include "lqcs/ric.hpp"
#include "lqcs/rng.hpp"

#include <json.hpp>

namespace lqcs {
namespace {

using ordered_json = nlohmann::ordered_json;

const char* ensemble_name(MatrixEnsemble e) {
  switch (e) {
    case MatrixEnsemble::GaussianIID: return "gaussian_iid";
    case MatrixEnsemble::GaussianColumnNormalized: return "gaussian_column_normalized";
    case MatrixEnsemble::RowOrthonormal: return "row_orthonormal";
  }
  return "?";
}

// Runs fn(i) for i in [0, total) on `threads` workers; slot-indexed outputs
// keep results independent of scheduling.
void parallel_trials(int total, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, total));
  if (workers == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

Vector noise_vector(int n, double eps, std::uint64_t seed) {
  Vector z = Vector::Zero(n);
  if (eps <= 0.0) return z;
  SplitMix64 rng(seed);
  for (int i = 0; i < n; ++i) z[i] = rng.next_gaussian();
  const double norm = z.norm();
  if (norm == 0.0) {
    z[0] = eps;  // all-zero gaussian draw; keep the exact-radius contract
    return z;
  }
  return z * (eps / norm);
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.n < 1 || config.p < 1) throw domain_error("config: n and p must be >= 1");
  if (config.k_grid.empty() || config.q_grid.empty())
    throw domain_error("config: k_grid and q_grid must be non-empty");
  if (config.trials < 1) throw domain_error("config: trials must be >= 1");
  for (int k : config.k_grid)
    if (k < 1 || k >= config.n) throw domain_error("config: every k must satisfy 1 <= k < n");
  for (double q : config.q_grid)
    if (!(q > 0.0) || q > 1.0) throw domain_error("config: every q must lie in (0, 1]");
  if (!(config.success_rtol > 0.0)) throw domain_error("config: success_rtol must be positive");
  if (config.noise.enabled) {
    if (!(config.noise.eta > 0.0)) throw domain_error("config: noise eta must be positive");
    if (config.noise.eps < 0.0) throw domain_error("config: noise eps must be non-negative");
    if (config.noise.eta < config.noise.eps)
      throw domain_error("config: noise eta must be >= eps");
  }
  if (config.matrix_ensemble == MatrixEnsemble::RowOrthonormal && config.n > config.p)
    throw domain_error("config: row-orthonormal ensemble requires n <= p");
}

std::uint64_t trial_seed(std::uint64_t master_seed, int k_index, int q_index, int trial_index) {
  std::uint64_t h = mix64(master_seed, static_cast<std::uint64_t>(k_index));
  h = mix64(h, static_cast<std::uint64_t>(q_index));
  return mix64(h, static_cast<std::uint64_t>(trial_index));
}

Matrix gen_gaussian(int n, int p, std::uint64_t seed, MatrixEnsemble ensemble) {
  if (n < 1 || p < 1) throw domain_error("gen_gaussian: n and p must be >= 1");
  if (ensemble == MatrixEnsemble::RowOrthonormal && n > p)
    throw domain_error("gen_gaussian: row-orthonormal ensemble requires n <= p");

  SplitMix64 rng(seed);
  Matrix a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.next_gaussian();

  switch (ensemble) {
    case MatrixEnsemble::GaussianIID:
      return a / std::sqrt(static_cast<double>(n));
    case MatrixEnsemble::GaussianColumnNormalized: {
      for (int j = 0; j < p; ++j) {
        const double norm = a.col(j).norm();
        if (norm == 0.0) throw numeric_error("gen_gaussian: zero column draw");
        a.col(j) /= norm;
      }
      return a;
    }
    case MatrixEnsemble::RowOrthonormal: {
      Eigen::HouseholderQR<Matrix> qr(a.transpose());
      Matrix thin_q = Matrix(qr.householderQ()).leftCols(n);
      // Fix the sign convention so the draw determines the matrix uniquely.
      const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
      for (int i = 0; i < n; ++i)
        if (r(i, i) < 0.0) thin_q.col(i) *= -1.0;
      return thin_q.transpose();
    }
  }
  throw domain_error("gen_gaussian: unknown ensemble");
}

Vector gen_sparse(int p, int k, std::uint64_t seed, SparseDist dist) {
  if (p < 1) throw domain_error("gen_sparse: p must be >= 1");
  if (k < 0 || k > p) throw domain_error("gen_sparse: k must lie in [0, p]");

  Vector x = Vector::Zero(p);
  if (k == 0) return x;

  SplitMix64 rng(seed);
  // Floyd's sample for the support, as in the Monte Carlo RIC path.
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(k));
  for (int j = p - k; j < p; ++j) {
    const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(support.begin(), support.end(), cand) != support.end())
      support.push_back(j);
    else
      support.push_back(cand);
  }

  for (int idx : support) {
    double value = 0.0;
    if (dist == SparseDist::Rademacher) {
      value = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    } else {
      do {
        value = rng.next_gaussian();
      } while (std::abs(value) < 1e-3);
    }
    x[idx] = value;
  }
  return x;
}

PhaseResult run_phase(const ExperimentConfig& config, const SolverOptions& solver_opts,
                      int threads) {
  validate(config);
  validate(solver_opts);

  const int nk = static_cast<int>(config.k_grid.size());
  const int nq = static_cast<int>(config.q_grid.size());
  const int total = nk * nq * config.trials;

  PhaseResult result;
  result.records.resize(static_cast<std::size_t>(total));

  parallel_trials(total, threads, [&](int slot) {
    const int ki = slot / (nq * config.trials);
    const int qi = (slot / config.trials) % nq;
    const int t = slot % config.trials;
    const int k = config.k_grid[static_cast<std::size_t>(ki)];
    const double q = config.q_grid[static_cast<std::size_t>(qi)];
    const std::uint64_t seed = trial_seed(config.master_seed, ki, qi, t);

    const Matrix a = gen_gaussian(config.n, config.p, mix64(seed, 1), config.matrix_ensemble);
    const Vector x = gen_sparse(config.p, k, mix64(seed, 2), SparseDist::Gaussian);
    Vector y = a * x;
    if (config.noise.enabled) y += noise_vector(config.n, config.noise.eps, mix64(seed, 3));

    SolverOptions opts = solver_opts;
    opts.seed = mix64(seed, 4);

    TrialRecord rec;
    rec.k = k;
    rec.q = q;
    rec.trial_index = t;
    rec.seed_used = seed;
    try {
      const SolverResult sol = config.noise.enabled
                                   ? irls_lq_denoise(a, y, q, config.noise.eta, opts)
                                   : irls_lq(a, y, q, opts);
      rec.rel_error = (sol.x_hat - x).norm() / x.norm();
      rec.solver_converged = sol.converged;
      rec.success = sol.converged && rec.rel_error <= config.success_rtol;
    } catch (const std::exception&) {
      // Solver refusals are recorded as failed trials, never campaign-fatal.
      rec.rel_error = 1.0;
      rec.solver_converged = false;
      rec.success = false;
    }
    result.records[static_cast<std::size_t>(slot)] = std::move(rec);
  });

  for (int ki = 0; ki < nk; ++ki) {
    for (int qi = 0; qi < nq; ++qi) {
      PhaseCell cell;
      cell.k = config.k_grid[static_cast<std::size_t>(ki)];
      cell.q = config.q_grid[static_cast<std::size_t>(qi)];
      cell.trials = config.trials;
      for (int t = 0; t < config.trials; ++t) {
        const int slot = (ki * nq + qi) * config.trials + t;
        if (result.records[static_cast<std::size_t>(slot)].success) ++cell.successes;
      }
      cell.rate = static_cast<double>(cell.successes) / cell.trials;
      result.cells.push_back(cell);
    }
  }

  // Soft sanity signal only: success should not grow with k at fixed q.
  for (int qi = 0; qi < nq; ++qi) {
    for (int ki = 0; ki + 1 < nk; ++ki) {
      const PhaseCell& lo = result.cells[static_cast<std::size_t>(ki * nq + qi)];
      const PhaseCell& hi = result.cells[static_cast<std::size_t>((ki + 1) * nq + qi)];
      if (lo.k < hi.k && hi.rate > lo.rate) {
        std::ostringstream warn;
        warn << "success rate at q=" << format_double(lo.q) << " rises from "
             << format_double(lo.rate) << " (k=" << lo.k << ") to " << format_double(hi.rate)
             << " (k=" << hi.k << "); more trials may be needed";
        result.warnings.push_back(warn.str());
      }
    }
  }
  return result;
}

AuditReport run_bound_audit(const ExperimentConfig& config, int max_order,
                            const std::string& dump_dir, const SolverOptions& solver_opts,
                            int threads) {
  validate(config);
  validate(solver_opts);
  for (int k : config.k_grid)
    if (max_order <= k) throw domain_error("audit: max_order must exceed every k in the grid");
  if (max_order > config.p) throw domain_error("audit: max_order exceeds p");
  if (binomial_or_cap(config.p, max_order, kDefaultEnumerationBudget) >
      kDefaultEnumerationBudget)
    throw budget_error("audit: exact certification at this order exceeds the enumeration budget");

  const int nk = static_cast<int>(config.k_grid.size());
  const int nq = static_cast<int>(config.q_grid.size());
  const int total = nk * nq * config.trials;
  const double eps = config.noise.enabled ? config.noise.eps : 0.0;
  const double eta = config.noise.enabled ? config.noise.eta : 0.0;

  AuditReport report;
  report.trials_total = total;
  report.records.resize(static_cast<std::size_t>(total));
  std::vector<std::string> dumps(static_cast<std::size_t>(total));

  parallel_trials(total, threads, [&](int slot) {
    const int ki = slot / (nq * config.trials);
    const int qi = (slot / config.trials) % nq;
    const int t = slot % config.trials;
    const int k = config.k_grid[static_cast<std::size_t>(ki)];
    const double q = config.q_grid[static_cast<std::size_t>(qi)];
    const std::uint64_t seed = trial_seed(config.master_seed, ki, qi, t);

    const Matrix raw = gen_gaussian(config.n, config.p, mix64(seed, 1), config.matrix_ensemble);

    // Exact spectra once per order; the centering scale at max_order then
    // turns them into RIC values of the rescaled matrix arithmetically.
    std::vector<SpectrumRange> ranges;
    for (int m = k + 1; m <= max_order; ++m)
      ranges.push_back(spectrum_range(raw, m, kDefaultEnumerationBudget, 1));
    const SpectrumRange& top = ranges.back();
    const double c2 = 2.0 / (top.lambda_max + top.lambda_min);
    const Matrix a = std::sqrt(c2) * raw;

    std::map<int, RicEstimate> oracle;
    for (int m = k + 1; m <= max_order; ++m) {
      const SpectrumRange& r = ranges[static_cast<std::size_t>(m - k - 1)];
      RicEstimate est;
      est.order = m;
      est.value = std::max(c2 * r.lambda_max - 1.0, 1.0 - c2 * r.lambda_min);
      est.mode = RicMode::Exact;
      est.supports_examined = r.supports_examined;
      oracle[m] = est;
    }
    const GuaranteeCertificate cert = certify(oracle, k, q, max_order);

    const Vector x = gen_sparse(config.p, k, mix64(seed, 2), SparseDist::Gaussian);
    Vector y = a * x;
    if (config.noise.enabled) y += noise_vector(config.n, eps, mix64(seed, 3));

    SolverOptions opts = solver_opts;
    opts.seed = mix64(seed, 4);

    TrialRecord rec;
    rec.k = k;
    rec.q = q;
    rec.trial_index = t;
    rec.seed_used = seed;
    SolverResult sol;
    bool solver_ok = true;
    try {
      sol = config.noise.enabled ? irls_lq_denoise(a, y, q, eta, opts) : irls_lq(a, y, q, opts);
      rec.solver_converged = sol.converged;
      rec.rel_error = (sol.x_hat - x).norm() / x.norm();
      rec.success = sol.converged && rec.rel_error <= config.success_rtol;
    } catch (const std::exception&) {
      solver_ok = false;
      rec.rel_error = 1.0;
    }

    if (cert.satisfied) {
      const double sigma = spectral_norm(a);
      const ErrorBoundReport eb =
          error_bound_l2(*cert.delta_m, *cert.s_star, q, eps, std::max(eta, eps), sigma, 0.0);
      rec.bound_value = eb.bound;
      if (solver_ok && sol.converged) {
        const double err2 = (sol.x_hat - x).norm();
        const bool ok = err2 <= eb.bound + config.success_rtol * x.norm();
        rec.bound_satisfied = ok;
        if (!ok && !dump_dir.empty()) {
          namespace fs = std::filesystem;
          fs::create_directories(dump_dir);
          std::ostringstream stem;
          stem << dump_dir << "/violation_k" << k << "_q" << format_double(q) << "_t" << t;
          write_matrix_csv(stem.str() + "_A.csv", a);
          write_vector(stem.str() + "_x.txt", x);
          write_vector(stem.str() + "_y.txt", y);
          dumps[static_cast<std::size_t>(slot)] = stem.str();
        }
      }
    }
    report.records[static_cast<std::size_t>(slot)] = std::move(rec);
  });

  for (int slot = 0; slot < total; ++slot) {
    const TrialRecord& rec = report.records[static_cast<std::size_t>(slot)];
    if (!rec.bound_value.has_value()) {
      ++report.uncertified;
      continue;
    }
    ++report.certified;
    if (!rec.solver_converged)
      ++report.solver_failed;
    else if (*rec.bound_satisfied)
      ++report.bound_held;
    else
      ++report.bound_violated;
    if (!dumps[static_cast<std::size_t>(slot)].empty())
      report.violation_dumps.push_back(dumps[static_cast<std::size_t>(slot)]);
  }
  return report;
}

std::string trials_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "k,q,trial,seed,success,rel_error,converged,bound,bound_ok\n";
  for (const TrialRecord& r : records) {
    out << r.k << ',' << format_double(r.q) << ',' << r.trial_index << ',' << r.seed_used << ','
        << csv_bool(r.success) << ',' << format_double(r.rel_error) << ','
        << csv_bool(r.solver_converged) << ',';
    if (r.bound_value) out << format_double(*r.bound_value);
    out << ',';
    if (r.bound_satisfied) out << csv_bool(*r.bound_satisfied);
    out << '\n';
  }
  return out.str();
}

std::string phase_summary_to_csv(const PhaseResult& result) {
  std::ostringstream out;
  out << "k,q,trials,successes,rate\n";
  for (const PhaseCell& c : result.cells)
    out << c.k << ',' << format_double(c.q) << ',' << c.trials << ',' << c.successes << ','
        << format_double(c.rate) << '\n';
  return out.str();
}

namespace {

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["n"] = config.n;
  j["p"] = config.p;
  j["k_grid"] = config.k_grid;
  j["q_grid"] = config.q_grid;
  j["trials"] = config.trials;
  j["master_seed"] = config.master_seed;
  if (config.noise.enabled)
    j["noise"] = {{"type", "l2ball"}, {"eta", config.noise.eta}, {"eps", config.noise.eps}};
  else
    j["noise"] = {{"type", "none"}};
  j["success_rtol"] = config.success_rtol;
  j["matrix_ensemble"] = ensemble_name(config.matrix_ensemble);
  return j;
}

}  // namespace

std::string phase_summary_to_json(const ExperimentConfig& config, const PhaseResult& result) {
  ordered_json j;
  j["config"] = config_to_json(config);
  j["cells"] = ordered_json::array();
  for (const PhaseCell& c : result.cells)
    j["cells"].push_back({{"k", c.k},
                          {"q", c.q},
                          {"trials", c.trials},
                          {"successes", c.successes},
                          {"rate", c.rate}});
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string audit_report_to_json(const ExperimentConfig& config, int max_order,
                                 const AuditReport& report) {
  ordered_json j;
  j["config"] = config_to_json(config);
  j["max_order"] = max_order;
  j["trials_total"] = report.trials_total;
  j["certified"] = report.certified;
  j["uncertified"] = report.uncertified;
  j["bound_held"] = report.bound_held;
  j["bound_violated"] = report.bound_violated;
  j["solver_failed"] = report.solver_failed;
  j["violation_dumps"] = report.violation_dumps;
  return j.dump(2) + "\n";
}

}  // namespace lqcs
