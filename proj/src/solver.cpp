#include "lqcs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lqcs/errors.hpp"
#include "lqcs/ric.hpp"
#include "lqcs/rng.hpp"

namespace lqcs {
namespace {

// Minimum-l2-norm solutions of A x = rhs through one rank-revealing QR of A^T.
class MinNormSolver {
 public:
  explicit MinNormSolver(const Matrix& a) : rows_(a.rows()), qr_(a.transpose()) {
    qr_.setThreshold(1e-12);
    if (qr_.rank() < rows_)
      throw numeric_error("irls_lq: A is rank-deficient (full row rank required)");
  }

  // With A^T P = Q R this is x = Q R^{-T} P^T rhs, the row-space solution.
  Vector solve(const Vector& rhs) const {
    Vector permuted = qr_.colsPermutation().transpose() * rhs;
    const auto r_block = qr_.matrixQR().topRows(rows_);
    Vector w = r_block.template triangularView<Eigen::Upper>().transpose().solve(permuted);
    Vector x = Vector::Zero(qr_.rows());
    x.head(rows_) = w;
    return qr_.householderQ() * x;
  }

 private:
  Eigen::Index rows_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
};

// One reweighted least-norm step: x = S u with u the minimum-norm solution of
// (A S) u = y and S = diag((x_i^2 + eps^2)^((2-q)/4)) = W^(1/2). Solved by an
// unpivoted QR of (A S)^T; A S inherits full row rank from A because S > 0.
Vector weighted_min_norm_step(const Matrix& a, const Vector& y, const Vector& x, double q,
                              double eps) {
  const Vector scale = (x.array().square() + eps * eps).pow((2.0 - q) / 4.0).matrix();
  const Matrix mt = scale.asDiagonal() * a.transpose();
  Eigen::HouseholderQR<Matrix> qr(mt);
  const Eigen::Index n = a.rows();
  Vector w = qr.matrixQR()
                 .topRows(n)
                 .template triangularView<Eigen::Upper>()
                 .transpose()
                 .solve(y);
  Vector u = Vector::Zero(mt.rows());
  u.head(n) = w;
  u = qr.householderQ() * u;
  return scale.asDiagonal() * u;
}

// Start point: minimum-l2 solution plus a tiny seeded perturbation projected
// into the null space, so feasibility is kept while coordinate-exchange
// symmetries (duplicate columns, symmetric instances) resolve the same way on
// every run.
Vector perturbed_start(const Matrix& a, const Vector& y, const MinNormSolver& min_norm,
                       std::uint64_t seed) {
  Vector x = min_norm.solve(y);
  if (a.cols() <= a.rows()) return x;
  SplitMix64 rng(seed);
  Vector noise(a.cols());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = 2.0 * rng.next_double() - 1.0;
  noise *= 1e-7 * std::max(1.0, x.norm());
  noise -= min_norm.solve(a * noise);
  return x + noise;
}

void validate_problem(const Matrix& a, const Vector& y, double q) {
  require_finite(a, "solver: A");
  require_finite(y, "solver: y");
  if (y.size() != a.rows()) throw domain_error("solver: y length must equal the row count of A");
  if (!(q > 0.0) || q > 1.0) throw domain_error("solver: q must lie in (0, 1]");
}

SolverResult finalize(const Matrix& a, const Vector& y, double q, Vector x, int iterations,
                      double eps_final, bool converged) {
  SolverResult res;
  res.x_hat = std::move(x);
  res.objective = lq_power(res.x_hat, q);
  const Vector r = a * res.x_hat - y;
  res.residual2 = r.norm();
  res.atr_inf = (a.transpose() * r).template lpNorm<Eigen::Infinity>();
  res.iterations = iterations;
  res.eps_final = eps_final;
  res.converged = converged;
  return res;
}

// Penalized reweighted solve for the denoising path:
// min lambda ||x||_q^q + 0.5 ||A x - y||^2 via (lambda q W + A^T A) x = A^T y,
// W = diag((x_i^2 + eps^2)^(q/2 - 1)), inverted through the Woodbury identity
// so only n x n systems are factorized.
struct PenalizedRun {
  Vector x;
  int iterations = 0;
  double eps_final = 0.0;
  bool converged = false;
  std::vector<double> trace;
};

PenalizedRun penalized_irls(const Matrix& a, const Vector& y, double q, double lambda,
                            const Vector& start, const SolverOptions& opts) {
  PenalizedRun run;
  run.x = start;
  double eps = opts.eps0;
  double last_step = std::numeric_limits<double>::infinity();
  const Matrix identity = Matrix::Identity(a.rows(), a.rows());

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      const Vector inv_w =
          (run.x.array().square() + eps * eps).pow(1.0 - q / 2.0).matrix() / (lambda * q);
      const Matrix core = identity + a * inv_w.asDiagonal() * a.transpose();
      const Vector z = Eigen::LDLT<Matrix>(core).solve(y);
      Vector x_new = inv_w.asDiagonal() * (a.transpose() * z);
      ++run.iterations;
      last_step = (x_new - run.x).norm();
      run.x = std::move(x_new);
      if (last_step <= opts.step_tol) break;
    }
    run.trace.push_back(lq_power(run.x, q));
    if (eps <= opts.eps_floor && last_step <= opts.step_tol) {
      run.converged = true;
      break;
    }
    eps = std::max(eps * opts.eps_decay, opts.eps_floor);
  }
  run.eps_final = eps;
  return run;
}

}  // namespace

void validate(const SolverOptions& opts) {
  if (opts.max_outer < 1 || opts.max_inner < 1)
    throw domain_error("SolverOptions: iteration budgets must be >= 1");
  if (!(opts.eps0 > 0.0) || !(opts.eps_floor > 0.0) || opts.eps_floor > opts.eps0)
    throw domain_error("SolverOptions: need 0 < eps_floor <= eps0");
  if (!(opts.eps_decay > 0.0) || !(opts.eps_decay < 1.0))
    throw domain_error("SolverOptions: eps_decay must lie in (0, 1)");
  if (!(opts.step_tol > 0.0)) throw domain_error("SolverOptions: step_tol must be positive");
}

SolverResult irls_lq(const Matrix& a, const Vector& y, double q, const SolverOptions& opts) {
  validate_problem(a, y, q);
  validate(opts);

  const MinNormSolver min_norm(a);
  Vector x = perturbed_start(a, y, min_norm, opts.seed);

  double eps = opts.eps0;
  double last_step = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      Vector x_new = weighted_min_norm_step(a, y, x, q, eps);
      ++iterations;
      last_step = (x_new - x).norm();
      x = std::move(x_new);
      if (last_step <= opts.step_tol) break;
    }
    trace.push_back(lq_power(x, q));
    if (eps <= opts.eps_floor && last_step <= opts.step_tol) {
      converged = true;
      break;
    }
    eps = std::max(eps * opts.eps_decay, opts.eps_floor);
  }

  // One exact projection onto {A x = y} scrubs accumulated solve error.
  x += min_norm.solve(y - a * x);
  SolverResult res = finalize(a, y, q, std::move(x), iterations, eps, converged);
  res.level_objectives = std::move(trace);
  return res;
}

SolverResult irls_lq_denoise(const Matrix& a, const Vector& y, double q, double eta,
                             const SolverOptions& opts) {
  validate_problem(a, y, q);
  validate(opts);
  if (!(eta > 0.0)) throw domain_error("irls_lq_denoise: eta must be positive");

  if (eta >= y.norm()) {
    SolverResult res = finalize(a, y, q, Vector::Zero(a.cols()), 0, opts.eps0, true);
    res.degenerate = true;
    return res;
  }

  const MinNormSolver min_norm(a);
  const Vector start = perturbed_start(a, y, min_norm, opts.seed);

  const double target_lo = 0.99 * eta;
  auto residual_of = [&](const PenalizedRun& run) { return (a * run.x - y).norm(); };

  // Bracket the target residual band on lambda; the residual grows from ~0
  // (tiny lambda, A has full row rank) toward ||y||_2 (heavy shrinkage).
  double lambda_hi = std::max((a.transpose() * y).template lpNorm<Eigen::Infinity>(), 1e-12);
  PenalizedRun run_hi = penalized_irls(a, y, q, lambda_hi, start, opts);
  int total_iterations = run_hi.iterations;
  int expansions = 0;
  while (residual_of(run_hi) < target_lo && expansions < 60) {
    lambda_hi *= 2.0;
    run_hi = penalized_irls(a, y, q, lambda_hi, start, opts);
    total_iterations += run_hi.iterations;
    ++expansions;
  }
  if (residual_of(run_hi) <= eta) {
    // Residual stays below eta even at the top of the bracket; accept.
    SolverResult res = finalize(a, y, q, run_hi.x, total_iterations, run_hi.eps_final,
                                run_hi.converged);
    res.level_objectives = run_hi.trace;
    return res;
  }

  double lambda_lo = lambda_hi * 1e-14;
  PenalizedRun run_lo = penalized_irls(a, y, q, lambda_lo, start, opts);
  total_iterations += run_lo.iterations;
  while (residual_of(run_lo) > eta && expansions < 120) {
    lambda_lo *= 1e-2;
    run_lo = penalized_irls(a, y, q, lambda_lo, start, opts);
    total_iterations += run_lo.iterations;
    ++expansions;
  }
  if (residual_of(run_lo) > eta)
    throw numeric_error("irls_lq_denoise: could not bracket the residual target");

  PenalizedRun best = run_lo;  // feasible side
  for (int step = 0; step < 60; ++step) {
    const double r_best = residual_of(best);
    if (r_best >= target_lo && r_best <= eta) break;
    const double lambda_mid = std::sqrt(lambda_lo * lambda_hi);
    PenalizedRun run_mid = penalized_irls(a, y, q, lambda_mid, start, opts);
    total_iterations += run_mid.iterations;
    const double r_mid = residual_of(run_mid);
    if (r_mid > eta) {
      lambda_hi = lambda_mid;
    } else {
      lambda_lo = lambda_mid;
      best = std::move(run_mid);
      if (r_mid >= target_lo) break;
    }
  }

  SolverResult res = finalize(a, y, q, best.x, total_iterations, best.eps_final, best.converged);
  res.level_objectives = best.trace;
  return res;
}

std::optional<L0OracleResult> l0_oracle(const Matrix& a, const Vector& y, int kmax,
                                        double res_tol, std::uint64_t budget) {
  require_finite(a, "l0_oracle: A");
  require_finite(y, "l0_oracle: y");
  if (y.size() != a.rows()) throw domain_error("l0_oracle: y length must equal rows of A");
  if (kmax < 1 || kmax > a.cols()) throw domain_error("l0_oracle: kmax must lie in [1, p]");
  if (!(res_tol > 0.0)) throw domain_error("l0_oracle: res_tol must be positive");
  const int p = static_cast<int>(a.cols());
  if (binomial_or_cap(p, kmax, budget) > budget)
    throw budget_error("l0_oracle: C(p, kmax) exceeds the enumeration budget");

  if (y.norm() <= res_tol) return L0OracleResult{Vector::Zero(p), 0};

  for (int k = 1; k <= kmax; ++k) {
    std::vector<int> support(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
    while (true) {
      Matrix cols(a.rows(), k);
      for (int i = 0; i < k; ++i) cols.col(i) = a.col(support[static_cast<std::size_t>(i)]);
      const Vector coef = cols.colPivHouseholderQr().solve(y);
      if ((cols * coef - y).norm() <= res_tol) {
        Vector x = Vector::Zero(p);
        for (int i = 0; i < k; ++i) x[support[static_cast<std::size_t>(i)]] = coef[i];
        return L0OracleResult{std::move(x), k};
      }
      // advance lexicographically
      int i = k - 1;
      while (i >= 0 && support[static_cast<std::size_t>(i)] == p - k + i) --i;
      if (i < 0) break;
      ++support[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

std::uint64_t l0_fit_count(const Matrix& a, const Vector& y, int k, double res_tol,
                           std::uint64_t budget) {
  require_finite(a, "l0_fit_count: A");
  require_finite(y, "l0_fit_count: y");
  if (k < 1 || k > a.cols()) throw domain_error("l0_fit_count: k must lie in [1, p]");
  if (!(res_tol > 0.0)) throw domain_error("l0_fit_count: res_tol must be positive");
  const int p = static_cast<int>(a.cols());
  if (binomial_or_cap(p, k, budget) > budget)
    throw budget_error("l0_fit_count: C(p, k) exceeds the enumeration budget");

  std::uint64_t count = 0;
  std::vector<int> support(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
  while (true) {
    Matrix cols(a.rows(), k);
    for (int i = 0; i < k; ++i) cols.col(i) = a.col(support[static_cast<std::size_t>(i)]);
    const Vector coef = cols.colPivHouseholderQr().solve(y);
    if ((cols * coef - y).norm() <= res_tol) ++count;
    int i = k - 1;
    while (i >= 0 && support[static_cast<std::size_t>(i)] == p - k + i) --i;
    if (i < 0) break;
    ++support[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
  }
  return count;
}

NullSpaceProbeReport null_space_probe(const Matrix& a, const Vector& x, double q,
                                      std::uint64_t trials, double radius, std::uint64_t seed) {
  require_finite(a, "null_space_probe: A");
  require_finite(x, "null_space_probe: x");
  if (x.size() != a.cols()) throw domain_error("null_space_probe: x length must equal cols of A");
  if (!(q > 0.0) || q > 1.0) throw domain_error("null_space_probe: q must lie in (0, 1]");
  if (trials < 1) throw domain_error("null_space_probe: trials must be >= 1");
  if (!(radius > 0.0)) throw domain_error("null_space_probe: radius must be positive");

  NullSpaceProbeReport report;
  report.trials = trials;
  report.min_gap = std::numeric_limits<double>::infinity();

  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-12);
  report.kernel_dim = static_cast<int>(lu.dimensionOfKernel());
  if (report.kernel_dim == 0) {
    report.trivial_kernel = true;
    report.min_gap = 0.0;
    return report;
  }
  const Matrix raw_kernel = lu.kernel();
  Eigen::HouseholderQR<Matrix> qr(raw_kernel);
  const Matrix basis =
      Matrix(qr.householderQ()).leftCols(report.kernel_dim);

  const double reference = lq_power(x, q);
  SplitMix64 rng(seed);
  Vector coeffs(report.kernel_dim);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < report.kernel_dim; ++i) coeffs[i] = rng.next_gaussian();
    const double scale = rng.next_open_double() * radius;
    Vector h = basis * coeffs;
    const double norm = h.norm();
    double gap;
    if (norm == 0.0) {
      gap = 0.0;
    } else {
      h *= scale / norm;
      gap = lq_power(x + h, q) - reference;
    }
    report.min_gap = std::min(report.min_gap, gap);
    if (gap < -1e-12)
      ++report.violations;
    else if (gap <= 1e-12)
      ++report.ties;
  }
  return report;
}

}  // namespace lqcs
