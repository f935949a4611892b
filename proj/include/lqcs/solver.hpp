#ifndef LQCS_SOLVER_HPP
#define LQCS_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "lqcs/core.hpp"

namespace lqcs {

struct SolverOptions {
  int max_outer = 40;        // epsilon continuation levels
  int max_inner = 100;       // reweighted steps per level
  double eps0 = 1.0;         // initial smoothing parameter
  double eps_decay = 0.5;    // multiplicative decay applied when a level stalls
  double eps_floor = 1e-9;
  double step_tol = 1e-10;   // l2 movement below which a level counts as stalled
  std::uint64_t seed = 0;    // drives the symmetry-breaking perturbation of the start point
};

void validate(const SolverOptions& opts);

struct SolverResult {
  Vector x_hat;
  double objective = 0.0;   // ||x_hat||_q^q
  double residual2 = 0.0;   // ||A x_hat - y||_2
  int iterations = 0;       // total reweighted steps across all levels
  double eps_final = 0.0;
  bool converged = false;
  bool degenerate = false;  // denoising shortcut: eta >= ||y||_2, x_hat = 0
  double atr_inf = 0.0;     // ||A^T (A x_hat - y)||_inf, for Dantzig-style audits
  // ||x||_q^q at the end of each epsilon level of the accepted run; the
  // continuation path is expected to be non-increasing up to slack.
  std::vector<double> level_objectives;
};

// Equality-constrained lq minimization (0 < q <= 1) by iteratively reweighted
// least-norm steps x <- W A^T (A W A^T)^{-1} y, W = diag((x_i^2 + eps^2)^(1 - q/2)),
// with eps decayed whenever a level stalls. The start point is the minimum-l2
// solution plus a tiny seeded null-space perturbation so that symmetric
// instances break ties deterministically. A needs full row rank.
SolverResult irls_lq(const Matrix& a, const Vector& y, double q,
                     const SolverOptions& opts = {});

// lq minimization under ||A x - y||_2 <= eta: solves the penalized problem
// lambda ||x||_q^q + 0.5 ||A x - y||_2^2 with the same reweighting scheme and
// bisects on lambda until the residual lands in [0.99 eta, eta]. Returns the
// zero vector (flagged degenerate) when eta already admits it.
SolverResult irls_lq_denoise(const Matrix& a, const Vector& y, double q, double eta,
                             const SolverOptions& opts = {});

struct L0OracleResult {
  Vector x;
  int k = 0;
};

// Exhaustive minimum-support solver: smallest k <= kmax admitting a support S,
// |S| = k, with least-squares residual ||A_S x_S - y||_2 <= res_tol. Supports
// are scanned in lexicographic order, so ties resolve to the smallest support.
// Returns nullopt when no support within kmax fits.
std::optional<L0OracleResult> l0_oracle(const Matrix& a, const Vector& y, int kmax,
                                        double res_tol,
                                        std::uint64_t budget = 10'000'000);

// Number of size-k supports whose least-squares fit reaches res_tol; a result
// of 1 certifies uniqueness of the sparsest solution at level k.
std::uint64_t l0_fit_count(const Matrix& a, const Vector& y, int k, double res_tol,
                           std::uint64_t budget = 10'000'000);

struct NullSpaceProbeReport {
  std::uint64_t violations = 0;  // lq_power(x + h) < lq_power(x) - 1e-12
  std::uint64_t ties = 0;        // |difference| <= 1e-12
  std::uint64_t trials = 0;
  int kernel_dim = 0;
  bool trivial_kernel = false;
  double min_gap = 0.0;          // smallest observed lq_power(x+h) - lq_power(x)
};

// Samples `trials` random null-space perturbations h of A with norm in
// (0, radius] and counts strict objective decreases of ||.||_q^q at x + h.
// Any violation falsifies optimality of x for the equality-constrained
// program. Deterministic per seed.
NullSpaceProbeReport null_space_probe(const Matrix& a, const Vector& x, double q,
                                      std::uint64_t trials, double radius, std::uint64_t seed);

}  // namespace lqcs

#endif  // LQCS_SOLVER_HPP
