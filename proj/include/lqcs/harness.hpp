#ifndef LQCS_HARNESS_HPP
#define LQCS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqcs/core.hpp"
#include "lqcs/solver.hpp"

namespace lqcs {

enum class MatrixEnsemble { GaussianIID, GaussianColumnNormalized, RowOrthonormal };
enum class SparseDist { Rademacher, Gaussian };

// Measurement noise configuration. Disabled means exact measurements and the
// equality-constrained solver; enabled means y = A x + z with ||z||_2 = eps
// exactly and the denoising solver run at radius eta.
struct NoiseModel {
  bool enabled = false;
  double eta = 0.0;
  double eps = 0.0;
};

struct ExperimentConfig {
  int n = 0;
  int p = 0;
  std::vector<int> k_grid;
  std::vector<double> q_grid;
  int trials = 0;
  std::uint64_t master_seed = 0;
  NoiseModel noise;
  double success_rtol = 1e-4;
  MatrixEnsemble matrix_ensemble = MatrixEnsemble::GaussianIID;
};

void validate(const ExperimentConfig& config);

struct TrialRecord {
  int k = 0;
  double q = 0.0;
  int trial_index = 0;
  std::uint64_t seed_used = 0;
  bool success = false;
  double rel_error = 0.0;
  bool solver_converged = false;
  std::optional<double> bound_value;
  std::optional<bool> bound_satisfied;
};

// Deterministic per-trial seed: chained 64-bit mixing of the master seed with
// the grid indices and trial number (not the k/q values themselves, so grid
// reorderings reseed rather than alias).
std::uint64_t trial_seed(std::uint64_t master_seed, int k_index, int q_index, int trial_index);

// Random measurement ensembles, deterministic per seed. GaussianIID draws
// i.i.d. N(0, 1/n) entries row-major; GaussianColumnNormalized rescales each
// column of such a draw to unit l2 norm; RowOrthonormal orthonormalizes the
// rows of an N(0, 1) draw (requires n <= p).
Matrix gen_gaussian(int n, int p, std::uint64_t seed, MatrixEnsemble ensemble);

// Exactly k nonzeros on a uniform random support. Rademacher entries are +-1;
// Gaussian entries are standard normal redrawn until |value| >= 1e-3.
Vector gen_sparse(int p, int k, std::uint64_t seed, SparseDist dist);

struct PhaseCell {
  int k = 0;
  double q = 0.0;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
};

struct PhaseResult {
  std::vector<TrialRecord> records;  // sorted by (k index, q index, trial)
  std::vector<PhaseCell> cells;
  std::vector<std::string> warnings;  // soft monotonicity advisories
};

// Full success-rate grid over k_grid x q_grid. Trials are independent and may
// run on `threads` workers; records land in preassigned slots, so the output
// is identical for any worker count.
PhaseResult run_phase(const ExperimentConfig& config, const SolverOptions& solver_opts = {},
                      int threads = 1);

struct AuditReport {
  int trials_total = 0;
  int certified = 0;
  int uncertified = 0;
  int bound_held = 0;
  int bound_violated = 0;
  int solver_failed = 0;  // certified but the solver did not converge
  std::vector<TrialRecord> records;
  std::vector<std::string> violation_dumps;  // instance files for failed bounds
};

// Per-trial certification + stability-bound audit. Each trial generates an
// instance, rescales the matrix by the order-max_order RIP centering scale,
// certifies with exact RIC values, and when certified checks the achieved
// error ||x_hat - x||_2 against the l2-ball stability bound (plus a
// success_rtol * ||x||_2 slack, which is what "exact recovery" means in
// floating point when the bound is exactly zero). Violating instances are
// dumped to dump_dir when provided.
AuditReport run_bound_audit(const ExperimentConfig& config, int max_order,
                            const std::string& dump_dir = "",
                            const SolverOptions& solver_opts = {}, int threads = 1);

// Trial CSV schema, fixed: k,q,trial,seed,success,rel_error,converged,bound,bound_ok
std::string trials_to_csv(const std::vector<TrialRecord>& records);

std::string phase_summary_to_csv(const PhaseResult& result);
std::string phase_summary_to_json(const ExperimentConfig& config, const PhaseResult& result);
std::string audit_report_to_json(const ExperimentConfig& config, int max_order,
                                 const AuditReport& report);

}  // namespace lqcs

#endif  // LQCS_HARNESS_HPP
