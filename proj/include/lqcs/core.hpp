#ifndef LQCS_CORE_HPP
#define LQCS_CORE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lqcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Throws domain_error if any entry is NaN/Inf.
void require_finite(const Vector& v, const std::string& name);
void require_finite(const Matrix& a, const std::string& name);

// Split of a vector into its k largest-magnitude entries (head) and the
// remainder (tail); head + tail reconstructs the input exactly and their
// supports are disjoint. Magnitude ties resolve toward the lower index.
struct KTermSplit {
  Vector head;
  Vector tail;
  Eigen::Index k = 0;
};

// (sum |v_i|^q)^(1/q) for q > 0. Not a norm for q < 1.
double lq_quasinorm(const Vector& v, double q);

// sum |v_i|^q for 0 < q <= 1; the objective of the sparse recovery programs.
double lq_power(const Vector& v, double q);

// Number of entries with |v_i| > tol.
int l0_count(const Vector& v, double tol);

// Default thresholding at 1e-9 * ||v||_inf.
int l0_count(const Vector& v);

KTermSplit best_k_split(const Vector& v, Eigen::Index k);

// Largest singular value, computed by a full SVD. Intended for desk-scale
// matrices (p up to a few hundred).
double spectral_norm(const Matrix& a);

// count^(1/q - 1/2): the constant relating the lq quasi-norm of a vector with
// `count` (potential) nonzeros to its l2 norm, via Holder's inequality.
double holder_factor(int count, double q);

// Residual LHS - RHS of the weighted polarization identity
//   sum_i l_i ||B(sum_j l_j b_j - c b_i)||^2
//     + (1-2c) sum_{i<j} l_i l_j ||B(b_i - b_j)||^2
//     = sum_i l_i (1-c)^2 ||B b_i||^2,
// which holds exactly for any B, betas, c and non-negative weights summing
// to one. Exposed as a numeric self-check utility; the magnitude of the
// residual measures floating-point error only.
double polarization_residual(const Matrix& b, const std::vector<Vector>& betas,
                             const std::vector<double>& lambdas, double c);

}  // namespace lqcs

#endif  // LQCS_CORE_HPP
