#ifndef LQCS_POLYTOPE_HPP
#define LQCS_POLYTOPE_HPP

#include <utility>
#include <vector>

#include "lqcs/core.hpp"

namespace lqcs {

// Convex decomposition certificate: base = sum lambda_i * u_i with each u_i a
// t-sparse vector supported inside supp(base), matching its l1 mass, capped at
// alpha in sup norm, and sign-aligned with base entrywise.
struct PolytopeDecomposition {
  double alpha = 0.0;
  int t = 0;
  Vector base;
  std::vector<std::pair<double, Vector>> terms;
};

// Membership in T(alpha, t) = { v : ||v||_inf <= alpha, ||v||_1 <= t*alpha },
// with 1e-12 relative slack on both constraints.
bool in_polytope(const Vector& v, double alpha, int t);

// Membership in U(alpha, t, v): supp(u) subset of supp(v) (exact zeros),
// ||u||_0 <= t, ||u||_1 == ||v||_1 within 1e-10, ||u||_inf <= alpha + 1e-12.
bool in_u_set(const Vector& u, double alpha, int t, const Vector& v);

// Builds a decomposition certificate for any v in T(alpha, t) with at most 14
// nonzeros. Construction: on the magnitudes of v, every extreme point of the
// feasible set has floor- or snap-determined count a = ||v||_1 / alpha entries
// at exactly alpha plus at most one fractional entry; all such vertices inside
// supp(v) are enumerated and a basic feasible convex combination is found by a
// phase-1 simplex, so the certificate has at most ||v||_0 + 1 <= 2*||v||_0
// terms. Signs of v are re-applied to every term.
//
// Throws domain_error when v is outside the polytope, budget_error when
// ||v||_0 > 14.
PolytopeDecomposition decompose(const Vector& v, double alpha, int t);

struct DecompositionCheck {
  double reconstruction_error = 0.0;  // max entrywise |sum lambda u - base|
  double weight_sum_error = 0.0;      // |sum lambda - 1|
  bool weights_in_range = false;      // every lambda in [0, 1] up to 1e-12
  bool all_members = false;           // every term passes in_u_set
  bool term_budget_ok = false;        // N <= 2 * ||base||_0 (N == 1 when base == 0)
  bool ok = false;
};

DecompositionCheck verify_decomposition(const PolytopeDecomposition& dec);

}  // namespace lqcs

#endif  // LQCS_POLYTOPE_HPP
