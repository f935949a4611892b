#include "lqcs/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>

#include "lqcs/errors.hpp"

namespace lqcs {
namespace {

constexpr int kMaxSupport = 14;

// A vertex of the sign-fixed slice of U: entries of `alpha_mask` sit at alpha,
// `frac_index` (when >= 0) carries the fractional remainder.
struct Candidate {
  std::uint32_t alpha_mask = 0;
  int frac_index = -1;
};

struct LpProblem {
  int dim = 0;                     // number of magnitude coordinates d
  double alpha = 0.0;
  double frac = 0.0;               // shared fractional value, 0 when none
  std::vector<Candidate> columns;
  Vector rhs;                      // [w; 1]

  // Column j of the constraint matrix [U; 1^T], materialized on demand.
  Vector column(int j) const {
    Vector col = Vector::Zero(dim + 1);
    const Candidate& c = columns[static_cast<std::size_t>(j)];
    for (int i = 0; i < dim; ++i)
      if (c.alpha_mask & (1u << i)) col[i] = alpha;
    if (c.frac_index >= 0) col[c.frac_index] = frac;
    col[dim] = 1.0;
    return col;
  }

  double dot_column(const Vector& y, int j) const {
    const Candidate& c = columns[static_cast<std::size_t>(j)];
    double acc = y[dim];
    for (int i = 0; i < dim; ++i)
      if (c.alpha_mask & (1u << i)) acc += alpha * y[i];
    if (c.frac_index >= 0) acc += frac * y[c.frac_index];
    return acc;
  }
};

void enumerate_size_subsets(int d, int a, const std::function<void(std::uint32_t)>& emit) {
  if (a == 0) {
    emit(0);
    return;
  }
  std::vector<int> pick(static_cast<std::size_t>(a));
  for (int i = 0; i < a; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (int i : pick) mask |= (1u << i);
    emit(mask);
    int i = a - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == d - a + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < a; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Phase-1 simplex over the candidate columns: find lambda >= 0 with
// [U; 1^T] lambda = [w; 1]. Artificial columns carry unit cost; entering by
// most-negative reduced cost, falling back to Bland's rule after a run of
// degenerate pivots so cycling cannot occur. The basis system is refactorized
// every iteration (it is at most 15 x 15). Returns the basis column indices;
// artificial columns are encoded as n_cols + row.
std::vector<int> phase1_simplex(const LpProblem& lp) {
  const int m = lp.dim + 1;
  const int n = static_cast<int>(lp.columns.size());
  const double rhs_scale = std::max(1.0, lp.rhs.cwiseAbs().maxCoeff());

  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  auto basis_matrix = [&]() {
    Matrix b(m, m);
    for (int i = 0; i < m; ++i) {
      const int col = basis[static_cast<std::size_t>(i)];
      if (col >= n)
        b.col(i) = Vector::Unit(m, col - n);
      else
        b.col(i) = lp.column(col);
    }
    return b;
  };

  const long max_iters = 400L * (n + m);
  int degenerate_run = 0;
  for (long iter = 0; iter < max_iters; ++iter) {
    const Matrix bmat = basis_matrix();
    Eigen::PartialPivLU<Matrix> lu(bmat);
    const Vector x_basic = lu.solve(lp.rhs);

    Vector cost_basic = Vector::Zero(m);
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<std::size_t>(i)] >= n) cost_basic[i] = 1.0;
    const Vector y = lu.transpose().solve(cost_basic);

    // Entering column: candidates have zero cost, so reduced cost is -y.a_j.
    const bool bland = degenerate_run > 100;
    int entering = -1;
    double best_reduced = -1e-9;
    for (int j = 0; j < n; ++j) {
      const double reduced = -lp.dot_column(y, j);
      if (reduced < best_reduced) {
        entering = j;
        if (bland) break;
        best_reduced = reduced;
      }
    }
    if (entering < 0) {
      double infeasibility = 0.0;
      for (int i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] >= n) infeasibility += std::abs(x_basic[i]);
      if (infeasibility > 1e-9 * rhs_scale)
        throw numeric_error("decompose: feasibility search stalled with residual mass");
      return basis;
    }

    const Vector direction = lu.solve(lp.column(entering));
    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (direction[i] > 1e-12) {
        const double ratio = x_basic[i] / direction[i];
        if (ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 && leaving >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)])) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) throw numeric_error("decompose: unbounded feasibility direction");

    degenerate_run = best_ratio <= 1e-12 * rhs_scale ? degenerate_run + 1 : 0;
    basis[static_cast<std::size_t>(leaving)] = entering;
  }
  throw numeric_error("decompose: simplex iteration cap reached");
}

}  // namespace

bool in_polytope(const Vector& v, double alpha, int t) {
  if (!(alpha > 0.0)) throw domain_error("in_polytope: alpha must be positive");
  if (t < 1) throw domain_error("in_polytope: t must be >= 1");
  require_finite(v, "in_polytope: v");
  const double inf_norm = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double one_norm = v.lpNorm<1>();
  return inf_norm <= alpha * (1.0 + 1e-12) && one_norm <= t * alpha * (1.0 + 1e-12);
}

bool in_u_set(const Vector& u, double alpha, int t, const Vector& v) {
  if (!(alpha > 0.0)) throw domain_error("in_u_set: alpha must be positive");
  if (t < 1) throw domain_error("in_u_set: t must be >= 1");
  if (u.size() != v.size()) throw domain_error("in_u_set: dimension mismatch");
  require_finite(u, "in_u_set: u");
  require_finite(v, "in_u_set: v");

  int nonzeros = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0) {
      ++nonzeros;
      if (v[i] == 0.0) return false;  // support escapes supp(v)
    }
  }
  if (nonzeros > t) return false;
  const double l1_v = v.lpNorm<1>();
  if (std::abs(u.lpNorm<1>() - l1_v) > 1e-10 * std::max(1.0, l1_v)) return false;
  const double inf_norm = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
  return inf_norm <= alpha + 1e-12;
}

PolytopeDecomposition decompose(const Vector& v, double alpha, int t) {
  if (!(alpha > 0.0)) throw domain_error("decompose: alpha must be positive");
  if (t < 1) throw domain_error("decompose: t must be >= 1");
  require_finite(v, "decompose: v");
  if (!in_polytope(v, alpha, t))
    throw domain_error("decompose: v is not in T(alpha, t)");

  std::vector<int> support;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) support.push_back(static_cast<int>(i));
  const int d = static_cast<int>(support.size());
  if (d > kMaxSupport) {
    std::ostringstream msg;
    msg << "decompose: ||v||_0 = " << d << " exceeds the supported maximum of " << kMaxSupport;
    throw budget_error(msg.str());
  }

  PolytopeDecomposition dec;
  dec.alpha = alpha;
  dec.t = t;
  dec.base = v;

  // v itself is a member of U whenever it is t-sparse.
  if (d <= t) {
    dec.terms.emplace_back(1.0, v);
    return dec;
  }

  Vector w(d);
  for (int i = 0; i < d; ++i) w[i] = std::abs(v[support[static_cast<std::size_t>(i)]]);
  const double l1 = w.sum();

  // Vertex shape: `at_alpha` entries pinned to alpha plus one remainder entry.
  // Ratios within 1e-12 of an integer are closed onto it, so boundary inputs
  // (||v||_1 == t * alpha exactly) enumerate pure alpha-patterns.
  const double ratio = l1 / alpha;
  int at_alpha;
  double frac;
  if (std::abs(ratio - std::round(ratio)) <= 1e-12 * std::max(1.0, ratio)) {
    at_alpha = static_cast<int>(std::round(ratio));
    frac = 0.0;
  } else {
    at_alpha = static_cast<int>(std::floor(ratio));
    frac = l1 - at_alpha * alpha;
  }

  LpProblem lp;
  lp.dim = d;
  lp.alpha = alpha;
  lp.frac = frac;
  lp.rhs = Vector(d + 1);
  lp.rhs.head(d) = w;
  lp.rhs[d] = 1.0;

  enumerate_size_subsets(d, at_alpha, [&](std::uint32_t mask) {
    if (frac > 0.0) {
      for (int j = 0; j < d; ++j)
        if (!(mask & (1u << j))) lp.columns.push_back({mask, j});
    } else {
      lp.columns.push_back({mask, -1});
    }
  });

  const std::vector<int> basis = phase1_simplex(lp);

  // Re-solve the final basis system from scratch for full precision.
  const int m = d + 1;
  const int n = static_cast<int>(lp.columns.size());
  Matrix bmat(m, m);
  for (int i = 0; i < m; ++i) {
    const int col = basis[static_cast<std::size_t>(i)];
    bmat.col(i) = col >= n ? Vector(Vector::Unit(m, col - n)) : lp.column(col);
  }
  const Vector lambda = Eigen::FullPivLU<Matrix>(bmat).solve(lp.rhs);

  for (int i = 0; i < m; ++i) {
    const int col = basis[static_cast<std::size_t>(i)];
    if (col >= n || lambda[i] <= 1e-12) continue;
    Vector term = Vector::Zero(v.size());
    const Candidate& c = lp.columns[static_cast<std::size_t>(col)];
    for (int j = 0; j < d; ++j) {
      double mag = 0.0;
      if (c.alpha_mask & (1u << j)) mag = alpha;
      if (c.frac_index == j) mag = frac;
      if (mag != 0.0) {
        const int full_index = support[static_cast<std::size_t>(j)];
        term[full_index] = v[full_index] < 0.0 ? -mag : mag;
      }
    }
    dec.terms.emplace_back(lambda[i], term);
  }
  return dec;
}

DecompositionCheck verify_decomposition(const PolytopeDecomposition& dec) {
  DecompositionCheck check;
  if (dec.terms.empty()) return check;

  Vector recon = Vector::Zero(dec.base.size());
  double weight_sum = 0.0;
  check.weights_in_range = true;
  check.all_members = true;
  for (const auto& [lambda, u] : dec.terms) {
    weight_sum += lambda;
    if (lambda < -1e-12 || lambda > 1.0 + 1e-12) check.weights_in_range = false;
    if (!in_u_set(u, dec.alpha, dec.t, dec.base)) check.all_members = false;
    recon += lambda * u;
  }
  check.weight_sum_error = std::abs(weight_sum - 1.0);
  check.reconstruction_error = (recon - dec.base).cwiseAbs().maxCoeff();

  const int d = l0_count(dec.base, 0.0);
  check.term_budget_ok = static_cast<int>(dec.terms.size()) <= std::max(1, 2 * d);

  const double inf_scale = std::max(1.0, dec.base.size() ? dec.base.cwiseAbs().maxCoeff() : 0.0);
  check.ok = check.weights_in_range && check.all_members && check.term_budget_ok &&
             check.weight_sum_error <= 1e-12 && check.reconstruction_error <= 1e-10 * inf_scale;
  return check;
}

}  // namespace lqcs
