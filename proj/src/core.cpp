#include "lqcs/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lqcs/errors.hpp"

namespace lqcs {

void require_finite(const Vector& v, const std::string& name) {
  if (!v.allFinite()) throw domain_error(name + ": non-finite entry");
}

void require_finite(const Matrix& a, const std::string& name) {
  if (!a.allFinite()) throw domain_error(name + ": non-finite entry");
}

double lq_quasinorm(const Vector& v, double q) {
  if (!(q > 0.0)) throw domain_error("lq_quasinorm: q must be positive");
  require_finite(v, "lq_quasinorm: v");
  if (q == 2.0) return v.norm();
  if (q == 1.0) return v.lpNorm<1>();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), q);
  return std::pow(acc, 1.0 / q);
}

double lq_power(const Vector& v, double q) {
  if (!(q > 0.0) || q > 1.0) throw domain_error("lq_power: q must lie in (0, 1]");
  require_finite(v, "lq_power: v");
  if (q == 1.0) return v.lpNorm<1>();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), q);
  return acc;
}

int l0_count(const Vector& v, double tol) {
  if (tol < 0.0) throw domain_error("l0_count: tol must be non-negative");
  int count = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > tol) ++count;
  return count;
}

int l0_count(const Vector& v) {
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  return l0_count(v, 1e-9 * scale);
}

KTermSplit best_k_split(const Vector& v, Eigen::Index k) {
  if (k < 0 || k > v.size()) throw domain_error("best_k_split: k out of range [0, p]");
  require_finite(v, "best_k_split: v");

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // Stable under ties: larger magnitude first, lower index wins ties.
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(v[a]), mb = std::abs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });

  KTermSplit split;
  split.k = k;
  split.head = Vector::Zero(v.size());
  split.tail = v;
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = idx[static_cast<std::size_t>(r)];
    split.head[i] = v[i];
    split.tail[i] = 0.0;
  }
  return split;
}

double spectral_norm(const Matrix& a) {
  require_finite(a, "spectral_norm: A");
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double holder_factor(int count, double q) {
  if (count < 1) throw domain_error("holder_factor: count must be >= 1");
  if (!(q > 0.0) || !(q < 1.0)) throw domain_error("holder_factor: q must lie in (0, 1)");
  return std::pow(static_cast<double>(count), 1.0 / q - 0.5);
}

double polarization_residual(const Matrix& b, const std::vector<Vector>& betas,
                             const std::vector<double>& lambdas, double c) {
  const std::size_t n = betas.size();
  if (n == 0 || lambdas.size() != n)
    throw domain_error("polarization_residual: need |betas| == |lambdas| >= 1");
  double weight_sum = 0.0;
  for (double l : lambdas) {
    if (l < 0.0) throw domain_error("polarization_residual: negative weight");
    weight_sum += l;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw domain_error("polarization_residual: weights must sum to 1 within 1e-12");

  std::vector<Vector> images(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (betas[i].size() != b.cols())
      throw domain_error("polarization_residual: beta dimension mismatch");
    images[i] = b * betas[i];
  }

  Vector mean = Vector::Zero(b.rows());
  for (std::size_t i = 0; i < n; ++i) mean += lambdas[i] * images[i];

  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) lhs += lambdas[i] * (mean - c * images[i]).squaredNorm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      lhs += (1.0 - 2.0 * c) * lambdas[i] * lambdas[j] * (images[i] - images[j]).squaredNorm();

  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    rhs += lambdas[i] * (1.0 - c) * (1.0 - c) * images[i].squaredNorm();

  return lhs - rhs;
}

}  // namespace lqcs
