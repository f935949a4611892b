#include "lqcs/ric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lqcs/errors.hpp"
#include "lqcs/rng.hpp"

namespace lqcs {
namespace {

std::pair<double, double> support_extremes(const Matrix& gram, const std::vector<int>& support) {
  const int k = static_cast<int>(support.size());
  Matrix sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = gram(support[i], support[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sub, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw numeric_error("ric: eigensolver failed");
  return {eig.eigenvalues()(0), eig.eigenvalues()(k - 1)};
}

// Lexicographically next k-combination of [0, p); returns false after the last.
bool next_combination(std::vector<int>& c, int p) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == p - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

// Combination of lexicographic rank r in the combinatorial number system.
// All binomials touched here are bounded by C(p, k), which callers have
// already checked against the enumeration budget.
std::vector<int> unrank_combination(std::uint64_t r, int p, int k) {
  std::vector<int> c(static_cast<std::size_t>(k));
  int x = 0;
  for (int i = 0; i < k; ++i) {
    int cand = x;
    while (true) {
      const std::uint64_t block =
          binomial_or_cap(p - 1 - cand, k - 1 - i, std::numeric_limits<std::uint64_t>::max() - 1);
      if (block > r) break;
      r -= block;
      ++cand;
    }
    c[static_cast<std::size_t>(i)] = cand;
    x = cand + 1;
  }
  return c;
}

}  // namespace

std::uint64_t binomial_or_cap(int n, int k, std::uint64_t cap) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t mul = static_cast<std::uint64_t>(n - k + i);
    if (c > (std::numeric_limits<std::uint64_t>::max() / mul)) return cap + 1;
    c = c * mul / static_cast<std::uint64_t>(i);
    if (c > cap) return cap + 1;
  }
  return c;
}

int ric_order(double k_real) {
  if (!(k_real > 0.0) || !std::isfinite(k_real)) throw domain_error("ric_order: k must be > 0");
  const double nearest = std::round(k_real);
  if (nearest > 0.0 && std::abs(k_real - nearest) <= 1e-9 * std::max(1.0, std::abs(k_real)))
    return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(k_real));
}

std::pair<double, double> gram_extremes(const Matrix& a, const std::vector<int>& support) {
  if (support.empty()) throw domain_error("gram_extremes: empty support");
  std::vector<int> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= a.cols())
      throw domain_error("gram_extremes: support index out of range");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw domain_error("gram_extremes: duplicate support index");
  }
  require_finite(a, "gram_extremes: A");

  const int k = static_cast<int>(sorted.size());
  Matrix cols(a.rows(), k);
  for (int i = 0; i < k; ++i) cols.col(i) = a.col(sorted[i]);
  const Matrix gram = cols.transpose() * cols;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw numeric_error("gram_extremes: eigensolver failed");
  return {eig.eigenvalues()(0), eig.eigenvalues()(k - 1)};
}

SpectrumRange spectrum_range(const Matrix& a, int k, std::uint64_t budget, int threads) {
  const int p = static_cast<int>(a.cols());
  if (k < 1 || k > p) throw domain_error("spectrum_range: k must lie in [1, p]");
  require_finite(a, "spectrum_range: A");

  const std::uint64_t total = binomial_or_cap(p, k, budget);
  if (total > budget) {
    std::ostringstream msg;
    msg << "exact_ric: C(" << p << ", " << k << ") exceeds the enumeration budget of " << budget
        << "; use mc_ric_lower for a sampled lower bound";
    throw budget_error(msg.str());
  }

  const Matrix gram = a.transpose() * a;

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(
                                   std::min<std::uint64_t>(total, 256))));
  std::vector<double> local_min(static_cast<std::size_t>(workers),
                                std::numeric_limits<double>::infinity());
  std::vector<double> local_max(static_cast<std::size_t>(workers),
                                -std::numeric_limits<double>::infinity());

  auto run_chunk = [&](int w) {
    const std::uint64_t begin = total * static_cast<std::uint64_t>(w) / workers;
    const std::uint64_t end = total * static_cast<std::uint64_t>(w + 1) / workers;
    if (begin >= end) return;
    std::vector<int> support = unrank_combination(begin, p, k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::uint64_t r = begin; r < end; ++r) {
      const auto [smin, smax] = support_extremes(gram, support);
      lo = std::min(lo, smin);
      hi = std::max(hi, smax);
      if (r + 1 < end) next_combination(support, p);
    }
    local_min[static_cast<std::size_t>(w)] = lo;
    local_max[static_cast<std::size_t>(w)] = hi;
  };

  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
    for (auto& t : pool) t.join();
  }

  SpectrumRange range;
  range.lambda_min = *std::min_element(local_min.begin(), local_min.end());
  range.lambda_max = *std::max_element(local_max.begin(), local_max.end());
  range.supports_examined = total;
  return range;
}

RicEstimate exact_ric(const Matrix& a, int k, std::uint64_t budget, int threads) {
  const SpectrumRange range = spectrum_range(a, k, budget, threads);
  RicEstimate est;
  est.order = k;
  est.value = std::max(range.lambda_max - 1.0, 1.0 - range.lambda_min);
  est.mode = RicMode::Exact;
  est.supports_examined = range.supports_examined;
  return est;
}

double rip_centering_scale(const Matrix& a, int k, std::uint64_t budget, int threads) {
  const SpectrumRange range = spectrum_range(a, k, budget, threads);
  const double sum = range.lambda_max + range.lambda_min;
  if (!(sum > 0.0)) throw numeric_error("rip_centering_scale: degenerate spectrum");
  return std::sqrt(2.0 / sum);
}

RicEstimate mc_ric_lower(const Matrix& a, int k, std::uint64_t trials, std::uint64_t seed) {
  const int p = static_cast<int>(a.cols());
  if (k < 1 || k > p) throw domain_error("mc_ric_lower: k must lie in [1, p]");
  if (trials < 1) throw domain_error("mc_ric_lower: trials must be >= 1");
  require_finite(a, "mc_ric_lower: A");

  const Matrix gram = a.transpose() * a;
  SplitMix64 rng(seed);
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(k));

  double best = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    // Floyd's uniform k-subset sample; exactly k membership draws per trial.
    support.clear();
    for (int j = p - k; j < p; ++j) {
      const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
      if (std::find(support.begin(), support.end(), cand) != support.end())
        support.push_back(j);
      else
        support.push_back(cand);
    }
    std::sort(support.begin(), support.end());
    const auto [smin, smax] = support_extremes(gram, support);
    best = std::max(best, std::max(smax - 1.0, 1.0 - smin));
  }

  RicEstimate est;
  est.order = k;
  est.value = best;
  est.mode = RicMode::LowerBound;
  est.supports_examined = trials;
  return est;
}

}  // namespace lqcs
