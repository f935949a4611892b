#ifndef LQCS_RIC_HPP
#define LQCS_RIC_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "lqcs/core.hpp"

namespace lqcs {

enum class RicMode { Exact, LowerBound };

struct RicEstimate {
  int order = 0;
  double value = 0.0;
  RicMode mode = RicMode::Exact;
  std::uint64_t supports_examined = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// min(C(n, k), cap + 1): exact when the binomial is within cap, saturated
// otherwise. Never overflows.
std::uint64_t binomial_or_cap(int n, int k, std::uint64_t cap);

// Order of the isometry constant for a real-valued sparsity level: ceil(k),
// with values within 1e-9 (relative) of an integer snapped to that integer
// first. The snap exists because callers reach this through floating-point
// expressions like (s^q + 1) * k.
int ric_order(double k_real);

// Smallest and largest eigenvalue of the Gram matrix of the columns of A
// selected by `support` (distinct indices in [0, p)).
std::pair<double, double> gram_extremes(const Matrix& a, const std::vector<int>& support);

// Extremes of the order-k Gram spectrum over every size-k support:
// lambda_min = min over S of the smallest eigenvalue, lambda_max = max over S
// of the largest. Exhaustive and lexicographic; the k-order RIC is
// max(lambda_max - 1, 1 - lambda_min).
struct SpectrumRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::uint64_t supports_examined = 0;
};

SpectrumRange spectrum_range(const Matrix& a, int k,
                             std::uint64_t budget = kDefaultEnumerationBudget, int threads = 1);

// Exact k-order restricted isometry constant by exhaustive enumeration of all
// C(p, k) supports in lexicographic order. The reported value is the raw
// deviation max(lambda_max - 1, 1 - lambda_min); values above 1 mean the
// isometry property is violated at this order and are reported unclamped.
// Refuses (budget_error) when C(p, k) exceeds `budget`; `threads` workers
// split the lexicographic range into contiguous chunks, and the result is
// identical for any worker count.
RicEstimate exact_ric(const Matrix& a, int k,
                      std::uint64_t budget = kDefaultEnumerationBudget, int threads = 1);

// Scale factor c making the order-k spectrum of c*A symmetric about 1, which
// minimizes the order-k deviation of the rescaled matrix:
// c = sqrt(2 / (lambda_max + lambda_min)). The experiment harness applies it
// before certification so generated ensembles sit as deep inside the isometry
// region as their conditioning allows.
double rip_centering_scale(const Matrix& a, int k,
                           std::uint64_t budget = kDefaultEnumerationBudget, int threads = 1);

// Monte Carlo lower bound: max deviation over `trials` uniformly sampled
// supports from a single SplitMix64 stream, so for a fixed seed the first t
// trials of a longer run are a prefix of a shorter one.
RicEstimate mc_ric_lower(const Matrix& a, int k, std::uint64_t trials, std::uint64_t seed);

}  // namespace lqcs

#endif  // LQCS_RIC_HPP
