#ifndef LQCS_GUARANTEE_HPP
#define LQCS_GUARANTEE_HPP

#include <map>
#include <optional>

#include "lqcs/core.hpp"
#include "lqcs/ric.hpp"

namespace lqcs {

// RIC threshold 1 / sqrt(s^(q-2) + 1) below which the lq program recovers
// k-sparse signals exactly (and approximately sparse ones stably) at order
// (s^q + 1) k. Always in (0, 1) for q <= 1, increasing in s.
double lq_threshold(double q, double s);

// Sharp l1 bound sqrt((t-1)/t) on delta_{tk}, valid for t > 4/3 strictly.
double l1_threshold(double t);

// The t = 1 companion of the sharp l1 result: delta_k < 1/3.
inline constexpr double kL1OrderKThreshold = 1.0 / 3.0;

struct ThresholdComparison {
  double lq = 0.0;          // 1 / sqrt((t-1)^(1-2/q) + 1), i.e. s = (t-1)^(1/q)
  double l1 = 0.0;          // sqrt((t-1)/t)
  double relaxation = 0.0;  // lq - l1, positive on the whole domain
};

// Both thresholds at RIC order t*k, for 0 < q < 1 and t > 2. On this whole
// domain (t-1)^(1-2/q) < (t-1)^(-1), so the lq threshold is strictly the
// larger one and `relaxation` is positive: at orders beyond 2k the lq program
// tolerates worse-conditioned matrices than l1. See README for the exact
// direction of this inequality, which is easy to get backwards.
ThresholdComparison compare_thresholds(double q, double t);

struct GuaranteeCertificate {
  double q = 0.0;
  int k = 0;
  std::optional<double> s_star;     // back-solved sparsity ratio at the best order
  std::optional<int> order_m;       // RIC order of the certificate
  std::optional<double> delta_m;    // estimate used at that order
  std::optional<double> threshold;  // lq_threshold(q, s_star)
  bool satisfied = false;
  // threshold - delta at the best order; when no order passes this is the
  // best (largest, non-positive) gap observed, i.e. the distance to passing.
  double margin = 0.0;
  // Exact iff every estimate consulted was Exact. A satisfied certificate is
  // sound only in Exact mode; with lower bounds a failure refutes the tested
  // order but a pass proves nothing.
  RicMode estimates_mode = RicMode::Exact;
};

inline bool certificate_is_sound(const GuaranteeCertificate& c) {
  return c.satisfied && c.estimates_mode == RicMode::Exact;
}

// Searches integer orders m in [k+1, max_order]. Per order the admissible
// sparsity ratio is back-solved as s = (m/k - 1)^(1/q), the largest s whose
// ceiled order equals m, and the test is delta(m) < lq_threshold(q, s). The
// returned certificate carries the order of maximal margin. `delta_by_order`
// must cover every order in the range.
GuaranteeCertificate certify(const std::map<int, RicEstimate>& delta_by_order, int k, double q,
                             int max_order);

// Convenience: exact enumeration oracle over the order range, then certify.
GuaranteeCertificate certify_exact(const Matrix& a, int k, double q, int max_order,
                                   std::uint64_t budget = kDefaultEnumerationBudget,
                                   int threads = 1);

enum class NoiseShape { L2Ball, Dantzig };

// Smallest eta admissible for the stability guarantees:
// L2Ball -> eps + sigma * tail2, Dantzig -> eps + sigma^2 * tail2.
double eta_min(NoiseShape model, double epsilon, double sigma, double tail2);

struct ErrorBoundReport {
  NoiseShape model = NoiseShape::L2Ball;
  double epsilon = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  double s = 0.0;
  double q = 0.0;
  int k = 0;  // Dantzig only; 0 for the l2-ball model
  double sigma = 0.0;
  double tail2 = 0.0;        // l2 norm of the best-k-term tail of the signal
  double root_factor = 0.0;  // sqrt(s^(q-2) + 1)
  double threshold = 0.0;    // lq_threshold(q, s)
  double amplifier = 0.0;    // leading coefficient C
  double bound = 0.0;
};

// l2-ball stability bound:
//   C = sqrt(2 (1 + delta)) / (1 - sqrt(s^(q-2) + 1) delta)
//   bound = C (eps + eta) + (C sigma + 1) tail2
// Requires delta in [0, lq_threshold(q, s)) and eta >= eta_min.
ErrorBoundReport error_bound_l2(double delta, double s, double q, double epsilon, double eta,
                                double sigma, double tail2);

// Dantzig-type stability bound:
//   C = sqrt(2 (s^q + 1) k) / (1 - sqrt(s^(q-2) + 1) delta)
//   bound = C (eps + eta) + (C sigma^2 + 1) tail2
ErrorBoundReport error_bound_dantzig(double delta, double s, double q, int k, double epsilon,
                                     double eta, double sigma, double tail2);

}  // namespace lqcs

#endif  // LQCS_GUARANTEE_HPP
