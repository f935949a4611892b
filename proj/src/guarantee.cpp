#include "lqcs/guarantee.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lqcs/errors.hpp"

namespace lqcs {

double lq_threshold(double q, double s) {
  if (!(q > 0.0) || q > 1.0) throw domain_error("lq_threshold: q must lie in (0, 1]");
  if (!(s > 0.0)) throw domain_error("lq_threshold: s must be positive");
  return 1.0 / std::sqrt(std::pow(s, q - 2.0) + 1.0);
}

double l1_threshold(double t) {
  if (!(t > 4.0 / 3.0))
    throw domain_error("l1_threshold: valid for t > 4/3 only (strict); the order-k "
                       "companion constant is kL1OrderKThreshold = 1/3");
  return std::sqrt((t - 1.0) / t);
}

ThresholdComparison compare_thresholds(double q, double t) {
  if (!(q > 0.0) || !(q < 1.0)) throw domain_error("compare_thresholds: q must lie in (0, 1)");
  if (!(t > 2.0)) throw domain_error("compare_thresholds: comparison holds for t > 2 only");
  ThresholdComparison cmp;
  cmp.lq = 1.0 / std::sqrt(std::pow(t - 1.0, 1.0 - 2.0 / q) + 1.0);
  cmp.l1 = l1_threshold(t);
  cmp.relaxation = cmp.lq - cmp.l1;
  return cmp;
}

GuaranteeCertificate certify(const std::map<int, RicEstimate>& delta_by_order, int k, double q,
                             int max_order) {
  if (k < 1) throw domain_error("certify: k must be >= 1");
  if (!(q > 0.0) || q > 1.0) throw domain_error("certify: q must lie in (0, 1]");
  if (max_order <= k) throw domain_error("certify: max_order must exceed k");

  GuaranteeCertificate cert;
  cert.q = q;
  cert.k = k;
  cert.margin = -std::numeric_limits<double>::infinity();

  for (int m = k + 1; m <= max_order; ++m) {
    const auto it = delta_by_order.find(m);
    if (it == delta_by_order.end()) {
      std::ostringstream msg;
      msg << "certify: no RIC estimate for order " << m;
      throw domain_error(msg.str());
    }
    const RicEstimate& est = it->second;
    if (est.mode != RicMode::Exact) cert.estimates_mode = RicMode::LowerBound;

    const double s = std::pow(static_cast<double>(m) / k - 1.0, 1.0 / q);
    const double threshold = lq_threshold(q, s);
    const double margin = threshold - est.value;
    if (margin > cert.margin) {
      cert.margin = margin;
      if (margin > 0.0) {
        cert.satisfied = true;
        cert.s_star = s;
        cert.order_m = m;
        cert.delta_m = est.value;
        cert.threshold = threshold;
      }
    }
  }
  return cert;
}

GuaranteeCertificate certify_exact(const Matrix& a, int k, double q, int max_order,
                                   std::uint64_t budget, int threads) {
  if (max_order > a.cols()) throw domain_error("certify_exact: max_order exceeds p");
  std::map<int, RicEstimate> oracle;
  for (int m = k + 1; m <= max_order; ++m) oracle[m] = exact_ric(a, m, budget, threads);
  return certify(oracle, k, q, max_order);
}

double eta_min(NoiseShape model, double epsilon, double sigma, double tail2) {
  if (epsilon < 0.0 || sigma < 0.0 || tail2 < 0.0)
    throw domain_error("eta_min: inputs must be non-negative");
  return model == NoiseShape::L2Ball ? epsilon + sigma * tail2 : epsilon + sigma * sigma * tail2;
}

namespace {

// Shared validation and skeleton of both stability bounds; `numerator` is the
// model-specific amplifier numerator and `noise_gain` the factor multiplying
// sigma (sigma itself for the l2 ball, sigma^2 for Dantzig).
ErrorBoundReport make_report(NoiseShape model, double delta, double s, double q, int k,
                             double epsilon, double eta, double sigma, double tail2,
                             double numerator, double noise_gain) {
  if (epsilon < 0.0 || eta < 0.0 || sigma < 0.0 || tail2 < 0.0)
    throw domain_error("error_bound: epsilon, eta, sigma, tail2 must be non-negative");
  if (delta < 0.0) throw domain_error("error_bound: delta must be non-negative");

  const double threshold = lq_threshold(q, s);
  if (!(delta < threshold)) {
    std::ostringstream msg;
    msg << "error_bound: guarantee inapplicable, delta = " << delta
        << " is not below the RIC threshold " << threshold;
    throw domain_error(msg.str());
  }
  const double min_eta = eta_min(model, epsilon, sigma, tail2);
  if (eta < min_eta) {
    std::ostringstream msg;
    msg << "error_bound: stability hypothesis eta >= epsilon + "
        << (model == NoiseShape::L2Ball ? "sigma(A)" : "sigma^2(A)")
        << " * tail2 violated: eta = " << eta << " < " << min_eta;
    throw domain_error(msg.str());
  }

  ErrorBoundReport rep;
  rep.model = model;
  rep.epsilon = epsilon;
  rep.eta = eta;
  rep.delta = delta;
  rep.s = s;
  rep.q = q;
  rep.k = k;
  rep.sigma = sigma;
  rep.tail2 = tail2;
  rep.root_factor = std::sqrt(std::pow(s, q - 2.0) + 1.0);
  rep.threshold = threshold;
  rep.amplifier = numerator / (1.0 - rep.root_factor * delta);
  rep.bound = rep.amplifier * (epsilon + eta) + (rep.amplifier * noise_gain + 1.0) * tail2;
  return rep;
}

}  // namespace

ErrorBoundReport error_bound_l2(double delta, double s, double q, double epsilon, double eta,
                                double sigma, double tail2) {
  if (!(q > 0.0) || q > 1.0) throw domain_error("error_bound_l2: q must lie in (0, 1]");
  if (!(s > 0.0)) throw domain_error("error_bound_l2: s must be positive");
  return make_report(NoiseShape::L2Ball, delta, s, q, 0, epsilon, eta, sigma, tail2,
                     std::sqrt(2.0 * (1.0 + delta)), sigma);
}

ErrorBoundReport error_bound_dantzig(double delta, double s, double q, int k, double epsilon,
                                     double eta, double sigma, double tail2) {
  if (!(q > 0.0) || q > 1.0) throw domain_error("error_bound_dantzig: q must lie in (0, 1]");
  if (!(s > 0.0)) throw domain_error("error_bound_dantzig: s must be positive");
  if (k < 1) throw domain_error("error_bound_dantzig: k must be >= 1");
  return make_report(NoiseShape::Dantzig, delta, s, q, k, epsilon, eta, sigma, tail2,
                     std::sqrt(2.0 * (std::pow(s, q) + 1.0) * k), sigma * sigma);
}

}  // namespace lqcs
