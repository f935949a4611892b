#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqcs/errors.hpp"
#include "lqcs/guarantee.hpp"
#include "lqcs/harness.hpp"
#include "lqcs/rng.hpp"

using lqcs::Matrix;

TEST_CASE("lq_threshold spot values") {
  CHECK(lqcs::lq_threshold(1.0, 1.0) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
  CHECK(lqcs::lq_threshold(1.0, 3.0) == doctest::Approx(0.8660254037844386).epsilon(1e-12));
  // s^(q-2) = 4^(-1.5) = 1/8 -> sqrt(8/9)
  CHECK(lqcs::lq_threshold(0.5, 4.0) == doctest::Approx(0.9428090415820634).epsilon(1e-12));
  CHECK_THROWS_AS(lqcs::lq_threshold(0.0, 1.0), lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::lq_threshold(1.5, 1.0), lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::lq_threshold(0.5, 0.0), lqcs::domain_error);
}

TEST_CASE("lq_threshold stays in (0,1) and grows with s") {
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    double prev = 0.0;
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0, 16.0, 256.0}) {
      const double thr = lqcs::lq_threshold(q, s);
      CHECK(thr > 0.0);
      CHECK(thr < 1.0);
      CHECK(thr > prev);
      prev = thr;
    }
  }
}

TEST_CASE("l1_threshold values and validity range") {
  CHECK(lqcs::l1_threshold(2.0) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(lqcs::l1_threshold(4.0) == doctest::Approx(0.8660254037844386).epsilon(1e-12));
  CHECK_THROWS_AS(lqcs::l1_threshold(4.0 / 3.0), lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::l1_threshold(1.0), lqcs::domain_error);
  CHECK(lqcs::kL1OrderKThreshold == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("q = 1 reduces the lq threshold to the sharp l1 bound") {
  for (double t : {1.5, 2.0, 3.0, 4.0, 10.0, 77.0}) {
    CHECK(lqcs::lq_threshold(1.0, t - 1.0) ==
          doctest::Approx(lqcs::l1_threshold(t)).epsilon(1e-12));
  }
}

TEST_CASE("compare_thresholds frozen values and limit behavior") {
  const auto cmp = lqcs::compare_thresholds(0.5, 3.0);
  CHECK(cmp.lq == doctest::Approx(0.9428090415820634).epsilon(1e-12));
  CHECK(cmp.l1 == doctest::Approx(0.8164965809277260).epsilon(1e-12));
  CHECK(cmp.relaxation == doctest::Approx(0.1263124606543373).epsilon(1e-10));

  // q -> 1 closes the gap, at every t.
  for (double t : {2.1, 3.0, 6.0, 10.0}) {
    const auto near_one = lqcs::compare_thresholds(1.0 - 1e-9, t);
    CHECK(near_one.lq == doctest::Approx(lqcs::l1_threshold(t)).epsilon(1e-7));
    CHECK(near_one.relaxation == doctest::Approx(0.0).epsilon(1e-7));
  }

  CHECK_THROWS_AS(lqcs::compare_thresholds(0.5, 2.0), lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::compare_thresholds(1.0, 3.0), lqcs::domain_error);
}

TEST_CASE("relaxation is positive and decreasing in q across the grid") {
  for (double t : {2.1, 2.5, 3.0, 4.0, 6.0, 10.0}) {
    double prev_lq = 2.0;
    for (double q : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
      const auto cmp = lqcs::compare_thresholds(q, t);
      CHECK(cmp.relaxation > 0.0);
      CHECK(cmp.lq < prev_lq);  // strictly decreasing in q
      prev_lq = cmp.lq;
    }
  }
}

namespace {

std::map<int, lqcs::RicEstimate> constant_oracle(int from, int to, double value,
                                                 lqcs::RicMode mode) {
  std::map<int, lqcs::RicEstimate> oracle;
  for (int m = from; m <= to; ++m) {
    lqcs::RicEstimate est;
    est.order = m;
    est.value = value;
    est.mode = mode;
    est.supports_examined = 1;
    oracle[m] = est;
  }
  return oracle;
}

}  // namespace

TEST_CASE("certify: zero deltas certify with the largest threshold as margin") {
  const auto oracle = constant_oracle(2, 6, 0.0, lqcs::RicMode::Exact);
  const auto cert = lqcs::certify(oracle, 1, 0.5, 6);
  CHECK(cert.satisfied);
  CHECK(lqcs::certificate_is_sound(cert));
  CHECK(cert.order_m == 6);  // threshold grows with s, so the top order wins
  const double s = std::pow(6.0 - 1.0, 2.0);
  CHECK(*cert.s_star == doctest::Approx(s).epsilon(1e-12));
  CHECK(cert.margin == doctest::Approx(lqcs::lq_threshold(0.5, s)).epsilon(1e-12));
  CHECK(*cert.delta_m == 0.0);
}

TEST_CASE("certify: duplicate-column matrices are refuted") {
  Matrix dup = Matrix::Identity(4, 5);
  dup.col(4) = dup.col(1);
  const auto cert = lqcs::certify_exact(dup, 1, 0.5, 4);
  CHECK_FALSE(cert.satisfied);
  CHECK(cert.margin <= 0.0);
  CHECK_FALSE(cert.s_star.has_value());
  CHECK_FALSE(cert.order_m.has_value());
}

TEST_CASE("certify: cross-check every order against direct recomputation") {
  Matrix raw = lqcs::gen_gaussian(12, 16, 2024, lqcs::MatrixEnsemble::RowOrthonormal);
  const double c = lqcs::rip_centering_scale(raw, 5);
  const Matrix a = c * raw;
  const int k = 1;
  const double q = 0.5;

  std::map<int, lqcs::RicEstimate> oracle;
  for (int m = 2; m <= 5; ++m) oracle[m] = lqcs::exact_ric(a, m);
  const auto cert = lqcs::certify(oracle, k, q, 5);

  // Independent recomputation of the per-order test and best margin.
  bool any_pass = false;
  double best_margin = -1e300;
  int best_order = -1;
  for (int m = 2; m <= 5; ++m) {
    const double s = std::pow(static_cast<double>(m) / k - 1.0, 1.0 / q);
    const double threshold = 1.0 / std::sqrt(std::pow(s, q - 2.0) + 1.0);
    const double margin = threshold - oracle[m].value;
    if (margin > best_margin) {
      best_margin = margin;
      best_order = m;
    }
    if (margin > 0.0) any_pass = true;
  }
  CHECK(cert.satisfied == any_pass);
  if (cert.satisfied) {
    CHECK(cert.margin == doctest::Approx(best_margin).epsilon(1e-14));
    CHECK(*cert.order_m == best_order);
    // The certificate order re-derives through the ceiling rule.
    CHECK(lqcs::ric_order((std::pow(*cert.s_star, q) + 1.0) * k) == *cert.order_m);
  }
}

TEST_CASE("certify: lower-bound estimates taint the certificate mode") {
  const auto oracle = constant_oracle(2, 4, 0.1, lqcs::RicMode::LowerBound);
  const auto cert = lqcs::certify(oracle, 1, 0.5, 4);
  CHECK(cert.satisfied);
  CHECK(cert.estimates_mode == lqcs::RicMode::LowerBound);
  CHECK_FALSE(lqcs::certificate_is_sound(cert));

  const auto hopeless = constant_oracle(2, 4, 2.0, lqcs::RicMode::LowerBound);
  const auto refuted = lqcs::certify(hopeless, 1, 0.5, 4);
  CHECK_FALSE(refuted.satisfied);  // a failed lower-bound test is a true refutation
}

TEST_CASE("certify: argument validation") {
  const auto oracle = constant_oracle(2, 3, 0.0, lqcs::RicMode::Exact);
  CHECK_THROWS_AS(lqcs::certify(oracle, 1, 0.5, 1), lqcs::domain_error);   // empty range
  CHECK_THROWS_AS(lqcs::certify(oracle, 1, 0.5, 5), lqcs::domain_error);   // missing order
  CHECK_THROWS_AS(lqcs::certify(oracle, 0, 0.5, 3), lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::certify(oracle, 1, 1.5, 3), lqcs::domain_error);
}

TEST_CASE("eta_min formulas") {
  CHECK(lqcs::eta_min(lqcs::NoiseShape::L2Ball, 0.25, 3.0, 0.0) == doctest::Approx(0.25));
  CHECK(lqcs::eta_min(lqcs::NoiseShape::L2Ball, 0.1, 1.2, 0.05) ==
        doctest::Approx(0.16).epsilon(1e-14));
  CHECK(lqcs::eta_min(lqcs::NoiseShape::Dantzig, 0.1, 2.0, 0.05) ==
        doctest::Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(lqcs::eta_min(lqcs::NoiseShape::L2Ball, -0.1, 1.0, 0.0), lqcs::domain_error);
}

TEST_CASE("error_bound_l2: limits, frozen value, and error paths") {
  const auto zero = lqcs::error_bound_l2(0.3, 1.0, 0.5, 0.0, 0.0, 2.0, 0.0);
  CHECK(zero.bound == 0.0);

  const auto clean = lqcs::error_bound_l2(0.0, 1.0, 1.0, 0.1, 0.2, 1.5, 0.05);
  CHECK(clean.amplifier == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(clean.bound == doctest::Approx(std::sqrt(2.0) * 0.3 +
                                       (std::sqrt(2.0) * 1.5 + 1.0) * 0.05).epsilon(1e-14));

  // Frozen at 50-digit precision.
  const auto frozen = lqcs::error_bound_l2(0.5, 4.0, 0.5, 0.1, 0.2, 1.2, 0.05);
  CHECK(frozen.amplifier == doctest::Approx(3.6878044676348787).epsilon(1e-12));
  CHECK(frozen.bound == doctest::Approx(1.3776096083485563).epsilon(1e-12));
  CHECK(frozen.root_factor == doctest::Approx(1.0606601717798213).epsilon(1e-12));

  CHECK_THROWS_AS(lqcs::error_bound_l2(0.95, 4.0, 0.5, 0.1, 0.2, 1.2, 0.05),
                  lqcs::domain_error);  // delta above threshold
  CHECK_THROWS_AS(lqcs::error_bound_l2(0.5, 4.0, 0.5, 0.1, 0.15, 1.2, 0.05),
                  lqcs::domain_error);  // eta below eps + sigma * tail2 = 0.16
  try {
    lqcs::error_bound_l2(0.5, 4.0, 0.5, 0.1, 0.15, 1.2, 0.05);
  } catch (const lqcs::domain_error& e) {
    CHECK(std::string(e.what()).find("eta >= epsilon + sigma(A) * tail2") != std::string::npos);
  }
  CHECK_THROWS_AS(lqcs::error_bound_l2(-0.1, 4.0, 0.5, 0.1, 0.2, 1.2, 0.05), lqcs::domain_error);
}

TEST_CASE("error_bound_l2 with no tail reduces to C (eps + eta)") {
  const auto rep = lqcs::error_bound_l2(0.4, 2.0, 0.7, 0.03, 0.09, 5.0, 0.0);
  CHECK(rep.bound == rep.amplifier * (0.03 + 0.09));  // bitwise: tail term vanishes
}

TEST_CASE("error_bound monotonicity and divergence at the threshold") {
  double prev = 0.0;
  for (double delta : {0.0, 0.2, 0.4, 0.6, 0.8, 0.9}) {
    const auto rep = lqcs::error_bound_l2(delta, 4.0, 0.5, 0.1, 0.2, 1.0, 0.01);
    CHECK(rep.bound > prev);
    prev = rep.bound;
  }
  const double thr = lqcs::lq_threshold(0.5, 4.0);
  const auto near = lqcs::error_bound_l2(thr * (1.0 - 1e-12), 4.0, 0.5, 0.1, 0.2, 1.0, 0.01);
  CHECK(near.bound > 1e9);

  for (double eps : {0.0, 0.1, 0.2}) {
    for (double tail : {0.0, 0.05}) {
      const auto lo = lqcs::error_bound_l2(0.3, 4.0, 0.5, eps, 1.0, 1.0, tail);
      const auto hi = lqcs::error_bound_l2(0.3, 4.0, 0.5, eps + 0.05, 1.0, 1.0, tail);
      CHECK(hi.bound >= lo.bound);
    }
  }
}

TEST_CASE("error_bound_dantzig: limits and frozen value") {
  const auto zero = lqcs::error_bound_dantzig(0.3, 1.0, 0.5, 2, 0.0, 0.0, 2.0, 0.0);
  CHECK(zero.bound == 0.0);

  // eta must clear eps + sigma^2 * tail2 = 0.1 + 2.25 * 0.05 = 0.2125
  const auto clean = lqcs::error_bound_dantzig(0.0, 1.0, 1.0, 2, 0.1, 0.25, 1.5, 0.05);
  CHECK(clean.amplifier == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
  CHECK(clean.bound == doctest::Approx(std::sqrt(8.0) * 0.35 +
                                       (std::sqrt(8.0) * 2.25 + 1.0) * 0.05).epsilon(1e-13));

  // Frozen at 50-digit precision: C = sqrt(2 (s^q + 1) k) / (1 - sqrt(s^(q-2)+1) delta).
  const auto frozen = lqcs::error_bound_dantzig(0.5, 4.0, 0.5, 2, 0.1, 0.5, 1.0, 0.1);
  CHECK(frozen.amplifier == doctest::Approx(7.3756089352697574).epsilon(1e-12));
  CHECK(frozen.bound == doctest::Approx(5.2629262546888302).epsilon(1e-12));

  CHECK_THROWS_AS(lqcs::error_bound_dantzig(0.5, 4.0, 0.5, 0, 0.1, 0.5, 1.0, 0.1),
                  lqcs::domain_error);
  CHECK_THROWS_AS(lqcs::error_bound_dantzig(0.5, 4.0, 0.5, 2, 0.1, 0.15, 2.0, 0.1),
                  lqcs::domain_error);  // eta below eps + sigma^2 tail2 = 0.5
}

TEST_CASE("error_bound_dantzig monotonicity and divergence at the threshold") {
  double prev = 0.0;
  for (double delta : {0.0, 0.2, 0.4, 0.6, 0.8, 0.9}) {
    const auto rep = lqcs::error_bound_dantzig(delta, 4.0, 0.5, 2, 0.1, 0.3, 1.0, 0.01);
    CHECK(rep.bound > prev);
    prev = rep.bound;
  }
  const double thr = lqcs::lq_threshold(0.5, 4.0);
  const auto near = lqcs::error_bound_dantzig(thr * (1.0 - 1e-12), 4.0, 0.5, 2, 0.1, 0.3, 1.0, 0.01);
  CHECK(near.bound > 1e9);
}
