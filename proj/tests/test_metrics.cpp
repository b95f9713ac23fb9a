#include <doctest.h>

#include <vector>

#include "airsense/error.hpp"
#include "airsense/metrics.hpp"
#include "airsense/rng.hpp"
#include "oracles.hpp"

using namespace airsense;

TEST_CASE("perfect predictions") {
  const std::vector<int> truth{1, 0, 1, 1, 0};
  const auto r = classification_report(truth, truth);
  CHECK(r.accuracy == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK_FALSE(r.degenerate_precision);
}

TEST_CASE("confusion arithmetic") {
  // TP=3 FP=1 FN=1 TN=5
  const std::vector<int> pred{1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<int> truth{1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
  const auto r = classification_report(pred, truth);
  CHECK(r.tp == 3);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 5);
  CHECK(r.accuracy == doctest::Approx(0.8));
  CHECK(r.precision == doctest::Approx(0.75));
  CHECK(r.recall == doctest::Approx(0.75));
  CHECK(r.f1 == doctest::Approx(0.75));
}

TEST_CASE("degenerate denominators flag instead of aborting") {
  const std::vector<int> pred{0, 0, 0};
  const std::vector<int> truth{1, 1, 1};
  const auto r = classification_report(pred, truth);
  CHECK(r.recall == 0.0);
  CHECK(r.precision == 0.0);
  CHECK(r.degenerate_precision);
  CHECK(r.degenerate_f1);
  CHECK(r.accuracy == 0.0);
}

TEST_CASE("classification input validation") {
  const std::vector<int> a{1, 0};
  const std::vector<int> b{1};
  CHECK_THROWS_WITH_AS(classification_report(a, b),
                       doctest::Contains("LENGTH_MISMATCH"), Error);
  const std::vector<int> empty;
  CHECK_THROWS_WITH_AS(classification_report(empty, empty),
                       doctest::Contains("EMPTY_INPUT"), Error);
  const std::vector<int> bad{2, 0};
  CHECK_THROWS_WITH_AS(classification_report(bad, a),
                       doctest::Contains("NON_BINARY_LABELS"), Error);
}

TEST_CASE("mse basics and symmetry") {
  const std::vector<double> t{1.0, 2.0, 3.0};
  CHECK(mse(t, t) == 0.0);
  const std::vector<double> shifted{2.0, 3.0, 4.0};
  CHECK(mse(shifted, t) == doctest::Approx(1.0));
  CHECK(mse(shifted, t) == mse(t, shifted));

  SplitMix64 rng(55);
  std::vector<double> p(200), q(200);
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = rng.next_uniform(-5.0, 5.0);
    q[i] = rng.next_uniform(-5.0, 5.0);
  }
  const double expected = oracles::mse_two_pass(p, q);
  CHECK(mse(p, q) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("r2 basics") {
  const std::vector<double> truth{1.0, 2.0, 3.0, 4.0};
  CHECK(r2(truth, truth) == 1.0);

  const std::vector<double> mean_pred(4, 2.5);
  CHECK(r2(mean_pred, truth) == doctest::Approx(0.0));

  // Anti-correlated predictions drive SSres above SStot.
  const std::vector<double> anti{4.0, 3.0, 2.0, 1.0};
  CHECK(r2(anti, truth) < 0.0);

  // Asymmetric by construction.
  const std::vector<double> p{1.1, 2.2, 2.9, 4.3};
  CHECK(r2(p, truth) != r2(truth, p));

  const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
  CHECK_THROWS_WITH_AS(r2(p, flat), doctest::Contains("ZERO_VARIANCE"), Error);
}

TEST_CASE("reported rates stay in range") {
  SplitMix64 rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> pred(40), truth(40);
    for (size_t i = 0; i < pred.size(); ++i) {
      pred[i] = rng.next_u64() & 1;
      truth[i] = rng.next_u64() & 1;
    }
    const auto r = classification_report(pred, truth);
    for (double v : {r.accuracy, r.precision, r.recall, r.f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    std::vector<double> pd(pred.begin(), pred.end());
    std::vector<double> td(truth.begin(), truth.end());
    CHECK(mse(pd, td) >= 0.0);
  }
}
