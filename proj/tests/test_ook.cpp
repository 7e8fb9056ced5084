#include <doctest.h>

#include <cmath>
#include <random>

#include "smc/errors.hpp"
#include "smc/ook.hpp"

using namespace smc;

namespace {

OokConfig cfg_with_memory(int j) {
  OokConfig c;
  c.slot_duration = 600.0;
  c.per_cell_release = 1.0;
  c.isi_memory = j;
  c.t_sample = 300.0;
  return c;
}

}  // namespace

TEST_SUITE("ook") {

TEST_CASE("decision threshold: closed form and limits") {
  // y / ln(1 + y/I) at (20, 5), frozen.
  CHECK(threshold(20.0, 5.0) == doctest::Approx(12.426698691192238).epsilon(1e-14));
  CHECK(threshold(10.0, 0.0) == 0.0);
  CHECK(std::isinf(threshold(0.0, 5.0)));
  CHECK_THROWS_AS(threshold(-1.0, 5.0), DomainError);
  // At the threshold the two Poisson log-likelihoods coincide:
  // xi * ln(1 + y/I) = y by construction, via log1p for small y/I.
  for (double y : {0.5, 8.0, 120.0}) {
    for (double i : {1e-6, 2.0, 500.0}) {
      const double xi = threshold(y, i);
      CHECK(std::abs(xi * std::log1p(y / i) - y) < 1e-9 * y);
    }
  }
}

TEST_CASE("decision rule breaks ties toward zero") {
  const double xi = threshold(20.0, 5.0);
  CHECK(decide(13.0, xi) == 1);
  CHECK(decide(12.0, xi) == 0);
  CHECK(decide(5.0, 5.0) == 0);
}

TEST_CASE("Poisson tail functions agree with closed forms and each other") {
  CHECK(poisson_cdf(0, 3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(poisson_cdf(2, 1.0) == doctest::Approx(0.9196986029286058).epsilon(1e-14));
  CHECK(poisson_sf(12, 5.0) == doctest::Approx(0.002018851627437035).epsilon(1e-13));
  for (int k : {0, 3, 11, 30}) {
    CHECK(poisson_cdf(k, 7.3) + poisson_sf(k, 7.3) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(poisson_cdf(-1, 2.0) == 0.0);
  CHECK(poisson_sf(-1, 2.0) == 1.0);
  CHECK(poisson_cdf(5, 0.0) == 1.0);
  CHECK(poisson_sf(5, 0.0) == 0.0);
}

TEST_CASE("memoryless link error rate is half the miss probability") {
  // With no interference the threshold is 0: a 1-bit errs only on a zero
  // count, a 0-bit never errs. BER = e^{-y}/2.
  const DetectionStats stats = ber_exact(cfg_with_memory(0), 10.0, IsiProfile{});
  CHECK(stats.ber == doctest::Approx(2.2699964881242427e-05).epsilon(1e-12));
  // A dead link decides 0 always: half the bits are wrong.
  CHECK(ber_exact(cfg_with_memory(0), 0.0, IsiProfile{}).ber == 0.5);
}

TEST_CASE("exact enumeration matches a Monte Carlo run of the same detector") {
  IsiProfile isi;
  isi.values = {2.0, 1.0};
  const OokConfig cfg = cfg_with_memory(2);
  const DetectionStats exact = ber_exact(cfg, 8.0, isi);

  std::mt19937_64 rng(905531u);
  std::uniform_int_distribution<int> bit(0, 1);
  const int trials = 1000000;
  int errors = 0;
  for (int t = 0; t < trials; ++t) {
    const int b0 = bit(rng), b1 = bit(rng), b2 = bit(rng);
    const double i_mean = b1 * isi.values[0] + b2 * isi.values[1];
    const double mean = b0 * 8.0 + i_mean;
    int observed = 0;
    if (mean > 0.0) {
      std::poisson_distribution<int> pois(mean);
      observed = pois(rng);
    }
    const double xi = threshold(8.0, i_mean);
    const int detected = std::isinf(xi) ? 0 : decide(observed, xi);
    errors += detected != b0;
  }
  const double mc = static_cast<double>(errors) / trials;
  const double sigma = std::sqrt(exact.ber * (1.0 - exact.ber) / trials);
  CHECK(std::abs(mc - exact.ber) <= 3.0 * sigma);
}

TEST_CASE("per-pattern thresholds never lose to the aggregate one") {
  IsiProfile isi;
  isi.values = {3.0, 1.5, 0.7};
  const OokConfig cfg = cfg_with_memory(3);
  const double per = ber_exact(cfg, 12.0, isi, ThresholdPolicy::kPerPattern).ber;
  const double agg = ber_exact(cfg, 12.0, isi, ThresholdPolicy::kAggregate).ber;
  CHECK(per <= agg + 1e-15);
  CHECK(per > 0.0);
}

TEST_CASE("guard rails on the enumeration") {
  IsiProfile isi;
  isi.values = {1.0};
  CHECK_THROWS_AS(ber_exact(cfg_with_memory(21), 5.0, isi), MemoryTooLarge);
  CHECK_THROWS_AS(ber_exact(cfg_with_memory(-1), 5.0, isi), DomainError);
  CHECK_THROWS_AS(ber_exact(cfg_with_memory(2), 5.0, isi), DomainError);  // short profile
  OokConfig no_sample = cfg_with_memory(0);
  no_sample.t_sample = 0.0;
  CHECK_THROWS_AS(ber_exact(no_sample, 5.0, IsiProfile{}), DomainError);
}

}  // TEST_SUITE
