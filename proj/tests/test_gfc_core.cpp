#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "smc/gfc_core.hpp"
#include "smc/specfun.hpp"

using namespace smc;

namespace {

// exp(-c sqrt(s)) <-> c/(2 sqrt(pi t^3)) exp(-c^2/(4t)): a transform pair that
// is closed-form on both sides and decays super-polynomially in frequency, so
// the only reconstruction errors left are aliasing and roundoff.
FrequencySweep inverse_gaussian_sweep(double c, const FrequencyGrid& grid) {
  FrequencySweep s;
  s.grid = grid;
  s.values.resize(grid.omega_count);
  for (int k = 0; k < grid.omega_count; ++k) {
    const Complex sk(grid.decay, grid.omega(k));
    s.values[k] = std::exp(-c * std::sqrt(sk));
  }
  return s;
}

double inverse_gaussian_time(double c, double t) {
  if (t <= 0.0) return 0.0;
  return c / (2.0 * std::sqrt(M_PI * t * t * t)) * std::exp(-c * c / (4.0 * t));
}

FrequencySweep exponential_sweep(double a, const FrequencyGrid& grid) {
  FrequencySweep s;
  s.grid = grid;
  s.values.resize(grid.omega_count);
  for (int k = 0; k < grid.omega_count; ++k)
    s.values[k] = 1.0 / Complex(a + grid.decay, grid.omega(k));
  return s;
}

}  // namespace

TEST_SUITE("gfc_core") {

TEST_CASE("wavenumber squares back to the symbol and stays in the upper half-plane") {
  for (double omega : {0.0, 1e-4, 0.3, 50.0}) {
    for (double reaction : {0.0, 0.01, 2.0}) {
      if (omega == 0.0 && reaction == 0.0) continue;  // DC-singular case, never sampled
      const double diff = 1e-9;
      const Complex k = wavenumber(omega, diff, reaction);
      const Complex k2 = k * k * diff;
      CHECK(std::abs(k2 - Complex(-reaction, -omega)) <=
            1e-12 * std::abs(Complex(reaction, omega)));
      CHECK(k.imag() >= 0.0);
    }
  }
  // Pure reaction: evanescent, k on the positive imaginary axis.
  const Complex kr = wavenumber(0.0, 1e-9, 0.01);
  CHECK(kr.real() == doctest::Approx(0.0));
  CHECK(kr.imag() == doctest::Approx(std::sqrt(0.01 / 1e-9)).epsilon(1e-12));
  CHECK_THROWS_AS(wavenumber(1.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(wavenumber(1.0, 1e-9, -0.1), DomainError);
}

TEST_CASE("frequency grid exposes the contour parameters it was built from") {
  const FrequencyGrid g = make_frequency_grid(600.0, 4096, 2.0, 8.0);
  CHECK(g.window() == doctest::Approx(1200.0).epsilon(1e-12));
  CHECK(g.omega(0) == doctest::Approx(0.5 * g.omega_step).epsilon(1e-12));
  CHECK(g.decay == doctest::Approx(8.0 / 1200.0).epsilon(1e-12));
  CHECK(make_frequency_grid(600.0, 4096, 2.0, 0.0).decay == 0.0);
  CHECK_THROWS_AS(make_frequency_grid(-1.0, 4096), DomainError);
  CHECK_THROWS_AS(make_frequency_grid(600.0, 1), DomainError);
}

TEST_CASE("contour-shifted inversion reproduces a closed-form transform pair") {
  const FrequencyGrid grid = make_frequency_grid(300.0, 16384, 2.0, 8.0);
  const double c = 3.0;
  const FrequencySweep sweep = inverse_gaussian_sweep(c, grid);
  const TimeGrid tgrid = make_time_grid(0.0, 0.5, 601);
  const TimeSeries out = inverse_transform(sweep, tgrid);
  double worst = 0.0;
  for (int i = 0; i < tgrid.count; ++i)
    worst = std::max(worst, std::abs(out.values[i] - inverse_gaussian_time(c, tgrid.time(i))));
  // Peak of the exact signal is ~0.103; everything above roundoff/aliasing fails this.
  CHECK(worst < 1e-5);
}

TEST_CASE("step-aware inversion of a pure pole is exact") {
  const FrequencyGrid grid = make_frequency_grid(300.0, 8192, 2.0, 8.0);
  const double a = 0.01;
  const FrequencySweep sweep = exponential_sweep(a, grid);
  const TimeGrid tgrid = make_time_grid(0.0, 0.5, 601);
  // The pole subtraction removes the sweep entirely; the analytic term is exact.
  const TimeSeries out = inverse_transform_with_step(sweep, tgrid, 1.0, a);
  double worst = 0.0;
  for (int i = 0; i < tgrid.count; ++i)
    worst = std::max(worst, std::abs(out.values[i] - std::exp(-a * tgrid.time(i))));
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(inverse_transform_with_step(sweep, tgrid, 1.0, 0.0), DomainError);
}

TEST_CASE("inversion is linear") {
  const FrequencyGrid grid = make_frequency_grid(300.0, 8192, 2.0, 8.0);
  const FrequencySweep f2 = inverse_gaussian_sweep(2.0, grid);
  const FrequencySweep f4 = inverse_gaussian_sweep(4.0, grid);
  FrequencySweep combo;
  combo.grid = grid;
  combo.values = 0.7 * f2.values - 0.3 * f4.values;
  const TimeGrid tgrid = make_time_grid(0.0, 1.0, 301);
  InversionOptions opts;
  opts.clamp_negatives = false;
  const TimeSeries a = inverse_transform(f2, tgrid, opts);
  const TimeSeries b = inverse_transform(f4, tgrid, opts);
  const TimeSeries c = inverse_transform(combo, tgrid, opts);
  double worst = 0.0;
  for (int i = 0; i < tgrid.count; ++i)
    worst = std::max(worst, std::abs(c.values[i] - (0.7 * a.values[i] - 0.3 * b.values[i])));
  CHECK(worst < 1e-12);
}

TEST_CASE("negative reconstructions throw, mild undershoot is clamped to zero") {
  const FrequencyGrid grid = make_frequency_grid(300.0, 8192, 2.0, 8.0);
  FrequencySweep neg = inverse_gaussian_sweep(3.0, grid);
  neg.values *= -1.0;
  const TimeGrid tgrid = make_time_grid(0.0, 1.0, 301);
  CHECK_THROWS_AS(inverse_transform(neg, tgrid), NegativeConcentration);

  // A genuinely non-negative signal passes and comes out with no negatives.
  const TimeSeries ok = inverse_transform(inverse_gaussian_sweep(3.0, grid), tgrid);
  CHECK(ok.values.minCoeff() >= 0.0);
}

TEST_CASE("narrow spectral band is rejected") {
  // 1/(s+a) decays like 1/omega; with few samples the tail is far from zero.
  const FrequencyGrid grid = make_frequency_grid(600.0, 64, 1.6, 8.0);
  const FrequencySweep sweep = exponential_sweep(0.01, grid);
  const TimeGrid tgrid = make_time_grid(0.0, 1.0, 301);
  CHECK_THROWS_AS(inverse_transform(sweep, tgrid), BandwidthTooNarrow);
}

TEST_CASE("axis assembly reproduces the free-space kernel via the addition theorem") {
  // e^{ik|x - x0|} / (4 pi |x - x0|) = ik sum_n (2n+1)/(4 pi) j_n(k r<) h1_n(k r>) P_n.
  const double r1 = 150e-6, r2 = 420e-6;
  const int n_max = 60;
  for (auto [omega, reaction] : {std::pair{0.02, 0.0}, std::pair{0.0, 0.01},
                                 std::pair{2.0, 0.0}, std::pair{0.3, 0.004}}) {
    const Complex k = wavenumber(omega, 1e-9, reaction);
    std::vector<Complex> j(n_max + 2), h(n_max + 2);
    specfun::sph_bessel_j_many(n_max + 1, k * r1, j.data());
    const int valid = specfun::sph_hankel1_many(n_max + 1, k * r2, h.data());
    REQUIRE(valid > n_max);
    std::vector<Complex> radial(n_max + 1);
    for (int n = 0; n <= n_max; ++n) radial[n] = Complex(0, 1) * k * j[n] * h[n];
    for (double cg : {1.0, 0.62, -0.35, -1.0}) {
      const double dist = std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * cg);
      const Complex exact = std::exp(Complex(0, 1) * k * dist) / (4.0 * M_PI * dist);
      const Complex sum = assemble_axis(radial, cg);
      CHECK(std::abs(sum - exact) <= 1e-8 * std::abs(exact));
    }
  }
}

TEST_CASE("full angular assembly collapses to the axis form") {
  const double r1 = 150e-6, r2 = 420e-6;
  const int n_max = 40;
  const Complex k = wavenumber(0.05, 1e-9, 0.001);
  std::vector<Complex> j(n_max + 2), h(n_max + 2);
  specfun::sph_bessel_j_many(n_max + 1, k * r1, j.data());
  REQUIRE(specfun::sph_hankel1_many(n_max + 1, k * r2, h.data()) > n_max);
  std::vector<Complex> radial(n_max + 1);
  for (int n = 0; n <= n_max; ++n) radial[n] = Complex(0, 1) * k * j[n] * h[n];

  const double theta = 2.1, phi = -2.4, theta0 = 0.8, phi0 = 1.9;
  const double cg = std::cos(theta) * std::cos(theta0) +
                    std::sin(theta) * std::sin(theta0) * std::cos(phi - phi0);
  const Complex full = assemble_full(radial, theta, phi, theta0, phi0);
  const Complex axis = assemble_axis(radial, cg);
  CHECK(std::abs(full - axis) <= 1e-10 * std::abs(axis));
}

TEST_CASE("truncation diagnostics gate on contributing frequencies only") {
  std::vector<Complex> decaying(30);
  for (int n = 0; n < 30; ++n) decaying[n] = std::pow(0.3, n);
  CHECK(truncation_ratio(decaying, 0.8) < 1e-6);

  Eigen::ArrayXcd values(2);
  values << Complex(1.0, 0.0), Complex(0.9, 0.0);
  CHECK_THROWS_AS(require_sweep_truncation(values, {1e-3, 1e-9}, 1e-6),
                  TruncationNotConverged);
  CHECK_NOTHROW(require_sweep_truncation(values, {1e-9, 1e-9}, 1e-6));
  // A frequency below the band floor may have a poor ratio without failing.
  Eigen::ArrayXcd gated(2);
  gated << Complex(1.0, 0.0), Complex(1e-6, 0.0);
  CHECK_NOTHROW(require_sweep_truncation(gated, {1e-9, 1.0}, 1e-6));
}

}  // TEST_SUITE
