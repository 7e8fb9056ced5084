#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "smc/quadrature.hpp"
#include "smc/specfun.hpp"

using namespace smc::specfun;

TEST_SUITE("specfun") {

TEST_CASE("spherical Bessel closed forms at real arguments") {
  // j_1(1) = sin(1) - cos(1), frozen.
  CHECK(sph_bessel_j(1, 1.0).real() == doctest::Approx(0.30116867893975674).epsilon(1e-14));
  CHECK(std::abs(sph_bessel_j(1, 1.0).imag()) < 1e-18);
  // j_0(z) = sin(z)/z at a genuinely complex argument.
  const Complex z(2.0, 1.5);
  const Complex j0 = std::sin(z) / z;
  CHECK(std::abs(sph_bessel_j(0, z) - j0) < 1e-14 * std::abs(j0));
  // y_0(z) = -cos(z)/z.
  const Complex y0 = -std::cos(z) / z;
  CHECK(std::abs(sph_bessel_y(0, z) - y0) < 1e-14 * std::abs(y0));
  // h1_0(z) = -i e^{iz}/z.
  const Complex h0 = -Complex(0, 1) * std::exp(Complex(0, 1) * z) / z;
  CHECK(std::abs(sph_hankel1(0, z) - h0) < 1e-14 * std::abs(h0));
}

TEST_CASE("ladder derivative identity at order zero") {
  const Complex z(0.8, 0.3);
  Complex j[2];
  sph_bessel_j_many(1, z, j);
  CHECK(std::abs(deriv_from_ladder(j, 0, z) + j[1]) < 1e-15);
}

TEST_CASE("Wronskian of j and h1 equals i/z^2 across regimes") {
  // Exercises both the upward and the Miller-downward branches of j and the
  // valid-prefix contract of h1.
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int checked = 0;
  for (int draw = 0; draw < 300; ++draw) {
    const int n_max = static_cast<int>(u01(rng) * 60);
    const double mag = std::exp(std::log(0.1) + u01(rng) * (std::log(80.0) - std::log(0.1)));
    const double arg = u01(rng) * M_PI * 0.98 + 0.01;
    const Complex z = mag * Complex(std::cos(arg), std::sin(arg));
    std::vector<Complex> j(n_max + 2), h(n_max + 2);
    sph_bessel_j_many(n_max + 1, z, j.data());
    const int valid = sph_hankel1_many(n_max + 1, z, h.data());
    const int n = std::min(n_max, valid - 2);
    if (n < 0) continue;
    const Complex jp = deriv_from_ladder(j.data(), n, z);
    const Complex hp = deriv_from_ladder(h.data(), n, z);
    const Complex wronskian = j[n] * hp - jp * h[n];
    const Complex expected = Complex(0, 1) / (z * z);
    CHECK(std::abs(wronskian - expected) <= 1e-8 * std::abs(expected));
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("associated Legendre closed forms") {
  // P_3^2(x) = 15 x (1 - x^2); frozen at x = 0.4.
  CHECK(assoc_legendre(3, 2, 0.4) == doctest::Approx(5.04).epsilon(1e-13));
  // P_5(0.3) from the quintic closed form.
  double p[6];
  legendre_many(5, 0.3, p);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(-0.365).epsilon(1e-14));
  CHECK(p[5] == doctest::Approx(0.34538625).epsilon(1e-13));
  // m = 0 reduces to plain Legendre.
  CHECK(assoc_legendre(5, 0, 0.3) == doctest::Approx(p[5]).epsilon(1e-13));
}

TEST_CASE("normalized associated Legendre matches the explicit norm factor") {
  // sqrt((2n+1)/2 * (n-m)!/(n+m)!) P_n^m; frozen at (3, 2, 0.4).
  CHECK(assoc_legendre_normalized(3, 2, 0.4) ==
        doctest::Approx(0.8607438643406062).epsilon(1e-12));
}

TEST_CASE("normalized associated Legendre has unit L2 norm") {
  const smc::GaussLegendre gl = smc::gauss_legendre(64);
  for (auto [n, m] : {std::pair{10, 3}, std::pair{40, 7}, std::pair{25, 0}}) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = assoc_legendre_normalized(n, m, gl.nodes[i]);
      norm2 += gl.weights[i] * v * v;
    }
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("mode weight reduces to the monopole constant") {
  CHECK(mode_weight(0, 0, 0.77) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-14));
  // m = 0 weight is (2n+1)/(4 pi) P_n(cos theta0).
  double p[4];
  legendre_many(3, std::cos(0.6), p);
  CHECK(mode_weight(3, 0, 0.6) == doctest::Approx(7.0 / (4.0 * M_PI) * p[3]).epsilon(1e-12));
}

}  // TEST_SUITE
