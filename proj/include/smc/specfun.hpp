#pragma once

#include <complex>

namespace smc::specfun {

using Complex = std::complex<double>;

/// Spherical Bessel j_n for n = 0..n_max. Always fills every entry.
/// Upward recurrence when |z| > n_max + 2 (oscillatory regime, stable);
/// otherwise Miller downward recurrence normalized against j_0 or j_1,
/// whichever is larger. The switchover is exercised by the Wronskian tests.
void sph_bessel_j_many(int n_max, Complex z, Complex* out);

/// Spherical Bessel y_n (upward from closed-form y_0, y_1; y is the dominant
/// solution so upward is stable). Returns the count of valid leading entries:
/// for |z| << n the magnitudes grow like (2n-1)!!/|z|^{n+1} and the ladder is
/// cut before overflow. Callers must truncate mode sums at the valid count.
int sph_bessel_y_many(int n_max, Complex z, Complex* out);

/// Outgoing spherical Hankel h1_n = j_n + i y_n, computed upward from the
/// closed forms h1_0 = -i e^{iz}/z, h1_1 = -e^{iz}(1/z + i/z^2) so no
/// cancellation occurs for Im z > 0. Same valid-prefix contract as y.
int sph_hankel1_many(int n_max, Complex z, Complex* out);

Complex sph_bessel_j(int n, Complex z);
Complex sph_bessel_y(int n, Complex z);
Complex sph_hankel1(int n, Complex z);

/// Derivative from a filled ladder: f_n'(z) = f_{n-1}(z) - ((n+1)/z) f_n(z)
/// for n >= 1 and f_0'(z) = -f_1(z). Ladder must be valid through max(n, 1).
Complex deriv_from_ladder(const Complex* f, int n, Complex z);

Complex sph_bessel_j_prime(int n, Complex z);
Complex sph_bessel_y_prime(int n, Complex z);
Complex sph_hankel1_prime(int n, Complex z);

/// Associated Legendre P_n^m(x) without the Condon-Shortley phase:
/// P_m^m = (2m-1)!! (1-x^2)^{m/2}.
double assoc_legendre(int n, int m, double x);

/// Legendre P_n(x) for n = 0..n_max.
void legendre_many(int n_max, double x, double* out);

/// Orthonormal variant (unit L2 norm on [-1, 1]); bounded for large n, m, so
/// products of two of these replace P * (n-m)!/(n+m)! * P without overflow.
double assoc_legendre_normalized(int n, int m, double x);

/// Weight of mode (n, m) for a point source at polar angle theta0:
/// L_m * ((2n+1)/2) * ((n-m)!/(n+m)!) * P_n^m(cos theta0),
/// with L_0 = 1/(2 pi) and L_m = 1/pi for m >= 1.
double mode_weight(int n, int m, double theta0);

}  // namespace smc::specfun
