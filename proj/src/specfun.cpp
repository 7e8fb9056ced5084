#include "smc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "smc/errors.hpp"

namespace smc::specfun {

namespace {

constexpr double kOverflowGuard = 1e290;
constexpr double kRescaleTrigger = 1e250;
constexpr double kRescale = 1e-250;

bool too_large(Complex v) {
  return std::abs(v.real()) > kOverflowGuard || std::abs(v.imag()) > kOverflowGuard ||
         !std::isfinite(v.real()) || !std::isfinite(v.imag());
}

Complex j0_direct(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0);
  }
  return std::sin(z) / z;
}

Complex j1_direct(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return z / 3.0 * (1.0 - z2 / 10.0 * (1.0 - z2 / 28.0));
  }
  return std::sin(z) / (z * z) - std::cos(z) / z;
}

}  // namespace

void sph_bessel_j_many(int n_max, Complex z, Complex* out) {
  if (n_max < 0) throw DomainError("sph_bessel_j_many: n_max < 0");
  const double az = std::abs(z);
  if (az == 0.0) {
    out[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) out[n] = 0.0;
    return;
  }
  out[0] = j0_direct(z);
  if (n_max == 0) return;

  if (az > n_max + 2.0) {
    out[1] = j1_direct(z);
    for (int k = 1; k < n_max; ++k)
      out[k + 1] = Complex(2.0 * k + 1.0) / z * out[k] - out[k - 1];
    return;
  }

  // Miller downward recurrence from a tiny seed well above n_max.
  const int start = n_max + 16 + static_cast<int>(az);
  for (int n = 0; n <= n_max; ++n) out[n] = 0.0;
  Complex fp = 0.0;           // f_{k+1}
  Complex fc = Complex(1e-280);  // f_k
  for (int k = start; k >= 1; --k) {
    const Complex fm = Complex(2.0 * k + 1.0) / z * fc - fp;
    fp = fc;
    fc = fm;
    if (std::abs(fc.real()) > kRescaleTrigger || std::abs(fc.imag()) > kRescaleTrigger) {
      fc *= kRescale;
      fp *= kRescale;
      for (int j = k; j <= n_max; ++j) out[j] *= kRescale;
    }
    if (k - 1 <= n_max) out[k - 1] = fc;
  }
  const Complex ref0 = j0_direct(z), ref1 = j1_direct(z);
  const Complex scale =
      (std::abs(out[0]) >= std::abs(out[1])) ? ref0 / out[0] : ref1 / out[1];
  for (int n = 0; n <= n_max; ++n) out[n] *= scale;
}

int sph_bessel_y_many(int n_max, Complex z, Complex* out) {
  if (n_max < 0) throw DomainError("sph_bessel_y_many: n_max < 0");
  if (z == Complex(0.0)) throw DomainError("sph_bessel_y is singular at z = 0");
  const Complex cz = std::cos(z), sz = std::sin(z);
  out[0] = -cz / z;
  if (n_max == 0) return 1;
  out[1] = -cz / (z * z) - sz / z;
  if (too_large(out[1])) return 1;
  for (int k = 1; k < n_max; ++k) {
    const Complex next = Complex(2.0 * k + 1.0) / z * out[k] - out[k - 1];
    if (too_large(next)) return k + 1;
    out[k + 1] = next;
  }
  return n_max + 1;
}

int sph_hankel1_many(int n_max, Complex z, Complex* out) {
  if (n_max < 0) throw DomainError("sph_hankel1_many: n_max < 0");
  if (z == Complex(0.0)) throw DomainError("sph_hankel1 is singular at z = 0");
  const Complex eiz = std::exp(Complex(0.0, 1.0) * z);
  if (eiz == Complex(0.0))
    throw DomainError("sph_hankel1: e^{iz} underflows, argument too deep in the upper half-plane");
  out[0] = Complex(0.0, -1.0) * eiz / z;
  if (n_max == 0) return 1;
  out[1] = -eiz * (1.0 / z + Complex(0.0, 1.0) / (z * z));
  if (too_large(out[1])) return 1;
  for (int k = 1; k < n_max; ++k) {
    const Complex next = Complex(2.0 * k + 1.0) / z * out[k] - out[k - 1];
    if (too_large(next)) return k + 1;
    out[k + 1] = next;
  }
  return n_max + 1;
}

Complex deriv_from_ladder(const Complex* f, int n, Complex z) {
  if (n == 0) return -f[1];
  return f[n - 1] - Complex(n + 1.0) / z * f[n];
}

namespace {

template <class ManyFn>
Complex scalar_from_many(ManyFn many, int n, Complex z, const char* what) {
  std::vector<Complex> buf(n + 1);
  if (many(n, z, buf.data()) < n + 1) throw DomainError(what);
  return buf[n];
}

template <class ManyFn>
Complex prime_from_many(ManyFn many, int n, Complex z, const char* what) {
  const int need = std::max(n, 1);
  std::vector<Complex> buf(need + 1);
  if (many(need, z, buf.data()) < need + 1) throw DomainError(what);
  return deriv_from_ladder(buf.data(), n, z);
}

}  // namespace

Complex sph_bessel_j(int n, Complex z) {
  std::vector<Complex> buf(n + 1);
  sph_bessel_j_many(n, z, buf.data());
  return buf[n];
}

Complex sph_bessel_y(int n, Complex z) {
  return scalar_from_many(sph_bessel_y_many, n, z, "sph_bessel_y: order overflows at this argument");
}

Complex sph_hankel1(int n, Complex z) {
  return scalar_from_many(sph_hankel1_many, n, z, "sph_hankel1: order overflows at this argument");
}

Complex sph_bessel_j_prime(int n, Complex z) {
  const int need = std::max(n, 1);
  std::vector<Complex> buf(need + 1);
  sph_bessel_j_many(need, z, buf.data());
  return deriv_from_ladder(buf.data(), n, z);
}

Complex sph_bessel_y_prime(int n, Complex z) {
  return prime_from_many(sph_bessel_y_many, n, z, "sph_bessel_y_prime: order overflows");
}

Complex sph_hankel1_prime(int n, Complex z) {
  return prime_from_many(sph_hankel1_many, n, z, "sph_hankel1_prime: order overflows");
}

double assoc_legendre(int n, int m, double x) {
  if (m < 0 || n < 0 || m > n) throw DomainError("assoc_legendre: need 0 <= m <= n");
  if (x < -1.0 || x > 1.0) throw DomainError("assoc_legendre: |x| must be <= 1");
  const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= (2.0 * k - 1.0) * somx2;
  if (n == m) return pmm;
  double pmmp1 = (2.0 * m + 1.0) * x * pmm;
  if (n == m + 1) return pmmp1;
  double pnn = 0.0;
  for (int k = m + 2; k <= n; ++k) {
    pnn = ((2.0 * k - 1.0) * x * pmmp1 - (k + m - 1.0) * pmm) / (k - m);
    pmm = pmmp1;
    pmmp1 = pnn;
  }
  return pnn;
}

void legendre_many(int n_max, double x, double* out) {
  if (n_max < 0) throw DomainError("legendre_many: n_max < 0");
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = x;
  for (int k = 1; k < n_max; ++k)
    out[k + 1] = ((2.0 * k + 1.0) * x * out[k] - k * out[k - 1]) / (k + 1.0);
}

double assoc_legendre_normalized(int n, int m, double x) {
  if (m < 0 || n < 0 || m > n) throw DomainError("assoc_legendre_normalized: need 0 <= m <= n");
  if (x < -1.0 || x > 1.0) throw DomainError("assoc_legendre_normalized: |x| must be <= 1");
  const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = std::sqrt((2.0 * m + 1.0) / 2.0);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k - 1.0) / (2.0 * k)) * somx2;
  if (n == m) return pmm;
  double pmmp1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
  if (n == m + 1) return pmmp1;
  double pnn = 0.0;
  for (int k = m + 2; k <= n; ++k) {
    const double a = std::sqrt((2.0 * k - 1.0) * (2.0 * k + 1.0) /
                               (static_cast<double>(k - m) * (k + m)));
    const double b = std::sqrt((2.0 * k + 1.0) * (k - 1.0 - m) * (k - 1.0 + m) /
                               ((2.0 * k - 3.0) * (k - m) * (k + m)));
    pnn = a * x * pmmp1 - b * pmm;
    pmm = pmmp1;
    pmmp1 = pnn;
  }
  return pnn;
}

double mode_weight(int n, int m, double theta0) {
  if (m < 0 || n < 0 || m > n) throw DomainError("mode_weight: need 0 <= m <= n");
  const double lm = (m == 0) ? 1.0 / (2.0 * M_PI) : 1.0 / M_PI;
  const double ratio = std::exp(std::lgamma(n - m + 1.0) - std::lgamma(n + m + 1.0));
  return lm * (2.0 * n + 1.0) / 2.0 * ratio * assoc_legendre(n, m, std::cos(theta0));
}

}  // namespace smc::specfun
