#include "smc/gfc_core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "smc/errors.hpp"
#include "smc/parallel.hpp"
#include "smc/specfun.hpp"

namespace smc {

Complex wavenumber(double omega, double diffusion, double reaction) {
  if (diffusion <= 0.0) throw DomainError("wavenumber: diffusion must be positive");
  if (reaction < 0.0) throw DomainError("wavenumber: reaction must be non-negative");
  Complex k = std::sqrt(Complex(-reaction, -omega) / diffusion);
  if (k.imag() < 0.0) k = -k;
  return k;
}

namespace {

void check_bandwidth(const FrequencyGrid& grid, const Eigen::ArrayXcd& values, double band_tol) {
  const int n = static_cast<int>(values.size());
  if (n != grid.omega_count || n < 2)
    throw DomainError("inverse_transform: sweep size mismatch");
  const Eigen::ArrayXd mags = values.abs();
  const double peak = mags.maxCoeff();
  if (peak == 0.0) return;
  const int tail = std::max(1, n / 100);
  const double tail_mean = mags.tail(tail).mean();
  if (tail_mean > band_tol * peak)
    throw BandwidthTooNarrow("spectral tail is " + std::to_string(tail_mean / peak) +
                             " of peak; raise omega_max");
}

// Midpoint-rule reconstruction plus an optional analytic term added pointwise.
// The quadrature part recovers the contour-damped signal, so it is scaled back
// by e^{+decay t}; the analytic term is exact and added undamped.
TimeSeries reconstruct(const FrequencySweep& sweep, const TimeGrid& grid,
                       const Eigen::ArrayXcd& values, double amplitude, double rate,
                       const InversionOptions& opts) {
  TimeSeries out;
  out.grid = grid;
  out.values.resize(grid.count);
  const double dw = sweep.grid.omega_step;
  const int nw = sweep.grid.omega_count;
  const double decay = sweep.grid.decay;
  parallel_for(grid.count, [&](int i) {
    const double t = grid.time(i);
    const Complex rot = std::polar(1.0, dw * t);
    Complex ph = std::polar(1.0, 0.5 * dw * t);
    Complex acc = 0.0;
    for (int k = 0; k < nw; ++k) {
      acc += values[k] * ph;
      ph *= rot;
    }
    double v = dw / M_PI * acc.real();
    if (decay != 0.0) v *= std::exp(decay * t);
    if (amplitude != 0.0) v += amplitude * std::exp(-rate * t);
    out.values[i] = v;
  });

  if (opts.clamp_negatives) {
    const double scale = out.values.abs().maxCoeff();
    const double tol = opts.neg_tol_frac * scale;
    const double low = out.values.minCoeff();
    if (low < -tol)
      throw NegativeConcentration("reconstructed series dips to " + std::to_string(low) +
                                  " (allowed undershoot " + std::to_string(tol) + ")");
    out.values = out.values.max(0.0);
  }
  return out;
}

}  // namespace

TimeSeries inverse_transform(const FrequencySweep& sweep, const TimeGrid& grid,
                             const InversionOptions& opts) {
  check_bandwidth(sweep.grid, sweep.values, opts.band_tol);
  return reconstruct(sweep, grid, sweep.values, 0.0, 0.0, opts);
}

TimeSeries inverse_transform_with_step(const FrequencySweep& sweep, const TimeGrid& grid,
                                       double amplitude, double rate,
                                       const InversionOptions& opts) {
  if (rate <= 0.0) throw DomainError("inverse_transform_with_step: rate must be positive");
  // On the shifted contour the e^{-rate t} component appears as a pole at
  // -(rate + decay), so that is what gets subtracted before the quadrature.
  Eigen::ArrayXcd adjusted = sweep.values;
  for (int k = 0; k < sweep.grid.omega_count; ++k)
    adjusted[k] -= amplitude / Complex(rate + sweep.grid.decay, sweep.grid.omega(k));
  // Bandwidth is judged after the subtraction: the analytic term carries the
  // slowly decaying 1/s part, only the remainder has to fit in the band.
  check_bandwidth(sweep.grid, adjusted, opts.band_tol);
  return reconstruct(sweep, grid, adjusted, amplitude, rate, opts);
}

Complex assemble_axis(std::span<const Complex> radial, double cos_gamma) {
  const int n_max = static_cast<int>(radial.size()) - 1;
  if (n_max < 0) throw DomainError("assemble_axis: empty radial profile");
  std::vector<double> pn(n_max + 1);
  specfun::legendre_many(n_max, cos_gamma, pn.data());
  Complex sum = 0.0;
  for (int n = 0; n <= n_max; ++n)
    sum += (2.0 * n + 1.0) / (4.0 * M_PI) * radial[n] * pn[n];
  return sum;
}

double truncation_ratio(std::span<const Complex> radial, double cos_gamma) {
  const int n_max = static_cast<int>(radial.size()) - 1;
  if (n_max < 1) return 0.0;
  std::vector<double> pn(n_max + 1);
  specfun::legendre_many(n_max, cos_gamma, pn.data());
  Complex sum = 0.0;
  double last = 0.0, prev = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const Complex term = (2.0 * n + 1.0) / (4.0 * M_PI) * radial[n] * pn[n];
    sum += term;
    prev = last;
    last = std::abs(term);
  }
  const double denom = std::max(std::abs(sum), 1e-300);
  return std::max(last, prev) / denom;
}

void require_sweep_truncation(const Eigen::ArrayXcd& values, const std::vector<double>& ratios,
                              double rel_tol, double band_tol) {
  if (static_cast<int>(ratios.size()) != values.size())
    throw DomainError("require_sweep_truncation: size mismatch");
  const double peak = values.abs().maxCoeff();
  if (peak == 0.0) return;
  for (int k = 0; k < values.size(); ++k) {
    if (std::abs(values[k]) >= band_tol * peak && ratios[k] > rel_tol)
      throw TruncationNotConverged("mode series not converged at omega sample " +
                                   std::to_string(k) + " (ratio " +
                                   std::to_string(ratios[k]) + ")");
  }
}

Complex assemble_full(std::span<const Complex> radial, double theta, double phi, double theta0,
                      double phi0, double rel_tol) {
  const int n_max = static_cast<int>(radial.size()) - 1;
  if (n_max < 0) throw DomainError("assemble_full: empty radial profile");
  const double x = std::cos(theta), x0 = std::cos(theta0);
  Complex sum = 0.0;
  double last_term = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double inner = 0.0;
    for (int m = 0; m <= n; ++m) {
      const double lm = (m == 0) ? 1.0 / (2.0 * M_PI) : 1.0 / M_PI;
      inner += lm * specfun::assoc_legendre_normalized(n, m, x0) *
               specfun::assoc_legendre_normalized(n, m, x) * std::cos(m * (phi - phi0));
    }
    const Complex term = radial[n] * inner;
    sum += term;
    last_term = std::abs(term);
  }
  if (n_max >= 8 && last_term > rel_tol * std::max(std::abs(sum), 1e-300))
    throw TruncationNotConverged("mode " + std::to_string(n_max) + " still contributes " +
                                 std::to_string(last_term / std::max(std::abs(sum), 1e-300)) +
                                 " relative");
  return sum;
}

}  // namespace smc
