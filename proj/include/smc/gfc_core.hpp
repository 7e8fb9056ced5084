#pragma once

#include <span>

#include "smc/grids.hpp"

namespace smc {

/// Complex wavenumber of D_region * (C'' + ...) - reaction * C = i omega C:
/// k = sqrt((-reaction - i omega) / D_region), branch chosen so Im(k) >= 0
/// (outgoing waves decay). omega = 0 with reaction = 0 gives k = 0, the
/// DC-singular case; the midpoint frequency grid never lands there.
Complex wavenumber(double omega, double diffusion, double reaction);

struct InversionOptions {
  /// Undershoot clamp: values in [-neg_tol_frac * peak, 0) are set to 0;
  /// anything below that throws NegativeConcentration.
  double neg_tol_frac = 1e-3;
  bool clamp_negatives = true;
  /// Spectral-tail gate: mean |C| over the last 1% of samples must stay below
  /// band_tol * max |C| or BandwidthTooNarrow is thrown.
  double band_tol = 1e-3;
};

/// Real time series from a one-sided sweep. Uses the midpoint rule
/// c(t) = (domega / pi) * sum_k Re(C_k e^{i omega_k t}); the negative-frequency
/// half is the conjugate by construction, so c(t) is exactly real.
TimeSeries inverse_transform(const FrequencySweep& sweep, const TimeGrid& grid,
                             const InversionOptions& opts = {});

/// Same, for signals with a known step discontinuity amplitude*u(t) at t = 0:
/// amplitude/(rate + i omega) is removed before inversion and amplitude *
/// e^{-rate t} added back, which eliminates Gibbs ringing from the jump.
TimeSeries inverse_transform_with_step(const FrequencySweep& sweep, const TimeGrid& grid,
                                       double amplitude, double rate,
                                       const InversionOptions& opts = {});

struct SeriesTruncation {
  int n_max = 60;
  double rel_tol = 1e-6;
};

/// Sum of the mode series for a source rotated onto the polar axis:
///   C = sum_n ((2n+1)/(4 pi)) R_n P_n(cos gamma),
/// cos gamma the angle cosine between query and source directions. This is the
/// exact collapsed form of the full (n, m) sum below.
Complex assemble_axis(std::span<const Complex> radial, double cos_gamma);

/// Full double sum over (n, m) with per-mode weights
///   H_mn = L_m ((2n+1)/2) ((n-m)!/(n+m)!) P_n^m(cos theta0)
/// and azimuthal factor cos(m (phi - phi0)). Throws TruncationNotConverged if
/// the last mode still contributes more than rel_tol of the result.
Complex assemble_full(std::span<const Complex> radial, double theta, double phi, double theta0,
                      double phi0, double rel_tol = 1e-6);

/// Last-mode-to-sum magnitude ratio for a radial profile; sweeps use this to
/// gate truncation checks to frequencies that actually contribute.
double truncation_ratio(std::span<const Complex> radial, double cos_gamma);

/// Post-sweep truncation gate: every frequency whose magnitude exceeds
/// band_tol * peak must have its mode-series ratio at or below rel_tol.
void require_sweep_truncation(const Eigen::ArrayXcd& values, const std::vector<double>& ratios,
                              double rel_tol, double band_tol = 1e-3);

}  // namespace smc
