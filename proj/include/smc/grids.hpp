#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>

#include "smc/errors.hpp"

namespace smc {

using Complex = std::complex<double>;

/// Midpoint frequency grid: omega(k) = (k + 1/2) * omega_step, k = 0..omega_count-1.
/// Never samples omega = 0, so 1/(i omega)-type spectra stay finite on the grid.
///
/// `decay` shifts the Laplace contour: sweeps taken over this grid hold values of
/// the transform at s = decay + i*omega, i.e. transforms of e^{-decay t} f(t)
/// (equivalently, every region gains an extra first-order loss `decay`).
/// inverse_transform multiplies the reconstruction by e^{+decay t} to undo it.
/// Midpoint sampling periodises the time signal with alternating sign,
/// f(t) - f(t + W) + f(t + 2W) - ..., so a slowly decaying tail leaks back into
/// early times as a negative offset; the contour shift suppresses wrap m by
/// e^{-decay m W} at no extra solver cost.
struct FrequencyGrid {
  double omega_step = 0.0;
  int omega_count = 0;
  double decay = 0.0;

  double omega(int k) const { return (k + 0.5) * omega_step; }
  double omega_max() const { return omega_count * omega_step; }
  /// Period of the reconstructed time signal (aliasing window).
  double window() const { return 2.0 * M_PI / omega_step; }
};

/// Builds a grid whose aliasing window is `oversample` times the simulated duration.
/// `alias_damping` is the dimensionless decay * window product: each aliased wrap of
/// the reconstruction is suppressed by e^{-alias_damping}. Zero disables the shift.
inline FrequencyGrid make_frequency_grid(double duration, int omega_count = 8192,
                                         double oversample = 1.6,
                                         double alias_damping = 8.0) {
  if (duration <= 0.0 || omega_count < 2 || alias_damping < 0.0)
    throw DomainError("make_frequency_grid: bad arguments");
  FrequencyGrid g;
  g.omega_step = 2.0 * M_PI / (oversample * duration);
  g.omega_count = omega_count;
  g.decay = alias_damping * g.omega_step / (2.0 * M_PI);
  return g;
}

/// One complex-valued quantity sampled on a FrequencyGrid.
struct FrequencySweep {
  FrequencyGrid grid;
  Eigen::ArrayXcd values;
};

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int count = 0;

  double time(int i) const { return t0 + i * dt; }
  double t_end() const { return time(count - 1); }
};

inline TimeGrid make_time_grid(double t0, double dt, int count) {
  if (dt <= 0.0 || count < 1) throw DomainError("make_time_grid: bad arguments");
  return TimeGrid{t0, dt, count};
}

struct TimeSeries {
  TimeGrid grid;
  Eigen::ArrayXd values;

  int index_of_peak() const {
    int idx = 0;
    values.maxCoeff(&idx);
    return idx;
  }
  double peak() const { return values.maxCoeff(); }
  double time_of_peak() const { return grid.time(index_of_peak()); }
};

}  // namespace smc
