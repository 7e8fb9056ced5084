#pragma once

#include <vector>

#include "smc/gfc_core.hpp"
#include "smc/grids.hpp"
#include "smc/spheroid.hpp"
#include "smc/tx_gfc.hpp"

namespace smc {

/// Receiver-side problem: porous spheroid (optionally absorbing at rate k_f)
/// hit by a point source at radius r0 > gamma in the free medium.
struct RxSpheroid {
  SpheroidSpec spec;
  MediumSpec medium;
  DerivedPorosity der;
};

RxSpheroid make_rx(const SpheroidSpec& spec, const MediumSpec& medium);

/// Mode solve; regions are r < gamma (inner, wavenumber k_in with degradation),
/// gamma < r < r0 (ann_j/ann_h, free-medium k_out), r > r0 (outer, k_out).
ModeCoefficients solve_rx_mode(const RxSpheroid& rx, double omega, int n, double r0);

/// Field sweeps at several probe points for one source, sharing mode solves.
std::vector<FrequencySweep> rx_point_sweeps(const RxSpheroid& rx, const SphericalPoint& source,
                                            const std::vector<SphericalPoint>& probes,
                                            const FrequencyGrid& grid,
                                            const SeriesTruncation& trunc = {});

FrequencySweep rx_point_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                              const SphericalPoint& probe, const FrequencyGrid& grid,
                              const SeriesTruncation& trunc = {});

/// Field just inside / just outside the surface point facing the source.
struct BoundaryPairSweeps {
  FrequencySweep inside;
  FrequencySweep outside;
};
BoundaryPairSweeps rx_boundary_pair(const RxSpheroid& rx, const SphericalPoint& source,
                                    const FrequencyGrid& grid,
                                    const SeriesTruncation& trunc = {});

/// Observation kernel q_hat: volume integral of the field over the spheroid
/// ball, tensor Gauss-Legendre in (r, cos theta), azimuth analytic.
FrequencySweep rx_observation_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                                    const FrequencyGrid& grid,
                                    const SeriesTruncation& trunc = {}, int nodes_r = 48,
                                    int nodes_theta = 48);

/// Same integral via the exact antiderivative of the surviving n = 0 mode
/// (int r^2 j_0(kr) dr = r^2 j_1(kr)/k); oracle for the quadrature path.
FrequencySweep rx_observation_sweep_exact(const RxSpheroid& rx, const SphericalPoint& source,
                                          const FrequencyGrid& grid);

/// Field averaged over a small ball (matches a particle-count probe).
/// A ball straddling the spheroid surface mixes the jump-discontinuous inside
/// and outside fields; that is rejected unless allow_straddle is set, which is
/// exactly what a counting sphere centered on the boundary measures.
FrequencySweep rx_ball_avg_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                                 const SphericalPoint& probe_center, double probe_radius,
                                 const FrequencyGrid& grid, const SeriesTruncation& trunc = {},
                                 int nodes_per_axis = 6, bool allow_straddle = false);

/// Shell-averaged concentration just inside/outside the surface,
/// [gamma - delta, gamma] and [gamma, gamma + delta] (n = 0 exact integrals).
struct ShellPairSweeps {
  FrequencySweep inside;
  FrequencySweep outside;
};
ShellPairSweeps rx_shell_pair(const RxSpheroid& rx, const SphericalPoint& source, double delta,
                              const FrequencyGrid& grid);

/// Probability mass inside the ball and outside it (annulus + far field),
/// exact antiderivatives; with degradation the total decays below 1.
struct RxMassSweeps {
  FrequencySweep inside;
  FrequencySweep outside;
};
RxMassSweeps rx_mass_sweeps(const RxSpheroid& rx, double r0, const FrequencyGrid& grid);

}  // namespace smc
