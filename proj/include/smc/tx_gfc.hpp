#pragma once

#include <Eigen/Core>

#include "smc/gfc_core.hpp"
#include "smc/grids.hpp"
#include "smc/spheroid.hpp"

namespace smc {

/// Transmitter-side problem: porous spheroid releasing into free medium.
struct TxSpheroid {
  SpheroidSpec spec;
  MediumSpec medium;
  DerivedPorosity der;
};

TxSpheroid make_tx(const SpheroidSpec& spec, const MediumSpec& medium);

/// Piecewise radial solution coefficients for one mode:
/// r < r0: inner * j_n(k_in r); r0 < r < gamma: ann_j * j_n(k_in r) + ann_h * h1_n(k_in r);
/// r > gamma: outer * h1_n(k_out r). For the receiver problem the annulus lies
/// outside the spheroid instead (gamma < r < r0, wavenumber k_out). The
/// annulus pairs j_n with h1_n, not y_n: j_n grows and h1_n decays along
/// +Im(k) r, so the representation stays cancellation-free at strongly
/// complex arguments.
struct ModeCoefficients {
  Complex inner = 0.0;
  Complex ann_j = 0.0;
  Complex ann_h = 0.0;
  Complex outer = 0.0;
  double residual = 0.0;
};

/// Boundary-condition solve for mode n, point source at radius r0 < gamma
/// inside the transmitter. r0 = 0 is the centered source (n = 0 only).
ModeCoefficients solve_tx_mode(const TxSpheroid& tx, double omega, int n, double r0);

/// Cell-position-averaged field at query radius r_query (angular dependence
/// averages out, so this is exact with the n = 0 mode and a source-radius
/// quadrature weighted 3 r0^2 / gamma^3).
FrequencySweep tx_volume_avg_sweep(const TxSpheroid& tx, double r_query,
                                   const FrequencyGrid& grid, int source_nodes = 64);

/// Full point-source field at a query point.
FrequencySweep tx_point_sweep(const TxSpheroid& tx, const SphericalPoint& source,
                              const SphericalPoint& query, const FrequencyGrid& grid,
                              const SeriesTruncation& trunc = {});

/// Expected fraction of a released molecule's probability mass inside and
/// outside the spheroid (cell-averaged source), via exact radial antiderivatives.
struct TxMassSweeps {
  FrequencySweep inside;
  FrequencySweep outside;
};
TxMassSweeps tx_mass_sweeps(const TxSpheroid& tx, const FrequencyGrid& grid,
                            int source_nodes = 64);

/// Release-rate spectrum g_hat = 1 - s N_inside_hat on the grid's contour
/// s = decay + i omega.
FrequencySweep tx_release_spectrum(const TxSpheroid& tx, const FrequencyGrid& grid,
                                   int source_nodes = 64);

/// Time-domain release profile on bin centers t_k = (k + 1/2) dt.
/// g holds bin averages (N_in(k dt) - N_in((k+1) dt)) / dt with N_in(0) = 1
/// exact, so dt * sum(g) telescopes to released_total with no quadrature error.
/// Builds its own frequency grid: the release-rate onset behaves like 1/sqrt(t),
/// so the inversion needs a wider aliasing window and gentler contour damping
/// than the channel defaults to keep late-time bins quiet.
struct ReleaseProfile {
  TimeGrid grid;
  Eigen::ArrayXd g;                // 1/s
  Eigen::ArrayXd n_inside;         // fraction still inside at bin centers
  Eigen::ArrayXd n_inside_edges;   // same fraction at bin edges k*dt, size bins+1
  double released_total = 0.0;
};
ReleaseProfile release_rate(const TxSpheroid& tx, double dt, double duration,
                            int source_nodes = 64);

}  // namespace smc
