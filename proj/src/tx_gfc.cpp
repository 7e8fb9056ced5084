#include "smc/tx_gfc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "smc/errors.hpp"
#include "smc/parallel.hpp"
#include "smc/quadrature.hpp"
#include "smc/specfun.hpp"
#include "ladders.hpp"
#include "solve4.hpp"

namespace smc {

using detail::Ladder;
using detail::ladder_h;
using detail::ladder_j;
using specfun::deriv_from_ladder;

TxSpheroid make_tx(const SpheroidSpec& spec, const MediumSpec& medium) {
  return TxSpheroid{spec, medium, derive_porosity(spec, medium)};
}

namespace {

struct TxBatch {
  Complex k1, k2;  // inside / outside wavenumbers
  double r0 = 0.0;
  std::vector<ModeCoefficients> modes;  // 0..n_use
  int n_use = -1;
};

// Rows: value jump kappa at gamma, flux continuity at gamma, value continuity
// at r0, derivative jump -1/D_eff at r0. Unknowns (inner, ann_j, ann_h, outer).
// The annulus basis is {j_n, h1_n}: with strongly complex wavenumbers j_n
// grows and h1_n decays going outward, so neither coefficient has to cancel
// the other exponentially (a {j_n, y_n} pair loses all digits once
// Im(k) r > ~18 because both members grow like e^{Im(k) r}).
// `decay` is the grid's Laplace contour shift: it acts as an extra first-order
// loss in both regions, and inverse_transform removes it again in time domain.
TxBatch tx_solve_batch(const TxSpheroid& tx, double omega, double r0, int n_max,
                       double decay = 0.0) {
  const double gamma = tx.spec.radius;
  const double de = tx.der.d_eff, d = tx.medium.diffusion_coeff, kap = tx.der.kappa;
  TxBatch batch;
  batch.r0 = r0;
  batch.k1 = wavenumber(omega, de, tx.spec.degradation_rate + decay);
  batch.k2 = wavenumber(omega, d, decay);

  const int order = std::max(n_max, 1);
  if (r0 == 0.0) {
    // Centered source: only n = 0 survives; the h_0 coefficient is fixed by the
    // 1/(4 pi D_eff r) singularity and the two surface rows give (ann_j, outer).
    const Complex b = Complex(0.0, 1.0) * batch.k1 / de;
    const Ladder jg = ladder_j(1, batch.k1 * gamma), hg1 = ladder_h(1, batch.k1 * gamma),
                 hg = ladder_h(1, batch.k2 * gamma);
    Eigen::Matrix2cd m;
    Eigen::Vector2cd rhs;
    m(0, 0) = jg.v[0];
    m(0, 1) = -kap * hg.v[0];
    m(1, 0) = de * batch.k1 * deriv_from_ladder(jg.data(), 0, batch.k1 * gamma);
    m(1, 1) = -d * batch.k2 * deriv_from_ladder(hg.data(), 0, batch.k2 * gamma);
    rhs[0] = -b * hg1.v[0];
    rhs[1] = -de * batch.k1 * b * deriv_from_ladder(hg1.data(), 0, batch.k1 * gamma);
    const Eigen::Vector2cd sol = m.fullPivLu().solve(rhs);
    const Eigen::Vector2cd res = rhs - m * sol;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double denom = std::abs(m(i, 0) * sol[0]) + std::abs(m(i, 1) * sol[1]) + std::abs(rhs[i]);
      if (denom > 0.0) worst = std::max(worst, std::abs(res[i]) / denom);
    }
    ModeCoefficients c;
    c.inner = 0.0;
    c.ann_j = sol[0];
    c.ann_h = b;
    c.outer = sol[1];
    c.residual = worst;
    batch.modes.assign(std::max(n_max + 1, 1), ModeCoefficients{});
    batch.modes[0] = c;
    batch.n_use = n_max;
    return batch;
  }

  const Ladder jr = ladder_j(order, batch.k1 * r0), hr1 = ladder_h(order, batch.k1 * r0);
  const Ladder jg = ladder_j(order, batch.k1 * gamma), hg1 = ladder_h(order, batch.k1 * gamma);
  const Ladder hg = ladder_h(order, batch.k2 * gamma);
  const int valid = std::min({hr1.valid, hg1.valid, hg.valid});
  batch.n_use = std::min(n_max, valid - 1);

  const Complex zr = batch.k1 * r0, zg1 = batch.k1 * gamma, zg2 = batch.k2 * gamma;
  for (int n = 0; n <= batch.n_use; ++n) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    m(0, 1) = jg.v[n];
    m(0, 2) = hg1.v[n];
    m(0, 3) = -kap * hg.v[n];
    m(1, 1) = de * batch.k1 * deriv_from_ladder(jg.data(), n, zg1);
    m(1, 2) = de * batch.k1 * deriv_from_ladder(hg1.data(), n, zg1);
    m(1, 3) = -d * batch.k2 * deriv_from_ladder(hg.data(), n, zg2);
    m(2, 0) = jr.v[n];
    m(2, 1) = -jr.v[n];
    m(2, 2) = -hr1.v[n];
    const double w = r0 * r0;
    m(3, 0) = -w * batch.k1 * deriv_from_ladder(jr.data(), n, zr);
    m(3, 1) = w * batch.k1 * deriv_from_ladder(jr.data(), n, zr);
    m(3, 2) = w * batch.k1 * deriv_from_ladder(hr1.data(), n, zr);
    rhs[3] = -1.0 / de;
    const detail::Solve4Result s = detail::solve4(m, rhs);
    ModeCoefficients c;
    c.inner = s.x[0];
    c.ann_j = s.x[1];
    c.ann_h = s.x[2];
    c.outer = s.x[3];
    c.residual = s.residual;
    batch.modes.push_back(c);
  }
  return batch;
}

// Radial profile of the point-source field at radius r, one entry per mode.
// r <= r0: inner branch; r0 < r <= gamma: annulus; r > gamma: outgoing.
std::vector<Complex> tx_radial_profile(const TxSpheroid& tx, const TxBatch& batch, double r) {
  if (batch.r0 == 0.0 && r == 0.0)
    throw DomainError("tx query point coincides with the centered source");
  const double gamma = tx.spec.radius;
  const int n_use = batch.n_use;
  std::vector<Complex> radial(n_use + 1, Complex(0.0));
  if (r > gamma) {
    const Ladder h = ladder_h(std::max(n_use, 1), batch.k2 * r);
    const int top = std::min(n_use, h.valid - 1);
    for (int n = 0; n <= top; ++n) radial[n] = batch.modes[n].outer * h.v[n];
  } else if (r <= batch.r0) {
    const Ladder j = ladder_j(std::max(n_use, 1), batch.k1 * r);
    for (int n = 0; n <= n_use; ++n) radial[n] = batch.modes[n].inner * j.v[n];
  } else {
    // For a centered source (r0 = 0) the whole inside solution lives in the
    // annulus coefficients, so this branch covers it too.
    const Ladder j = ladder_j(std::max(n_use, 1), batch.k1 * r);
    const Ladder h = ladder_h(std::max(n_use, 1), batch.k1 * r);
    const int top = std::min(n_use, h.valid - 1);
    for (int n = 0; n <= top; ++n)
      radial[n] = batch.modes[n].ann_j * j.v[n] + batch.modes[n].ann_h * h.v[n];
  }
  return radial;
}

struct SourceQuadrature {
  std::vector<double> r0;      // node radii
  std::vector<double> weight;  // includes the 3 r0^2 / gamma^3 density
};

SourceQuadrature source_quadrature(double gamma, int nodes, double split_at = -1.0) {
  SourceQuadrature q;
  const GaussLegendre base = gauss_legendre(nodes);
  auto add_segment = [&](double a, double b) {
    const GaussLegendre seg = base.mapped(a, b);
    for (int i = 0; i < nodes; ++i) {
      q.r0.push_back(seg.nodes[i]);
      q.weight.push_back(seg.weights[i] * 3.0 * seg.nodes[i] * seg.nodes[i] /
                         (gamma * gamma * gamma));
    }
  };
  if (split_at > 0.0 && split_at < gamma) {
    add_segment(0.0, split_at);
    add_segment(split_at, gamma);
  } else {
    add_segment(0.0, gamma);
  }
  return q;
}

}  // namespace

ModeCoefficients solve_tx_mode(const TxSpheroid& tx, double omega, int n, double r0) {
  if (n < 0) throw DomainError("solve_tx_mode: n < 0");
  if (r0 < 0.0 || r0 >= tx.spec.radius)
    throw DomainError("solve_tx_mode: source radius must lie inside the spheroid");
  const TxBatch batch = tx_solve_batch(tx, omega, r0, n);
  if (batch.n_use < n)
    throw DomainError("solve_tx_mode: mode order exceeds representable ladder at this argument");
  return batch.modes[n];
}

FrequencySweep tx_volume_avg_sweep(const TxSpheroid& tx, double r_query,
                                   const FrequencyGrid& grid, int source_nodes) {
  if (r_query < 0.0) throw DomainError("tx_volume_avg_sweep: negative query radius");
  const double gamma = tx.spec.radius;
  const SourceQuadrature q =
      source_quadrature(gamma, source_nodes, r_query < gamma ? r_query : -1.0);
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const double omega = grid.omega(kidx);
    Complex acc = 0.0;
    for (size_t i = 0; i < q.r0.size(); ++i) {
      const TxBatch batch = tx_solve_batch(tx, omega, q.r0[i], 0, grid.decay);
      const std::vector<Complex> radial = tx_radial_profile(tx, batch, r_query);
      acc += q.weight[i] * radial[0] / (4.0 * M_PI);
    }
    sweep.values[kidx] = acc;
  });
  return sweep;
}

FrequencySweep tx_point_sweep(const TxSpheroid& tx, const SphericalPoint& source,
                              const SphericalPoint& query, const FrequencyGrid& grid,
                              const SeriesTruncation& trunc) {
  if (source.r < 0.0 || source.r >= tx.spec.radius)
    throw DomainError("tx_point_sweep: source must lie inside the spheroid");
  const double cg = cos_angle_between(query, source);
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.values.resize(grid.omega_count);
  std::vector<double> ratios(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const TxBatch batch =
        tx_solve_batch(tx, grid.omega(kidx), source.r, trunc.n_max, grid.decay);
    const std::vector<Complex> radial = tx_radial_profile(tx, batch, query.r);
    sweep.values[kidx] = assemble_axis(radial, cg);
    ratios[kidx] = truncation_ratio(radial, cg);
  });
  require_sweep_truncation(sweep.values, ratios, trunc.rel_tol);
  return sweep;
}

TxMassSweeps tx_mass_sweeps(const TxSpheroid& tx, const FrequencyGrid& grid, int source_nodes) {
  const double gamma = tx.spec.radius;
  const SourceQuadrature q = source_quadrature(gamma, source_nodes);
  TxMassSweeps out;
  out.inside.grid = grid;
  out.outside.grid = grid;
  out.inside.values.resize(grid.omega_count);
  out.outside.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const double omega = grid.omega(kidx);
    Complex inside = 0.0, outside = 0.0;
    for (size_t i = 0; i < q.r0.size(); ++i) {
      const double r0 = q.r0[i];
      const TxBatch b = tx_solve_batch(tx, omega, r0, 0, grid.decay);
      const Complex k1 = b.k1, k2 = b.k2;
      const Ladder jr = ladder_j(1, k1 * r0), hr1 = ladder_h(1, k1 * r0);
      const Ladder jg = ladder_j(1, k1 * gamma), hg1 = ladder_h(1, k1 * gamma);
      const Ladder hg = ladder_h(1, k2 * gamma);
      // int r^2 f_0(kr) dr = r^2 f_1(kr) / k for f in {j, h}; the outgoing tail
      // integrates to -gamma^2 h_1(k gamma) / k.
      const Complex in_inner = b.modes[0].inner * r0 * r0 * jr.v[1] / k1;
      const Complex in_ann =
          b.modes[0].ann_j * (gamma * gamma * jg.v[1] - r0 * r0 * jr.v[1]) / k1 +
          b.modes[0].ann_h * (gamma * gamma * hg1.v[1] - r0 * r0 * hr1.v[1]) / k1;
      const Complex out_far = -b.modes[0].outer * gamma * gamma * hg.v[1] / k2;
      inside += q.weight[i] * (in_inner + in_ann);
      outside += q.weight[i] * out_far;
    }
    out.inside.values[kidx] = inside;
    out.outside.values[kidx] = outside;
  });
  return out;
}

FrequencySweep tx_release_spectrum(const TxSpheroid& tx, const FrequencyGrid& grid,
                                   int source_nodes) {
  const TxMassSweeps mass = tx_mass_sweeps(tx, grid, source_nodes);
  FrequencySweep g;
  g.grid = grid;
  g.values.resize(grid.omega_count);
  // Transform of g = -dN_in/dt with N_in(0) = 1, on the contour s = decay + i omega.
  for (int k = 0; k < grid.omega_count; ++k)
    g.values[k] = 1.0 - Complex(grid.decay, grid.omega(k)) * mass.inside.values[k];
  return g;
}

ReleaseProfile release_rate(const TxSpheroid& tx, double dt, double duration,
                            int source_nodes) {
  if (dt <= 0.0 || duration < 2.0 * dt) throw DomainError("release_rate: bad time grid");
  const int bins = static_cast<int>(std::lround(duration / dt));

  // Release-tuned grid. The early release rate behaves like 1/sqrt(t), so the
  // mass spectrum only decays like omega^{-3/2} past the step subtraction and
  // the band cutoff leaves ringing on the reconstructed edges. A wide window
  // (small step) with modest contour damping keeps the e^{+decay t} factor
  // small at late times so that ringing stays below the undershoot guard,
  // while omega_max tracks the bin width to resolve the onset.
  const double oversample = 3.2, alias_damping = 6.0;
  const double omega_max = 5.5 * (0.5 / dt);
  const double step = 2.0 * M_PI / (oversample * duration);
  const int count = ((static_cast<int>(std::ceil(omega_max / step)) + 511) / 512) * 512;
  const FrequencyGrid grid = make_frequency_grid(duration, count, oversample, alias_damping);
  const TxMassSweeps mass = tx_mass_sweeps(tx, grid, source_nodes);

  const double lambda = 1.0 / (10.0 * dt);
  InversionOptions opts;
  opts.clamp_negatives = false;
  TimeSeries edges =
      inverse_transform_with_step(mass.inside, make_time_grid(0.0, dt, bins + 1), 1.0, lambda, opts);
  edges.values[0] = 1.0;  // exact initial condition, makes sum(g) dt telescope
  TimeSeries centers = inverse_transform_with_step(
      mass.inside, make_time_grid(0.5 * dt, dt, bins), 1.0, lambda, opts);

  ReleaseProfile profile;
  profile.grid = centers.grid;
  profile.g.resize(bins);
  for (int k = 0; k < bins; ++k)
    profile.g[k] = (edges.values[k] - edges.values[k + 1]) / dt;
  profile.n_inside = centers.values.min(1.0).max(0.0);
  profile.n_inside_edges = edges.values.min(1.0).max(0.0);
  profile.released_total = 1.0 - edges.values[bins];

  const double gmax = profile.g.maxCoeff();
  if (profile.g.minCoeff() < -1e-3 * gmax)
    throw NegativeConcentration("release rate dips below the allowed undershoot");
  profile.g = profile.g.max(0.0);
  return profile;
}

}  // namespace smc
