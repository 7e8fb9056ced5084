#include "smc/rx_gfc.hpp"

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

RxSpheroid make_rx(const SpheroidSpec& spec, const MediumSpec& medium) {
  return RxSpheroid{spec, medium, derive_porosity(spec, medium)};
}

namespace {

struct RxBatch {
  Complex ki, ko;  // inside (with degradation) / free-medium wavenumbers
  double r0 = 0.0;
  std::vector<ModeCoefficients> modes;
  int n_use = -1;
};

// Rows: value jump kappa at gamma, flux continuity at gamma, value continuity
// at r0, derivative jump -1/D at r0. Unknowns (inner, ann_j, ann_h, outer).
// Annulus basis {j_n, h1_n}, not {j_n, y_n}: j_n and y_n both grow like
// e^{Im(ko) r}, so that pair would have to cancel exponentially to represent
// the decaying scattered field and loses all digits once Im(ko) r > ~18.
// `decay` is the grid's Laplace contour shift: it acts as an extra first-order
// loss in both regions, and inverse_transform removes it again in time domain.
RxBatch rx_solve_batch(const RxSpheroid& rx, double omega, double r0, int n_max,
                       double decay = 0.0) {
  const double gamma = rx.spec.radius;
  const double de = rx.der.d_eff, d = rx.medium.diffusion_coeff, kap = rx.der.kappa;
  RxBatch batch;
  batch.r0 = r0;
  batch.ki = wavenumber(omega, de, rx.spec.degradation_rate + decay);
  batch.ko = wavenumber(omega, d, decay);

  const int order = std::max(n_max, 1);
  const Ladder ji = ladder_j(order, batch.ki * gamma);
  const Ladder jg = ladder_j(order, batch.ko * gamma), hg = ladder_h(order, batch.ko * gamma);
  const Ladder jr = ladder_j(order, batch.ko * r0);
  const Ladder hr = ladder_h(order, batch.ko * r0);
  const int valid = std::min(hg.valid, hr.valid);
  batch.n_use = std::min(n_max, valid - 1);

  const Complex zi = batch.ki * gamma, zg = batch.ko * gamma, zr = batch.ko * r0;
  for (int n = 0; n <= batch.n_use; ++n) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    m(0, 0) = ji.v[n];
    m(0, 1) = -kap * jg.v[n];
    m(0, 2) = -kap * hg.v[n];
    m(1, 0) = de * batch.ki * deriv_from_ladder(ji.data(), n, zi);
    m(1, 1) = -d * batch.ko * deriv_from_ladder(jg.data(), n, zg);
    m(1, 2) = -d * batch.ko * deriv_from_ladder(hg.data(), n, zg);
    m(2, 1) = jr.v[n];
    m(2, 2) = hr.v[n];
    m(2, 3) = -hr.v[n];
    const double w = r0 * r0;
    m(3, 1) = -w * batch.ko * deriv_from_ladder(jr.data(), n, zr);
    m(3, 2) = -w * batch.ko * deriv_from_ladder(hr.data(), n, zr);
    m(3, 3) = w * batch.ko * deriv_from_ladder(hr.data(), n, zr);
    rhs[3] = -1.0 / d;
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

// Mode-wise radial values at radius r. r <= gamma uses the inside branch
// (surface evaluations give the inside limit), gamma < r <= r0 the annulus,
// r > r0 the outgoing branch.
std::vector<Complex> rx_radial_profile(const RxSpheroid& rx, const RxBatch& batch, double r) {
  const double gamma = rx.spec.radius;
  const int n_use = batch.n_use;
  std::vector<Complex> radial(n_use + 1, Complex(0.0));
  if (r <= gamma) {
    const Ladder j = ladder_j(std::max(n_use, 1), batch.ki * r);
    for (int n = 0; n <= n_use; ++n) radial[n] = batch.modes[n].inner * j.v[n];
  } else if (r <= batch.r0) {
    const Ladder j = ladder_j(std::max(n_use, 1), batch.ko * r);
    const Ladder h = ladder_h(std::max(n_use, 1), batch.ko * r);
    const int top = std::min(n_use, h.valid - 1);
    for (int n = 0; n <= top; ++n)
      radial[n] = batch.modes[n].ann_j * j.v[n] + batch.modes[n].ann_h * h.v[n];
  } else {
    const Ladder h = ladder_h(std::max(n_use, 1), batch.ko * r);
    const int top = std::min(n_use, h.valid - 1);
    for (int n = 0; n <= top; ++n) radial[n] = batch.modes[n].outer * h.v[n];
  }
  return radial;
}

// Annulus-branch radial values exactly at the surface (outside limit).
std::vector<Complex> rx_surface_outside_profile(const RxSpheroid& rx, const RxBatch& batch) {
  const double gamma = rx.spec.radius;
  const int n_use = batch.n_use;
  std::vector<Complex> radial(n_use + 1, Complex(0.0));
  const Ladder j = ladder_j(std::max(n_use, 1), batch.ko * gamma);
  const Ladder h = ladder_h(std::max(n_use, 1), batch.ko * gamma);
  const int top = std::min(n_use, h.valid - 1);
  for (int n = 0; n <= top; ++n)
    radial[n] = batch.modes[n].ann_j * j.v[n] + batch.modes[n].ann_h * h.v[n];
  return radial;
}

void require_source_outside(const RxSpheroid& rx, const SphericalPoint& source) {
  if (source.r <= rx.spec.radius)
    throw DomainError("rx source must lie outside the spheroid");
}

}  // namespace

ModeCoefficients solve_rx_mode(const RxSpheroid& rx, double omega, int n, double r0) {
  if (n < 0) throw DomainError("solve_rx_mode: n < 0");
  if (r0 <= rx.spec.radius) throw DomainError("solve_rx_mode: source must lie outside");
  const RxBatch batch = rx_solve_batch(rx, omega, r0, n);
  if (batch.n_use < n)
    throw DomainError("solve_rx_mode: mode order exceeds representable ladder at this argument");
  return batch.modes[n];
}

std::vector<FrequencySweep> rx_point_sweeps(const RxSpheroid& rx, const SphericalPoint& source,
                                            const std::vector<SphericalPoint>& probes,
                                            const FrequencyGrid& grid,
                                            const SeriesTruncation& trunc) {
  require_source_outside(rx, source);
  const int np = static_cast<int>(probes.size());
  std::vector<FrequencySweep> out(np);
  std::vector<std::vector<double>> ratios(np);
  std::vector<double> cg(np);
  for (int p = 0; p < np; ++p) {
    out[p].grid = grid;
    out[p].values.resize(grid.omega_count);
    ratios[p].resize(grid.omega_count);
    cg[p] = cos_angle_between(probes[p], source);
  }
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch =
        rx_solve_batch(rx, grid.omega(kidx), source.r, trunc.n_max, grid.decay);
    for (int p = 0; p < np; ++p) {
      const std::vector<Complex> radial = rx_radial_profile(rx, batch, probes[p].r);
      out[p].values[kidx] = assemble_axis(radial, cg[p]);
      ratios[p][kidx] = truncation_ratio(radial, cg[p]);
    }
  });
  for (int p = 0; p < np; ++p)
    require_sweep_truncation(out[p].values, ratios[p], trunc.rel_tol);
  return out;
}

FrequencySweep rx_point_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                              const SphericalPoint& probe, const FrequencyGrid& grid,
                              const SeriesTruncation& trunc) {
  return rx_point_sweeps(rx, source, {probe}, grid, trunc)[0];
}

BoundaryPairSweeps rx_boundary_pair(const RxSpheroid& rx, const SphericalPoint& source,
                                    const FrequencyGrid& grid, const SeriesTruncation& trunc) {
  require_source_outside(rx, source);
  BoundaryPairSweeps pair;
  pair.inside.grid = grid;
  pair.outside.grid = grid;
  pair.inside.values.resize(grid.omega_count);
  pair.outside.values.resize(grid.omega_count);
  std::vector<double> ratio_in(grid.omega_count), ratio_out(grid.omega_count);
  const double gamma = rx.spec.radius;
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch =
        rx_solve_batch(rx, grid.omega(kidx), source.r, trunc.n_max, grid.decay);
    const std::vector<Complex> rin = rx_radial_profile(rx, batch, gamma);
    const std::vector<Complex> rout = rx_surface_outside_profile(rx, batch);
    pair.inside.values[kidx] = assemble_axis(rin, 1.0);
    pair.outside.values[kidx] = assemble_axis(rout, 1.0);
    ratio_in[kidx] = truncation_ratio(rin, 1.0);
    ratio_out[kidx] = truncation_ratio(rout, 1.0);
  });
  require_sweep_truncation(pair.inside.values, ratio_in, trunc.rel_tol);
  require_sweep_truncation(pair.outside.values, ratio_out, trunc.rel_tol);
  return pair;
}

FrequencySweep rx_observation_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                                    const FrequencyGrid& grid, const SeriesTruncation& trunc,
                                    int nodes_r, int nodes_theta) {
  require_source_outside(rx, source);
  const double gamma = rx.spec.radius;
  const GaussLegendre qr = gauss_legendre(nodes_r).mapped(0.0, gamma);
  const GaussLegendre qt = gauss_legendre(nodes_theta);

  // Azimuth is analytic; the polar factor is frequency-independent. Modes whose
  // polar integral vanishes (all 0 < n <= 2*nodes_theta-1 by GL exactness) are
  // skipped; in exact arithmetic only n = 0 survives the full sphere average.
  std::vector<double> tf(trunc.n_max + 1, 0.0);
  {
    std::vector<double> pn(trunc.n_max + 1);
    for (int j = 0; j < nodes_theta; ++j) {
      specfun::legendre_many(trunc.n_max, qt.nodes[j], pn.data());
      for (int n = 0; n <= trunc.n_max; ++n) tf[n] += 2.0 * M_PI * qt.weights[j] * pn[n];
    }
  }
  std::vector<int> kept;
  for (int n = 0; n <= trunc.n_max; ++n)
    if (std::abs(tf[n]) > 1e-14 * std::abs(tf[0])) kept.push_back(n);
  const int order = kept.empty() ? 0 : kept.back();

  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch = rx_solve_batch(rx, grid.omega(kidx), source.r, order, grid.decay);
    Complex q = 0.0;
    std::vector<std::vector<Complex>> jl(nodes_r);
    for (int i = 0; i < nodes_r; ++i) {
      jl[i].resize(std::max(batch.n_use, 1) + 1);
      specfun::sph_bessel_j_many(std::max(batch.n_use, 1), batch.ki * qr.nodes[i],
                                 jl[i].data());
    }
    for (int n : kept) {
      if (n > batch.n_use) break;
      Complex radial_int = 0.0;
      for (int i = 0; i < nodes_r; ++i)
        radial_int += qr.weights[i] * qr.nodes[i] * qr.nodes[i] * jl[i][n];
      q += (2.0 * n + 1.0) / (4.0 * M_PI) * tf[n] * batch.modes[n].inner * radial_int;
    }
    sweep.values[kidx] = q;
  });
  return sweep;
}

FrequencySweep rx_observation_sweep_exact(const RxSpheroid& rx, const SphericalPoint& source,
                                          const FrequencyGrid& grid) {
  require_source_outside(rx, source);
  const double gamma = rx.spec.radius;
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch = rx_solve_batch(rx, grid.omega(kidx), source.r, 0, grid.decay);
    const Ladder j = ladder_j(1, batch.ki * gamma);
    sweep.values[kidx] = batch.modes[0].inner * gamma * gamma * j.v[1] / batch.ki;
  });
  return sweep;
}

FrequencySweep rx_ball_avg_sweep(const RxSpheroid& rx, const SphericalPoint& source,
                                 const SphericalPoint& probe_center, double probe_radius,
                                 const FrequencyGrid& grid, const SeriesTruncation& trunc,
                                 int nodes_per_axis, bool allow_straddle) {
  require_source_outside(rx, source);
  if (probe_radius <= 0.0) throw DomainError("rx_ball_avg_sweep: probe radius must be positive");
  const double gamma = rx.spec.radius;
  const Eigen::Vector3d pc = to_cartesian(probe_center);
  const Eigen::Vector3d src = to_cartesian(source);
  const double pr = pc.norm();
  if (!allow_straddle && pr + probe_radius >= gamma && pr - probe_radius <= gamma)
    throw DomainError("rx_ball_avg_sweep: probe ball straddles the spheroid surface");
  if ((pc - src).norm() < 2.0 * probe_radius)
    throw DomainError("rx_ball_avg_sweep: probe ball too close to the source point");

  const int n = nodes_per_axis;
  const GaussLegendre qu = gauss_legendre(n).mapped(0.0, 1.0);
  const GaussLegendre qx = gauss_legendre(n);
  struct Node {
    double r, cg, w;
  };
  std::vector<Node> nodes;
  nodes.reserve(n * n * n);
  const Eigen::Vector3d shat = src.normalized();
  for (int iu = 0; iu < n; ++iu) {
    const double rl = probe_radius * std::cbrt(qu.nodes[iu]);
    for (int ix = 0; ix < n; ++ix) {
      const double x = qx.nodes[ix];
      const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
      for (int ip = 0; ip < n; ++ip) {
        const double phi = 2.0 * M_PI * (ip + 0.5) / n;
        const Eigen::Vector3d p =
            pc + rl * Eigen::Vector3d(sx * std::cos(phi), sx * std::sin(phi), x);
        Node node;
        node.r = p.norm();
        node.cg = node.r > 0.0 ? std::clamp(p.dot(shat) / node.r, -1.0, 1.0) : 1.0;
        node.w = qu.weights[iu] * 0.5 * qx.weights[ix] / n;
        nodes.push_back(node);
      }
    }
  }

  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.values.resize(grid.omega_count);
  std::vector<double> ratios(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch =
        rx_solve_batch(rx, grid.omega(kidx), source.r, trunc.n_max, grid.decay);
    Complex acc = 0.0;
    double worst_ratio = 0.0;
    for (const Node& node : nodes) {
      const std::vector<Complex> radial = rx_radial_profile(rx, batch, node.r);
      acc += node.w * assemble_axis(radial, node.cg);
      worst_ratio = std::max(worst_ratio, truncation_ratio(radial, node.cg));
    }
    sweep.values[kidx] = acc;
    ratios[kidx] = worst_ratio;
  });
  require_sweep_truncation(sweep.values, ratios, trunc.rel_tol);
  return sweep;
}

ShellPairSweeps rx_shell_pair(const RxSpheroid& rx, const SphericalPoint& source, double delta,
                              const FrequencyGrid& grid) {
  require_source_outside(rx, source);
  const double gamma = rx.spec.radius;
  if (delta <= 0.0 || delta >= gamma || source.r <= gamma + delta)
    throw DomainError("rx_shell_pair: bad shell thickness");
  const double b = gamma - delta, c = gamma + delta;
  const double v_in = (gamma * gamma * gamma - b * b * b) / 3.0;
  const double v_out = (c * c * c - gamma * gamma * gamma) / 3.0;

  ShellPairSweeps out;
  out.inside.grid = grid;
  out.outside.grid = grid;
  out.inside.values.resize(grid.omega_count);
  out.outside.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch = rx_solve_batch(rx, grid.omega(kidx), source.r, 0, grid.decay);
    const Complex ki = batch.ki, ko = batch.ko;
    const Ladder jig = ladder_j(1, ki * gamma), jib = ladder_j(1, ki * b);
    const Ladder jog = ladder_j(1, ko * gamma), hog = ladder_h(1, ko * gamma);
    const Ladder joc = ladder_j(1, ko * c), hoc = ladder_h(1, ko * c);
    const Complex num_in =
        batch.modes[0].inner * (gamma * gamma * jig.v[1] - b * b * jib.v[1]) / ki;
    const Complex num_out =
        batch.modes[0].ann_j * (c * c * joc.v[1] - gamma * gamma * jog.v[1]) / ko +
        batch.modes[0].ann_h * (c * c * hoc.v[1] - gamma * gamma * hog.v[1]) / ko;
    out.inside.values[kidx] = num_in / v_in / (4.0 * M_PI);
    out.outside.values[kidx] = num_out / v_out / (4.0 * M_PI);
  });
  return out;
}

RxMassSweeps rx_mass_sweeps(const RxSpheroid& rx, double r0, const FrequencyGrid& grid) {
  if (r0 <= rx.spec.radius) throw DomainError("rx_mass_sweeps: source must lie outside");
  const double gamma = rx.spec.radius;
  RxMassSweeps out;
  out.inside.grid = grid;
  out.outside.grid = grid;
  out.inside.values.resize(grid.omega_count);
  out.outside.values.resize(grid.omega_count);
  parallel_for(grid.omega_count, [&](int kidx) {
    const RxBatch batch = rx_solve_batch(rx, grid.omega(kidx), r0, 0, grid.decay);
    const Complex ki = batch.ki, ko = batch.ko;
    const Ladder jig = ladder_j(1, ki * gamma);
    const Ladder jog = ladder_j(1, ko * gamma), hog = ladder_h(1, ko * gamma);
    const Ladder jor = ladder_j(1, ko * r0);
    const Ladder hor = ladder_h(1, ko * r0);
    const Complex inside = batch.modes[0].inner * gamma * gamma * jig.v[1] / ki;
    const Complex annulus =
        batch.modes[0].ann_j * (r0 * r0 * jor.v[1] - gamma * gamma * jog.v[1]) / ko +
        batch.modes[0].ann_h * (r0 * r0 * hor.v[1] - gamma * gamma * hog.v[1]) / ko;
    const Complex far = -batch.modes[0].outer * r0 * r0 * hor.v[1] / ko;
    out.inside.values[kidx] = inside;
    out.outside.values[kidx] = annulus + far;
  });
  return out;
}

}  // namespace smc
