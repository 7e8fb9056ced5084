#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "smc/errors.hpp"

namespace smc {

struct MediumSpec {
  double diffusion_coeff = 0.0;  // m^2/s, extracellular medium
};

/// Spherical coordinates (r [m], polar theta [rad], azimuth phi [rad]).
struct SphericalPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

inline Eigen::Vector3d to_cartesian(const SphericalPoint& p) {
  const double st = std::sin(p.theta);
  return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi), p.r * std::cos(p.theta)};
}

/// Angle cosine between the directions of two points as seen from the origin.
inline double cos_angle_between(const SphericalPoint& a, const SphericalPoint& b) {
  const double c = std::cos(a.theta) * std::cos(b.theta) +
                   std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
  return std::clamp(c, -1.0, 1.0);
}

struct SpheroidSpec {
  double radius = 0.0;            // m
  double cell_count = 0.0;
  double cell_volume = 0.0;       // m^3 per cell
  double degradation_rate = 0.0;  // 1/s, first-order loss inside the spheroid
  SphericalPoint center;          // position of the spheroid center
};

/// Quantities derived from the packing: porosity, tortuosity, effective
/// diffusion coefficient and the boundary concentration jump factor.
struct DerivedPorosity {
  double porosity = 1.0;     // epsilon in (0, 1]
  double tortuosity = 1.0;   // epsilon^{-1/2}
  double d_eff = 0.0;        // (porosity / tortuosity) * D = epsilon^{3/2} D
  double kappa = 1.0;        // sqrt(D / d_eff), inside/outside concentration ratio
};

inline DerivedPorosity derive_porosity(const SpheroidSpec& s, const MediumSpec& medium) {
  if (s.radius <= 0.0) throw DomainError("spheroid radius must be positive");
  if (s.cell_count < 0.0 || s.cell_volume < 0.0) throw DomainError("negative cell packing");
  if (s.degradation_rate < 0.0) throw DomainError("negative degradation rate");
  if (medium.diffusion_coeff <= 0.0) throw DomainError("diffusion coefficient must be positive");

  const double v_spheroid = 4.0 / 3.0 * M_PI * s.radius * s.radius * s.radius;
  const double packing = s.cell_count * s.cell_volume / v_spheroid;
  if (packing >= 1.0) throw OverpackedSpheroid("cell volume exceeds spheroid volume");

  DerivedPorosity d;
  d.porosity = 1.0 - packing;
  d.tortuosity = 1.0 / std::sqrt(d.porosity);
  d.d_eff = medium.diffusion_coeff * d.porosity / d.tortuosity;
  d.kappa = std::sqrt(medium.diffusion_coeff / d.d_eff);
  return d;
}

}  // namespace smc
