#include <doctest.h>

#include <cmath>

#include "smc/spheroid.hpp"

using namespace smc;

TEST_SUITE("spheroid") {

TEST_CASE("table defaults reproduce the packing-derived porosity and jump factor") {
  SpheroidSpec s;
  s.radius = 275e-6;
  s.cell_count = 24000;
  s.cell_volume = 3.14e-15;
  const DerivedPorosity d = derive_porosity(s, MediumSpec{1e-9});
  // Frozen from the closed form 1 - N_c V_c / (4/3 pi R^3).
  CHECK(d.porosity == doctest::Approx(0.13492412840352952).epsilon(1e-12));
  CHECK(d.kappa == doctest::Approx(4.4919279753631525).epsilon(1e-12));
}

TEST_CASE("derived quantities satisfy their defining identities") {
  SpheroidSpec s;
  s.radius = 200e-6;
  s.cell_count = 9000;
  s.cell_volume = 2.2e-15;
  const double diff = 7.5e-10;
  const DerivedPorosity d = derive_porosity(s, MediumSpec{diff});
  CHECK(d.tortuosity == doctest::Approx(1.0 / std::sqrt(d.porosity)).epsilon(1e-14));
  CHECK(d.d_eff == doctest::Approx(diff * std::pow(d.porosity, 1.5)).epsilon(1e-14));
  CHECK(d.kappa * d.kappa * d.d_eff == doctest::Approx(diff).epsilon(1e-14));
}

TEST_CASE("kappa increases strictly with cell count at fixed geometry") {
  SpheroidSpec s;
  s.radius = 275e-6;
  s.cell_volume = 3.14e-15;
  double prev = 0.0;
  for (int cells = 15000; cells <= 25000; cells += 500) {
    s.cell_count = cells;
    const double kappa = derive_porosity(s, MediumSpec{1e-9}).kappa;
    CHECK(kappa > prev);
    prev = kappa;
  }
}

TEST_CASE("empty packing is the transparent limit") {
  SpheroidSpec s;
  s.radius = 100e-6;
  s.cell_count = 0.0;
  s.cell_volume = 3.14e-15;
  const DerivedPorosity d = derive_porosity(s, MediumSpec{1e-9});
  CHECK(d.porosity == 1.0);
  CHECK(d.kappa == 1.0);
  CHECK(d.d_eff == 1e-9);
}

TEST_CASE("invalid specs are rejected by type") {
  MediumSpec medium{1e-9};
  SpheroidSpec s;
  s.radius = 100e-6;
  s.cell_count = 100;
  s.cell_volume = 3.14e-15;

  SpheroidSpec bad_radius = s;
  bad_radius.radius = 0.0;
  CHECK_THROWS_AS(derive_porosity(bad_radius, medium), DomainError);

  SpheroidSpec overpacked = s;
  overpacked.cell_count = 1e9;
  CHECK_THROWS_AS(derive_porosity(overpacked, medium), OverpackedSpheroid);

  SpheroidSpec bad_rate = s;
  bad_rate.degradation_rate = -1.0;
  CHECK_THROWS_AS(derive_porosity(bad_rate, medium), DomainError);

  CHECK_THROWS_AS(derive_porosity(s, MediumSpec{0.0}), DomainError);
}

TEST_CASE("spherical-cartesian helpers agree with vector algebra") {
  const SphericalPoint a{1.3, 0.4, 2.1};
  const SphericalPoint b{0.7, 2.2, -0.9};
  const Eigen::Vector3d va = to_cartesian(a), vb = to_cartesian(b);
  CHECK(va.norm() == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(cos_angle_between(a, b) ==
        doctest::Approx(va.dot(vb) / (va.norm() * vb.norm())).epsilon(1e-12));

  const Eigen::Vector3d x_axis = to_cartesian({2.0, M_PI / 2.0, 0.0});
  CHECK(x_axis.x() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(x_axis.y()) < 1e-15);
  CHECK(std::abs(x_axis.z()) < 1e-15);
}

}  // TEST_SUITE
