#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "smc/spheroid.hpp"

namespace smc {

/// Stepping parameters for the Brownian walk.
struct PbsConfig {
  double dt = 0.5;          // s
  std::uint64_t seed = 0;   // stream selector; same seed => bit-identical run
  int threads = 0;          // 0 = hardware default
};

/// One spherical region with its own diffusion coefficient and first-order
/// degradation rate; the surrounding medium is scenario-global.
struct ScenarioSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
  double diffusion = 0.0;    // coefficient inside, m^2/s
  double degradation = 0.0;  // k_f inside, 1/s
};

struct Scenario {
  double diffusion_free = 0.0;          // coefficient outside every sphere
  std::vector<ScenarioSphere> spheres;  // pairwise disjoint
};

/// Validates positivity and pairwise disjointness (touching spheres rejected).
Scenario make_scenario(double diffusion_free, std::vector<ScenarioSphere> spheres);

/// Index of the sphere containing p (boundary counts as inside; closed ball),
/// or -1 for the free medium.
int region_of(const Scenario& scenario, const Eigen::Vector3d& p);

/// Independent Brownian particles. region caches the containing sphere per
/// particle and is maintained by construction across steps.
struct ParticleEnsemble {
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::uint8_t> alive;
  std::vector<std::int32_t> region;
  double time = 0.0;
  std::uint64_t step_index = 0;        // feeds the per-step random streams
  std::uint64_t seed = 0;
  std::uint64_t crossing_cap_hits = 0; // steps truncated at the crossing cap
  int alive_count() const;
};

/// All particles at one point.
ParticleEnsemble release_point(const Eigen::Vector3d& position, int count, std::uint64_t seed,
                               const Scenario& scenario);

/// cell_count cell centers drawn uniformly in the transmitter ball
/// (center tx.center), per_cell particles placed at each center.
ParticleEnsemble release_from_spheroid(const SpheroidSpec& tx, int per_cell, std::uint64_t seed,
                                       const Scenario& scenario);

/// Advance every alive particle by one step: per-axis Gaussian displacement
/// with variance 2 D_start dt; segments crossing a sphere boundary have the
/// remainder rescaled by sqrt(D_dest / D_src), re-applied per crossing up to 8
/// times then truncated at the boundary; afterwards particles inside an
/// absorbing sphere die with probability k_f dt.
void step(ParticleEnsemble& ensemble, const Scenario& scenario, const PbsConfig& config);

/// Measurement sphere (counting convention: closed ball).
struct ProbeSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 10e-6;
};

int count_in_ball(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center,
                  double radius);

/// Count with r_lo < |p - center| <= r_hi.
int count_in_shell(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center, double r_lo,
                   double r_hi);

/// count / volume / normalization -> concentration (per-molecule GFC when
/// normalization = total released count).
double measure_probe(const ParticleEnsemble& ensemble, const ProbeSphere& probe,
                     double normalization);

/// Alive particles within the receiver ball.
int measure_receiver_count(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center,
                           double radius);

namespace pbs_detail {
/// Counter-based stream: one 64-bit hash per (seed, particle, step, lane).
std::uint64_t lane_hash(std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                        std::uint64_t lane);
double uniform01(std::uint64_t h);  // in (0, 1)
}  // namespace pbs_detail

}  // namespace smc
