#include "smc/pbs.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <utility>

#include "smc/errors.hpp"
#include "smc/parallel.hpp"

namespace smc {

namespace pbs_detail {

namespace {
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t lane_hash(std::uint64_t seed, std::uint64_t particle, std::uint64_t step,
                        std::uint64_t lane) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ particle);
  h = mix64(h ^ step);
  h = mix64(h ^ lane);
  return h;
}

double uniform01(std::uint64_t h) { return ((h >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace pbs_detail

namespace {

using pbs_detail::lane_hash;
using pbs_detail::uniform01;

// Gaussian pair from two counter lanes (Box-Muller).
std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t particle,
                                        std::uint64_t step, std::uint64_t lane0) {
  const double u1 = uniform01(lane_hash(seed, particle, step, lane0));
  const double u2 = uniform01(lane_hash(seed, particle, step, lane0 + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

double region_diffusion(const Scenario& scenario, int region) {
  return region < 0 ? scenario.diffusion_free : scenario.spheres[region].diffusion;
}

double region_degradation(const Scenario& scenario, int region) {
  return region < 0 ? 0.0 : scenario.spheres[region].degradation;
}

// First boundary crossing along p + s*d for s in (eps, 1]. The current region
// is known, so only the exit face of the containing sphere and the entry faces
// of the others are candidates. Returns {s, new_region} or s > 1 if none.
struct Crossing {
  double s = 2.0;
  int region = -1;
};

Crossing first_crossing(const Scenario& scenario, const Eigen::Vector3d& p,
                        const Eigen::Vector3d& d, int region) {
  constexpr double kEps = 1e-12;
  Crossing best;
  const double a = d.squaredNorm();
  if (a == 0.0) return best;
  for (int j = 0; j < static_cast<int>(scenario.spheres.size()); ++j) {
    const ScenarioSphere& sp = scenario.spheres[j];
    const Eigen::Vector3d w = p - sp.center;
    const double b = 2.0 * w.dot(d);
    const double c = w.squaredNorm() - sp.radius * sp.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double s_lo = q / a, s_hi = (q != 0.0) ? c / q : -1.0;
    if (s_lo > s_hi) std::swap(s_lo, s_hi);
    if (j == region) {
      // Inside this sphere: the exit is the larger root.
      if (s_hi > kEps && s_hi <= 1.0 && s_hi < best.s) best = {s_hi, -1};
    } else if (region < 0) {
      // Outside all spheres: first entry is the smaller positive root.
      const double s_in = s_lo > kEps ? s_lo : s_hi;
      if (s_in > kEps && s_in <= 1.0 && s_in < best.s) best = {s_in, j};
    }
    // region >= 0 and j != region cannot be hit before exiting (disjointness).
  }
  return best;
}

ParticleEnsemble make_ensemble(int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("particle count must be >= 1");
  ParticleEnsemble e;
  e.positions.resize(count);
  e.alive.assign(count, 1);
  e.region.assign(count, -1);
  e.seed = seed;
  return e;
}

// Step index reserved for release-time draws (never produced by stepping,
// which starts at 0 and increments).
constexpr std::uint64_t kReleaseStep = ~0ull;

}  // namespace

Scenario make_scenario(double diffusion_free, std::vector<ScenarioSphere> spheres) {
  if (!(diffusion_free > 0.0)) throw DomainError("free-medium diffusion must be positive");
  for (const ScenarioSphere& s : spheres) {
    if (!(s.radius > 0.0)) throw DomainError("scenario sphere radius must be positive");
    if (!(s.diffusion > 0.0)) throw DomainError("scenario sphere diffusion must be positive");
    if (s.degradation < 0.0) throw DomainError("scenario degradation must be non-negative");
  }
  for (std::size_t i = 0; i < spheres.size(); ++i)
    for (std::size_t j = i + 1; j < spheres.size(); ++j)
      if ((spheres[i].center - spheres[j].center).norm() <=
          spheres[i].radius + spheres[j].radius)
        throw DomainError("scenario spheres must be pairwise disjoint");
  Scenario sc;
  sc.diffusion_free = diffusion_free;
  sc.spheres = std::move(spheres);
  return sc;
}

int region_of(const Scenario& scenario, const Eigen::Vector3d& p) {
  for (int j = 0; j < static_cast<int>(scenario.spheres.size()); ++j)
    if ((p - scenario.spheres[j].center).norm() <= scenario.spheres[j].radius) return j;
  return -1;
}

int ParticleEnsemble::alive_count() const {
  int n = 0;
  for (std::uint8_t a : alive) n += a;
  return n;
}

ParticleEnsemble release_point(const Eigen::Vector3d& position, int count, std::uint64_t seed,
                               const Scenario& scenario) {
  ParticleEnsemble e = make_ensemble(count, seed);
  const int reg = region_of(scenario, position);
  for (int i = 0; i < count; ++i) {
    e.positions[i] = position;
    e.region[i] = reg;
  }
  return e;
}

ParticleEnsemble release_from_spheroid(const SpheroidSpec& tx, int per_cell, std::uint64_t seed,
                                       const Scenario& scenario) {
  if (per_cell < 1) throw DomainError("per-cell release must be >= 1");
  const long long cells = tx.cell_count;
  if (cells < 1) throw DomainError("cell count must be >= 1");
  const long long total = cells * per_cell;
  if (total > (1ll << 31)) throw MemoryTooLarge("particle count exceeds the ensemble bound");
  ParticleEnsemble e = make_ensemble(static_cast<int>(total), seed);
  const Eigen::Vector3d center = to_cartesian(tx.center);
  for (long long c = 0; c < cells; ++c) {
    const double u1 = uniform01(lane_hash(seed, c, kReleaseStep, 0));
    const double u2 = uniform01(lane_hash(seed, c, kReleaseStep, 1));
    const double u3 = uniform01(lane_hash(seed, c, kReleaseStep, 2));
    const double r = tx.radius * std::cbrt(u1);
    const double ct = 2.0 * u2 - 1.0;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = 2.0 * M_PI * u3;
    const Eigen::Vector3d p =
        center + r * Eigen::Vector3d(st * std::cos(phi), st * std::sin(phi), ct);
    const int reg = region_of(scenario, p);
    for (int k = 0; k < per_cell; ++k) {
      const long long idx = c * per_cell + k;
      e.positions[idx] = p;
      e.region[idx] = reg;
    }
  }
  return e;
}

void step(ParticleEnsemble& ensemble, const Scenario& scenario, const PbsConfig& config) {
  if (!(config.dt > 0.0)) throw DomainError("step size must be positive");
  const double dt = config.dt;
  const std::uint64_t sidx = ensemble.step_index;
  const std::uint64_t seed = ensemble.seed;
  const int n = static_cast<int>(ensemble.positions.size());
  std::atomic<std::uint64_t> cap_hits{0};

  parallel_for(
      n,
      [&](int i) {
        if (!ensemble.alive[i]) return;
        const std::uint64_t pid = static_cast<std::uint64_t>(i);
        int reg = ensemble.region[i];
        const double d_src = region_diffusion(scenario, reg);
        const auto [z0, z1] = gaussian_pair(seed, pid, sidx, 0);
        const auto [z2, z3] = gaussian_pair(seed, pid, sidx, 2);
        (void)z3;
        const double sigma = std::sqrt(2.0 * d_src * dt);
        Eigen::Vector3d pos = ensemble.positions[i];
        Eigen::Vector3d d = sigma * Eigen::Vector3d(z0, z1, z2);

        for (int it = 0; it < 8; ++it) {
          const Crossing cx = first_crossing(scenario, pos, d, reg);
          if (cx.s > 1.0) {
            pos += d;
            d.setZero();
            break;
          }
          const double d_before = region_diffusion(scenario, reg);
          const double d_after = region_diffusion(scenario, cx.region);
          pos += cx.s * d;
          d = (1.0 - cx.s) * d * std::sqrt(d_after / d_before);
          reg = cx.region;
        }
        if (d.squaredNorm() > 0.0) {
          // Cap reached with displacement left: truncate at the boundary.
          cap_hits.fetch_add(1, std::memory_order_relaxed);
        }
        ensemble.positions[i] = pos;
        ensemble.region[i] = reg;

        const double kf = region_degradation(scenario, reg);
        if (kf > 0.0) {
          const double u = uniform01(lane_hash(seed, pid, sidx, 4));
          if (u < kf * dt) ensemble.alive[i] = 0;
        }
      },
      config.threads);

  ensemble.crossing_cap_hits += cap_hits.load();
  ensemble.time += dt;
  ensemble.step_index += 1;
}

int count_in_ball(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center,
                  double radius) {
  const double r2 = radius * radius;
  int n = 0;
  for (std::size_t i = 0; i < ensemble.positions.size(); ++i)
    if (ensemble.alive[i] && (ensemble.positions[i] - center).squaredNorm() <= r2) ++n;
  return n;
}

int count_in_shell(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center, double r_lo,
                   double r_hi) {
  const double lo2 = r_lo * r_lo, hi2 = r_hi * r_hi;
  int n = 0;
  for (std::size_t i = 0; i < ensemble.positions.size(); ++i) {
    if (!ensemble.alive[i]) continue;
    const double d2 = (ensemble.positions[i] - center).squaredNorm();
    if (d2 > lo2 && d2 <= hi2) ++n;
  }
  return n;
}

double measure_probe(const ParticleEnsemble& ensemble, const ProbeSphere& probe,
                     double normalization) {
  if (!(probe.radius > 0.0)) throw DomainError("probe radius must be positive");
  if (!(normalization > 0.0)) throw DomainError("probe normalization must be positive");
  const double volume = 4.0 / 3.0 * M_PI * probe.radius * probe.radius * probe.radius;
  return count_in_ball(ensemble, probe.center, probe.radius) / volume / normalization;
}

int measure_receiver_count(const ParticleEnsemble& ensemble, const Eigen::Vector3d& center,
                           double radius) {
  return count_in_ball(ensemble, center, radius);
}

}  // namespace smc
