#pragma once

#include "smc/channel.hpp"

namespace smc {

/// On-off-keying slot parameters (one bit per slot, release on 1).
struct OokConfig {
  double slot_duration = 600.0;   // T_s, s
  double per_cell_release = 1.0;  // molecules per cell on a 1-bit
  int isi_memory = 0;             // J, slots of residual interference
  double t_sample = 0.0;          // sampling offset inside the slot, (0, T_s]
};

enum class ThresholdPolicy {
  kPerPattern,  // MAP threshold recomputed from each genie-known ISI mean
  kAggregate,   // one threshold from the expected ISI (half the I_j sum)
};

struct DetectionStats {
  double threshold = 0.0;  // aggregate-formula threshold, reported for reference
  double ber = 0.0;
};

/// Decision threshold xi = y / ln(1 + y/I), the count where the two Poisson
/// likelihoods (means I and I + y) are equal. Limits: I -> 0 gives 0,
/// y = 0 gives +infinity (always decide 0).
double threshold(double y_ts, double i_ts);

/// 1 if observed > xi, else 0 (a tie decides 0).
int decide(double observed, double xi);

/// P(Y <= k) for Y ~ Poisson(mean); exact log-space summation.
double poisson_cdf(int k, double mean);

/// P(Y > k); summed from the tail side for full relative precision.
double poisson_sf(int k, double mean);

/// Exact bit-error rate of the genie-aided decision-feedback detector:
/// enumerate all 2^(J+1) equiprobable bit patterns, add each pattern's Poisson
/// decision-error mass. isi must cover j = 1..J.
DetectionStats ber_exact(const OokConfig& config, double y_ts, const IsiProfile& isi,
                         ThresholdPolicy policy = ThresholdPolicy::kPerPattern);

}  // namespace smc
