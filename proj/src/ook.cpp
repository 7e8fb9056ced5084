#include "smc/ook.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "smc/errors.hpp"

namespace smc {

double threshold(double y_ts, double i_ts) {
  if (y_ts < 0.0 || i_ts < 0.0) throw DomainError("threshold: negative mean");
  if (y_ts == 0.0) return std::numeric_limits<double>::infinity();
  if (i_ts == 0.0) return 0.0;
  return y_ts / std::log1p(y_ts / i_ts);
}

int decide(double observed, double xi) { return observed > xi ? 1 : 0; }

namespace {

double log_pmf(std::int64_t k, double mean) {
  return k * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

double poisson_cdf(int k, double mean) {
  if (mean < 0.0) throw DomainError("poisson_cdf: negative mean");
  if (k < 0) return 0.0;
  if (mean == 0.0) return 1.0;
  // Streaming log-sum-exp over j = 0..k.
  double m = -mean;  // log pmf at j = 0
  double s = 1.0;
  double lp = m;
  const double lmean = std::log(mean);
  for (std::int64_t j = 1; j <= k; ++j) {
    lp += lmean - std::log(static_cast<double>(j));
    if (lp > m) {
      s = s * std::exp(m - lp) + 1.0;
      m = lp;
    } else {
      s += std::exp(lp - m);
    }
  }
  return std::min(1.0, std::exp(m + std::log(s)));
}

double poisson_sf(int k, double mean) {
  if (mean < 0.0) throw DomainError("poisson_sf: negative mean");
  if (mean == 0.0) return 0.0;  // Y = 0 always, never exceeds k >= 0
  if (k < 0) return 1.0;
  if (k + 1 < mean)  // bulk sits in the tail; the complement sum is shorter
    return std::max(0.0, 1.0 - poisson_cdf(k, mean));
  // Upward sum from j = k+1; term ratio mean/(j+1) < 1 so it converges fast.
  double scaled = 1.0, term = 1.0;
  for (std::int64_t j = k + 2; term > 1e-17 * scaled; ++j) {
    term *= mean / static_cast<double>(j);
    scaled += term;
    if (j > k + 2000000) break;  // unreachable guard
  }
  return std::min(1.0, std::exp(log_pmf(k + 1, mean) + std::log(scaled)));
}

DetectionStats ber_exact(const OokConfig& config, double y_ts, const IsiProfile& isi,
                         ThresholdPolicy policy) {
  if (config.slot_duration <= 0.0) throw DomainError("ber_exact: slot duration must be positive");
  if (config.per_cell_release < 1.0) throw DomainError("ber_exact: per-cell release must be >= 1");
  if (config.isi_memory < 0) throw DomainError("ber_exact: negative memory");
  if (config.isi_memory > 20)
    throw MemoryTooLarge("ber_exact: pattern enumeration bounded at memory 20");
  if (config.t_sample <= 0.0 || config.t_sample > config.slot_duration)
    throw DomainError("ber_exact: sampling instant must lie in (0, T_s]");
  const int j_count = config.isi_memory;
  if (static_cast<int>(isi.values.size()) < j_count)
    throw DomainError("ber_exact: ISI profile shorter than the configured memory");
  if (y_ts < 0.0) throw DomainError("ber_exact: negative signal mean");
  for (int j = 0; j < j_count; ++j)
    if (isi.values[j] < 0.0) throw DomainError("ber_exact: negative ISI mean");

  double isi_expected = 0.0;
  for (int j = 0; j < j_count; ++j) isi_expected += 0.5 * isi.values[j];
  const double xi_aggregate = threshold(y_ts, isi_expected);

  const std::uint64_t patterns = 1ull << (j_count + 1);
  double err_sum = 0.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    const bool b0 = (mask & 1ull) != 0;
    double isi_mean = 0.0;
    for (int j = 1; j <= j_count; ++j)
      if ((mask >> j) & 1ull) isi_mean += isi.values[j - 1];
    const double xi =
        policy == ThresholdPolicy::kPerPattern ? threshold(y_ts, isi_mean) : xi_aggregate;
    double err;
    if (std::isinf(xi)) {
      err = b0 ? 1.0 : 0.0;  // detector always outputs 0
    } else if (xi >= 1e8) {
      throw DomainError("ber_exact: means too large for exact tail summation");
    } else {
      const int k0 = static_cast<int>(std::floor(xi));  // decide 0 iff Y <= k0
      err = b0 ? poisson_cdf(k0, isi_mean + y_ts) : poisson_sf(k0, isi_mean);
    }
    err_sum += err;
  }

  DetectionStats stats;
  stats.threshold = xi_aggregate;
  stats.ber = err_sum / static_cast<double>(patterns);
  return stats;
}

}  // namespace smc
