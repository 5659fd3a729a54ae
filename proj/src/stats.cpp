#include "wskit/stats.hpp"

#include <cmath>

#include "wskit/error.hpp"

namespace wskit {

basic_stats_result compute_basic_stats(const iat_series& iats) {
  if (iats.count() < 2)
    throw error(errc::too_few_samples, "stats",
                "need at least 2 IATs for basic statistics");
  double sum = 0;
  for (auto v : iats.iats_us) sum += static_cast<double>(v);
  const double n = static_cast<double>(iats.count());
  const double mean_us = sum / n;
  double ss = 0;
  for (auto v : iats.iats_us) {
    double d = static_cast<double>(v) - mean_us;
    ss += d * d;
  }
  basic_stats_result r;
  r.m1_ms = mean_us / 1000.0;
  r.sigma_ms = std::sqrt(ss / n) / 1000.0;
  r.c = r.sigma_ms / r.m1_ms;
  return r;
}

traffic_stats compute_traffic_stats(const iat_series& iats) {
  auto basic = compute_basic_stats(iats);
  traffic_stats s;
  s.m1_ms = basic.m1_ms;
  s.sigma_ms = basic.sigma_ms;
  s.c = basic.c;
  s.h = hurst_median(iats.to_ms());
  s.n_samples = iats.count();
  s.low_confidence = iats.count() < k_hurst_stable_n;
  return s;
}

fit_branch classify_branch(const traffic_stats& stats) {
  if (stats.c > 1.0 && stats.h > 0.5 && stats.h < 1.0)
    return fit_branch::hyperexponential;
  if (stats.c >= 1.0 / std::sqrt(2.0) && stats.c <= 1.0)
    return fit_branch::coxian;
  return fit_branch::unsupported;
}

}  // namespace wskit
