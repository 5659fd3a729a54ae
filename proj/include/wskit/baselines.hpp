#pragma once

#include <cstdint>
#include <vector>

#include "wskit/hmm.hpp"
#include "wskit/trace.hpp"

namespace wskit {

// Truncated Pareto IAT model: F(x) = 1 - (scale/x)^shape for x >= scale.
struct pareto_params {
  double scale_ms = 0;
  double shape = 0;
};

struct pareto_fit {
  pareto_params params;
  std::size_t n_used = 0;      // IATs at or above the scale
  std::size_t n_excluded = 0;  // IATs below it
};

// Measurement floor used throughout: shortest resolvable frame gap.
inline constexpr double k_default_pareto_scale_ms = 4.256;

// Fixed-scale MLE, shape = n / sum(ln(x_i/scale)) over the tail sample.
// Needs at least 100 tail IATs; a tail of all-equal values has no MLE.
pareto_fit fit_pareto(const iat_series& iats,
                      double scale_ms = k_default_pareto_scale_ms);

// mean = shape*scale/(shape-1), only defined for shape > 1
double pareto_mean_ms(const pareto_params& params);

// Inverse-CDF renewal sampling: x = scale * u^(-1/shape).
packet_trace generate_pareto_trace(const pareto_params& params,
                                   double duration_ms, std::uint64_t seed);

// 0.5-persistent random access: each slot is an independent fair coin.
std::vector<predicted_state> random_access_predict(std::size_t n_slots,
                                                   std::uint64_t seed);

}  // namespace wskit
