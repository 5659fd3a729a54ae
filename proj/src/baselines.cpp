#include "wskit/baselines.hpp"

#include <cmath>

#include "wskit/error.hpp"
#include "wskit/rng.hpp"

namespace wskit {

namespace {
constexpr const char* kModule = "baselines";
}

pareto_fit fit_pareto(const iat_series& iats, double scale_ms) {
  if (!(scale_ms > 0))
    throw error(errc::bad_argument, kModule, "scale must be positive");

  double log_sum = 0;
  std::size_t n_used = 0;
  for (auto v : iats.iats_us) {
    const double x_ms = static_cast<double>(v) / 1000.0;
    if (x_ms >= scale_ms) {
      log_sum += std::log(x_ms / scale_ms);
      ++n_used;
    }
  }
  if (n_used < 100)
    throw error(errc::insufficient_tail, kModule,
                "need >= 100 IATs at or above the scale, got " +
                    std::to_string(n_used));
  if (log_sum <= 0)
    throw error(errc::degenerate_fit, kModule,
                "tail sample is constant at the scale");

  pareto_fit fit;
  fit.params.scale_ms = scale_ms;
  fit.params.shape = static_cast<double>(n_used) / log_sum;
  fit.n_used = n_used;
  fit.n_excluded = iats.count() - n_used;
  return fit;
}

double pareto_mean_ms(const pareto_params& params) {
  if (!(params.shape > 1))
    throw error(errc::numerical_failure, kModule,
                "mean undefined for shape <= 1");
  return params.shape * params.scale_ms / (params.shape - 1.0);
}

packet_trace generate_pareto_trace(const pareto_params& params,
                                   double duration_ms, std::uint64_t seed) {
  if (!(params.scale_ms > 0) || !(params.shape > 0))
    throw error(errc::bad_argument, kModule, "scale and shape must be positive");
  if (!(duration_ms > 0))
    throw error(errc::bad_argument, kModule, "duration must be positive");

  rng gen(seed);
  packet_trace trace;
  trace.source_channels.insert(0);
  double t = 0;
  while (true) {
    t += params.scale_ms * std::pow(gen.next_double(), -1.0 / params.shape);
    if (t >= duration_ms) break;
    packet_record rec;
    rec.ts_us = std::llround(t * 1000.0);
    rec.channel_id = 0;
    trace.records.push_back(rec);
  }
  return trace;
}

std::vector<predicted_state> random_access_predict(std::size_t n_slots,
                                                   std::uint64_t seed) {
  rng gen(seed);
  std::vector<predicted_state> out(n_slots);
  for (std::size_t i = 0; i < n_slots; ++i) {
    const bool free = gen.bernoulli(0.5);
    out[i].slot_start_us = static_cast<std::int64_t>(i);  // ordinal, no grid known
    out[i].state = free ? channel_state::free : channel_state::busy;
    out[i].p_free = free ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace wskit
