#include "wskit/pipeline.hpp"

#include <cmath>

#include "wskit/diag.hpp"
#include "wskit/error.hpp"
#include "wskit/rng.hpp"

namespace wskit {

namespace {
constexpr const char* kModule = "pipeline";
}

pipeline_result run_pipeline(const packet_trace& merged,
                             const pipeline_config& config) {
  if (!(config.x_s > 0) || !(config.z_s > 0) || !(config.t_s > 0))
    throw error(errc::bad_argument, kModule, "x, z and t must be positive");
  if (config.k < 1)
    throw error(errc::bad_argument, kModule, "k must be >= 1");
  if (config.y_override_ms && !(*config.y_override_ms > 0))
    throw error(errc::bad_argument, kModule, "y override must be positive");

  const std::int64_t x_us = static_cast<std::int64_t>(config.x_s * 1e6);
  const std::int64_t z_us = static_cast<std::int64_t>(config.z_s * 1e6);
  if (static_cast<double>(merged.span_us()) <=
      static_cast<double>(x_us) + static_cast<double>(z_us))
    throw error(errc::trace_too_short, kModule,
                "trace must span beyond x + z to leave a scoring segment");

  pipeline_result res;
  const std::int64_t t0 = merged.records.front().ts_us;

  // model fitting span
  const auto fit_span = window_trace(merged, t0, x_us);
  res.stats = compute_traffic_stats(extract_iats(fit_span));
  res.mmpp = fit_mmpp2(fit_phase(res.stats), res.stats.h);
  res.y_ms = config.y_override_ms
                 ? *config.y_override_ms
                 : static_cast<double>(config.k) * y_lower_bound_ms(res.mmpp);

  const auto synthetic =
      generate_trace(res.mmpp, res.y_ms, derive_seed(config.seed, stage::mmpp_generate));

  // HMM training span
  const auto train_span = window_trace(merged, t0 + x_us, z_us);
  const auto train_series = extract_observations(
      train_span, res.y_ms, config.t_s, threshold_policy::fixed_training_average);
  res.training = baum_welch(init_model(res.mmpp), train_series.obs);
  res.training.model.threshold_value_ms = train_series.fixed_threshold_ms;
  res.training.model.policy = threshold_policy::moving_average;
  res.training.model.window_count = config.ma_window;

  // scoring span
  const std::int64_t score_start = t0 + x_us + z_us;
  const std::int64_t score_len = merged.records.back().ts_us - score_start + 1;
  const auto score_span = window_trace(merged, score_start, score_len);
  const auto score_series =
      extract_observations(score_span, res.y_ms, config.t_s,
                           threshold_policy::moving_average, config.ma_window);
  const auto preds = predict_sequence(res.training.model, score_series.obs);

  std::vector<channel_state> truth(score_series.obs.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    truth[i] = score_series.obs[i].label == obs_label::iat_small
                   ? channel_state::busy
                   : channel_state::free;
  res.report = score(preds, truth);

  res.slots.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    res.slots[i] = {score_series.obs[i].slot_start_us, score_series.obs[i].label,
                    preds[i].state, truth[i]};

  // distribution check of the modeled traffic against the scoring span
  try {
    const auto r = quantile_rmse(extract_iats(synthetic), extract_iats(score_span));
    res.report.rmse_ms = r.rmse_ms;
    res.report.rmse_pct = r.rmse_pct;
  } catch (const error& e) {
    if (e.code() != errc::too_few_samples && e.code() != errc::too_few_records)
      throw;
    diag(diag_level::warn, kModule,
         std::string("quantile RMSE skipped: ") + e.what());
  }
  return res;
}

}  // namespace wskit
