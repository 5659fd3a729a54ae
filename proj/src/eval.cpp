#include "wskit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "wskit/error.hpp"
#include "wskit/rng.hpp"

namespace wskit {

namespace {

constexpr const char* kModule = "eval";
constexpr std::size_t kMinRmseSamples = 200;

std::vector<double> sorted_ms(const iat_series& s) {
  auto v = s.to_ms();
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<double> quantile_grid() {
  std::vector<double> q(100);
  for (int i = 0; i < 100; ++i) q[i] = 0.005 + 0.01 * i;
  return q;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double g = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - g) + sorted[hi] * g;
}

quantile_rmse_result quantile_rmse(const iat_series& model,
                                   const iat_series& test) {
  if (model.count() < kMinRmseSamples || test.count() < kMinRmseSamples)
    throw error(errc::too_few_samples, kModule,
                "quantile RMSE needs >= " + std::to_string(kMinRmseSamples) +
                    " IATs on both sides");
  const auto m = sorted_ms(model);
  const auto t = sorted_ms(test);
  double ss = 0;
  const auto grid = quantile_grid();
  for (double q : grid) {
    const double d = quantile_sorted(m, q) - quantile_sorted(t, q);
    ss += d * d;
  }
  quantile_rmse_result r;
  r.rmse_ms = std::sqrt(ss / static_cast<double>(grid.size()));
  double mean = 0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  r.rmse_pct = 100.0 * r.rmse_ms / mean;
  return r;
}

std::vector<channel_state> label_ground_truth(const packet_trace& trace,
                                              double y_ms, double t_s,
                                              threshold_policy policy,
                                              int window_count) {
  const auto series = extract_observations(trace, y_ms, t_s, policy, window_count);
  std::vector<channel_state> truth(series.obs.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    truth[i] = series.obs[i].label == obs_label::iat_small ? channel_state::busy
                                                           : channel_state::free;
  return truth;
}

eval_report score(const std::vector<predicted_state>& predictions,
                  const std::vector<channel_state>& truth) {
  if (predictions.size() != truth.size())
    throw error(errc::length_mismatch, kModule,
                "predictions (" + std::to_string(predictions.size()) +
                    ") and truth (" + std::to_string(truth.size()) +
                    ") differ in length");
  if (predictions.empty())
    throw error(errc::length_mismatch, kModule, "nothing to score");

  eval_report rep;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred_free = predictions[i].state == channel_state::free;
    const bool actual_free = truth[i] == channel_state::free;
    if (actual_free)
      pred_free ? ++rep.confusion.tp : ++rep.confusion.fn;
    else
      pred_free ? ++rep.confusion.fp : ++rep.confusion.tn;
  }
  const auto& cm = rep.confusion;
  if (cm.tp + cm.fn > 0)
    rep.hit_rate = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  if (cm.tp + cm.fp > 0) {
    rep.fdr = static_cast<double>(cm.fp) / static_cast<double>(cm.tp + cm.fp);
    rep.precision = 1.0 - *rep.fdr;
  }
  if (rep.precision && rep.hit_rate && (*rep.precision + *rep.hit_rate) > 0)
    rep.f1 = 2.0 * *rep.precision * *rep.hit_rate /
             (*rep.precision + *rep.hit_rate);
  return rep;
}

calibrate_x_result calibrate_x(const packet_trace& training,
                               const std::vector<double>& candidates_s, int k,
                               const packet_trace& holdout, std::uint64_t seed) {
  if (candidates_s.empty())
    throw error(errc::bad_argument, kModule, "empty x grid");
  if (k < 1)
    throw error(errc::bad_argument, kModule, "k must be >= 1");
  const double max_x = *std::max_element(candidates_s.begin(), candidates_s.end());
  if (static_cast<double>(training.span_us()) < max_x * 1e6)
    throw error(errc::trace_too_short, kModule,
                "training trace spans less than the largest x candidate");
  const auto holdout_iats = extract_iats(holdout);

  const int n = static_cast<int>(candidates_s.size());
  std::vector<calibrate_x_row> rows(n);
  std::exception_ptr err;

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const double x_s = candidates_s[i];
      const auto span = window_trace(training, training.records.front().ts_us,
                                     static_cast<std::int64_t>(x_s * 1e6));
      const auto stats = compute_traffic_stats(extract_iats(span));
      const auto params = fit_mmpp2(fit_phase(stats), stats.h);
      const double y_ms = static_cast<double>(k) * y_lower_bound_ms(params);
      const auto synthetic = generate_trace(
          params, y_ms, derive_seed(seed, stage::calibrate_x_base +
                                              static_cast<std::uint64_t>(i)));
      const auto r = quantile_rmse(extract_iats(synthetic), holdout_iats);
      rows[i] = {x_s, r.rmse_ms, r.rmse_pct};
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  calibrate_x_result res;
  res.rows = std::move(rows);
  res.best_x_s = res.rows[0].x_s;
  double best = res.rows[0].rmse_ms;
  for (const auto& r : res.rows)
    if (r.rmse_ms < best) { best = r.rmse_ms; res.best_x_s = r.x_s; }
  return res;
}

calibrate_z_result calibrate_z(const packet_trace& trace,
                               const std::vector<double>& candidates_s,
                               const mmpp2_params& params, double y_ms,
                               double t_s) {
  if (candidates_s.empty())
    throw error(errc::bad_argument, kModule, "empty z grid");
  const double max_z = *std::max_element(candidates_s.begin(), candidates_s.end());
  const auto span_us = static_cast<double>(trace.span_us());
  // largest z must still leave at least one scorable slot behind it
  if (span_us < max_z * 1e6 + y_ms * 1e3)
    throw error(errc::trace_too_short, kModule,
                "trace spans less than the largest z candidate plus one window");

  const int n = static_cast<int>(candidates_s.size());
  std::vector<calibrate_z_row> rows(n);
  std::exception_ptr err;

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const double z_s = candidates_s[i];
      const std::int64_t t0 = trace.records.front().ts_us;
      const std::int64_t z_us = static_cast<std::int64_t>(z_s * 1e6);
      const auto train_span = window_trace(trace, t0, z_us);
      const auto train_series =
          extract_observations(train_span, y_ms, t_s,
                               threshold_policy::fixed_training_average);
      auto trained = baum_welch(init_model(params), train_series.obs);
      trained.model.threshold_value_ms = train_series.fixed_threshold_ms;

      const std::int64_t score_start = t0 + z_us;
      const std::int64_t score_len =
          trace.records.back().ts_us - score_start + 1;
      const auto score_span = window_trace(trace, score_start, score_len);
      const auto score_series = extract_observations(
          score_span, y_ms, t_s, threshold_policy::moving_average,
          trained.model.window_count);
      const auto preds = predict_sequence(trained.model, score_series.obs);
      std::vector<channel_state> truth(score_series.obs.size());
      for (std::size_t s = 0; s < truth.size(); ++s)
        truth[s] = score_series.obs[s].label == obs_label::iat_small
                       ? channel_state::busy
                       : channel_state::free;
      const auto rep = score(preds, truth);
      rows[i] = {z_s, rep.hit_rate, rep.precision, rep.f1};
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  calibrate_z_result res;
  res.rows = std::move(rows);
  double best = -1;
  for (const auto& r : res.rows) {
    if (r.f1 && *r.f1 > best) { best = *r.f1; res.best_z_s = r.z_s; }
  }
  if (best < 0)
    throw error(errc::numerical_failure, kModule,
                "no candidate z produced a defined F1");
  return res;
}

}  // namespace wskit
