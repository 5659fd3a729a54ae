#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wskit/error.hpp"
#include "wskit/json_io.hpp"
#include "wskit/pipeline.hpp"
#include "wskit/rng.hpp"

using namespace wskit;

namespace {

packet_trace make_trace() {
  mmpp2_params p;
  p.lambda1 = 0.2;
  p.lambda2 = 0.02;
  p.r1 = 0.002;
  p.r2 = 0.002;
  p.pi = {0.5, 0.5};
  return generate_trace(p, 200000.0, 4242);  // 200 s
}

pipeline_config small_config() {
  pipeline_config c;
  c.x_s = 60;
  c.z_s = 60;
  c.t_s = 5;
  c.k = 1;
  c.y_override_ms = 5000.0;
  c.ma_window = 20;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("pipeline equals the same steps composed by hand") {
  const auto merged = make_trace();
  const auto cfg = small_config();
  const auto res = run_pipeline(merged, cfg);

  // replicate the documented span layout step by step
  const std::int64_t t0 = merged.records.front().ts_us;
  const auto x_us = static_cast<std::int64_t>(cfg.x_s * 1e6);
  const auto z_us = static_cast<std::int64_t>(cfg.z_s * 1e6);

  const auto fit_span = window_trace(merged, t0, x_us);
  const auto stats = compute_traffic_stats(extract_iats(fit_span));
  const auto params = fit_mmpp2(fit_phase(stats), stats.h);
  CHECK(res.stats.m1_ms == stats.m1_ms);
  CHECK(res.stats.sigma_ms == stats.sigma_ms);
  CHECK(res.stats.c == stats.c);
  CHECK(res.stats.h == stats.h);
  CHECK(res.mmpp.lambda1 == params.lambda1);
  CHECK(res.mmpp.lambda2 == params.lambda2);
  CHECK(res.mmpp.r1 == params.r1);
  CHECK(res.mmpp.r2 == params.r2);
  CHECK(res.y_ms == *cfg.y_override_ms);

  const auto train_span = window_trace(merged, t0 + x_us, z_us);
  const auto train_series = extract_observations(
      train_span, res.y_ms, cfg.t_s, threshold_policy::fixed_training_average);
  auto trained = baum_welch(init_model(params), train_series.obs);
  CHECK(res.training.iterations == trained.iterations);
  CHECK(res.training.converged == trained.converged);
  REQUIRE(res.training.log_likelihood.size() == trained.log_likelihood.size());
  CHECK(res.training.log_likelihood.back() == trained.log_likelihood.back());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(res.training.model.a[i][j] == trained.model.a[i][j]);
      CHECK(res.training.model.b[i][j] == trained.model.b[i][j]);
    }
  CHECK(res.training.model.threshold_value_ms == train_series.fixed_threshold_ms);
  CHECK(res.training.model.policy == threshold_policy::moving_average);
  CHECK(res.training.model.window_count == cfg.ma_window);

  trained.model.threshold_value_ms = train_series.fixed_threshold_ms;
  trained.model.policy = threshold_policy::moving_average;
  trained.model.window_count = cfg.ma_window;

  const std::int64_t score_start = t0 + x_us + z_us;
  const std::int64_t score_len = merged.records.back().ts_us - score_start + 1;
  const auto score_span = window_trace(merged, score_start, score_len);
  const auto score_series = extract_observations(
      score_span, res.y_ms, cfg.t_s, threshold_policy::moving_average,
      cfg.ma_window);
  const auto preds = predict_sequence(trained.model, score_series.obs);

  REQUIRE(res.slots.size() == score_series.obs.size());
  for (std::size_t i = 0; i < res.slots.size(); ++i) {
    CHECK(res.slots[i].slot_start_us == score_series.obs[i].slot_start_us);
    CHECK(res.slots[i].observation == score_series.obs[i].label);
    CHECK(res.slots[i].prediction == preds[i].state);
    const auto want = score_series.obs[i].label == obs_label::iat_small
                          ? channel_state::busy
                          : channel_state::free;
    CHECK(res.slots[i].truth == want);
  }

  std::vector<channel_state> truth(score_series.obs.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    truth[i] = score_series.obs[i].label == obs_label::iat_small
                   ? channel_state::busy
                   : channel_state::free;
  const auto rep = score(preds, truth);
  CHECK(res.report.confusion.tp == rep.confusion.tp);
  CHECK(res.report.confusion.fp == rep.confusion.fp);
  CHECK(res.report.confusion.fn == rep.confusion.fn);
  CHECK(res.report.confusion.tn == rep.confusion.tn);
  CHECK(res.report.hit_rate == rep.hit_rate);
  CHECK(res.report.fdr == rep.fdr);

  // synthetic side: same derived seed, same duration, so rmse must match too
  const auto synthetic = generate_trace(
      params, res.y_ms, derive_seed(cfg.seed, stage::mmpp_generate));
  const auto r = quantile_rmse(extract_iats(synthetic), extract_iats(score_span));
  REQUIRE(res.report.rmse_ms.has_value());
  CHECK(*res.report.rmse_ms == r.rmse_ms);
  CHECK(*res.report.rmse_pct == r.rmse_pct);

  const auto total = res.report.confusion.tp + res.report.confusion.fp +
                     res.report.confusion.fn + res.report.confusion.tn;
  CHECK(total == res.slots.size());
}

TEST_CASE("pipeline reports are byte-identical across reruns") {
  const auto merged = make_trace();
  const auto cfg = small_config();
  const auto a = to_json(run_pipeline(merged, cfg), cfg).dump(2);
  const auto b = to_json(run_pipeline(merged, cfg), cfg).dump(2);
  CHECK(a == b);

  auto cfg2 = cfg;
  cfg2.seed = 10;  // only the synthetic-side rmse depends on the seed
  const auto res = run_pipeline(merged, cfg);
  const auto res2 = run_pipeline(merged, cfg2);
  CHECK(res2.mmpp.lambda1 == res.mmpp.lambda1);
  CHECK(res2.report.confusion.tp == res.report.confusion.tp);
  REQUIRE(res2.report.rmse_ms.has_value());
  CHECK(*res2.report.rmse_ms != *res.report.rmse_ms);
}

TEST_CASE("pipeline validates its configuration") {
  const auto merged = make_trace();
  auto cfg = small_config();

  cfg.x_s = 0;
  CHECK_THROWS_AS(run_pipeline(merged, cfg), error);
  cfg = small_config();
  cfg.k = 0;
  CHECK_THROWS_AS(run_pipeline(merged, cfg), error);
  cfg = small_config();
  cfg.y_override_ms = -1.0;
  CHECK_THROWS_AS(run_pipeline(merged, cfg), error);

  cfg = small_config();
  cfg.x_s = 100;
  cfg.z_s = 100;  // x + z swallows the whole 200 s trace
  try {
    run_pipeline(merged, cfg);
    FAIL("expected trace_too_short");
  } catch (const error& e) {
    CHECK(e.code() == errc::trace_too_short);
  }
}

TEST_CASE("y override replaces k * y_lb and k is otherwise honored") {
  const auto merged = make_trace();
  auto cfg = small_config();
  cfg.k = 7;  // irrelevant under an override
  CHECK(run_pipeline(merged, cfg).y_ms == 5000.0);

  cfg.y_override_ms.reset();
  cfg.k = 2;
  const auto res = run_pipeline(merged, cfg);
  CHECK(res.y_ms == 2.0 * y_lower_bound_ms(res.mmpp));
}

TEST_CASE("model and stats JSON round-trips are exact") {
  const auto merged = make_trace();
  const auto cfg = small_config();
  const auto res = run_pipeline(merged, cfg);

  const auto s2 = stats_from_json(to_json(res.stats));
  CHECK(s2.m1_ms == res.stats.m1_ms);
  CHECK(s2.sigma_ms == res.stats.sigma_ms);
  CHECK(s2.c == res.stats.c);
  CHECK(s2.h == res.stats.h);

  const auto m2 = mmpp_from_json(to_json(res.mmpp));
  CHECK(m2.lambda1 == res.mmpp.lambda1);
  CHECK(m2.lambda2 == res.mmpp.lambda2);
  CHECK(m2.r1 == res.mmpp.r1);
  CHECK(m2.r2 == res.mmpp.r2);
  CHECK(m2.pi[0] == doctest::Approx(res.mmpp.pi[0]).epsilon(1e-12));

  const auto& model = res.training.model;
  const auto h2 = hmm_from_json(to_json(model));
  CHECK(h2.initial == model.initial);
  CHECK(h2.a == model.a);
  CHECK(h2.b == model.b);
  CHECK(h2.policy == model.policy);
  CHECK(h2.threshold_value_ms == model.threshold_value_ms);
  CHECK(h2.window_count == model.window_count);
  CHECK(h2.degenerate == model.degenerate);

  const auto j = to_json(res, cfg);
  CHECK(j["report"].contains("ground_truth_rule"));
  CHECK(j["config"]["x_s"] == cfg.x_s);
  CHECK(j["config"]["seed"] == cfg.seed);
  CHECK(j["training"]["converged"] == res.training.converged);
}

TEST_CASE("prediction and truth CSV round-trips are exact") {
  const auto merged = make_trace();
  const auto res = run_pipeline(merged, small_config());

  std::vector<predicted_state> preds(res.slots.size());
  rng r(17);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    preds[i].slot_start_us = res.slots[i].slot_start_us;
    preds[i].p_free = r.next_double();
    preds[i].state = preds[i].p_free > 0.5 ? channel_state::free
                                           : channel_state::busy;
  }

  const std::string pred_path = "/tmp/wskit_test_preds.csv";
  write_predictions_csv(preds, pred_path);
  const auto back = read_predictions_csv(pred_path);
  REQUIRE(back.size() == preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(back[i].slot_start_us == preds[i].slot_start_us);
    CHECK(back[i].state == preds[i].state);
    CHECK(back[i].p_free == preds[i].p_free);  // shortest round-trip doubles
  }
  std::remove(pred_path.c_str());

  std::vector<channel_state> truth(res.slots.size());
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = res.slots[i].truth;
  const std::string truth_path = "/tmp/wskit_test_truth.csv";
  write_truth_csv(truth, truth_path);
  const auto tback = read_truth_csv(truth_path);
  REQUIRE(tback.size() == truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) CHECK(tback[i] == truth[i]);
  std::remove(truth_path.c_str());
}
