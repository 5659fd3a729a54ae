// whitespace-kit: command-line front end for the white-space prediction
// toolkit. Every subcommand is a thin wrapper over one library operation;
// `pipeline` composes them end to end. All durations on the command line are
// seconds (converted to ms/us internally); one --seed governs every
// stochastic stage through the documented per-stage derivation, so a stage
// rerun in isolation reproduces what the pipeline did.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wskit/baselines.hpp"
#include "wskit/diag.hpp"
#include "wskit/error.hpp"
#include "wskit/eval.hpp"
#include "wskit/hmm.hpp"
#include "wskit/json_io.hpp"
#include "wskit/mmpp.hpp"
#include "wskit/pipeline.hpp"
#include "wskit/rng.hpp"
#include "wskit/stats.hpp"
#include "wskit/trace.hpp"

namespace {

using namespace wskit;

std::int64_t seconds_to_us(double s) {
  return static_cast<std::int64_t>(std::llround(s * 1e6));
}

packet_trace load_merged(const std::vector<std::string>& paths) {
  std::vector<packet_trace> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths) traces.push_back(load_trace_csv(p));
  return traces.size() == 1 ? std::move(traces.front()) : merge_traces(traces);
}

// Optional [--start, --start + --len) cut, seconds relative to the first
// record; no --len means "to the end of the trace" (last record included).
packet_trace cut(const packet_trace& trace, std::optional<double> start_s,
                 std::optional<double> len_s) {
  if (!start_s && !len_s) return trace;
  const std::int64_t t0 = trace.records.front().ts_us;
  const std::int64_t start_us = t0 + seconds_to_us(start_s.value_or(0.0));
  const std::int64_t dur_us =
      len_s ? seconds_to_us(*len_s)
            : trace.records.back().ts_us - start_us + 1;
  return window_trace(trace, start_us, dur_us);
}

void emit_json(const nlohmann::ordered_json& j, const std::string& out) {
  if (out.empty())
    std::printf("%s\n", j.dump(2).c_str());
  else
    write_json(j, out);
}

// Shared options for subcommands that read packet traces.
struct trace_args {
  std::vector<std::string> paths;
  std::optional<double> start_s;
  std::optional<double> len_s;

  void attach(CLI::App* cmd, int min_paths = 1) {
    cmd->add_option("--traces", paths, "input trace CSV files (merged)")
        ->required()
        ->expected(min_paths, -1);
    cmd->add_option("--start", start_s,
                    "cut: offset from the first record, seconds");
    cmd->add_option("--len", len_s, "cut: length of the kept span, seconds");
  }

  packet_trace load() const { return cut(load_merged(paths), start_s, len_s); }
};

// Mirrors the pipeline's tolerance for an unscorable synthetic-vs-test RMSE:
// too little data downgrades to a warning and absent fields.
void fill_rmse(eval_report& rep, const packet_trace& synthetic,
               const packet_trace& test) {
  try {
    const auto q = quantile_rmse(extract_iats(synthetic), extract_iats(test));
    rep.rmse_ms = q.rmse_ms;
    rep.rmse_pct = q.rmse_pct;
  } catch (const error& e) {
    if (e.code() != errc::too_few_samples && e.code() != errc::too_few_records)
      throw;
    diag(diag_level::warn, "cli",
         "rmse skipped, not enough interarrivals on one side");
  }
}

int run(int argc, char** argv) {
  CLI::App app{
      "Models aggregated WiFi interference from packet traces with a "
      "self-similarity-aware MMPP(2) and predicts transmission white spaces "
      "with a two-state HMM."};
  app.require_subcommand(1);
  std::string out;

  // --- ingest ---------------------------------------------------------------
  auto* c_ingest = app.add_subcommand(
      "ingest", "validate/sort one capture CSV, write it back canonicalized");
  std::string ingest_in;
  c_ingest->add_option("--traces", ingest_in, "input trace CSV")->required();
  c_ingest->add_option("-o,--out", out, "output CSV path")->required();
  c_ingest->callback(
      [&] { write_trace_csv(load_trace_csv(ingest_in), out); });

  // --- merge ----------------------------------------------------------------
  auto* c_merge =
      app.add_subcommand("merge", "merge captures into one ordered trace");
  std::vector<std::string> merge_in;
  c_merge->add_option("--traces", merge_in, "input trace CSV files")
      ->required()
      ->expected(1, -1);
  c_merge->add_option("-o,--out", out, "output CSV path")->required();
  c_merge->callback([&] { write_trace_csv(load_merged(merge_in), out); });

  // --- stats ----------------------------------------------------------------
  auto* c_stats = app.add_subcommand(
      "stats", "interarrival statistics (M1, sigma, C, Hurst) of a trace");
  trace_args stats_t;
  stats_t.attach(c_stats);
  c_stats->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_stats->callback([&] {
    const auto s = compute_traffic_stats(extract_iats(stats_t.load()));
    auto j = to_json(s);
    j["branch"] = branch_name(classify_branch(s));
    emit_json(j, out);
  });

  // --- fit-mmpp ---------------------------------------------------------------
  auto* c_fitm = app.add_subcommand(
      "fit-mmpp", "fit an MMPP(2) from a trace or a stats JSON");
  std::vector<std::string> fitm_paths;
  std::optional<double> fitm_start, fitm_len;
  std::string fitm_stats;
  c_fitm->add_option("--traces", fitm_paths, "input trace CSV files (merged)")
      ->expected(1, -1);
  c_fitm->add_option("--start", fitm_start,
                     "cut: offset from the first record, seconds");
  c_fitm->add_option("--len", fitm_len, "cut: length of the kept span, seconds");
  c_fitm->add_option("--stats", fitm_stats, "stats JSON from the stats command");
  c_fitm->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_fitm->callback([&] {
    if (fitm_stats.empty() == fitm_paths.empty())
      throw error(errc::bad_argument, "cli",
                  "fit-mmpp needs exactly one of --traces or --stats");
    const traffic_stats s =
        fitm_stats.empty()
            ? compute_traffic_stats(extract_iats(
                  cut(load_merged(fitm_paths), fitm_start, fitm_len)))
            : stats_from_json(read_json(fitm_stats));
    emit_json(to_json(fit_mmpp2(fit_phase(s), s.h)), out);
  });

  // --- fit-pareto -------------------------------------------------------------
  auto* c_fitp = app.add_subcommand(
      "fit-pareto", "fixed-scale Pareto MLE baseline fit of the IAT tail");
  trace_args fitp_t;
  fitp_t.attach(c_fitp);
  double fitp_scale = k_default_pareto_scale_ms;
  c_fitp->add_option("--scale", fitp_scale, "fixed Pareto scale, ms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_fitp->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_fitp->callback([&] {
    emit_json(to_json(fit_pareto(extract_iats(fitp_t.load()), fitp_scale)),
              out);
  });

  // --- generate ---------------------------------------------------------------
  auto* c_gen = app.add_subcommand(
      "generate", "synthesize a trace from a fitted MMPP(2) or Pareto model");
  std::string gen_model;
  double gen_dur_s = 0;
  std::uint64_t gen_seed = 0;
  c_gen->add_option("--model", gen_model, "model JSON (fit-mmpp or fit-pareto)")
      ->required();
  c_gen->add_option("--duration", gen_dur_s, "generated span, seconds")
      ->required()
      ->check(CLI::PositiveNumber);
  c_gen->add_option("--seed", gen_seed, "run seed")->capture_default_str();
  c_gen->add_option("-o,--out", out, "output CSV path")->required();
  c_gen->callback([&] {
    const auto j = read_json(gen_model);
    const double dur_ms = gen_dur_s * 1000.0;
    packet_trace t;
    if (j.contains("lambda1"))
      t = generate_trace(mmpp_from_json(j), dur_ms,
                         derive_seed(gen_seed, stage::mmpp_generate));
    else if (j.contains("shape"))
      t = generate_pareto_trace(pareto_from_json(j), dur_ms,
                                derive_seed(gen_seed, stage::pareto_generate));
    else
      throw error(errc::parse_error, "cli",
                  "model JSON has neither MMPP nor Pareto fields");
    write_trace_csv(t, out);
  });

  // --- train-hmm --------------------------------------------------------------
  auto* c_train = app.add_subcommand(
      "train-hmm", "Baum-Welch training on windowed channel observations");
  trace_args train_t;
  train_t.attach(c_train);
  std::string train_mmpp;
  double train_ts = 5.0;
  std::optional<double> train_y_s;
  int train_k = 1, train_ma = 20;
  c_train->add_option("--mmpp", train_mmpp,
                      "MMPP JSON (initial state vector, y lower bound)")
      ->required();
  c_train->add_option("--t", train_ts, "slot period T, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("--y", train_y_s,
                      "observation window length, seconds (default k * y_lb)");
  c_train->add_option("--k", train_k, "y = k * y_lb multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("--ma-window", train_ma,
                      "moving-average window count stored for prediction")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_train->callback([&] {
    const auto params = mmpp_from_json(read_json(train_mmpp));
    const double y_ms =
        train_y_s ? *train_y_s * 1000.0 : train_k * y_lower_bound_ms(params);
    const auto obs =
        extract_observations(train_t.load(), y_ms, train_ts,
                             threshold_policy::fixed_training_average);
    auto tr = baum_welch(init_model(params), obs.obs);
    tr.model.threshold_value_ms = obs.fixed_threshold_ms;
    tr.model.policy = threshold_policy::moving_average;
    tr.model.window_count = train_ma;
    auto j = to_json(tr.model);
    j["y_ms"] = y_ms;
    j["t_s"] = train_ts;
    j["training"] = {{"iterations", tr.iterations},
                     {"converged", tr.converged},
                     {"log_likelihood",
                      tr.log_likelihood.empty()
                          ? nlohmann::ordered_json(nullptr)
                          : nlohmann::ordered_json(tr.log_likelihood.back())}};
    emit_json(j, out);
  });

  // --- predict ----------------------------------------------------------------
  auto* c_pred = app.add_subcommand(
      "predict", "one-step-ahead white-space predictions for every slot");
  trace_args pred_t;
  pred_t.attach(c_pred);
  std::string pred_model;
  std::optional<double> pred_y_s, pred_ts;
  c_pred->add_option("--model", pred_model, "HMM JSON from train-hmm")
      ->required();
  c_pred->add_option("--y", pred_y_s,
                     "window length, seconds (default: model file)");
  c_pred->add_option("--t", pred_ts, "slot period, seconds (default: model file)");
  c_pred->add_option("-o,--out", out, "output predictions CSV")->required();
  c_pred->callback([&] {
    const auto j = read_json(pred_model);
    const auto m = hmm_from_json(j);
    double y_ms = 0, t_s = 0;
    if (pred_y_s)
      y_ms = *pred_y_s * 1000.0;
    else if (j.contains("y_ms") && j["y_ms"].is_number())
      y_ms = j["y_ms"].get<double>();
    else
      throw error(errc::bad_argument, "cli",
                  "window length missing: pass --y or use a model JSON that "
                  "records y_ms");
    if (pred_ts)
      t_s = *pred_ts;
    else if (j.contains("t_s") && j["t_s"].is_number())
      t_s = j["t_s"].get<double>();
    else
      t_s = 5.0;
    const auto obs =
        extract_observations(pred_t.load(), y_ms, t_s, m.policy, m.window_count);
    write_predictions_csv(predict_sequence(m, obs.obs), out);
  });

  // --- evaluate ---------------------------------------------------------------
  auto* c_eval = app.add_subcommand(
      "evaluate", "score predictions against thresholded ground truth");
  trace_args eval_t;
  eval_t.attach(c_eval);
  std::string eval_pred, eval_synth;
  double eval_y_s = 0, eval_ts = 5.0;
  int eval_ma = 20;
  c_eval->add_option("--predictions", eval_pred, "predictions CSV from predict")
      ->required();
  c_eval->add_option("--y", eval_y_s, "window length, seconds")
      ->required()
      ->check(CLI::PositiveNumber);
  c_eval->add_option("--t", eval_ts, "slot period, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_eval->add_option("--ma-window", eval_ma, "moving-average window count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_eval->add_option("--synthetic", eval_synth,
                     "synthetic trace CSV for the quantile RMSE columns");
  c_eval->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_eval->callback([&] {
    const auto trace = eval_t.load();
    const double y_ms = eval_y_s * 1000.0;
    const auto truth = label_ground_truth(
        trace, y_ms, eval_ts, threshold_policy::moving_average, eval_ma);
    auto rep = score(read_predictions_csv(eval_pred), truth);
    if (!eval_synth.empty()) fill_rmse(rep, load_trace_csv(eval_synth), trace);
    auto j = to_json(rep);
    j["config"] = {{"y_ms", y_ms}, {"t_s", eval_ts}, {"ma_window", eval_ma}};
    emit_json(j, out);
  });

  // --- calibrate-x ------------------------------------------------------------
  auto* c_calx = app.add_subcommand(
      "calibrate-x", "sweep the MMPP fitting duration x against a holdout");
  trace_args calx_t;
  calx_t.attach(c_calx);
  std::vector<std::string> calx_holdout;
  std::vector<double> calx_grid = k_default_x_grid_s;
  int calx_k = 1;
  std::uint64_t calx_seed = 0;
  c_calx->add_option("--holdout", calx_holdout, "holdout trace CSV files")
      ->required()
      ->expected(1, -1);
  c_calx->add_option("--grid", calx_grid, "candidate x values, seconds")
      ->expected(1, -1);
  c_calx->add_option("--k", calx_k, "y = k * y_lb multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_calx->add_option("--seed", calx_seed, "run seed")->capture_default_str();
  c_calx->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_calx->callback([&] {
    emit_json(to_json(calibrate_x(calx_t.load(), calx_grid, calx_k,
                                  load_merged(calx_holdout), calx_seed)),
              out);
  });

  // --- calibrate-z ------------------------------------------------------------
  auto* c_calz = app.add_subcommand(
      "calibrate-z", "sweep the HMM training duration z, selecting on F1");
  trace_args calz_t;
  calz_t.attach(c_calz);
  std::string calz_mmpp;
  std::vector<double> calz_grid = {60, 120, 300, 600, 960};
  std::optional<double> calz_y_s;
  int calz_k = 1;
  double calz_ts = 5.0;
  c_calz->add_option("--mmpp", calz_mmpp, "MMPP JSON from fit-mmpp")->required();
  c_calz->add_option("--grid", calz_grid, "candidate z values, seconds")
      ->expected(1, -1);
  c_calz->add_option("--y", calz_y_s,
                     "window length, seconds (default k * y_lb)");
  c_calz->add_option("--k", calz_k, "y = k * y_lb multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_calz->add_option("--t", calz_ts, "slot period, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_calz->add_option("-o,--out", out, "output JSON path (default stdout)");
  c_calz->callback([&] {
    const auto params = mmpp_from_json(read_json(calz_mmpp));
    const double y_ms =
        calz_y_s ? *calz_y_s * 1000.0 : calz_k * y_lower_bound_ms(params);
    emit_json(
        to_json(calibrate_z(calz_t.load(), calz_grid, params, y_ms, calz_ts)),
        out);
  });

  // --- pipeline ---------------------------------------------------------------
  auto* c_pipe = app.add_subcommand(
      "pipeline", "merge, fit, generate, train, predict and score in one run");
  std::vector<std::string> pipe_in;
  pipeline_config cfg;
  std::optional<double> pipe_y_s;
  std::string pipe_slots, pipe_format = "json";
  c_pipe->add_option("--traces", pipe_in, "input trace CSV files (merged)")
      ->required()
      ->expected(1, -1);
  c_pipe->add_option("--x", cfg.x_s, "MMPP fitting duration, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_pipe->add_option("--z", cfg.z_s, "HMM training duration, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_pipe->add_option("--t", cfg.t_s, "slot period T, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_pipe->add_option("--k", cfg.k, "y = k * y_lb multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_pipe->add_option("--y", pipe_y_s, "override window length y, seconds");
  c_pipe->add_option("--ma-window", cfg.ma_window,
                     "moving-average window count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_pipe->add_option("--seed", cfg.seed, "run seed")->capture_default_str();
  c_pipe->add_option("-o,--out", out, "report output path")->required();
  c_pipe->add_option("--slots", pipe_slots, "also write per-slot CSV here");
  c_pipe->add_option("--format", pipe_format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  c_pipe->callback([&] {
    if (pipe_y_s) cfg.y_override_ms = *pipe_y_s * 1000.0;
    const auto res = run_pipeline(load_merged(pipe_in), cfg);
    if (pipe_format == "json")
      write_json(to_json(res, cfg), out);
    else
      write_slots_csv(res.slots, out);
    if (!pipe_slots.empty()) write_slots_csv(res.slots, pipe_slots);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help text or the usage error
    return rc == 0 ? 0 : 2;     // bad arguments are validation failures
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wskit::error& e) {
    // "module: message" -> machine-readable "error,module,message"
    std::string msg = e.what();
    const std::string prefix = e.module() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    wskit::diag(wskit::diag_level::error, e.module(), msg);
    return e.numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    wskit::diag(wskit::diag_level::error, "cli", e.what());
    return 2;
  }
}
