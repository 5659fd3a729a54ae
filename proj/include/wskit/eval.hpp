#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wskit/hmm.hpp"
#include "wskit/trace.hpp"

namespace wskit {

// Orientation: positive class = free (a correctly predicted white space).
// tp: actual free, predicted free    fn: actual free, predicted busy
// fp: actual busy, predicted free    tn: actual busy, predicted busy
struct confusion_matrix {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Metrics with zero denominators stay absent (serialized as null).
struct eval_report {
  std::optional<double> rmse_ms;
  std::optional<double> rmse_pct;
  std::optional<double> hit_rate;   // tp/(tp+fn)
  std::optional<double> fdr;        // fp/(tp+fp)
  std::optional<double> precision;  // 1 - fdr
  std::optional<double> f1;         // 2PR/(P+R)
  confusion_matrix confusion;
};

// Fixed evaluation grid: q = 0.005, 0.015, ..., 0.995.
std::vector<double> quantile_grid();

// Linear-interpolation quantile of an already sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct quantile_rmse_result {
  double rmse_ms = 0;
  double rmse_pct = 0;  // 100 * rmse / mean(test IATs)
};

// RMSE between the two IAT distributions over the quantile grid; both sides
// need at least 200 IATs.
quantile_rmse_result quantile_rmse(const iat_series& model,
                                   const iat_series& test);

// Ground truth reuses the observation thresholding rule: a slot is busy iff
// its window labeled iat_small (empty window reads free).
std::vector<channel_state> label_ground_truth(const packet_trace& trace,
                                              double y_ms, double t_s,
                                              threshold_policy policy,
                                              int window_count = 20);

eval_report score(const std::vector<predicted_state>& predictions,
                  const std::vector<channel_state>& truth);

// --- calibration sweeps -----------------------------------------------------
// Grid points are independent pure computations and run in parallel (OpenMP);
// each point draws from its own derived seed so thread count never changes
// the result.

inline const std::vector<double> k_default_x_grid_s = {60,  120,  240, 480,
                                                       960, 1920, 2400};

struct calibrate_x_row {
  double x_s = 0;
  double rmse_ms = 0;
  double rmse_pct = 0;
};

struct calibrate_x_result {
  std::vector<calibrate_x_row> rows;
  double best_x_s = 0;  // lowest rmse_ms
};

// For each candidate x: fit an MMPP(2) on the leading x seconds of the
// training trace, generate k*y_lb of synthetic traffic, score against the
// holdout IATs.
calibrate_x_result calibrate_x(const packet_trace& training,
                               const std::vector<double>& candidates_s, int k,
                               const packet_trace& holdout, std::uint64_t seed);

struct calibrate_z_row {
  double z_s = 0;
  std::optional<double> hit_rate;
  std::optional<double> precision;
  std::optional<double> f1;
};

struct calibrate_z_result {
  std::vector<calibrate_z_row> rows;
  double best_z_s = 0;  // highest F1
};

// For each candidate z: train on the first z seconds of observations, predict
// the remainder slot by slot, score against ground truth.
calibrate_z_result calibrate_z(const packet_trace& trace,
                               const std::vector<double>& candidates_s,
                               const mmpp2_params& params, double y_ms,
                               double t_s);

}  // namespace wskit
