#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wskit/eval.hpp"
#include "wskit/hmm.hpp"
#include "wskit/mmpp.hpp"
#include "wskit/stats.hpp"
#include "wskit/trace.hpp"

namespace wskit {

// End-to-end run over one merged trace, laid out as
//   [t0, t0+x)        MMPP fitting span
//   [t0+x, t0+x+z)    HMM training span
//   [t0+x+z, end)     scoring span
struct pipeline_config {
  double x_s = 300;  // defaults follow the office sniffing setup
  double z_s = 300;
  double t_s = 5;
  int k = 1;
  std::optional<double> y_override_ms;  // replaces k * y_lb when set
  int ma_window = 20;
  std::uint64_t seed = 0;
};

struct slot_row {
  std::int64_t slot_start_us = 0;
  obs_label observation = obs_label::iat_large;
  channel_state prediction = channel_state::busy;
  channel_state truth = channel_state::free;
};

struct pipeline_result {
  traffic_stats stats;
  mmpp2_params mmpp;
  double y_ms = 0;
  train_result training;
  eval_report report;  // rmse fields compare synthetic traffic vs scoring span
  std::vector<slot_row> slots;
};

pipeline_result run_pipeline(const packet_trace& merged,
                             const pipeline_config& config);

}  // namespace wskit
