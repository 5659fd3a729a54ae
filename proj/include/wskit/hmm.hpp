#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "wskit/mmpp.hpp"
#include "wskit/trace.hpp"

namespace wskit {

// State/observation index conventions used by every matrix in this module:
// states (free=0, busy=1); observation symbols (iat_small=0, iat_large=1).
enum class channel_state { free = 0, busy = 1 };
enum class obs_label { iat_small = 0, iat_large = 1 };

struct observation {
  std::int64_t slot_start_us = 0;
  std::optional<double> window_mean_iat_ms;  // absent for <2 packets in window
  obs_label label = obs_label::iat_large;
};

enum class threshold_policy {
  fixed_training_average,  // one threshold: mean of all window means
  moving_average,          // trailing mean of the last window_count means
};

struct observation_series {
  std::vector<observation> obs;
  threshold_policy policy = threshold_policy::fixed_training_average;
  std::optional<double> fixed_threshold_ms;  // set for fixed policy
  int window_count = 20;                     // used by moving policy
};

struct hmm_model {
  std::array<double, 2> initial{0.5, 0.5};            // (free, busy)
  std::array<std::array<double, 2>, 2> a{};           // a[from][to]
  std::array<std::array<double, 2>, 2> b{};           // b[state][symbol]
  threshold_policy policy = threshold_policy::fixed_training_average;
  std::optional<double> threshold_value_ms;
  int window_count = 20;
  bool degenerate = false;  // training saw a single repeated symbol
};

struct predicted_state {
  std::int64_t slot_start_us = 0;
  channel_state state = channel_state::busy;
  double p_free = 0;
};

struct baum_welch_config {
  int max_iters = 500;
  double tol = 1e-6;          // absolute log-likelihood change
  double emission_floor = 1e-6;
};

struct train_result {
  hmm_model model;
  std::vector<double> log_likelihood;  // one entry per iteration
  bool converged = false;
  int iterations = 0;
};

// Slice the trace into y_ms-long windows anchored every t_s seconds from the
// first record; only fully contained windows are produced. A window's mean
// IAT labels it iat_small when strictly below the threshold in force; windows
// with fewer than 2 packets have no measurable IAT and label iat_large.
observation_series extract_observations(const packet_trace& trace, double y_ms,
                                        double t_s, threshold_policy policy,
                                        int window_count = 20);

// Labels window means against one explicit threshold (used by both policies
// and by ground-truth labeling).
obs_label label_mean(const std::optional<double>& mean_ms, double threshold_ms);

// Starting model: initial vector is the MMPP steady state with the higher-rate
// state mapped to busy (state-index order on a tie, with a warning). A and B
// start near-uniform with a deterministic 0.05 tilt (self-persistent states,
// busy biased to iat_small) because exactly uniform matrices are a fixed point
// of Baum-Welch that training can never leave.
hmm_model init_model(const mmpp2_params& params);

// Scaled Baum-Welch; the initial vector stays fixed, A and B are re-estimated
// with emissions floored. Log-likelihood is non-decreasing per iteration.
train_result baum_welch(const hmm_model& start,
                        const std::vector<observation>& obs,
                        const baum_welch_config& config = {});

// One-step prediction: forward-filter the history, advance one transition,
// free iff p_free > 0.5 (a tie counts as busy). slot_start_us extrapolates
// the stride of the last two observations (0 when unknown).
predicted_state predict_next(const hmm_model& model,
                             const std::vector<observation>& history);

// One-step-ahead predictions for a whole slot sequence: prediction k is made
// from observations 0..k-1, filtering fresh from the initial vector.
// Equivalent to predict_next on every prefix, in linear time.
std::vector<predicted_state> predict_sequence(const hmm_model& model,
                                              const std::vector<observation>& obs);

// Most likely state path (diagnostic).
std::vector<channel_state> viterbi(const hmm_model& model,
                                   const std::vector<observation>& obs);

}  // namespace wskit
