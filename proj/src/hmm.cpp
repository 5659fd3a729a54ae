#include "wskit/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "wskit/diag.hpp"
#include "wskit/error.hpp"

namespace wskit {

namespace {

constexpr const char* kModule = "hmm";
constexpr int kFree = static_cast<int>(channel_state::free);
constexpr int kBusy = static_cast<int>(channel_state::busy);

// mean IAT inside [start, start+len) with simultaneous arrivals merged;
// absent when fewer than two distinct arrival times fall inside
std::optional<double> window_mean_ms(const packet_trace& trace,
                                     std::int64_t start, std::int64_t len) {
  auto lo = std::lower_bound(
      trace.records.begin(), trace.records.end(), start,
      [](const packet_record& r, std::int64_t t) { return r.ts_us < t; });
  auto hi = std::lower_bound(
      lo, trace.records.end(), start + len,
      [](const packet_record& r, std::int64_t t) { return r.ts_us < t; });
  if (lo == hi) return std::nullopt;
  std::size_t distinct = 1;
  for (auto it = lo + 1; it != hi; ++it)
    if (it->ts_us != (it - 1)->ts_us) ++distinct;
  if (distinct < 2) return std::nullopt;
  const double span_us = static_cast<double>((hi - 1)->ts_us - lo->ts_us);
  return span_us / static_cast<double>(distinct - 1) / 1000.0;
}

}  // namespace

obs_label label_mean(const std::optional<double>& mean_ms, double threshold_ms) {
  if (mean_ms && *mean_ms < threshold_ms) return obs_label::iat_small;
  return obs_label::iat_large;
}

observation_series extract_observations(const packet_trace& trace, double y_ms,
                                        double t_s, threshold_policy policy,
                                        int window_count) {
  if (!(y_ms > 0) || !(t_s > 0))
    throw error(errc::bad_argument, kModule, "window and slot lengths must be positive");
  if (window_count < 1)
    throw error(errc::bad_argument, kModule, "window_count must be >= 1");

  const std::int64_t y_us = std::llround(y_ms * 1000.0);
  const std::int64_t t_us = std::llround(t_s * 1e6);
  if (trace.empty() || trace.span_us() < y_us)
    throw error(errc::empty_span, kModule,
                "trace spans less than one observation window");

  const std::int64_t t0 = trace.records.front().ts_us;
  const std::int64_t n_slots = (trace.span_us() - y_us) / t_us + 1;

  observation_series series;
  series.policy = policy;
  series.window_count = window_count;
  series.obs.resize(n_slots);
  for (std::int64_t k = 0; k < n_slots; ++k) {
    series.obs[k].slot_start_us = t0 + k * t_us;
    series.obs[k].window_mean_iat_ms =
        window_mean_ms(trace, series.obs[k].slot_start_us, y_us);
  }

  if (policy == threshold_policy::fixed_training_average) {
    double sum = 0;
    std::size_t cnt = 0;
    for (const auto& o : series.obs)
      if (o.window_mean_iat_ms) { sum += *o.window_mean_iat_ms; ++cnt; }
    if (cnt > 0) {
      series.fixed_threshold_ms = sum / static_cast<double>(cnt);
      for (auto& o : series.obs)
        o.label = label_mean(o.window_mean_iat_ms, *series.fixed_threshold_ms);
    } else {
      // nothing measurable anywhere: every window reads iat_large
      for (auto& o : series.obs) o.label = obs_label::iat_large;
    }
  } else {
    std::deque<double> recent;
    for (auto& o : series.obs) {
      if (o.window_mean_iat_ms) {
        recent.push_back(*o.window_mean_iat_ms);
        if (static_cast<int>(recent.size()) > window_count) recent.pop_front();
      }
      if (recent.empty()) {
        o.label = obs_label::iat_large;
        continue;
      }
      double thr = 0;
      for (double v : recent) thr += v;
      thr /= static_cast<double>(recent.size());
      o.label = label_mean(o.window_mean_iat_ms, thr);
    }
  }
  return series;
}

hmm_model init_model(const mmpp2_params& params) {
  hmm_model m;
  if (params.lambda1 > params.lambda2) {
    m.initial = {params.pi[1], params.pi[0]};
  } else if (params.lambda2 > params.lambda1) {
    m.initial = {params.pi[0], params.pi[1]};
  } else {
    diag(diag_level::warn, kModule,
         "equal MMPP rates; state/busy mapping falls back to index order");
    m.initial = {params.pi[0], params.pi[1]};
  }
  // Near-uniform start with a fixed 0.05 tilt: exactly uniform matrices are a
  // Baum-Welch fixed point (symmetric posteriors reproduce 0.5 forever), so
  // training could never leave them. The tilt also anchors labels: busy
  // leans iat_small, free leans iat_large, states lean self-persistent.
  constexpr double e = 0.05;
  m.a[kFree] = {0.5 + e, 0.5 - e};
  m.a[kBusy] = {0.5 - e, 0.5 + e};
  m.b[kFree] = {0.5 - e, 0.5 + e};  // (iat_small, iat_large)
  m.b[kBusy] = {0.5 + e, 0.5 - e};
  return m;
}

train_result baum_welch(const hmm_model& start,
                        const std::vector<observation>& obs,
                        const baum_welch_config& config) {
  const std::size_t n = obs.size();
  if (n < 2)
    throw error(errc::too_few_samples, kModule,
                "training needs at least 2 observations");

  std::vector<int> o(n);
  for (std::size_t t = 0; t < n; ++t) o[t] = static_cast<int>(obs[t].label);
  const bool degenerate =
      std::all_of(o.begin(), o.end(), [&](int v) { return v == o[0]; });
  if (degenerate)
    diag(diag_level::warn, kModule,
         "all observations carry the same symbol; emission estimates are degenerate");

  train_result res;
  res.model = start;
  auto& a = res.model.a;
  auto& b = res.model.b;
  const auto& pi = res.model.initial;

  std::vector<std::array<double, 2>> alpha(n), beta(n);
  std::vector<double> scale(n);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    // E-step, scaled forward/backward
    for (int i = 0; i < 2; ++i) alpha[0][i] = pi[i] * b[i][o[0]];
    scale[0] = alpha[0][0] + alpha[0][1];
    if (scale[0] <= 0)
      throw error(errc::numerical_failure, kModule, "forward pass underflow");
    alpha[0][0] /= scale[0];
    alpha[0][1] /= scale[0];
    for (std::size_t t = 1; t < n; ++t) {
      for (int j = 0; j < 2; ++j)
        alpha[t][j] =
            (alpha[t - 1][0] * a[0][j] + alpha[t - 1][1] * a[1][j]) * b[j][o[t]];
      scale[t] = alpha[t][0] + alpha[t][1];
      if (scale[t] <= 0)
        throw error(errc::numerical_failure, kModule, "forward pass underflow");
      alpha[t][0] /= scale[t];
      alpha[t][1] /= scale[t];
    }
    beta[n - 1] = {1.0, 1.0};
    for (std::size_t t = n - 1; t-- > 0;) {
      for (int i = 0; i < 2; ++i)
        beta[t][i] = (a[i][0] * b[0][o[t + 1]] * beta[t + 1][0] +
                      a[i][1] * b[1][o[t + 1]] * beta[t + 1][1]) /
                     scale[t + 1];
    }

    double ll = 0;
    for (std::size_t t = 0; t < n; ++t) ll += std::log(scale[t]);
    res.log_likelihood.push_back(ll);
    res.iterations = iter + 1;

    // M-step (initial vector stays fixed)
    double xi[2][2] = {{0, 0}, {0, 0}};
    double gamma_tr[2] = {0, 0};  // gamma summed over t = 0..n-2
    double gamma_emit[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t t = 0; t < n; ++t) {
      const double g0 = alpha[t][0] * beta[t][0];
      const double g1 = alpha[t][1] * beta[t][1];
      gamma_emit[0][o[t]] += g0;
      gamma_emit[1][o[t]] += g1;
      if (t + 1 < n) {
        gamma_tr[0] += g0;
        gamma_tr[1] += g1;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            xi[i][j] += alpha[t][i] * a[i][j] * b[j][o[t + 1]] *
                        beta[t + 1][j] / scale[t + 1];
      }
    }
    for (int i = 0; i < 2; ++i) {
      if (gamma_tr[i] > 0)
        for (int j = 0; j < 2; ++j) a[i][j] = xi[i][j] / gamma_tr[i];
      const double row = a[i][0] + a[i][1];
      a[i][0] /= row;
      a[i][1] /= row;

      const double tot = gamma_emit[i][0] + gamma_emit[i][1];
      if (tot > 0)
        for (int k = 0; k < 2; ++k) b[i][k] = gamma_emit[i][k] / tot;
      for (int k = 0; k < 2; ++k)
        b[i][k] = std::max(b[i][k], config.emission_floor);
      const double brow = b[i][0] + b[i][1];
      b[i][0] /= brow;
      b[i][1] /= brow;
    }

    if (iter > 0 &&
        std::abs(res.log_likelihood[iter] - res.log_likelihood[iter - 1]) <
            config.tol) {
      res.converged = true;
      break;
    }
  }

  res.model.degenerate = degenerate;
  return res;
}

predicted_state predict_next(const hmm_model& model,
                             const std::vector<observation>& history) {
  // empty history predicts the initial state itself
  std::array<double, 2> post = model.initial;
  for (const auto& ob : history) {
    const int o = static_cast<int>(ob.label);
    std::array<double, 2> f;
    for (int i = 0; i < 2; ++i) f[i] = post[i] * model.b[i][o];
    const double s = f[0] + f[1];
    if (s <= 0)
      throw error(errc::numerical_failure, kModule, "filter underflow");
    post = {f[0] / s, f[1] / s};
    // advance one transition to the next slot
    std::array<double, 2> nxt;
    for (int j = 0; j < 2; ++j)
      nxt[j] = post[0] * model.a[0][j] + post[1] * model.a[1][j];
    post = nxt;
  }

  predicted_state p;
  p.p_free = post[kFree];
  p.state = p.p_free > 0.5 ? channel_state::free : channel_state::busy;
  if (history.size() >= 2) {
    const auto& last = history[history.size() - 1];
    const auto& prev = history[history.size() - 2];
    p.slot_start_us = last.slot_start_us + (last.slot_start_us - prev.slot_start_us);
  }
  return p;
}

std::vector<predicted_state> predict_sequence(const hmm_model& model,
                                              const std::vector<observation>& obs) {
  std::vector<predicted_state> out;
  out.reserve(obs.size());
  std::array<double, 2> post = model.initial;
  for (const auto& ob : obs) {
    predicted_state p;
    p.slot_start_us = ob.slot_start_us;
    p.p_free = post[kFree];
    p.state = p.p_free > 0.5 ? channel_state::free : channel_state::busy;
    out.push_back(p);

    const int o = static_cast<int>(ob.label);
    std::array<double, 2> f;
    for (int i = 0; i < 2; ++i) f[i] = post[i] * model.b[i][o];
    const double s = f[0] + f[1];
    if (s <= 0)
      throw error(errc::numerical_failure, kModule, "filter underflow");
    for (int j = 0; j < 2; ++j)
      post[j] = (f[0] / s) * model.a[0][j] + (f[1] / s) * model.a[1][j];
  }
  return out;
}

std::vector<channel_state> viterbi(const hmm_model& model,
                                   const std::vector<observation>& obs) {
  const std::size_t n = obs.size();
  if (n == 0) return {};
  auto lg = [](double v) { return v > 0 ? std::log(v) : -1e300; };

  std::vector<std::array<double, 2>> d(n);
  std::vector<std::array<int, 2>> from(n);
  for (int i = 0; i < 2; ++i)
    d[0][i] = lg(model.initial[i]) + lg(model.b[i][static_cast<int>(obs[0].label)]);
  for (std::size_t t = 1; t < n; ++t) {
    const int o = static_cast<int>(obs[t].label);
    for (int j = 0; j < 2; ++j) {
      const double v0 = d[t - 1][0] + lg(model.a[0][j]);
      const double v1 = d[t - 1][1] + lg(model.a[1][j]);
      from[t][j] = v1 > v0 ? 1 : 0;
      d[t][j] = std::max(v0, v1) + lg(model.b[j][o]);
    }
  }
  std::vector<channel_state> path(n);
  int s = d[n - 1][1] > d[n - 1][0] ? 1 : 0;
  for (std::size_t t = n; t-- > 0;) {
    path[t] = static_cast<channel_state>(s);
    if (t > 0) s = from[t][s];
  }
  return path;
}

}  // namespace wskit
