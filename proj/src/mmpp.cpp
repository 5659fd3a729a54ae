#include "wskit/mmpp.hpp"

#include <cmath>

#include "wskit/error.hpp"
#include "wskit/rng.hpp"

namespace wskit {

namespace {

constexpr const char* kModule = "mmpp";

void check_inputs(double m1_ms, double c) {
  if (!(m1_ms > 0))
    throw error(errc::bad_argument, kModule, "mean IAT must be positive");
  if (!(c > 0))
    throw error(errc::bad_argument, kModule, "coefficient of variation must be positive");
}

}  // namespace

phase_params fit_hyperexponential(double m1_ms, double c) {
  check_inputs(m1_ms, c);
  if (c < 1.0)
    throw error(errc::unsupported_regime, kModule,
                "hyperexponential fit needs C >= 1");
  phase_params ph;
  ph.p = 0.5 * (1.0 + std::sqrt((c * c - 1.0) / (c * c + 1.0)));
  ph.mu1 = 2.0 * ph.p / m1_ms;
  ph.mu2 = 2.0 * (1.0 - ph.p) / m1_ms;
  ph.branch = fit_branch::hyperexponential;
  return ph;
}

phase_params fit_coxian(double m1_ms, double c) {
  check_inputs(m1_ms, c);
  if (c < 1.0 / std::sqrt(2.0) || c > 1.0)
    throw error(errc::unsupported_regime, kModule,
                "coxian fit needs 1/sqrt(2) <= C <= 1");
  phase_params ph;
  ph.p = 1.0 / (2.0 * c * c);
  ph.mu2 = 2.0 / m1_ms;
  ph.mu1 = ph.mu2 * ph.p / (1.0 + ph.p);
  ph.branch = fit_branch::coxian;
  return ph;
}

phase_params fit_phase(const traffic_stats& stats) {
  switch (classify_branch(stats)) {
    case fit_branch::hyperexponential:
      return fit_hyperexponential(stats.m1_ms, stats.c);
    case fit_branch::coxian:
      return fit_coxian(stats.m1_ms, stats.c);
    default:
      throw error(errc::unsupported_regime, kModule,
                  "classify_branch: traffic outside both fitting regimes (C=" +
                      std::to_string(stats.c) + ", H=" + std::to_string(stats.h) + ")");
  }
}

mmpp2_params fit_mmpp2(const phase_params& phase, double h) {
  if (!(h > 0.0 && h < 1.0))
    throw error(errc::bad_argument, kModule, "H must lie in (0,1)");
  const double p = phase.p, mu1 = phase.mu1, mu2 = phase.mu2;

  mmpp2_params m;
  m.branch = phase.branch;
  m.beta = 2.0 - 2.0 * h;

  const double s = p * (1.0 - m.beta) * (mu1 - mu2) + m.beta * mu1 + mu2;
  m.xi = s * s - 4.0 * m.beta * mu1 * mu2;
  if (m.xi < 0)
    throw error(errc::numerical_failure, kModule, "negative discriminant xi");

  m.lambda1 = 0.5 * (s + std::sqrt(m.xi));

  const double den =
      m.lambda1 * mu1 - m.lambda1 * p * (mu1 - mu2) - mu1 * mu2;
  if (den == 0)
    throw error(errc::numerical_failure, kModule, "lambda2 denominator vanished");
  m.lambda2 = mu1 * mu2 * (m.lambda1 - p * (mu1 - mu2) - mu2) / den;

  if (m.lambda2 == m.lambda1)
    throw error(errc::numerical_failure, kModule, "r1 denominator vanished");
  m.r1 = (mu1 - m.lambda1) * (mu2 - m.lambda1) / (m.lambda2 - m.lambda1);

  if (mu1 == m.lambda1)
    throw error(errc::numerical_failure, kModule, "r2 denominator vanished");
  m.r2 = (m.lambda2 - mu1) * (m.lambda1 + m.r1 - mu1) / (mu1 - m.lambda1);

  if (!(m.lambda1 > 0) || !(m.lambda2 > 0) || !(m.r1 > 0) || !(m.r2 > 0))
    throw error(errc::numerical_failure, kModule,
                "fit produced nonpositive rate");

  const double rsum = m.r1 + m.r2;
  m.pi = {m.r2 / rsum, m.r1 / rsum};
  return m;
}

double y_lower_bound_ms(const mmpp2_params& params) {
  return 1.0 / params.r1 + 1.0 / params.r2;
}

packet_trace generate_trace(const mmpp2_params& params, double duration_ms,
                            std::uint64_t seed) {
  if (!(duration_ms > 0))
    throw error(errc::bad_argument, kModule, "duration must be positive");

  rng gen(seed);
  const double lambda[2] = {params.lambda1, params.lambda2};
  const double r[2] = {params.r1, params.r2};

  packet_trace trace;
  trace.source_channels.insert(0);

  int state = gen.bernoulli(params.pi[0]) ? 0 : 1;
  double t = 0;
  while (t < duration_ms) {
    const double sojourn_end = std::min(t + gen.exponential(r[state]), duration_ms);
    double ta = t;
    while (true) {
      ta += gen.exponential(lambda[state]);
      if (ta >= sojourn_end) break;
      packet_record rec;
      rec.ts_us = std::llround(ta * 1000.0);
      rec.channel_id = 0;
      trace.records.push_back(rec);
    }
    t = sojourn_end;
    state = 1 - state;
  }
  return trace;
}

}  // namespace wskit
