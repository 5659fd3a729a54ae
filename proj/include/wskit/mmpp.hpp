#pragma once

#include <array>
#include <cstdint>

#include "wskit/stats.hpp"
#include "wskit/trace.hpp"

namespace wskit {

// Two-phase renewal approximation of the IAT distribution: mixture weight p
// on rate mu1, 1-p on mu2 (rates per ms). Which fitting formula produced it
// depends on the (C, H) regime.
struct phase_params {
  double p = 0;
  double mu1 = 0;
  double mu2 = 0;
  fit_branch branch = fit_branch::unsupported;
};

// 2-state MMPP: generator Q = [[-r1, r1], [r2, -r2]], Poisson rates
// (lambda1, lambda2), all per ms. Steady state pi = (r2, r1)/(r1+r2).
struct mmpp2_params {
  double lambda1 = 0;
  double lambda2 = 0;
  double r1 = 0;
  double r2 = 0;
  std::array<double, 2> pi{0, 0};
  fit_branch branch = fit_branch::unsupported;
  double beta = 0;  // 2 - 2H
  double xi = 0;    // discriminant of the lambda1 quadratic
};

// C > 1: balanced-means hyperexponential,
//   p = (1 + sqrt((C^2-1)/(C^2+1)))/2, mu1 = 2p/M1, mu2 = 2(1-p)/M1.
phase_params fit_hyperexponential(double m1_ms, double c);

// 1/sqrt(2) <= C <= 1: Coxian-derived triple,
//   p = 1/(2C^2), mu1 = (2/M1) * p/(1+p), mu2 = 2/M1.
phase_params fit_coxian(double m1_ms, double c);

// Dispatch on classify_branch; throws unsupported_regime outside both.
phase_params fit_phase(const traffic_stats& stats);

// Second-order inversion: with beta = 2-2H,
//   xi      = [p(1-beta)(mu1-mu2) + beta*mu1 + mu2]^2 - 4*beta*mu1*mu2
//   lambda1 = [p(1-beta)(mu1-mu2) + beta*mu1 + mu2 + sqrt(xi)] / 2
//   lambda2 = mu1*mu2*[lambda1 - p(mu1-mu2) - mu2]
//             / [lambda1*mu1 - lambda1*p(mu1-mu2) - mu1*mu2]
//   r1      = (mu1-lambda1)(mu2-lambda1)/(lambda2-lambda1)
//   r2      = (lambda2-mu1)(lambda1+r1-mu1)/(mu1-lambda1)
// Negative xi, vanishing denominators, or nonpositive rates raise
// numerical_failure; nothing is clamped.
mmpp2_params fit_mmpp2(const phase_params& phase, double h);

// Minimum duration the fitted chain can represent: one expected visit to each
// state, 1/r1 + 1/r2.
double y_lower_bound_ms(const mmpp2_params& params);

// Exact CTMC simulation over [0, duration): exponential sojourns with
// Poisson arrivals inside each, timestamps rounded to integer microseconds
// (channel 0 marks synthetic traffic).
packet_trace generate_trace(const mmpp2_params& params, double duration_ms,
                            std::uint64_t seed);

}  // namespace wskit
