#pragma once

// Independent reference implementations used only by tests. Each one takes a
// different route than the production code it checks: fGn comes from exact
// circulant embedding rather than anything estimator-shaped, HMM sequences
// from direct forward sampling, Pareto draws from raw inverse-CDF values with
// no trace plumbing, and MMPP count moments from the closed-form expressions.

#include <array>
#include <cstdint>
#include <vector>

#include "wskit/trace.hpp"

namespace oracle {

// Exact fractional Gaussian noise (Davies & Harte circulant embedding).
// Stationary increments of fBm with Hurst parameter h, unit variance.
std::vector<double> fgn(std::size_t n, double h, std::uint64_t seed);

struct hmm_sample {
  std::vector<int> states;   // 0/1
  std::vector<int> symbols;  // 0/1
};

// Forward simulation of a known 2-state HMM with binary emissions.
hmm_sample sample_hmm(const std::array<double, 2>& initial,
                      const std::array<std::array<double, 2>, 2>& a,
                      const std::array<std::array<double, 2>, 2>& b,
                      std::size_t n, std::uint64_t seed);

// Raw inverse-CDF Pareto draws in ms: x = scale * u^(-1/shape).
std::vector<double> pareto_ms(double scale_ms, double shape, std::size_t n,
                              std::uint64_t seed);

// Trace with timestamps accumulated from 0 over the given IATs.
wskit::packet_trace trace_from_iats_ms(const std::vector<double>& iats_ms,
                                       int channel = 0);

// Closed-form count moments of an MMPP(2) over [0, t] started in steady
// state: E N(t) = lbar*t and
//   Var N(t) = lbar*t + (2*psi/sigma) * (t - (1 - exp(-sigma*t))/sigma)
// with sigma = r1+r2, lbar = (l1*r2 + l2*r1)/sigma,
// psi = (l1-l2)^2 * r1*r2 / sigma^2.
double mmpp_count_mean(double l1, double l2, double r1, double r2, double t_ms);
double mmpp_count_var(double l1, double l2, double r1, double r2, double t_ms);

}  // namespace oracle
