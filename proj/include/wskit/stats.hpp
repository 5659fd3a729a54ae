#pragma once

#include <cstddef>
#include <vector>

#include "wskit/trace.hpp"

namespace wskit {

struct basic_stats_result {
  double m1_ms = 0;     // mean IAT
  double sigma_ms = 0;  // population standard deviation
  double c = 0;         // coefficient of variation sigma/m1
};

struct traffic_stats {
  double m1_ms = 0;
  double sigma_ms = 0;
  double c = 0;
  double h = 0;  // median-of-three Hurst estimate
  std::size_t n_samples = 0;
  bool low_confidence = false;  // fewer samples than the stable-H threshold
};

enum class fit_branch { hyperexponential, coxian, unsupported };

basic_stats_result compute_basic_stats(const iat_series& iats);

// Hurst estimators. All require length >= 256, reject constant series, and
// clamp the estimate to (0.01, 0.99). Input units are irrelevant (slope
// estimators are scale-invariant).
double hurst_peng(const std::vector<double>& series);
double hurst_periodogram(const std::vector<double>& series);
double hurst_boxed_periodogram(const std::vector<double>& series);
double hurst_median(const std::vector<double>& series);

// Samples below this leave the estimate usable but flagged low-confidence.
inline constexpr std::size_t k_hurst_stable_n = 7000;

traffic_stats compute_traffic_stats(const iat_series& iats);

// hyperexponential iff (0.5 < H < 1 and C > 1); coxian iff 1/sqrt(2) <= C <= 1
// (closed at both ends); anything else is unsupported.
fit_branch classify_branch(const traffic_stats& stats);

// --- kernels ---------------------------------------------------------------
// Production kernels are parallel (OpenMP) or FFT-backed; the `reference`
// namespace keeps plain serial implementations for tests and the benchmark.

struct peng_curve_result {
  std::vector<double> log_m;
  std::vector<double> log_v;  // log mean squared residual per block size
};

// Variance-of-residuals curve: 10 log-spaced block sizes in [16, n/4]; within
// each block the cumulative sum is detrended by least squares.
peng_curve_result peng_curve(const std::vector<double>& series);

// Periodogram ordinates I(lambda_j) = |X_j|^2 / (2*pi*n) for j = 1..n/2 of the
// demeaned series, X the DFT. FFT-backed (FFTW3).
std::vector<double> periodogram(const std::vector<double>& series);

namespace reference {
peng_curve_result peng_curve(const std::vector<double>& series);
std::vector<double> periodogram(const std::vector<double>& series);  // direct DFT
}  // namespace reference

}  // namespace wskit
