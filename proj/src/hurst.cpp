#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "wskit/error.hpp"
#include "wskit/stats.hpp"

// Hurst estimation: Peng variance-of-residuals, periodogram, and boxed
// periodogram, combined by median. The Peng block scan is the OpenMP kernel;
// the periodogram runs on FFTW with a direct-DFT serial reference.

namespace wskit {

namespace {

constexpr const char* kModule = "stats";

void require_series(const std::vector<double>& x, const char* fn) {
  if (x.size() < 256)
    throw error(errc::too_few_samples, kModule,
                std::string(fn) + ": series length must be >= 256");
  auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (*mn == *mx)
    throw error(errc::degenerate_series, kModule,
                std::string(fn) + ": constant series");
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

double clamp_h(double h) { return std::clamp(h, 0.01, 0.99); }

std::vector<int> peng_block_sizes(std::size_t n) {
  const double lo = std::log(16.0), hi = std::log(static_cast<double>(n) / 4.0);
  std::vector<int> ms;
  for (int i = 0; i < 10; ++i) {
    int m = static_cast<int>(std::llround(std::exp(lo + (hi - lo) * i / 9.0)));
    if (ms.empty() || m > ms.back()) ms.push_back(m);
  }
  return ms;
}

// mean squared residual of the LS-detrended cumulative sum of one block
double block_msr(const double* x, int m, std::vector<double>& scratch) {
  scratch.resize(m);
  double acc = 0;
  for (int t = 0; t < m; ++t) { acc += x[t]; scratch[t] = acc; }
  const double tm = (m - 1) / 2.0;
  const double stt = static_cast<double>(m) * (static_cast<double>(m) * m - 1) / 12.0;
  double sy = 0, sty = 0;
  for (int t = 0; t < m; ++t) {
    sy += scratch[t];
    sty += (t - tm) * scratch[t];
  }
  const double beta = sty / stt;
  const double alpha = sy / m - beta * tm;
  double ss = 0;
  for (int t = 0; t < m; ++t) {
    double e = scratch[t] - alpha - beta * (t - tm);
    ss += e * e;
  }
  return ss / m;
}

peng_curve_result peng_curve_impl(const std::vector<double>& x, bool parallel) {
  const auto sizes = peng_block_sizes(x.size());
  peng_curve_result out;
  for (int m : sizes) {
    const int nb = static_cast<int>(x.size()) / m;
    std::vector<double> msr(nb);
    if (parallel) {
#pragma omp parallel
      {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (int b = 0; b < nb; ++b)
          msr[b] = block_msr(x.data() + static_cast<std::size_t>(b) * m, m, scratch);
      }
    } else {
      std::vector<double> scratch;
      for (int b = 0; b < nb; ++b)
        msr[b] = block_msr(x.data() + static_cast<std::size_t>(b) * m, m, scratch);
    }
    // reduce in block order so thread count never changes the result
    double v = 0;
    for (int b = 0; b < nb; ++b) v += msr[b];
    v /= nb;
    if (v <= 0)
      throw error(errc::degenerate_series, kModule,
                  "hurst_peng: zero residual variance");
    out.log_m.push_back(std::log(static_cast<double>(m)));
    out.log_v.push_back(std::log(v));
  }
  return out;
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// lowest 20% of the nonzero Fourier frequencies, at least 2
std::size_t band_cutoff(std::size_t n_ordinates) {
  return std::max<std::size_t>(2, n_ordinates / 5);
}

struct band {
  std::vector<double> log_lambda;
  std::vector<double> ordinate;  // raw I, not logged
};

band low_band(const std::vector<double>& series) {
  const std::size_t n = series.size();
  auto I = periodogram(series);
  const std::size_t cut = band_cutoff(I.size());
  band b;
  b.log_lambda.reserve(cut);
  b.ordinate.reserve(cut);
  for (std::size_t j = 1; j <= cut; ++j) {
    b.log_lambda.push_back(std::log(2.0 * std::numbers::pi * static_cast<double>(j) /
                                    static_cast<double>(n)));
    b.ordinate.push_back(I[j - 1]);
  }
  return b;
}

}  // namespace

peng_curve_result peng_curve(const std::vector<double>& series) {
  return peng_curve_impl(series, true);
}

namespace reference {
peng_curve_result peng_curve(const std::vector<double>& series) {
  return peng_curve_impl(series, false);
}
}  // namespace reference

std::vector<double> periodogram(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 2)
    throw error(errc::too_few_samples, kModule, "periodogram: series too short");
  double mean = 0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  for (std::size_t i = 0; i < n; ++i) in[i] = series[i] - mean;

  fftw_plan plan;
  {
    // FFTW planning is not thread-safe; execution of distinct plans is
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> I(n / 2);
  const double norm = 2.0 * std::numbers::pi * static_cast<double>(n);
  for (std::size_t j = 1; j <= n / 2; ++j)
    I[j - 1] = (out[j][0] * out[j][0] + out[j][1] * out[j][1]) / norm;
  fftw_free(in);
  fftw_free(out);
  return I;
}

namespace reference {
std::vector<double> periodogram(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 2)
    throw error(errc::too_few_samples, kModule, "periodogram: series too short");
  double mean = 0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> I(n / 2);
  const double norm = 2.0 * std::numbers::pi * static_cast<double>(n);
  for (std::size_t j = 1; j <= n / 2; ++j) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j) /
                     static_cast<double>(n);
    double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ph = w * static_cast<double>(t);
      const double xc = series[t] - mean;
      re += xc * std::cos(ph);
      im -= xc * std::sin(ph);
    }
    I[j - 1] = (re * re + im * im) / norm;
  }
  return I;
}
}  // namespace reference

double hurst_peng(const std::vector<double>& series) {
  require_series(series, "hurst_peng");
  auto curve = peng_curve(series);
  return clamp_h(ls_slope(curve.log_m, curve.log_v) / 2.0);
}

double hurst_periodogram(const std::vector<double>& series) {
  require_series(series, "hurst_periodogram");
  auto b = low_band(series);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < b.ordinate.size(); ++i) {
    if (b.ordinate[i] > 0) {
      lx.push_back(b.log_lambda[i]);
      ly.push_back(std::log(b.ordinate[i]));
    }
  }
  if (lx.size() < 2)
    throw error(errc::numerical_failure, kModule,
                "hurst_periodogram: not enough positive ordinates");
  return clamp_h((1.0 - ls_slope(lx, ly)) / 2.0);
}

double hurst_boxed_periodogram(const std::vector<double>& series) {
  require_series(series, "hurst_boxed_periodogram");
  auto b = low_band(series);
  constexpr int kBoxes = 60;
  const double lo = b.log_lambda.front();
  const double hi = b.log_lambda.back();
  std::vector<double> lx, ly;
  std::size_t i = 0;
  for (int box = 0; box < kBoxes; ++box) {
    const double edge = lo + (hi - lo) * (box + 1) / kBoxes;
    double sx = 0, sI = 0;
    int cnt = 0;
    while (i < b.log_lambda.size() &&
           (b.log_lambda[i] <= edge || box == kBoxes - 1)) {
      sx += b.log_lambda[i];
      sI += b.ordinate[i];
      ++cnt;
      ++i;
    }
    if (cnt > 0 && sI > 0) {
      lx.push_back(sx / cnt);
      ly.push_back(std::log(sI / cnt));
    }
  }
  if (lx.size() < 2)
    throw error(errc::numerical_failure, kModule,
                "hurst_boxed_periodogram: not enough non-empty boxes");
  return clamp_h((1.0 - ls_slope(lx, ly)) / 2.0);
}

double hurst_median(const std::vector<double>& series) {
  double a = hurst_peng(series);
  double b = hurst_periodogram(series);
  double c = hurst_boxed_periodogram(series);
  double lo = std::min({a, b, c});
  double hi = std::max({a, b, c});
  return a + b + c - lo - hi;
}

}  // namespace wskit
