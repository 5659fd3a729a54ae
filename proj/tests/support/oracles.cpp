#include "oracles.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "wskit/rng.hpp"

namespace oracle {

namespace {

// Box-Muller over SplitMix64; fresh pair per two draws.
class gauss_rng {
 public:
  explicit gauss_rng(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const double u1 = rng_.next_double();
    const double u2 = rng_.next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  wskit::rng rng_;
  double spare_ = 0;
  bool have_ = false;
};

}  // namespace

std::vector<double> fgn(std::size_t n, double h, std::uint64_t seed) {
  const std::size_t m = 2 * n;

  // fGn autocovariance, then the first row of the circulant embedding.
  std::vector<double> gamma(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    gamma[k] = 0.5 * (std::pow(kd + 1, 2 * h) - 2 * std::pow(kd, 2 * h) +
                      std::pow(std::abs(kd - 1), 2 * h));
  }
  std::vector<double> row(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = gamma[k];
  for (std::size_t k = 1; k < n; ++k) row[m - k] = gamma[k];

  fftw_complex* buf = fftw_alloc_complex(m);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf,
                                    FFTW_FORWARD, FFTW_ESTIMATE);

  for (std::size_t k = 0; k < m; ++k) {
    buf[k][0] = row[k];
    buf[k][1] = 0.0;
  }
  fftw_execute(plan);
  std::vector<double> eig(m);
  for (std::size_t k = 0; k < m; ++k) eig[k] = buf[k][0];

  // The embedding is provably nonnegative definite for fGn; tolerate only
  // rounding-level negatives.
  for (double& e : eig) {
    if (e < -1e-9) {
      std::fprintf(stderr, "fgn oracle: negative eigenvalue %g\n", e);
      std::abort();
    }
    if (e < 0) e = 0;
  }

  gauss_rng g(seed);
  const double md = static_cast<double>(m);
  buf[0][0] = std::sqrt(eig[0] / md) * g.next();
  buf[0][1] = 0.0;
  buf[n][0] = std::sqrt(eig[n] / md) * g.next();
  buf[n][1] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double s = std::sqrt(eig[k] / (2.0 * md));
    const double re = s * g.next();
    const double im = s * g.next();
    buf[k][0] = re;
    buf[k][1] = im;
    buf[m - k][0] = re;
    buf[m - k][1] = -im;
  }
  fftw_execute(plan);

  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = buf[j][0];

  fftw_destroy_plan(plan);
  fftw_free(buf);
  return x;
}

hmm_sample sample_hmm(const std::array<double, 2>& initial,
                      const std::array<std::array<double, 2>, 2>& a,
                      const std::array<std::array<double, 2>, 2>& b,
                      std::size_t n, std::uint64_t seed) {
  wskit::rng r(seed);
  hmm_sample out;
  out.states.reserve(n);
  out.symbols.reserve(n);
  int s = r.bernoulli(initial[1]) ? 1 : 0;
  for (std::size_t t = 0; t < n; ++t) {
    out.states.push_back(s);
    out.symbols.push_back(r.bernoulli(b[s][1]) ? 1 : 0);
    s = r.bernoulli(a[s][1]) ? 1 : 0;
  }
  return out;
}

std::vector<double> pareto_ms(double scale_ms, double shape, std::size_t n,
                              std::uint64_t seed) {
  wskit::rng r(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = scale_ms * std::pow(r.next_double(), -1.0 / shape);
  return out;
}

wskit::packet_trace trace_from_iats_ms(const std::vector<double>& iats_ms,
                                       int channel) {
  wskit::packet_trace t;
  t.records.reserve(iats_ms.size() + 1);
  double ts_ms = 0;
  t.records.push_back({0, channel, {}});
  for (double d : iats_ms) {
    ts_ms += d;
    t.records.push_back(
        {static_cast<std::int64_t>(std::llround(ts_ms * 1000.0)), channel, {}});
  }
  t.source_channels.insert(channel);
  return t;
}

double mmpp_count_mean(double l1, double l2, double r1, double r2,
                       double t_ms) {
  return (l1 * r2 + l2 * r1) / (r1 + r2) * t_ms;
}

double mmpp_count_var(double l1, double l2, double r1, double r2, double t_ms) {
  const double sigma = r1 + r2;
  const double lbar = (l1 * r2 + l2 * r1) / sigma;
  const double psi = (l1 - l2) * (l1 - l2) * r1 * r2 / (sigma * sigma);
  return lbar * t_ms +
         2.0 * psi / sigma * (t_ms - (1.0 - std::exp(-sigma * t_ms)) / sigma);
}

}  // namespace oracle
