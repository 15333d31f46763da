#include "hchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>
#include <numeric>

#include "hchain/errors.hpp"

namespace hchain {

namespace {

void check_length(std::size_t len, int n_batches) {
  if (n_batches < 2) throw ConfigError("need at least 2 batches");
  if (len < 2 * static_cast<std::size_t>(n_batches))
    throw ConfigError("series of length " + std::to_string(len) + " is too short for " +
                      std::to_string(n_batches) + " batches");
}

void maybe_warn_short_batches(EstimateWithError& e, std::span<const double> series) {
  if (e.n_batches < 8) e.warnings.push_back("fewer than 8 batches; error bar unreliable");
  const double tau = integrated_autocorrelation_time(series);
  if (e.batch_len < 10.0 * tau)
    e.warnings.push_back("batch length " + std::to_string(e.batch_len) +
                         " is below 10 autocorrelation times (tau_int ~ " +
                         std::to_string(tau) + ")");
}

}  // namespace

EstimateWithError from_batch_means(std::span<const double> means, int batch_len) {
  const int b = static_cast<int>(means.size());
  if (b < 2) throw ConfigError("need at least 2 batch means");
  EstimateWithError e;
  e.n_batches = b;
  e.batch_len = batch_len;
  e.value = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double ss = 0.0;
  for (double m : means) ss += (m - e.value) * (m - e.value);
  e.std_error = std::sqrt(ss / (b - 1) / b);
  if (b < 8) e.warnings.push_back("fewer than 8 batches; error bar unreliable");
  return e;
}

EstimateWithError batch_means(std::span<const double> series, int n_batches) {
  check_length(series.size(), n_batches);
  const std::size_t len = series.size() / static_cast<std::size_t>(n_batches);
  std::vector<double> means(static_cast<std::size_t>(n_batches));
  for (int k = 0; k < n_batches; ++k) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(k * len);
    means[k] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / len;
  }
  EstimateWithError e = from_batch_means(means, static_cast<int>(len));
  e.warnings.clear();
  maybe_warn_short_batches(e, series);
  return e;
}

double integrated_autocorrelation_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return 0.5;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  // Autocovariance by zero-padded FFT.
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = x[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (auto& z : spec) z = std::norm(z);
  std::vector<double> acf;
  fft.inv(acf, spec);
  const double c0 = acf[0];
  if (!(c0 > 0.0)) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    tau += acf[t] / c0;
    if (static_cast<double>(t) >= 6.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

namespace {

struct Moments {
  std::vector<double> h, h2;
  std::vector<double> lengths;
};

void add_batches(Moments& m, std::span<const double> series, int n_batches) {
  check_length(series.size(), n_batches);
  const std::size_t len = series.size() / static_cast<std::size_t>(n_batches);
  for (int k = 0; k < n_batches; ++k) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = k * len; i < (k + 1) * len; ++i) {
      s1 += series[i];
      s2 += series[i] * series[i];
    }
    m.h.push_back(s1 / len);
    m.h2.push_back(s2 / len);
    m.lengths.push_back(static_cast<double>(len));
  }
}

double s_of(double h, double h2, int n) { return n * (h2 - h * h) / (h * h); }

EstimateWithError jackknife_s(const Moments& m, int n_sites) {
  const std::size_t b = m.h.size();
  double w = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    w += m.lengths[k];
    s1 += m.lengths[k] * m.h[k];
    s2 += m.lengths[k] * m.h2[k];
  }
  EstimateWithError e;
  e.n_batches = static_cast<int>(b);
  e.batch_len = static_cast<int>(m.lengths.front());
  e.value = s_of(s1 / w, s2 / w, n_sites);
  double mean_jk = 0.0;
  std::vector<double> jk(b);
  for (std::size_t k = 0; k < b; ++k) {
    const double wk = w - m.lengths[k];
    jk[k] = s_of((s1 - m.lengths[k] * m.h[k]) / wk, (s2 - m.lengths[k] * m.h2[k]) / wk, n_sites);
    mean_jk += jk[k];
  }
  mean_jk /= b;
  double var = 0.0;
  for (double v : jk) var += (v - mean_jk) * (v - mean_jk);
  e.std_error = std::sqrt(var * (b - 1) / b);
  if (!std::isfinite(e.value)) e.value = 0.0;
  if (!std::isfinite(e.std_error)) e.std_error = 0.0;
  return e;
}

}  // namespace

EstimateWithError estimate_s(std::span<const double> h_samples, int n_sites, int n_batches) {
  Moments m;
  add_batches(m, h_samples, n_batches);
  EstimateWithError e = jackknife_s(m, n_sites);
  maybe_warn_short_batches(e, h_samples);
  return e;
}

EstimateWithError estimate_s(const std::vector<std::vector<double>>& segments, int n_sites,
                             int batches_per_segment) {
  if (segments.empty()) throw ConfigError("no energy series given");
  Moments m;
  for (const auto& s : segments) add_batches(m, s, batches_per_segment);
  EstimateWithError e = jackknife_s(m, n_sites);
  maybe_warn_short_batches(e, segments.front());
  return e;
}

nlohmann::json to_json(const EstimateWithError& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"n_batches", e.n_batches},
          {"batch_len", e.batch_len},
          {"warnings", e.warnings}};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw ConfigError("linear_fit needs two equal series of length >= 2");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

}  // namespace hchain
