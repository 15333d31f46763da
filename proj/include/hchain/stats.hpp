#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hchain {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  int n_batches = 0;
  int batch_len = 0;
  std::vector<std::string> warnings;
};

inline constexpr int kDefaultBatches = 32;

/// Mean with batch-means standard error. The series is cut into `n_batches`
/// contiguous batches of equal length; a trailing remainder is dropped.
/// Attaches a warning when the batch length is below ten integrated
/// autocorrelation times.
EstimateWithError batch_means(std::span<const double> series, int n_batches = kDefaultBatches);

/// Standard error from already-formed batch means (equal batch lengths).
EstimateWithError from_batch_means(std::span<const double> batch_means, int batch_len);

/// Integrated autocorrelation time tau = 1/2 + sum_t rho(t), summed up to the
/// first window W with W >= 6 tau(W).
double integrated_autocorrelation_time(std::span<const double> series);

/// s = N Var(H) / <H>^2 from a time-ordered series of total energies, with a
/// jackknife error over batches of (H, H^2). The error bar is only valid for
/// the time-ordered stream.
EstimateWithError estimate_s(std::span<const double> h_samples, int n_sites,
                             int n_batches = kDefaultBatches);

/// Same, pooling independent stationary segments (e.g. replicas); each segment
/// is batched separately.
EstimateWithError estimate_s(const std::vector<std::vector<double>>& segments, int n_sites,
                             int batches_per_segment = kDefaultBatches);

nlohmann::json to_json(const EstimateWithError& e);

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace hchain
