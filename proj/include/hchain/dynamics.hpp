#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hchain/chain.hpp"
#include "hchain/stats.hpp"

namespace hchain {

struct SimConfig {
  double dt = 0.0;       // <= 0 selects default_dt()
  double t_burn = -1.0;  // < 0 selects default_burn_in()
  double t_sample = 100.0;
  int sample_stride = 10;
  std::uint64_t seed = 1;
  int replicas = 1;
  int n_batches = kDefaultBatches;
  bool allow_large_dt = false;     // overrides the dt * max(1, nu, lambda, gamma) <= 0.1 guard
  bool track_covariance = false;   // accumulate all second moments per batch
};

double default_dt(const ChainParams& params);
/// 20 N^2 / gamma: a multiple of the diffusive relaxation time.
double default_burn_in(const ChainParams& params);

/// Fills defaults and checks the stability guard.
SimConfig resolve(const SimConfig& cfg, const ChainParams& params);

/// Independent stream for a replica: mt19937_64 seeded from
/// seed_seq{seed low word, seed high word, replica, stream tag}.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replica, std::uint32_t tag = 0);

/// Strang-split integrator: exact noise over dt/2, velocity Verlet over dt,
/// exact noise over dt/2. The noise substep is the exact Ornstein-Uhlenbeck
/// update at thermostatted sites and, at flip sites, a sign reversal with the
/// probability (1 - exp(-gamma dt/2))/2 of an odd number of Poisson(gamma/2)
/// rings in dt/2. Flip times are drawn as geometric countdowns so that the
/// generator is only consulted at flip events.
class Integrator {
 public:
  Integrator(const ChainParams& params, const SiteRates& rates, double dt, std::mt19937_64 rng);

  void step(ChainState& state);
  void noise_half_step(ChainState& state);
  void drift(ChainState& state) const;

  double dt() const { return dt_; }
  long flip_count() const { return flip_count_; }

 private:
  long draw_countdown();

  int n_;
  double dt_;
  double stiff_diag_;
  std::vector<int> bath_sites_;
  std::vector<double> ou_decay_, ou_kick_;
  std::vector<int> flip_sites_;
  std::vector<long> countdown_;
  double flip_probability_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  long flip_count_ = 0;
};

struct TrajectoryStats {
  Eigen::VectorXd mean_p_sq_profile;    // particles 1..N
  Eigen::VectorXd mean_energy_profile;  // E_1..E_N
  double mean_current = 0.0;            // bulk bonds j = 2..N, time averaged
  std::vector<double> h_samples;        // total energy at every sample
  long flip_count = 0;

  int batch_len = 0;                    // samples per batch
  Eigen::MatrixXd p_sq_batches;         // n_batches x N
  Eigen::MatrixXd energy_batches;       // n_batches x N
  std::vector<double> current_batches;
  Eigen::MatrixXd moment_batches;       // n_batches x packed 2N, if tracked
  ChainState final_state;
};

using SampleObserver = std::function<void(const ChainState&)>;

/// Initial condition: Gibbs sample at the mean bath temperature.
ChainState gibbs_sample(const ChainParams& params, double temperature, std::mt19937_64& rng);

/// One replica: burn-in, then t_sample of sampling every `sample_stride`
/// steps. Deterministic in (seed, replica).
TrajectoryStats run(const ChainParams& params, const SimConfig& cfg,
                    std::span<const double> bath_temperatures = {}, int replica = 0,
                    const SampleObserver& observer = {});

/// All cfg.replicas replicas, spread over hardware threads.
std::vector<TrajectoryStats> run_replicas(const ChainParams& params, const SimConfig& cfg,
                                          std::span<const double> bath_temperatures = {});

/// Pooled batch-means estimates over replicas.
std::vector<EstimateWithError> p_sq_estimates(const std::vector<TrajectoryStats>& reps);
std::vector<EstimateWithError> energy_estimates(const std::vector<TrajectoryStats>& reps);
EstimateWithError current_estimate(const std::vector<TrajectoryStats>& reps);
/// Mean and standard error of every second moment (requires track_covariance).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> moment_estimates(
    const std::vector<TrajectoryStats>& reps);

/// States at every substep boundary (after noise, after drift, ...) for
/// n_steps steps from `initial`, for conservation checks.
std::vector<ChainState> trace(const ChainParams& params, std::span<const double> bath_temperatures,
                              const ChainState& initial, double dt, int n_steps,
                              std::uint64_t seed);

/// Exact stationary covariance of the discrete-time integrator: the fixed
/// point of its one-step affine map on second moments. Differs from the
/// continuous-time covariance by O(dt^2).
Eigen::MatrixXd integrator_stationary_covariance(const ChainParams& params,
                                                 std::span<const double> bath_temperatures,
                                                 double dt);

}  // namespace hchain
