#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hchain {

/// Canonical Gibbs measure exp[-beta (E_j - tau r_j)] of the unpinned chain.
struct GibbsParams {
  double temperature = 1.0;
  double tension = 0.0;
  double pinning = 0.0;
};

struct GibbsMoments {
  double mean_p_sq;
  double mean_energy;
  double mean_deformation;
};

/// <p_j^2> = T, <E_j> = T + tau^2/2, <r_j> = tau. Rejects pinning != 0.
GibbsMoments gibbs_moments(const GibbsParams& gp);

struct TemperatureProfile {
  std::vector<double> temps;

  void validate() const;
  int size() const { return static_cast<int>(temps.size()); }

  static TemperatureProfile uniform(int n, double t);
  /// T_1 = left, T_N = right, linear in between.
  static TemperatureProfile linear(int n, double left, double right);
};

/// Static Gibbs covariance at temperature T over (q_1..q_N, p_1..p_N):
/// qq = T (K)^{-1} with K the Dirichlet stiffness, pp = T I, qp = 0.
Eigen::MatrixXd gibbs_covariance(int n_sites, double temperature, double pinning);

/// Cov(E_i, E_j) for i, j = 0..N+1 at unit temperature, by Wick's theorem on
/// the static Gibbs covariance. Scales as T^2.
Eigen::MatrixXd unit_energy_covariance(int n_sites, double pinning);

double equilibrium_energy_covariance(int i, int j, double temperature, double pinning,
                                     int n_sites);

/// LTE prediction for N <H;H>/<H>^2:
///   (1/N) sum_{j,j'} Cov^{eq, T_j}(E_j', E_j) / (mean_j T_j)^2
/// with the covariance taken at the temperature of the second index. The
/// walls j = 0 and N+1 use the temperature of their neighbouring particle.
double lte_fluctuation_prediction(const TemperatureProfile& profile, double pinning);

/// N -> infinity value for the linear profile between the bath temperatures:
/// Richardson extrapolation of the O(1/N) discretisation error from
/// resolutions N and 2N.
double lte_fluctuation_limit(double temp_left, double temp_right, double pinning,
                             int resolution = 400);

}  // namespace hchain
