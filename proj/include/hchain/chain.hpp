#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hchain {

enum class Model { VelocityFlip, SelfConsistent };

std::string_view to_string(Model model);
Model model_from_string(std::string_view name);

/// Physical configuration of a harmonic chain with N moving particles
/// between two fixed walls (q_0 = q_{N+1} = 0).
///
/// `flip_rate` is the momentum decorrelation rate gamma: every bulk particle
/// reverses its velocity at the rings of a Poisson clock of rate gamma/2, so
/// that the flip part of the generator sends p_j to -gamma * p_j.
///
/// VelocityFlip: Langevin baths (friction `bath_coupling`) at particles 1 and
/// N with temperatures temp_left / temp_right, flips at particles 2..N-1.
/// SelfConsistent: a Langevin bath at every particle, no flips; the bath
/// temperature profile is supplied separately.
struct ChainParams {
  int n_sites = 8;
  double pinning = 0.0;
  double flip_rate = 1.0;
  double bath_coupling = 1.0;
  double temp_left = 1.0;
  double temp_right = 1.0;
  Model model = Model::VelocityFlip;

  void validate() const;
};

/// Positions and momenta of particles 1..N (stored at indices 0..N-1).
struct ChainState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  double time = 0.0;

  static ChainState zero(int n_sites);
  int n_sites() const { return static_cast<int>(q.size()); }
  bool is_finite() const;
};

/// Local fields indexed by the physical site label, boundaries included.
///
///   local_energy[j]        E_j,   j = 0..N+1
///   deformation[j]         r_j = q_{j+1} - q_j,  j = 0..N
///   energy_current[j]      j^e_j = -r_{j-1}(p_j + p_{j-1})/2,  j = 0..N+1
///                          (flow from j-1 into j; j^e_0 = j^e_{N+2} = 0)
///   deformation_current[j] j^r_j = -p_j,  j = 0..N+1
struct LocalObservables {
  Eigen::VectorXd local_energy;
  Eigen::VectorXd deformation;
  Eigen::VectorXd energy_current;
  Eigen::VectorXd deformation_current;
};

/// Per-particle noise layout (index 0..N-1 is particle 1..N).
struct SiteRates {
  Eigen::VectorXd friction;
  Eigen::VectorXd temperature;
  Eigen::VectorXd flip;  // momentum decorrelation rate; Poisson flip rate is half of it

  bool thermostatted(int i) const { return friction[i] > 0.0; }
};

/// Builds the noise layout. The self-consistent model requires one bath
/// temperature per particle; the velocity-flip model ignores the argument.
SiteRates site_rates(const ChainParams& params,
                     std::span<const double> bath_temperatures = {});

/// Stiffness matrix of the harmonic force: tridiag(-1, 2 + nu^2, -1).
Eigen::MatrixXd stiffness_matrix(int n_sites, double pinning);

double total_energy(const ChainState& state, const ChainParams& params);

LocalObservables local_observables(const ChainState& state, const ChainParams& params);

/// |E_j(t) - E_j(0) - int_0^t (j^e_j - j^e_{j+1}) ds| per site j = 0..N+1.
/// The integral uses the trapezoidal rule between consecutive samples.
/// Consecutive samples at equal time are instantaneous jumps and contribute
/// nothing to the quadrature.
Eigen::VectorXd conservation_check(std::span<const ChainState> trajectory,
                                   const ChainParams& params);

}  // namespace hchain
