#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hchain/chain.hpp"
#include "hchain/hydro.hpp"
#include "hchain/stats.hpp"

namespace hchain {

using TestFunction = GridField;

struct FieldCovariance {
  double r_variance;
  double y_variance;
  double cross;
};

/// Solves -w'' = g with w(0) = w(1) = 0 by second-order differences.
GridField inv_dirichlet_laplacian(const GridField& g);

/// Composite Simpson rule for even meshes, trapezoid otherwise.
double integrate(const GridField& f);

/// Stationary covariances of the limiting deformation and energy fluctuation
/// fields around the linear profile Tbar:
///   <R(F)^2> = int Tbar F^2,
///   <Y(G)^2> = int Tbar^2 G^2 + (T_L - T_R)^2 int G (-Delta_0)^{-1} G,
/// and zero cross covariance.
FieldCovariance ness_field_covariance(const TestFunction& f, const TestFunction& g,
                                      double temp_left, double temp_right);

/// [4 T_L T_R + (5/3)(T_L - T_R)^2] / (T_L + T_R)^2.
double s_infinity(double temp_left, double temp_right);

/// 4 <Y(1)^2> / (T_L + T_R)^2 evaluated through ness_field_covariance.
double s_infinity_from_fields(double temp_left, double temp_right, int mesh = 64);

enum class FieldBoundary { Dirichlet, Neumann };

/// EulerMaruyama is explicit and biases the stationary variance of stiff
/// modes by 1/(1 - dt lambda_k / 2). CrankNicolson (stochastic trapezoidal
/// rule) reproduces the stationary covariance of the spatial
/// semi-discretisation exactly for any dt.
enum class SpdeScheme { CrankNicolson, EulerMaruyama };

struct SpdeConfig {
  double gamma = 1.0;
  int mesh = 64;
  SpdeScheme scheme = SpdeScheme::CrankNicolson;
  double dt = 0.0;  // <= 0: 2 h^2 gamma (CN), 0.4 h^2 gamma (EM, 80% of its stability limit)
  double t_burn = 1.0;
  double t_final = 50.0;  // sampling time after burn-in
  int sample_every = 10;
  std::uint64_t seed = 1;
  int replicas = 1;
  int n_batches = kDefaultBatches;
  double noise_scale = 1.0;
  FieldBoundary r_boundary = FieldBoundary::Dirichlet;  // Y is always Dirichlet
};

/// Finite-volume integrator for
///   R_t = gamma^{-1} R_xx - (c W_1)_x,
///   Y_t = (2 gamma)^{-1} ((u R)_xx + Y_xx) - (c u W_1 + c sqrt(T/2) W_2)_x,
/// with c = sqrt(2 T / gamma), T = eps - u^2/2 from a fixed background.
///
/// Unknowns are cell averages on M cells of width h. Noise lives on the M+1
/// faces (variance 1/(h dt) per face) so the discrete divergence telescopes.
/// Dirichlet walls use an odd ghost cell, which doubles the wall-face
/// stiffness; the wall-face noise variance is doubled to match. Neumann walls
/// carry neither diffusive nor noise flux.
class SpdeIntegrator {
 public:
  SpdeIntegrator(const HydroState& background, const SpdeConfig& cfg, std::mt19937_64 rng);

  void step();
  double dt() const { return dt_; }
  double time() const { return time_; }
  int cells() const { return m_; }

  Eigen::VectorXd& r_cells() { return r_; }
  Eigen::VectorXd& y_cells() { return y_; }
  const Eigen::VectorXd& r_cells() const { return r_; }
  const Eigen::VectorXd& y_cells() const { return y_; }

  /// Node values: mean of the adjacent cells, wall values from the boundary
  /// condition.
  GridField r() const;
  GridField y() const;

  /// sum_k h F(x_k) R_k with F interpolated to cell centres.
  double pair_r(const TestFunction& f) const;
  double pair_y(const TestFunction& g) const;

 private:
  int m_;
  double h_, dt_, gamma_;
  FieldBoundary r_boundary_;
  SpdeScheme scheme_;
  Eigen::VectorXd lower_r_, diag_r_, upper_r_, lower_y_, diag_y_, upper_y_;
  Eigen::VectorXd u_, c_face_, cu_face_, cy_face_;
  Eigen::VectorXd r_, y_;
  double time_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Eigen::VectorXd flux_r_, flux_y_;
};

/// Cell-centre values of a node field (mean of the two end nodes).
Eigen::VectorXd cell_average(const GridField& f);

/// Pairing sum_i w_i phi_i f_i with trapezoid weights.
double pair(const GridField& test, const GridField& field);

struct SpdeEstimates {
  std::vector<EstimateWithError> r_variance;  // per F
  std::vector<EstimateWithError> y_variance;  // per G
  std::vector<EstimateWithError> cross;       // <R(F_k) Y(G_k)>, k < min(#F, #G)
  double dt = 0.0;
};

/// Stationary variance estimates around the NESS background (u = 0,
/// eps = Tbar). Throws NumericalError on blow-up.
SpdeEstimates spde_simulate(double temp_left, double temp_right, const SpdeConfig& cfg,
                            std::span<const TestFunction> fs, std::span<const TestFunction> gs);

struct FieldSample {
  double r;
  double y;
};

/// R^N(F) = N^{-1/2} sum_j F(j/N)[r_j - u(j/N)], Y^N(G) likewise with E_j and
/// eps, for j = 1..N. The background mesh must be a multiple of N and the
/// test functions must live on that mesh.
FieldSample microscopic_fluctuation_fields(const ChainState& state, const ChainParams& params,
                                           const HydroState& background, const TestFunction& f,
                                           const TestFunction& g);

std::vector<FieldSample> microscopic_fluctuation_fields(std::span<const ChainState> states,
                                                        const ChainParams& params,
                                                        std::span<const HydroState> backgrounds,
                                                        const TestFunction& f,
                                                        const TestFunction& g);

}  // namespace hchain
