#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hchain/chain.hpp"
#include "hchain/equilibrium.hpp"

namespace hchain {

/// Stationary covariance over (q_1..q_N, p_1..p_N).
struct SecondMoments {
  Eigen::MatrixXd cov;

  int n_sites() const { return static_cast<int>(cov.rows() / 2); }
  Eigen::MatrixXd qq() const { return cov.topLeftCorner(n_sites(), n_sites()); }
  Eigen::MatrixXd qp() const { return cov.topRightCorner(n_sites(), n_sites()); }
  Eigen::MatrixXd pp() const { return cov.bottomRightCorner(n_sites(), n_sites()); }
  double min_eigenvalue() const;
};

/// dC/dt = M(C) + S on packed symmetric matrices: harmonic drift
/// A C + C A^T with bath friction in A, velocity-flip decoherence (entries
/// odd in p_k decay at gamma_k per odd index, <p_k^2> untouched) and the bath
/// noise source 2 lambda_k T_k on the pp diagonal.
struct MomentOperator {
  int n_sites = 0;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd source;

  int dim() const { return 2 * n_sites; }
  /// M(C) (without the source).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& cov) const;
};

MomentOperator moment_drift_operator(const ChainParams& params, const SiteRates& rates);

enum class SolveMethod { Auto, SparseLU, Iterative };

struct SolverOptions {
  SolveMethod method = SolveMethod::Auto;
  int direct_limit = 160;  // Auto uses the direct solver up to this many sites
  double tolerance = 1e-13;
};

/// Factorises the moment operator once; temperatures enter only the source.
class StationarySolver {
 public:
  explicit StationarySolver(const ChainParams& params, SolverOptions options = {});
  ~StationarySolver();
  StationarySolver(StationarySolver&&) noexcept;
  StationarySolver& operator=(StationarySolver&&) noexcept;

  /// Bath temperature per particle; entries at sites without a bath are ignored.
  SecondMoments solve_site_temperatures(const Eigen::VectorXd& site_temperatures) const;
  /// VelocityFlip: temperatures from params; SelfConsistent: the given profile.
  SecondMoments solve(std::span<const double> bath_temperatures = {}) const;

  const MomentOperator& op() const { return op_; }
  const ChainParams& params() const { return params_; }

 private:
  struct Impl;
  ChainParams params_;
  SiteRates rates_;
  MomentOperator op_;
  std::unique_ptr<Impl> impl_;
};

SecondMoments stationary_covariance(const ChainParams& params,
                                    std::span<const double> bath_temperatures = {},
                                    SolverOptions options = {});

struct SelfConsistentResult {
  TemperatureProfile profile;
  double residual;  // max_j |<p_j^2> - T_j|
  int iterations = 0;
};

/// Interior temperatures with no mean exchange with their baths, solved as
/// one linear system through the response matrix <p_j^2> = sum_n K_jn T_n.
SelfConsistentResult self_consistent_profile(const ChainParams& params);

/// Cross-check: fixed-point iteration T_I <- <p_I^2>(T).
SelfConsistentResult self_consistent_profile_iterative(const ChainParams& params,
                                                       double tolerance = 1e-11,
                                                       int max_iterations = 100000);

enum class KernelVar { Q, P, R };

/// Linear response of the self-consistent NESS: <X_i Y_j> = sum_n B^(n)_XY(i,j) T_n.
/// Particle indices are 0-based; r-indices run over bonds 0..N with
/// r_i = q_{i+1} - q_i in physical labels.
class BKernel {
 public:
  BKernel(int n_sites, std::vector<Eigen::MatrixXd> columns);

  double value(KernelVar x, KernelVar y, int n, int i, int j) const;
  int n_sites() const { return n_sites_; }
  int index_count(KernelVar v) const { return v == KernelVar::R ? n_sites_ + 1 : n_sites_; }
  const Eigen::MatrixXd& column(int n) const { return columns_[static_cast<std::size_t>(n)]; }

  /// max |B^(n)_XY(i,j)| over all (n,i,j) at each M = 1 + |i-j| + |i-n| + |j-n|.
  std::map<int, double> envelope(KernelVar x, KernelVar y) const;

 private:
  int n_sites_;
  std::vector<Eigen::MatrixXd> columns_;
};

BKernel b_kernel(const ChainParams& params);

struct GapResult {
  double rate;                       // smallest |Re| in the spectrum of M
  std::complex<double> eigenvalue;   // the eigenvalue attaining it
  std::string method;                // "lyapunov", "dense" or "arnoldi"
};

struct GapOptions {
  int dense_limit = 600;  // packed dimension up to which a dense eigensolve is used
  int krylov_dim = 60;
  int max_restarts = 60;
  double tolerance = 1e-10;
  bool force_arnoldi = false;
};

/// Slowest relaxation rate of the second moments. Without flips the operator
/// is the Lyapunov operator of A, whose spectrum is {mu_a + mu_b}; with flips
/// a dense eigensolve or shift-invert Arnoldi on the sparse operator is used.
GapResult spectral_gap(const ChainParams& params, GapOptions options = {});

struct SteadySummary {
  double mean_current;                 // bulk average of <j^e_j>, j = 2..N; > 0 left to right
  std::vector<double> bond_currents;   // <j^e_j>, j = 2..N
  double mean_energy;                  // <H>
  double energy_variance;              // Gaussian (Wick) value of <H;H>
  double s_gaussian;                   // N <H;H> / <H>^2 under the Gaussian closure
};

/// For the self-consistent model the NESS is Gaussian and s_gaussian is
/// exact; for the velocity-flip model it is a diagnostic only.
SteadySummary steady_current_and_s(const ChainParams& params, const SecondMoments& moments);

/// CSV, row-major, header row naming coordinates q1..qN,p1..pN.
void write_covariance_csv(std::ostream& out, const SecondMoments& moments);

}  // namespace hchain
