#include "hchain/steady_state.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "hchain/errors.hpp"
#include "hchain/packing.hpp"

namespace hchain {

double SecondMoments::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

// Nonzeros of row `a` of the drift matrix A = [[0, I], [-K, -Lambda]].
template <typename F>
void for_drift_row(int a, int n, double stiff_diag, const SiteRates& rates, F&& f) {
  if (a < n) {
    f(n + a, 1.0);
    return;
  }
  const int i = a - n;
  if (i > 0) f(i - 1, 1.0);
  f(i, -stiff_diag);
  if (i + 1 < n) f(i + 1, 1.0);
  if (rates.friction[i] != 0.0) f(a, -rates.friction[i]);
}

}  // namespace

MomentOperator moment_drift_operator(const ChainParams& params, const SiteRates& rates) {
  params.validate();
  const int n = params.n_sites, dim = 2 * n, m = packed_size(dim);
  const double stiff_diag = 2.0 + params.pinning * params.pinning;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 12);
  auto decoherence = [&](int a) { return a >= n ? rates.flip[a - n] : 0.0; };
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const int row = packed_index(a, b, dim);
      for_drift_row(a, n, stiff_diag, rates,
                    [&](int k, double v) { trip.emplace_back(row, packed_index(k, b, dim), v); });
      for_drift_row(b, n, stiff_diag, rates,
                    [&](int k, double v) { trip.emplace_back(row, packed_index(a, k, dim), v); });
      if (a != b) {
        const double g = decoherence(a) + decoherence(b);
        if (g != 0.0) trip.emplace_back(row, row, -g);
      }
    }
  }
  MomentOperator op;
  op.n_sites = n;
  op.matrix.resize(m, m);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  op.source = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i)
    op.source[packed_index(n + i, n + i, dim)] = 2.0 * rates.friction[i] * rates.temperature[i];
  return op;
}

Eigen::MatrixXd MomentOperator::apply(const Eigen::MatrixXd& cov) const {
  const Eigen::VectorXd v = matrix * pack_symmetric(cov);
  return unpack_symmetric(v, dim());
}

struct StationarySolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> iterative;
  bool direct = true;
};

StationarySolver::StationarySolver(const ChainParams& params, SolverOptions options)
    : params_(params), impl_(std::make_unique<Impl>()) {
  params_.validate();
  // Temperatures do not enter the operator; unit placeholders for SC.
  const std::vector<double> ones(static_cast<std::size_t>(params_.n_sites), 1.0);
  rates_ = site_rates(params_, ones);
  op_ = moment_drift_operator(params_, rates_);
  impl_->direct = options.method == SolveMethod::SparseLU ||
                  (options.method == SolveMethod::Auto && params_.n_sites <= options.direct_limit);
  if (impl_->direct) {
    impl_->lu.compute(op_.matrix);
    if (impl_->lu.info() != Eigen::Success)
      throw NumericalError("moment operator is singular (sparse LU failed: " +
                           impl_->lu.lastErrorMessage() + ")");
  } else {
    impl_->iterative.preconditioner().setDroptol(1e-6);
    impl_->iterative.setTolerance(options.tolerance);
    impl_->iterative.setMaxIterations(20000);
    impl_->iterative.compute(op_.matrix);
    if (impl_->iterative.info() != Eigen::Success)
      throw NumericalError("preconditioner setup failed for the moment operator");
  }
}

StationarySolver::~StationarySolver() = default;
StationarySolver::StationarySolver(StationarySolver&&) noexcept = default;
StationarySolver& StationarySolver::operator=(StationarySolver&&) noexcept = default;

SecondMoments StationarySolver::solve_site_temperatures(const Eigen::VectorXd& temps) const {
  const int n = params_.n_sites, dim = 2 * n;
  if (temps.size() != n) throw ConfigError("need one temperature per site");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op_.matrix.rows());
  for (int i = 0; i < n; ++i)
    rhs[packed_index(n + i, n + i, dim)] = -2.0 * rates_.friction[i] * temps[i];
  Eigen::VectorXd c;
  if (impl_->direct) {
    c = impl_->lu.solve(rhs);
  } else {
    c = impl_->iterative.solve(rhs);
    if (impl_->iterative.info() != Eigen::Success)
      throw NumericalError("iterative stationary solve did not converge (residual " +
                           std::to_string(impl_->iterative.error()) + ")");
  }
  if (!c.allFinite()) throw NumericalError("stationary covariance is not finite");
  return {unpack_symmetric(c, dim)};
}

SecondMoments StationarySolver::solve(std::span<const double> bath_temperatures) const {
  const SiteRates r = site_rates(params_, bath_temperatures);
  return solve_site_temperatures(r.temperature);
}

SecondMoments stationary_covariance(const ChainParams& params,
                                    std::span<const double> bath_temperatures,
                                    SolverOptions options) {
  return StationarySolver(params, options).solve(bath_temperatures);
}

namespace {

void require_self_consistent(const ChainParams& params) {
  if (params.model != Model::SelfConsistent)
    throw ConfigError("operation requires the self-consistent model");
}

// K(j, n) = <p_j^2> with unit temperature at bath n.
Eigen::MatrixXd response_matrix(const StationarySolver& solver) {
  const int n = solver.params().n_sites;
  Eigen::MatrixXd k(n, n);
  for (int b = 0; b < n; ++b) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    t[b] = 1.0;
    k.col(b) = solver.solve_site_temperatures(t).pp().diagonal();
  }
  return k;
}

double profile_residual(const StationarySolver& solver, const std::vector<double>& temps) {
  const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(temps.data(), temps.size());
  const Eigen::VectorXd psq = solver.solve_site_temperatures(t).pp().diagonal();
  double res = 0.0;
  for (int j = 1; j + 1 < static_cast<int>(temps.size()); ++j)
    res = std::max(res, std::abs(psq[j] - t[j]));
  return res;
}

}  // namespace

SelfConsistentResult self_consistent_profile(const ChainParams& params) {
  require_self_consistent(params);
  const StationarySolver solver(params);
  const int n = params.n_sites;
  const Eigen::MatrixXd k = response_matrix(solver);
  std::vector<double> temps(static_cast<std::size_t>(n));
  temps.front() = params.temp_left;
  temps.back() = params.temp_right;
  if (n > 2) {
    const int m = n - 2;
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - k.block(1, 1, m, m);
    const Eigen::VectorXd rhs =
        k.block(1, 0, m, 1) * params.temp_left + k.block(1, n - 1, m, 1) * params.temp_right;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw NumericalError("self-consistency system is singular");
    const Eigen::VectorXd interior = lu.solve(rhs);
    for (int j = 0; j < m; ++j) temps[j + 1] = interior[j];
  }
  SelfConsistentResult out{{temps}, 0.0, 1};
  out.residual = profile_residual(solver, temps);
  return out;
}

SelfConsistentResult self_consistent_profile_iterative(const ChainParams& params,
                                                       double tolerance, int max_iterations) {
  require_self_consistent(params);
  const StationarySolver solver(params);
  const int n = params.n_sites;
  Eigen::VectorXd t(n);
  for (int j = 0; j < n; ++j)
    t[j] = params.temp_left + (params.temp_right - params.temp_left) * j / (n - 1.0);
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd psq = solver.solve_site_temperatures(t).pp().diagonal();
    double change = 0.0;
    for (int j = 1; j + 1 < n; ++j) {
      change = std::max(change, std::abs(psq[j] - t[j]));
      t[j] = psq[j];
    }
    if (change < tolerance) break;
  }
  if (it == max_iterations) throw NumericalError("self-consistent iteration did not converge");
  SelfConsistentResult out{{std::vector<double>(t.data(), t.data() + n)}, 0.0, it + 1};
  out.residual = profile_residual(solver, out.profile.temps);
  return out;
}

BKernel::BKernel(int n_sites, std::vector<Eigen::MatrixXd> columns)
    : n_sites_(n_sites), columns_(std::move(columns)) {}

double BKernel::value(KernelVar x, KernelVar y, int n, int i, int j) const {
  const Eigen::MatrixXd& c = column(n);
  const int ns = n_sites_;
  // Coefficients of variable v at index i as combination of coordinates.
  auto terms = [ns](KernelVar v, int i, int (&idx)[2], double (&w)[2]) {
    idx[0] = idx[1] = -1;
    w[0] = w[1] = 0.0;
    switch (v) {
      case KernelVar::Q: idx[0] = i; w[0] = 1.0; break;
      case KernelVar::P: idx[0] = ns + i; w[0] = 1.0; break;
      case KernelVar::R:  // r_i = q_{i+1} - q_i (physical); particle k <-> physical k+1
        if (i < ns) { idx[0] = i; w[0] = 1.0; }
        if (i >= 1) { idx[1] = i - 1; w[1] = -1.0; }
        break;
    }
  };
  int ia[2], ib[2];
  double wa[2], wb[2];
  terms(x, i, ia, wa);
  terms(y, j, ib, wb);
  double s = 0.0;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      if (ia[u] >= 0 && ib[v] >= 0) s += wa[u] * wb[v] * c(ia[u], ib[v]);
  return s;
}

std::map<int, double> BKernel::envelope(KernelVar x, KernelVar y) const {
  std::map<int, double> env;
  for (int n = 0; n < n_sites_; ++n)
    for (int i = 0; i < index_count(x); ++i)
      for (int j = 0; j < index_count(y); ++j) {
        const int m = 1 + std::abs(i - j) + std::abs(i - n) + std::abs(j - n);
        double& e = env[m];
        e = std::max(e, std::abs(value(x, y, n, i, j)));
      }
  return env;
}

BKernel b_kernel(const ChainParams& params) {
  require_self_consistent(params);
  const StationarySolver solver(params);
  const int n = params.n_sites;
  std::vector<Eigen::MatrixXd> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    t[b] = 1.0;
    cols.push_back(solver.solve_site_temperatures(t).cov);
  }
  return BKernel(n, std::move(cols));
}

SteadySummary steady_current_and_s(const ChainParams& params, const SecondMoments& m) {
  const int n = m.n_sites();
  if (n != params.n_sites) throw ConfigError("covariance size does not match the chain");
  const Eigen::MatrixXd& c = m.cov;
  auto q = [](int j) { return j - 1; };
  auto p = [n](int j) { return n + j - 1; };
  SteadySummary s{};
  double total = 0.0;
  for (int j = 2; j <= n; ++j) {
    // <j^e_j> = -<(q_j - q_{j-1})(p_j + p_{j-1})>/2
    const double v = -0.5 * (c(q(j), p(j)) + c(q(j), p(j - 1)) - c(q(j - 1), p(j)) -
                             c(q(j - 1), p(j - 1)));
    s.bond_currents.push_back(v);
    total += v;
  }
  s.mean_current = total / (n - 1);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = 0.5 * stiffness_matrix(n, params.pinning);
  w.bottomRightCorner(n, n).diagonal().setConstant(0.5);
  const Eigen::MatrixXd ws = w * c;
  s.mean_energy = ws.trace();
  s.energy_variance = 2.0 * (ws * ws).trace();
  s.s_gaussian = n * s.energy_variance / (s.mean_energy * s.mean_energy);
  return s;
}

void write_covariance_csv(std::ostream& out, const SecondMoments& m) {
  const int n = m.n_sites();
  for (int k = 0; k < 2 * n; ++k)
    out << (k ? "," : "") << (k < n ? "q" : "p") << (k % n) + 1;
  out << '\n';
  out.precision(17);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) out << (b ? "," : "") << m.cov(a, b);
    out << '\n';
  }
}

}  // namespace hchain
