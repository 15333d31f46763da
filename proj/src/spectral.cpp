#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "hchain/errors.hpp"
#include "hchain/steady_state.hpp"

namespace hchain {

namespace {

GapResult lyapunov_gap(const ChainParams& params, const SiteRates& rates) {
  const int n = params.n_sites;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -stiffness_matrix(n, params.pinning);
  a.bottomRightCorner(n, n).diagonal() = -rates.friction;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  const Eigen::VectorXcd mu = es.eigenvalues();
  // Spectrum on symmetric matrices is {mu_a + mu_b, a <= b}; the slowest
  // real part is 2 * max Re mu, attained at mu_a + conj(mu_a)'s partner.
  int best = 0;
  for (int k = 1; k < mu.size(); ++k)
    if (mu[k].real() > mu[best].real()) best = k;
  const std::complex<double> ev = 2.0 * std::complex<double>(mu[best].real(), 0.0);
  return {std::abs(ev.real()), ev, "lyapunov"};
}

GapResult dense_gap(const MomentOperator& op) {
  const Eigen::MatrixXd m = Eigen::MatrixXd(op.matrix);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  int best = 0;
  for (int k = 1; k < ev.size(); ++k)
    if (std::abs(ev[k].real()) < std::abs(ev[best].real())) best = k;
  return {std::abs(ev[best].real()), ev[best], "dense"};
}

// Shift-invert Arnoldi around 0 with explicit restarts on the dominant Ritz
// vector. Returns the eigenvalue of M closest to the origin.
GapResult arnoldi_gap(const MomentOperator& op, const GapOptions& opt) {
  using Vec = Eigen::VectorXd;
  const int size = static_cast<int>(op.matrix.rows());
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(op.matrix);
  if (lu.info() != Eigen::Success) throw NumericalError("moment operator is singular");
  const int m = std::min(opt.krylov_dim, size);

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Vec start(size);
  for (int i = 0; i < size; ++i) start[i] = normal(rng);

  std::complex<double> theta_best{};
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(size, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    v.col(0) = start.normalized();
    int k_used = m;
    for (int k = 0; k < m; ++k) {
      Vec w = lu.solve(v.col(k));
      for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalise
        for (int i = 0; i <= k; ++i) {
          const double c = v.col(i).dot(w);
          h(i, k) += c;
          w -= c * v.col(i);
        }
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) < 1e-14) {
        k_used = k + 1;
        break;
      }
      v.col(k + 1) = w / h(k + 1, k);
    }
    const Eigen::MatrixXd hk = h.topLeftCorner(k_used, k_used);
    Eigen::EigenSolver<Eigen::MatrixXd> es(hk, true);
    const Eigen::VectorXcd theta = es.eigenvalues();
    int best = 0;
    for (int i = 1; i < theta.size(); ++i)
      if (std::abs(theta[i]) > std::abs(theta[best])) best = i;
    theta_best = theta[best];
    const Eigen::VectorXcd y = es.eigenvectors().col(best);
    const double residual = std::abs(h(k_used, k_used - 1) * y[k_used - 1]) / y.norm();
    if (residual <= opt.tolerance * std::abs(theta_best) || k_used < m) break;
    // Restart from the dominant Ritz vector (real and imaginary parts mixed in).
    const Eigen::VectorXcd ritz = v.leftCols(k_used).cast<std::complex<double>>() * y;
    start = ritz.real() + ritz.imag();
    if (restart == opt.max_restarts)
      throw NumericalError("shift-invert Arnoldi did not converge for the spectral gap");
  }
  const std::complex<double> ev = 1.0 / theta_best;
  return {std::abs(ev.real()), ev, "arnoldi"};
}

}  // namespace

GapResult spectral_gap(const ChainParams& params, GapOptions options) {
  params.validate();
  const std::vector<double> ones(static_cast<std::size_t>(params.n_sites), 1.0);
  const SiteRates rates = site_rates(params, ones);
  if (rates.flip.isZero() && !options.force_arnoldi) return lyapunov_gap(params, rates);
  const MomentOperator op = moment_drift_operator(params, rates);
  if (op.matrix.rows() <= options.dense_limit && !options.force_arnoldi) return dense_gap(op);
  return arnoldi_gap(op, options);
}

}  // namespace hchain
