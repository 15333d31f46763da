#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "hchain/errors.hpp"
#include "hchain/equilibrium.hpp"
#include "hchain/packing.hpp"
#include "hchain/steady_state.hpp"

using namespace hchain;

namespace {

// Dense Kronecker form of dC/dt = A C + C A^T - G o C + S, with G the flip
// decoherence mask built entry by entry.
Eigen::MatrixXd dense_stationary(const ChainParams& p, const SiteRates& r) {
  const int n = p.n_sites, d = 2 * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -stiffness_matrix(n, p.pinning);
  a.bottomRightCorner(n, n) = -r.friction.asDiagonal().toDenseMatrix();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  g.tail(n) = r.flip;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(d * d, d * d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * d);
  auto idx = [d](int i, int j) { return i * d + j; };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        big(idx(i, j), idx(k, j)) += a(i, k);
        big(idx(i, j), idx(i, k)) += a(j, k);
      }
      if (i != j) big(idx(i, j), idx(i, j)) -= g[i] + g[j];
      if (i == j && i >= n) rhs[idx(i, j)] = -2.0 * r.friction[i - n] * r.temperature[i - n];
    }
  const Eigen::VectorXd c = big.fullPivLu().solve(rhs);
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = c[idx(i, j)];
  return out;
}

ChainParams vf(int n, double nu, double tl, double tr) {
  ChainParams p;
  p.n_sites = n;
  p.pinning = nu;
  p.flip_rate = 1.0;
  p.bath_coupling = 1.0;
  p.temp_left = tl;
  p.temp_right = tr;
  return p;
}

}  // namespace

TEST_CASE("packing round trip") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(5, 5);
  m = (m + m.transpose()).eval();
  CHECK((unpack_symmetric(pack_symmetric(m), 5) - m).norm() == 0.0);
  CHECK(packed_index(3, 1, 5) == packed_index(1, 3, 5));
  CHECK(packed_index(4, 4, 5) == packed_size(5) - 1);
}

TEST_CASE("sparse moment solve agrees with the dense Kronecker oracle") {
  for (double nu : {0.0, 1.0}) {
    ChainParams p = vf(5, nu, 1.0, 3.0);
    p.flip_rate = 0.7;
    p.bath_coupling = 1.3;
    const Eigen::MatrixXd dense = dense_stationary(p, site_rates(p));
    CHECK((stationary_covariance(p).cov - dense).cwiseAbs().maxCoeff() < 1e-11);

    p.model = Model::SelfConsistent;
    std::vector<double> t{1.0, 1.4, 2.0, 2.5, 3.0};
    const Eigen::MatrixXd dsc = dense_stationary(p, site_rates(p, t));
    CHECK((stationary_covariance(p, t).cov - dsc).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("moment operator apply matches its sparse matrix") {
  ChainParams p = vf(4, 0.5, 1.0, 2.0);
  const MomentOperator op = moment_drift_operator(p, site_rates(p));
  Eigen::MatrixXd c = Eigen::MatrixXd::Random(8, 8);
  c = (c + c.transpose()).eval();
  const Eigen::VectorXd v = op.matrix * pack_symmetric(c);
  CHECK((pack_symmetric(op.apply(c)) - v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("iterative solver matches the direct one") {
  ChainParams p = vf(12, 0.0, 1.0, 5.0);
  SolverOptions it;
  it.method = SolveMethod::Iterative;
  const SecondMoments a = stationary_covariance(p);
  const SecondMoments b = stationary_covariance(p, {}, it);
  CHECK((a.cov - b.cov).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("equilibrium exactness") {
  for (double nu : {0.0, 1.0}) {
    const ChainParams p = vf(8, nu, 2.0, 2.0);
    const SecondMoments m = stationary_covariance(p);
    CHECK((m.cov - gibbs_covariance(8, 2.0, nu)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.min_eigenvalue() > 0.0);
  }
}

TEST_CASE("velocity-flip and self-consistent covariances coincide") {
  for (double nu : {0.0, 1.0}) {
    const ChainParams p = vf(8, nu, 1.0, 8.0);
    const SecondMoments a = stationary_covariance(p);
    ChainParams sc = p;
    sc.model = Model::SelfConsistent;
    const SelfConsistentResult prof = self_consistent_profile(sc);
    CHECK(prof.residual < 1e-10);
    const SecondMoments b = stationary_covariance(sc, prof.profile.temps);
    CHECK((a.cov - b.cov).cwiseAbs().maxCoeff() < 1e-8);
    // interior SC bath temperatures are the VF kinetic temperatures
    for (int i = 1; i < 7; ++i) CHECK(a.pp()(i, i) == doctest::Approx(prof.profile.temps[i]));
  }
}

TEST_CASE("self-consistent profile: direct and fixed-point agree") {
  ChainParams p = vf(10, 0.0, 1.0, 2.0);
  p.model = Model::SelfConsistent;
  const SelfConsistentResult a = self_consistent_profile(p);
  const SelfConsistentResult b = self_consistent_profile_iterative(p, 1e-12);
  CHECK(b.iterations > 0);
  for (int i = 0; i < 10; ++i) CHECK(a.profile.temps[i] == doctest::Approx(b.profile.temps[i]).epsilon(1e-9));
  CHECK(a.profile.temps.front() == 1.0);
  CHECK(a.profile.temps.back() == 2.0);
  // interior profile is monotone between the baths
  for (int i = 1; i < 10; ++i) CHECK(a.profile.temps[i] >= a.profile.temps[i - 1]);
}

TEST_CASE("steady current and Gaussian s") {
  const ChainParams p = vf(16, 0.0, 1.0, 2.0);
  const SteadySummary s = steady_current_and_s(p, stationary_covariance(p));
  CHECK(s.mean_current < 0.0);  // heat flows from the hot right bath to the left
  for (double j : s.bond_currents) CHECK(j == doctest::Approx(s.mean_current).epsilon(1e-8));
  const ChainParams eq = vf(16, 0.0, 3.0, 3.0);
  const SteadySummary e = steady_current_and_s(eq, stationary_covariance(eq));
  CHECK(std::abs(e.mean_current) < 1e-12);
  // Gibbs: Var(H) = N T^2, <H> = N T
  CHECK(e.s_gaussian == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("B kernel reproduces the covariance linearly") {
  ChainParams p = vf(6, 1.0, 1.0, 4.0);
  p.model = Model::SelfConsistent;
  const BKernel b = b_kernel(p);
  std::vector<double> t{1.0, 3.0, 2.0, 5.0, 1.5, 4.0};
  const SecondMoments m = stationary_covariance(p, t);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(12, 12);
  for (int n = 0; n < 6; ++n) sum += t[n] * b.column(n);
  CHECK((sum - m.cov).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(b.value(KernelVar::P, KernelVar::P, 2, 1, 3) == doctest::Approx(b.column(2)(7, 9)));
  // r-r kernel from q-q: r_i = q_{i+1} - q_i with walls at zero
  const double qq = b.column(1)(2, 3) - b.column(1)(2, 2) - b.column(1)(1, 3) + b.column(1)(1, 2);
  CHECK(b.value(KernelVar::R, KernelVar::R, 1, 2, 3) == doctest::Approx(qq));
  const auto env = b.envelope(KernelVar::P, KernelVar::P);
  CHECK(env.begin()->first >= 1);
  ChainParams v = p;
  v.model = Model::VelocityFlip;
  CHECK_THROWS_AS(b_kernel(v), ConfigError);
}

TEST_CASE("spectral gap") {
  SUBCASE("self-consistent, pinned, lambda = 2: every mode decays at rate 1") {
    ChainParams p = vf(10, 1.0, 1.0, 2.0);
    p.model = Model::SelfConsistent;
    p.bath_coupling = 2.0;
    const GapResult g = spectral_gap(p);
    CHECK(g.method == "lyapunov");
    CHECK(g.rate == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("dense and Arnoldi agree for velocity flips") {
    const ChainParams p = vf(10, 0.0, 1.0, 2.0);
    const GapResult d = spectral_gap(p);
    GapOptions o;
    o.force_arnoldi = true;
    const GapResult a = spectral_gap(p, o);
    CHECK(d.method == "dense");
    CHECK(a.method == "arnoldi");
    CHECK(a.rate == doctest::Approx(d.rate).epsilon(1e-8));
  }
  SUBCASE("Lyapunov route agrees with a dense eigensolve of the operator") {
    ChainParams p = vf(5, 0.5, 1.0, 2.0);
    p.model = Model::SelfConsistent;
    const GapResult g = spectral_gap(p);
    std::vector<double> t(5, 1.0);
    const MomentOperator op = moment_drift_operator(p, site_rates(p, t));
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(op.matrix), false);
    CHECK(g.rate == doctest::Approx(-es.eigenvalues().real().maxCoeff()).epsilon(1e-10));
  }
}
