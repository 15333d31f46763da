#include <doctest.h>

#include <random>

#include "hchain/chain.hpp"
#include "hchain/equilibrium.hpp"
#include "hchain/errors.hpp"

using namespace hchain;

TEST_CASE("Gibbs covariance inverts the stiffness") {
  for (double nu : {0.0, 1.0}) {
    const Eigen::MatrixXd c = gibbs_covariance(7, 2.5, nu);
    const Eigen::MatrixXd k = stiffness_matrix(7, nu);
    CHECK((c.topLeftCorner(7, 7) * k / 2.5 - Eigen::MatrixXd::Identity(7, 7)).norm() < 1e-12);
    CHECK((c.bottomRightCorner(7, 7) - 2.5 * Eigen::MatrixXd::Identity(7, 7)).norm() == 0.0);
    CHECK(c.topRightCorner(7, 7).norm() == 0.0);
  }
}

TEST_CASE("Gibbs moments") {
  const GibbsMoments m = gibbs_moments({2.0, 0.5, 0.0});
  CHECK(m.mean_p_sq == 2.0);
  CHECK(m.mean_energy == doctest::Approx(2.125));
  CHECK(m.mean_deformation == 0.5);
  CHECK_THROWS_AS(gibbs_moments({1.0, 0.0, 1.0}), ConfigError);
}

TEST_CASE("Wick energy covariance against Gaussian sampling") {
  // Sample (q, p) from the Gibbs law and form local energies directly.
  const int n = 5;
  for (double nu : {0.0, 0.8}) {
    const Eigen::MatrixXd cov = gibbs_covariance(n, 1.0, nu);
    const Eigen::MatrixXd l = cov.llt().matrixL();
    ChainParams p;
    p.n_sites = n;
    p.pinning = nu;
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    const int samples = 200000;
    Eigen::MatrixXd e(samples, n + 2);
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd z(2 * n);
      for (int a = 0; a < 2 * n; ++a) z[a] = g(rng);
      const Eigen::VectorXd x = l * z;
      ChainState st = ChainState::zero(n);
      st.q = x.head(n);
      st.p = x.tail(n);
      e.row(s) = local_observables(st, p).local_energy.transpose();
    }
    const Eigen::RowVectorXd mean = e.colwise().mean();
    const Eigen::MatrixXd centred = e.rowwise() - mean;
    const Eigen::MatrixXd mc = centred.transpose() * centred / (samples - 1);
    const Eigen::MatrixXd exact = unit_energy_covariance(n, nu);
    for (int i = 0; i < n + 2; ++i)
      for (int j = 0; j < n + 2; ++j) {
        // Var of a product of two energies is bounded by a few times this scale
        const double se = 3.0 * std::sqrt(exact(i, i) * exact(j, j) / samples) + 1e-12;
        CHECK(std::abs(mc(i, j) - exact(i, j)) < 5.0 * se);
      }
    CHECK(equilibrium_energy_covariance(2, 3, 3.0, nu, n) ==
          doctest::Approx(9.0 * exact(2, 3)));
  }
}

TEST_CASE("energy covariance column sums follow from the mean energy") {
  // Canonical identity Cov(H, E_k) = T^2 d<E_k>/dT. Unpinned with fixed
  // walls: <E_k> = T/2 + N T / (2 (N + 1)) for an interior particle.
  const int n = 40;
  const Eigen::MatrixXd c = unit_energy_covariance(n, 0.0);
  CHECK(c.col(20).sum() == doctest::Approx(0.5 + 0.5 * n / (n + 1.0)).epsilon(1e-10));
  CHECK(c.sum() == doctest::Approx(static_cast<double>(n)).epsilon(1e-10));  // Var(H) = N T^2
}

TEST_CASE("LTE prediction") {
  for (double nu : {0.0, 1.0})
    CHECK(lte_fluctuation_prediction(TemperatureProfile::uniform(30, 2.0), nu) ==
          doctest::Approx(1.0).epsilon(1e-12));
  const double v = lte_fluctuation_prediction(TemperatureProfile::linear(400, 1.0, 8.0), 0.0);
  CHECK(v == doctest::Approx(73.0 / 3.0 / (4.5 * 4.5)).epsilon(2e-3));
  CHECK(v > 1.195);
  CHECK(v < 1.21);
  CHECK(lte_fluctuation_limit(1.0, 8.0, 0.0) == doctest::Approx(73.0 / 3.0 / (4.5 * 4.5)).epsilon(1e-5));
  CHECK(lte_fluctuation_limit(2.0, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  TemperatureProfile bad{{1.0, -2.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
