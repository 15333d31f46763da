#include <doctest.h>

#include "hchain/dynamics.hpp"
#include "hchain/errors.hpp"
#include "hchain/steady_state.hpp"

using namespace hchain;

namespace {

ChainParams small_vf() {
  ChainParams p;
  p.n_sites = 4;
  p.flip_rate = 1.0;
  p.bath_coupling = 1.0;
  p.temp_left = 1.0;
  p.temp_right = 3.0;
  return p;
}

}  // namespace

TEST_CASE("config resolution and the dt guard") {
  ChainParams p = small_vf();
  p.pinning = 2.0;
  SimConfig c;
  const SimConfig r = resolve(c, p);
  CHECK(r.dt == doctest::Approx(0.005));
  CHECK(r.t_burn == doctest::Approx(20.0 * 16 / 1.0));
  c.dt = 0.2;
  CHECK_THROWS_AS(resolve(c, p), ConfigError);
  c.allow_large_dt = true;
  CHECK_NOTHROW(resolve(c, p));
}

TEST_CASE("runs are deterministic in the seed") {
  SimConfig c;
  c.t_burn = 5.0;
  c.t_sample = 20.0;
  c.seed = 99;
  const TrajectoryStats a = run(small_vf(), c);
  const TrajectoryStats b = run(small_vf(), c);
  CHECK(a.h_samples == b.h_samples);
  CHECK(a.flip_count == b.flip_count);
  c.seed = 100;
  CHECK(run(small_vf(), c).h_samples != a.h_samples);
}

TEST_CASE("flips conserve bulk local energies exactly") {
  ChainParams p = small_vf();
  p.n_sites = 6;
  p.flip_rate = 50.0;
  std::mt19937_64 rng(1);
  Integrator integ(p, site_rates(p), 0.01, make_stream(4, 0));
  ChainState s = gibbs_sample(p, 2.0, rng);
  long before = 0;
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd e0 = local_observables(s, p).local_energy;
    integ.noise_half_step(s);
    const Eigen::VectorXd e1 = local_observables(s, p).local_energy;
    for (int j = 2; j <= 5; ++j) CHECK(e1[j] == e0[j]);
  }
  CHECK(integ.flip_count() > before);
}

TEST_CASE("flip counts follow the Poisson rate") {
  ChainParams p = small_vf();
  p.n_sites = 10;
  p.flip_rate = 2.0;
  const double dt = 0.01;
  Integrator integ(p, site_rates(p), dt, make_stream(8, 0));
  ChainState s = ChainState::zero(10);
  const int steps = 100000;
  for (int k = 0; k < steps; ++k) integ.noise_half_step(s), integ.noise_half_step(s);
  // odd-ring probability per half step, 8 flip sites
  const double prob = 0.5 * (1.0 - std::exp(-p.flip_rate * dt / 2));
  const double expected = 8.0 * 2 * steps * prob;
  CHECK(std::abs(integ.flip_count() - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("discrete-time stationary covariance converges at second order") {
  for (Model model : {Model::VelocityFlip, Model::SelfConsistent}) {
    ChainParams p = small_vf();
    p.pinning = 0.5;
    p.model = model;
    std::vector<double> t{1.0, 1.5, 2.2, 3.0};
    const Eigen::MatrixXd exact = stationary_covariance(p, t).cov;
    const double e1 = (integrator_stationary_covariance(p, t, 0.1) - exact).cwiseAbs().maxCoeff();
    const double e2 = (integrator_stationary_covariance(p, t, 0.05) - exact).cwiseAbs().maxCoeff();
    CHECK(e1 > 1e-6);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("Monte Carlo second moments match the exact solver") {
  const ChainParams p = small_vf();
  SimConfig c;
  c.dt = 0.01;
  c.t_burn = 50.0;
  c.t_sample = 4000.0;
  c.sample_stride = 5;
  c.replicas = 2;
  c.track_covariance = true;
  c.seed = 12;
  const auto reps = run_replicas(p, c);
  const auto [mean, se] = moment_estimates(reps);
  const Eigen::MatrixXd exact = stationary_covariance(p).cov;
  // time-step bias is far below the statistical error at this dt
  CHECK((integrator_stationary_covariance(p, {}, c.dt) - exact).cwiseAbs().maxCoeff() <
        0.2 * se.minCoeff());
  int worst = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = a; b < 8; ++b) {
      const double z = std::abs(mean(a, b) - exact(a, b)) / se(a, b);
      CHECK(z < 4.5);
      if (z > 3.0) ++worst;
    }
  CHECK(worst <= 2);
  const EstimateWithError j = current_estimate(reps);
  const SteadySummary s = steady_current_and_s(p, stationary_covariance(p));
  CHECK(std::abs(j.value - s.mean_current) < 4.5 * j.std_error + 1e-3);
}
