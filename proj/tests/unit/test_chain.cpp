#include <doctest.h>

#include <random>

#include "hchain/chain.hpp"
#include "hchain/dynamics.hpp"
#include "hchain/errors.hpp"
#include "hchain/quadratic.hpp"

using namespace hchain;

namespace {

// Straight sum over particles and bonds, walls pinned at zero.
double brute_energy(const ChainState& s, double nu) {
  const int n = s.n_sites();
  double e = 0.0;
  for (int i = 0; i < n; ++i) e += 0.5 * s.p[i] * s.p[i] + 0.5 * nu * nu * s.q[i] * s.q[i];
  for (int b = 0; b <= n; ++b) {
    const double left = b == 0 ? 0.0 : s.q[b - 1];
    const double right = b == n ? 0.0 : s.q[b];
    e += 0.5 * (right - left) * (right - left);
  }
  return e;
}

ChainState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ChainState s = ChainState::zero(n);
  for (int i = 0; i < n; ++i) {
    s.q[i] = g(rng);
    s.p[i] = g(rng);
  }
  return s;
}

}  // namespace

TEST_CASE("total energy on hand examples") {
  ChainParams p;
  p.n_sites = 2;
  p.pinning = 1.0;
  ChainState s = ChainState::zero(2);
  s.q << 1.0, 0.0;
  // q1^2/2 from pinning, two stretched bonds (wall-1 and 1-2)
  CHECK(total_energy(s, p) == doctest::Approx(1.5).epsilon(1e-15));

  p.n_sites = 3;
  p.pinning = 0.0;
  CHECK(total_energy(ChainState::zero(3), p) == 0.0);

  s = ChainState::zero(3);
  s.p << 1.0, 2.0, 3.0;
  CHECK(total_energy(s, p) == doctest::Approx(7.0));
}

TEST_CASE("total energy matches brute force and the sum of local energies") {
  std::mt19937_64 rng(5);
  for (double nu : {0.0, 0.7, 2.0}) {
    for (int n : {2, 5, 13}) {
      ChainParams p;
      p.n_sites = n;
      p.pinning = nu;
      const ChainState s = random_state(n, rng);
      const double e = total_energy(s, p);
      CHECK(e == doctest::Approx(brute_energy(s, nu)).epsilon(1e-13));
      const LocalObservables obs = local_observables(s, p);
      CHECK(obs.local_energy.size() == n + 2);
      CHECK(obs.deformation.size() == n + 1);
      CHECK(obs.local_energy.sum() == doctest::Approx(e).epsilon(1e-13));
      // wall energies are a quarter of the adjacent bond
      CHECK(obs.local_energy[0] == doctest::Approx(0.25 * s.q[0] * s.q[0]));
      CHECK(obs.deformation.sum() == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("params validation") {
  ChainParams p;
  p.n_sites = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n_sites = 4;
  p.temp_left = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.temp_left = 1.0;
  CHECK_NOTHROW(p.validate());
  CHECK(model_from_string("self_consistent") == Model::SelfConsistent);
  CHECK(to_string(Model::VelocityFlip) == "velocity_flip");
  CHECK_THROWS_AS(model_from_string("bogus"), ConfigError);
}

TEST_CASE("site rates layout") {
  ChainParams p;
  p.n_sites = 5;
  p.flip_rate = 0.5;
  p.bath_coupling = 2.0;
  p.temp_left = 1.0;
  p.temp_right = 3.0;
  SiteRates r = site_rates(p);
  CHECK(r.friction[0] == 2.0);
  CHECK(r.friction[4] == 2.0);
  CHECK(r.friction[2] == 0.0);
  CHECK(r.flip[0] == 0.0);
  CHECK(r.flip[2] == 0.5);
  CHECK(r.temperature[4] == 3.0);

  p.model = Model::SelfConsistent;
  std::vector<double> t{1, 2, 3, 4, 5};
  r = site_rates(p, t);
  CHECK((r.friction.array() == 2.0).all());
  CHECK((r.flip.array() == 0.0).all());
  CHECK(r.temperature[3] == 4.0);
  std::vector<double> short_t{1, 2};
  CHECK_THROWS_AS(site_rates(p, short_t), ConfigError);
}

TEST_CASE("local energy balance along an integrator trajectory") {
  std::mt19937_64 rng(11);
  const ChainState init = random_state(6, rng);
  ChainParams p;
  p.n_sites = 6;
  p.temp_left = 1.0;
  p.temp_right = 4.0;

  SUBCASE("Verlet drift only: residual is O(dt^2)") {
    p.flip_rate = 1e-12;  // effectively no flip events
    p.bath_coupling = 1e-12;  // and no bath kicks, so the path is dt independent
    double err[2];
    int k = 0;
    for (double dt : {0.02, 0.01}) {
      const auto tr = trace(p, {}, init, dt, static_cast<int>(std::lround(2.0 / dt)), 3);
      err[k++] = conservation_check(tr, p).segment(2, 4).maxCoeff();  // sites 2..5
    }
    CHECK(err[0] < 1e-2);
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("flips are instantaneous and energy neutral") {
    p.flip_rate = 5.0;
    const auto tr = trace(p, {}, init, 0.002, 1000, 3);
    CHECK(conservation_check(tr, p).segment(2, 4).maxCoeff() < 1e-4);
  }
}

TEST_CASE("current decomposition holds exactly in the bulk") {
  ChainParams p;
  p.n_sites = 9;
  p.flip_rate = 1.3;
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const ChainState s = random_state(9, rng);
    for (int site = 3; site <= 8; ++site) CHECK(check_current_decomposition(s, p, site) < 1e-12);
  }
  CHECK_THROWS_AS(check_current_decomposition(random_state(9, rng), p, 2), ConfigError);
}
