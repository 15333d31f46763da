#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hchain/errors.hpp"
#include "hchain/hydro.hpp"

using namespace hchain;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("stationary state is a fixed point") {
  HydroState s = HydroState::stationary(64, 1.0, 1.0, 8.0);
  for (int k = 0; k < 10; ++k) {
    const HydroState next = hydro_step(s, 1e-3);
    CHECK((next.eps.values - s.eps.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(next.u.values.cwiseAbs().maxCoeff() < 1e-12);
    s = next;
  }
  CHECK(s.time == doctest::Approx(1e-2));
}

TEST_CASE("Neumann cosine mode of u decays at pi^2/gamma") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    HydroState s = HydroState::stationary(128, gamma, 1.0, 1.0);
    s.u = GridField::sample(128, [](double x) { return 0.01 * std::cos(kPi * x); });
    const double t = 0.05 * gamma;
    const auto path = hydro_evolve(s, t, 1e-4 * gamma, 100000);
    const HydroState& end = path.back();
    const double rate = -std::log(end.u.values[0] / 0.01) / end.time;
    CHECK(rate == doctest::Approx(kPi * kPi / gamma).epsilon(1e-2));
    // Neumann conditions conserve the integral of u
    CHECK(std::abs(trapezoid(end.u)) < 1e-12);
  }
}

TEST_CASE("energy sine mode decays at pi^2/(2 gamma)") {
  HydroState s = HydroState::stationary(128, 1.0, 2.0, 2.0);
  s.eps = GridField::sample(128, [](double x) { return 2.0 + 0.1 * std::sin(kPi * x); });
  const auto path = hydro_evolve(s, 0.2, 1e-4, 1000000);
  const double amp = path.back().eps.values[64] - 2.0;
  const double rate = -std::log(amp / 0.1) / path.back().time;
  CHECK(rate == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-2));
}

TEST_CASE("second-order convergence in space and time") {
  // u = a cos(pi x) e^{-pi^2 t / gamma} exactly; eps then follows the
  // diffusion with a quadratic source, so use a fine-grid reference.
  auto solve = [](int m) {
    HydroState s = HydroState::stationary(m, 1.0, 1.0, 2.0);
    s.u = GridField::sample(m, [](double x) { return 0.3 * std::cos(kPi * x); });
    s.eps = GridField::sample(m, [](double x) { return 1.0 + x + 0.045 * std::pow(std::cos(kPi * x), 2) + 0.2 * std::sin(kPi * x); });
    return hydro_evolve(s, 0.05, 0.2 / m, 1 << 30).back();
  };
  const HydroState ref = solve(512);
  double err_u[3], err_e[3];
  int k = 0;
  for (int m : {16, 32, 64}) {
    const HydroState h = solve(m);
    const int stride = 512 / m;
    double eu = 0.0, ee = 0.0;
    for (int i = 0; i <= m; ++i) {
      eu = std::max(eu, std::abs(h.u.values[i] - ref.u.values[i * stride]));
      ee = std::max(ee, std::abs(h.eps.values[i] - ref.eps.values[i * stride]));
    }
    err_u[k] = eu;
    err_e[k++] = ee;
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(std::log2(err_u[i] / err_u[i + 1]) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(err_e[i] / err_e[i + 1]) == doctest::Approx(2.0).epsilon(0.15));
  }
  // boundary condition: eps - u^2/2 = T at both ends
  const HydroState h = solve(64);
  CHECK(h.eps.values[0] - 0.5 * h.u.values[0] * h.u.values[0] == doctest::Approx(1.0));
  CHECK(h.eps.values[64] - 0.5 * h.u.values[64] * h.u.values[64] == doctest::Approx(2.0));
}

TEST_CASE("tridiagonal solve and validation") {
  Eigen::VectorXd sub(3), diag(3), sup(3), rhs(3);
  sub << 0, 1, 1;
  diag << 4, 4, 4;
  sup << 1, 1, 0;
  rhs << 5, 6, 5;
  const Eigen::VectorXd x = solve_tridiagonal(sub, diag, sup, rhs);
  CHECK((x - Eigen::VectorXd::Ones(3)).norm() < 1e-14);
  HydroState s = HydroState::stationary(16, 1.0, 1.0, 2.0);
  s.gamma = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
