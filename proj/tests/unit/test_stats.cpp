#include <doctest.h>

#include <random>

#include "hchain/errors.hpp"
#include "hchain/stats.hpp"

using namespace hchain;

TEST_CASE("batch means on iid data") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> x(64000);
  for (double& v : x) v = g(rng);
  const EstimateWithError e = batch_means(x, 32);
  CHECK(e.n_batches == 32);
  CHECK(e.batch_len == 2000);
  CHECK(std::abs(e.value - 3.0) < 4.0 * 2.0 / std::sqrt(64000.0));
  // relative error of a 32-batch standard error is about 1/sqrt(62)
  CHECK(e.std_error == doctest::Approx(2.0 / std::sqrt(64000.0)).epsilon(0.4));
  CHECK(e.warnings.empty());
  CHECK(integrated_autocorrelation_time(x) == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("AR(1) autocorrelation time and batch error") {
  const double rho = 0.9;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> x(400000);
  double v = 0.0;
  for (double& s : x) s = v = rho * v + g(rng);
  const double tau = (1.0 + rho) / (2.0 * (1.0 - rho));
  CHECK(integrated_autocorrelation_time(x) == doctest::Approx(tau).epsilon(0.1));
  // stationary variance 1/(1 - rho^2); se^2 = 2 tau var / n
  const double se = std::sqrt(2.0 * tau / (1.0 - rho * rho) / x.size());
  const EstimateWithError e = batch_means(x, 32);
  CHECK(e.std_error == doctest::Approx(se).epsilon(0.4));
  const EstimateWithError short_batches = batch_means(std::span<const double>(x).first(1600), 32);
  CHECK_FALSE(short_batches.warnings.empty());
}

TEST_CASE("s estimator") {
  // H ~ N(mu, sigma^2) iid: s = N sigma^2 / mu^2
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(20.0, 3.0);
  std::vector<double> h(100000);
  for (double& v : h) v = g(rng);
  const EstimateWithError s = estimate_s(h, 10, 32);
  CHECK(std::abs(s.value - 10 * 9.0 / 400.0) < 4.0 * s.std_error);
  CHECK(s.std_error > 0.0);
  std::vector<std::vector<double>> seg{std::vector<double>(h.begin(), h.begin() + 50000),
                                       std::vector<double>(h.begin() + 50000, h.end())};
  const EstimateWithError s2 = estimate_s(seg, 10, 16);
  CHECK(s2.value == doctest::Approx(s.value).epsilon(0.02));
  CHECK_THROWS_AS(batch_means(std::vector<double>(5), 32), ConfigError);
}

TEST_CASE("linear fit and json") {
  std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  EstimateWithError e;
  e.value = 1.5;
  e.std_error = 0.1;
  const nlohmann::json j = to_json(e);
  CHECK(j["value"] == 1.5);
  CHECK(j["std_error"] == 0.1);
}
