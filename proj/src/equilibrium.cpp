#include "hchain/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hchain/chain.hpp"
#include "hchain/errors.hpp"

namespace hchain {

GibbsMoments gibbs_moments(const GibbsParams& gp) {
  if (!(gp.temperature > 0.0)) throw ConfigError("Gibbs temperature must be > 0");
  if (gp.pinning != 0.0)
    throw ConfigError("the (T, tau) Gibbs family exists only without pinning; got pinning = " +
                      std::to_string(gp.pinning));
  return {gp.temperature, gp.temperature + 0.5 * gp.tension * gp.tension, gp.tension};
}

void TemperatureProfile::validate() const {
  if (temps.empty()) throw ConfigError("temperature profile is empty");
  for (double t : temps)
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be finite and > 0");
}

TemperatureProfile TemperatureProfile::uniform(int n, double t) {
  return {std::vector<double>(static_cast<std::size_t>(n), t)};
}

TemperatureProfile TemperatureProfile::linear(int n, double left, double right) {
  TemperatureProfile p;
  p.temps.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    p.temps[i] = n == 1 ? left : left + (right - left) * static_cast<double>(i) / (n - 1);
  return p;
}

Eigen::MatrixXd gibbs_covariance(int n_sites, double temperature, double pinning) {
  const int n = n_sites;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const Eigen::MatrixXd k = stiffness_matrix(n, pinning);
  c.topLeftCorner(n, n) = temperature * k.llt().solve(Eigen::MatrixXd::Identity(n, n));
  c.bottomRightCorner(n, n).diagonal().setConstant(temperature);
  return c;
}

namespace {

struct Term {
  int a, b;
  double c;
};

// E_j as sum of c x_a x_b with x = (q, p); walls dropped.
std::vector<Term> energy_form(int j, int n, double pinning) {
  std::vector<Term> t;
  auto q = [n](int s) { return (s >= 1 && s <= n) ? s - 1 : -1; };
  auto add = [&](int a, int b, double c) {
    if (a >= 0 && b >= 0) t.push_back({a, b, c});
  };
  if (j >= 1 && j <= n) {
    add(n + j - 1, n + j - 1, 0.5);
    add(q(j), q(j), 0.5 * pinning * pinning);
  }
  // (q_{s+1} - q_s)^2 / 4 for the two bonds touching j
  for (int s : {j - 1, j}) {
    if (s < 0 || s > n) continue;
    add(q(s + 1), q(s + 1), 0.25);
    add(q(s), q(s), 0.25);
    add(q(s + 1), q(s), -0.5);
  }
  return t;
}

}  // namespace

Eigen::MatrixXd unit_energy_covariance(int n_sites, double pinning) {
  const int n = n_sites;
  const Eigen::MatrixXd sigma = gibbs_covariance(n, 1.0, pinning);
  std::vector<std::vector<Term>> forms;
  for (int j = 0; j <= n + 1; ++j) forms.push_back(energy_form(j, n, pinning));
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n + 2, n + 2);
  for (int i = 0; i <= n + 1; ++i) {
    for (int j = i; j <= n + 1; ++j) {
      double s = 0.0;
      for (const Term& u : forms[i])
        for (const Term& v : forms[j])
          s += u.c * v.c * (sigma(u.a, v.a) * sigma(u.b, v.b) + sigma(u.a, v.b) * sigma(u.b, v.a));
      cov(i, j) = cov(j, i) = s;
    }
  }
  return cov;
}

double equilibrium_energy_covariance(int i, int j, double temperature, double pinning,
                                     int n_sites) {
  if (i < 0 || j < 0 || i > n_sites + 1 || j > n_sites + 1)
    throw ConfigError("site index outside 0..N+1");
  const Eigen::MatrixXd sigma = gibbs_covariance(n_sites, temperature, pinning);
  double s = 0.0;
  for (const Term& u : energy_form(i, n_sites, pinning))
    for (const Term& v : energy_form(j, n_sites, pinning))
      s += u.c * v.c * (sigma(u.a, v.a) * sigma(u.b, v.b) + sigma(u.a, v.b) * sigma(u.b, v.a));
  return s;
}

double lte_fluctuation_prediction(const TemperatureProfile& profile, double pinning) {
  profile.validate();
  const int n = profile.size();
  if (n < 2) throw ConfigError("profile needs at least two sites");
  const Eigen::MatrixXd k = unit_energy_covariance(n, pinning);
  const Eigen::VectorXd column_sums = k.colwise().sum().transpose();
  auto temp_at = [&](int j) {
    return profile.temps[static_cast<std::size_t>(std::clamp(j, 1, n) - 1)];
  };
  double sum = 0.0, mean_t = 0.0;
  for (int j = 0; j <= n + 1; ++j) sum += temp_at(j) * temp_at(j) * column_sums[j];
  for (double t : profile.temps) mean_t += t;
  mean_t /= n;
  return (sum / n) / (mean_t * mean_t);
}

double lte_fluctuation_limit(double temp_left, double temp_right, double pinning,
                             int resolution) {
  if (resolution < 4) throw ConfigError("resolution must be at least 4");
  const double a = lte_fluctuation_prediction(
      TemperatureProfile::linear(resolution, temp_left, temp_right), pinning);
  const double b = lte_fluctuation_prediction(
      TemperatureProfile::linear(2 * resolution, temp_left, temp_right), pinning);
  return 2.0 * b - a;
}

}  // namespace hchain
