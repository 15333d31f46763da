#include "hchain/chain.hpp"

#include <cmath>
#include <string>

#include "hchain/errors.hpp"

namespace hchain {

std::string_view to_string(Model model) {
  return model == Model::VelocityFlip ? "velocity_flip" : "self_consistent";
}

Model model_from_string(std::string_view name) {
  if (name == "velocity_flip" || name == "VelocityFlip") return Model::VelocityFlip;
  if (name == "self_consistent" || name == "SelfConsistent") return Model::SelfConsistent;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected velocity_flip or self_consistent)");
}

void ChainParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (n_sites < 2) throw ConfigError("n_sites must be at least 2");
  if (!std::isfinite(pinning) || pinning < 0.0) throw ConfigError("pinning must be >= 0");
  if (!positive(flip_rate)) throw ConfigError("flip_rate must be > 0");
  if (!positive(bath_coupling)) throw ConfigError("bath_coupling must be > 0");
  if (!positive(temp_left) || !positive(temp_right))
    throw ConfigError("bath temperatures must be > 0");
}

ChainState ChainState::zero(int n_sites) {
  ChainState s;
  s.q = Eigen::VectorXd::Zero(n_sites);
  s.p = Eigen::VectorXd::Zero(n_sites);
  return s;
}

bool ChainState::is_finite() const {
  return q.allFinite() && p.allFinite() && std::isfinite(time);
}

SiteRates site_rates(const ChainParams& params, std::span<const double> bath_temperatures) {
  const int n = params.n_sites;
  SiteRates r;
  r.friction = Eigen::VectorXd::Zero(n);
  r.temperature = Eigen::VectorXd::Zero(n);
  r.flip = Eigen::VectorXd::Zero(n);
  if (params.model == Model::VelocityFlip) {
    r.friction[0] = r.friction[n - 1] = params.bath_coupling;
    r.temperature[0] = params.temp_left;
    r.temperature[n - 1] = params.temp_right;
    for (int i = 1; i < n - 1; ++i) r.flip[i] = params.flip_rate;
    return r;
  }
  if (static_cast<int>(bath_temperatures.size()) != n)
    throw ConfigError("self-consistent model needs one bath temperature per site (got " +
                      std::to_string(bath_temperatures.size()) + ", expected " +
                      std::to_string(n) + ")");
  for (int i = 0; i < n; ++i) {
    if (!(bath_temperatures[i] >= 0.0) || !std::isfinite(bath_temperatures[i]))
      throw ConfigError("bath temperatures must be finite and nonnegative");
    r.friction[i] = params.bath_coupling;
    r.temperature[i] = bath_temperatures[i];
  }
  return r;
}

Eigen::MatrixXd stiffness_matrix(int n_sites, double pinning) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_sites, n_sites);
  for (int i = 0; i < n_sites; ++i) {
    k(i, i) = 2.0 + pinning * pinning;
    if (i + 1 < n_sites) k(i, i + 1) = k(i + 1, i) = -1.0;
  }
  return k;
}

namespace {

// Position and momentum by physical label, with the walls at 0 and N+1.
struct Padded {
  const ChainState& s;
  int n;
  double q(int j) const { return (j <= 0 || j > n) ? 0.0 : s.q[j - 1]; }
  double p(int j) const { return (j <= 0 || j > n) ? 0.0 : s.p[j - 1]; }
  double r(int j) const { return (j < 0 || j > n) ? 0.0 : q(j + 1) - q(j); }
};

}  // namespace

double total_energy(const ChainState& state, const ChainParams& params) {
  const int n = state.n_sites();
  const double nu2 = params.pinning * params.pinning;
  double h = 0.0;
  for (int i = 0; i < n; ++i) h += 0.5 * state.p[i] * state.p[i] + 0.5 * nu2 * state.q[i] * state.q[i];
  Padded x{state, n};
  for (int j = 0; j <= n; ++j) h += 0.5 * x.r(j) * x.r(j);
  return h;
}

LocalObservables local_observables(const ChainState& state, const ChainParams& params) {
  const int n = state.n_sites();
  const double nu2 = params.pinning * params.pinning;
  Padded x{state, n};
  LocalObservables o;
  o.local_energy.resize(n + 2);
  o.deformation.resize(n + 1);
  o.energy_current.resize(n + 2);
  o.deformation_current.resize(n + 2);
  for (int j = 0; j <= n + 1; ++j) {
    const double rj = x.r(j), rjm = x.r(j - 1);
    o.local_energy[j] = 0.5 * x.p(j) * x.p(j) + 0.5 * nu2 * x.q(j) * x.q(j) +
                        0.25 * rj * rj + 0.25 * rjm * rjm;
    o.energy_current[j] = -0.5 * rjm * (x.p(j) + x.p(j - 1));
    o.deformation_current[j] = -x.p(j);
  }
  for (int j = 0; j <= n; ++j) o.deformation[j] = x.r(j);
  return o;
}

Eigen::VectorXd conservation_check(std::span<const ChainState> trajectory,
                                   const ChainParams& params) {
  if (trajectory.empty()) return {};
  const int n = trajectory.front().n_sites();
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(n + 2);
  auto flux = [n](const LocalObservables& o) {
    Eigen::VectorXd f(n + 2);
    for (int j = 0; j <= n + 1; ++j) {
      const double out = (j + 1 <= n + 1) ? o.energy_current[j + 1] : 0.0;
      f[j] = o.energy_current[j] - out;
    }
    return f;
  };
  LocalObservables first = local_observables(trajectory.front(), params);
  Eigen::VectorXd prev_flux = flux(first);
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    if (trajectory[k].n_sites() != n) throw ConfigError("trajectory states differ in size");
    Eigen::VectorXd f = flux(local_observables(trajectory[k], params));
    const double h = trajectory[k].time - trajectory[k - 1].time;
    integral += 0.5 * h * (prev_flux + f);
    prev_flux = std::move(f);
  }
  LocalObservables last = local_observables(trajectory.back(), params);
  return (last.local_energy - first.local_energy - integral).cwiseAbs();
}

}  // namespace hchain
