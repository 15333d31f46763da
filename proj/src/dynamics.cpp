#include "hchain/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "hchain/equilibrium.hpp"
#include "hchain/errors.hpp"
#include "hchain/packing.hpp"

namespace hchain {

double default_dt(const ChainParams& params) {
  return 0.01 / std::max({1.0, params.pinning, params.bath_coupling, params.flip_rate});
}

double default_burn_in(const ChainParams& params) {
  const double n = params.n_sites;
  return 20.0 * n * n / params.flip_rate;
}

SimConfig resolve(const SimConfig& cfg, const ChainParams& params) {
  params.validate();
  SimConfig out = cfg;
  if (out.dt <= 0.0) out.dt = default_dt(params);
  if (out.t_burn < 0.0) out.t_burn = default_burn_in(params);
  if (!(out.t_sample > 0.0)) throw ConfigError("t_sample must be > 0");
  if (out.sample_stride < 1) throw ConfigError("sample_stride must be >= 1");
  if (out.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (out.n_batches < 2) throw ConfigError("n_batches must be >= 2");
  const double scale =
      std::max({1.0, params.pinning, params.bath_coupling, params.flip_rate});
  if (!out.allow_large_dt && out.dt * scale > 0.1 + 1e-12)
    throw ConfigError("dt = " + std::to_string(out.dt) +
                      " violates dt * max(1, nu, lambda, gamma) <= 0.1; set allow_large_dt to override");
  return out;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replica, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32),
                    tag};
  return std::mt19937_64(seq);
}

Integrator::Integrator(const ChainParams& params, const SiteRates& rates, double dt,
                       std::mt19937_64 rng)
    : n_(params.n_sites),
      dt_(dt),
      stiff_diag_(2.0 + params.pinning * params.pinning),
      rng_(std::move(rng)) {
  const double h = 0.5 * dt;
  double flip_rate = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (rates.friction[i] > 0.0) {
      bath_sites_.push_back(i);
      const double a = std::exp(-rates.friction[i] * h);
      ou_decay_.push_back(a);
      ou_kick_.push_back(std::sqrt(rates.temperature[i] * (1.0 - a * a)));
    }
    if (rates.flip[i] > 0.0) {
      if (flip_rate != 0.0 && rates.flip[i] != flip_rate)
        throw ConfigError("integrator assumes a common flip rate");
      flip_rate = rates.flip[i];
      flip_sites_.push_back(i);
    }
  }
  flip_probability_ = 0.5 * (1.0 - std::exp(-flip_rate * h));
  for (std::size_t k = 0; k < flip_sites_.size(); ++k) countdown_.push_back(draw_countdown());
}

long Integrator::draw_countdown() {
  std::geometric_distribution<long> g(flip_probability_);
  return g(rng_);
}

void Integrator::noise_half_step(ChainState& s) {
  for (std::size_t k = 0; k < bath_sites_.size(); ++k) {
    double& p = s.p[bath_sites_[k]];
    p = ou_decay_[k] * p + ou_kick_[k] * normal_(rng_);
  }
  for (std::size_t k = 0; k < flip_sites_.size(); ++k) {
    if (countdown_[k] == 0) {
      s.p[flip_sites_[k]] = -s.p[flip_sites_[k]];
      ++flip_count_;
      countdown_[k] = draw_countdown();
    } else {
      --countdown_[k];
    }
  }
}

void Integrator::drift(ChainState& s) const {
  const int n = n_;
  double* q = s.q.data();
  double* p = s.p.data();
  const double h = 0.5 * dt_;
  auto kick = [&]() {
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? q[i - 1] : 0.0;
      const double right = i + 1 < n ? q[i + 1] : 0.0;
      p[i] += h * (left + right - stiff_diag_ * q[i]);
    }
  };
  kick();
  for (int i = 0; i < n; ++i) q[i] += dt_ * p[i];
  kick();
  s.time += dt_;
}

void Integrator::step(ChainState& s) {
  noise_half_step(s);
  drift(s);
  noise_half_step(s);
}

ChainState gibbs_sample(const ChainParams& params, double temperature, std::mt19937_64& rng) {
  const int n = params.n_sites;
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd qq = gibbs_covariance(n, temperature, params.pinning).topLeftCorner(n, n);
  const Eigen::MatrixXd l = qq.llt().matrixL();
  Eigen::VectorXd z(n);
  ChainState s = ChainState::zero(n);
  for (int i = 0; i < n; ++i) z[i] = normal(rng);
  s.q = l * z;
  for (int i = 0; i < n; ++i) s.p[i] = std::sqrt(temperature) * normal(rng);
  return s;
}

TrajectoryStats run(const ChainParams& params, const SimConfig& raw_cfg,
                    std::span<const double> bath_temperatures, int replica,
                    const SampleObserver& observer) {
  const SimConfig cfg = resolve(raw_cfg, params);
  const SiteRates rates = site_rates(params, bath_temperatures);
  const int n = params.n_sites;
  const double nu2 = params.pinning * params.pinning;

  std::mt19937_64 rng = make_stream(cfg.seed, static_cast<std::uint64_t>(replica));
  double t_mean = 0.0;
  int n_baths = 0;
  for (int i = 0; i < n; ++i)
    if (rates.thermostatted(i)) {
      t_mean += rates.temperature[i];
      ++n_baths;
    }
  t_mean = n_baths > 0 && t_mean > 0.0 ? t_mean / n_baths : 1.0;
  ChainState state = gibbs_sample(params, t_mean, rng);
  Integrator integ(params, rates, cfg.dt, std::move(rng));

  auto check = [&](const ChainState& s) {
    if (!s.is_finite())
      throw NumericalError("non-finite chain state at t = " + std::to_string(s.time) +
                           "; reduce dt (currently " + std::to_string(cfg.dt) + ")");
  };

  const long burn_steps = static_cast<long>(std::ceil(cfg.t_burn / cfg.dt));
  for (long k = 0; k < burn_steps; ++k) {
    integ.step(state);
    if ((k & 0xFFF) == 0) check(state);
  }
  check(state);

  const long n_samples = static_cast<long>(std::floor(cfg.t_sample / (cfg.dt * cfg.sample_stride)));
  const long batch_len = n_samples / cfg.n_batches;
  if (batch_len < 1)
    throw ConfigError("t_sample too short: " + std::to_string(n_samples) + " samples for " +
                      std::to_string(cfg.n_batches) + " batches");

  TrajectoryStats st;
  st.batch_len = static_cast<int>(batch_len);
  st.h_samples.reserve(static_cast<std::size_t>(n_samples));
  st.p_sq_batches = Eigen::MatrixXd::Zero(cfg.n_batches, n);
  st.energy_batches = Eigen::MatrixXd::Zero(cfg.n_batches, n);
  st.current_batches.assign(static_cast<std::size_t>(cfg.n_batches), 0.0);
  const int dim = 2 * n;
  if (cfg.track_covariance) st.moment_batches = Eigen::MatrixXd::Zero(cfg.n_batches, packed_size(dim));

  Eigen::VectorXd p_sq_sum = Eigen::VectorXd::Zero(n), e_sum = Eigen::VectorXd::Zero(n);
  double current_sum = 0.0;
  Eigen::VectorXd x(dim);
  for (long s = 0; s < n_samples; ++s) {
    for (int k = 0; k < cfg.sample_stride; ++k) integ.step(state);
    check(state);
    const double* q = state.q.data();
    const double* p = state.p.data();
    auto qa = [&](int j) { return (j < 1 || j > n) ? 0.0 : q[j - 1]; };
    double h = 0.0, cur = 0.0;
    const long b = s / batch_len;
    const bool in_batch = b < cfg.n_batches;
    for (int j = 1; j <= n; ++j) {
      const double rl = qa(j) - qa(j - 1), rr = qa(j + 1) - qa(j);
      const double pj = p[j - 1];
      const double e = 0.5 * pj * pj + 0.5 * nu2 * q[j - 1] * q[j - 1] + 0.25 * (rl * rl + rr * rr);
      h += e;
      p_sq_sum[j - 1] += pj * pj;
      e_sum[j - 1] += e;
      if (in_batch) {
        st.p_sq_batches(b, j - 1) += pj * pj;
        st.energy_batches(b, j - 1) += e;
      }
      if (j >= 2) cur += -0.5 * rl * (pj + p[j - 2]);
    }
    const double r0 = qa(1), rn = -qa(n);
    h += 0.25 * (r0 * r0 + rn * rn);  // wall energies E_0 and E_{N+1}
    cur /= (n - 1);
    current_sum += cur;
    st.h_samples.push_back(h);
    if (in_batch) {
      st.current_batches[b] += cur;
      if (cfg.track_covariance) {
        x << state.q, state.p;
        auto row = st.moment_batches.row(b);
        for (int a = 0; a < dim; ++a)
          for (int c = a; c < dim; ++c) row[packed_index(a, c, dim)] += x[a] * x[c];
      }
    }
    if (observer) observer(state);
  }
  const double inv_b = 1.0 / static_cast<double>(batch_len);
  st.p_sq_batches *= inv_b;
  st.energy_batches *= inv_b;
  for (double& c : st.current_batches) c *= inv_b;
  if (cfg.track_covariance) st.moment_batches *= inv_b;
  st.mean_p_sq_profile = p_sq_sum / static_cast<double>(n_samples);
  st.mean_energy_profile = e_sum / static_cast<double>(n_samples);
  st.mean_current = current_sum / static_cast<double>(n_samples);
  st.flip_count = integ.flip_count();
  st.final_state = state;
  return st;
}

std::vector<TrajectoryStats> run_replicas(const ChainParams& params, const SimConfig& cfg,
                                          std::span<const double> bath_temperatures) {
  const SimConfig resolved = resolve(cfg, params);
  std::vector<TrajectoryStats> out(static_cast<std::size_t>(resolved.replicas));
  const int workers = std::max(
      1, std::min<int>(resolved.replicas, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (int r = next++; r < resolved.replicas; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] = run(params, resolved, bath_temperatures, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

std::vector<EstimateWithError> column_estimates(const std::vector<TrajectoryStats>& reps,
                                                Eigen::MatrixXd TrajectoryStats::*member) {
  if (reps.empty()) throw ConfigError("no replicas");
  const int cols = static_cast<int>((reps.front().*member).cols());
  std::vector<EstimateWithError> out;
  for (int c = 0; c < cols; ++c) {
    std::vector<double> means;
    for (const auto& r : reps)
      for (int b = 0; b < (r.*member).rows(); ++b) means.push_back((r.*member)(b, c));
    out.push_back(from_batch_means(means, reps.front().batch_len));
  }
  return out;
}

}  // namespace

std::vector<EstimateWithError> p_sq_estimates(const std::vector<TrajectoryStats>& reps) {
  return column_estimates(reps, &TrajectoryStats::p_sq_batches);
}

std::vector<EstimateWithError> energy_estimates(const std::vector<TrajectoryStats>& reps) {
  return column_estimates(reps, &TrajectoryStats::energy_batches);
}

EstimateWithError current_estimate(const std::vector<TrajectoryStats>& reps) {
  if (reps.empty()) throw ConfigError("no replicas");
  std::vector<double> means;
  for (const auto& r : reps) means.insert(means.end(), r.current_batches.begin(), r.current_batches.end());
  return from_batch_means(means, reps.front().batch_len);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> moment_estimates(
    const std::vector<TrajectoryStats>& reps) {
  if (reps.empty() || reps.front().moment_batches.size() == 0)
    throw ConfigError("second moments were not tracked (set track_covariance)");
  const auto est = column_estimates(reps, &TrajectoryStats::moment_batches);
  const int dim = 2 * static_cast<int>(reps.front().mean_p_sq_profile.size());
  Eigen::VectorXd mean(packed_size(dim)), err(packed_size(dim));
  for (int k = 0; k < packed_size(dim); ++k) {
    mean[k] = est[k].value;
    err[k] = est[k].std_error;
  }
  return {unpack_symmetric(mean, dim), unpack_symmetric(err, dim)};
}

std::vector<ChainState> trace(const ChainParams& params, std::span<const double> bath_temperatures,
                              const ChainState& initial, double dt, int n_steps,
                              std::uint64_t seed) {
  params.validate();
  Integrator integ(params, site_rates(params, bath_temperatures), dt, make_stream(seed, 0, 1));
  std::vector<ChainState> out;
  out.reserve(static_cast<std::size_t>(3 * n_steps + 1));
  ChainState s = initial;
  out.push_back(s);
  for (int k = 0; k < n_steps; ++k) {
    integ.noise_half_step(s);
    out.push_back(s);
    integ.drift(s);
    out.push_back(s);
    integ.noise_half_step(s);
    out.push_back(s);
  }
  return out;
}

Eigen::MatrixXd integrator_stationary_covariance(const ChainParams& params,
                                                 std::span<const double> bath_temperatures,
                                                 double dt) {
  params.validate();
  const SiteRates rates = site_rates(params, bath_temperatures);
  const int n = params.n_sites, dim = 2 * n;
  const double h = 0.5 * dt;
  const Eigen::MatrixXd k = stiffness_matrix(n, params.pinning);
  Eigen::MatrixXd kick = Eigen::MatrixXd::Identity(dim, dim);
  kick.bottomLeftCorner(n, n) = -h * k;
  Eigen::MatrixXd stream = Eigen::MatrixXd::Identity(dim, dim);
  stream.topRightCorner(n, n).diagonal().setConstant(dt);
  const Eigen::MatrixXd verlet = kick * stream * kick;

  Eigen::VectorXd decay = Eigen::VectorXd::Ones(dim);
  Eigen::MatrixXd kick_var = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(dim);  // E[sign] over a half step
  for (int i = 0; i < n; ++i) {
    const double a = std::exp(-rates.friction[i] * h);
    decay[n + i] = a;
    kick_var(n + i, n + i) = rates.temperature[i] * (1.0 - a * a);
    sign[n + i] = std::exp(-rates.flip[i] * h);
  }
  auto noise = [&](const Eigen::MatrixXd& c) {
    Eigen::MatrixXd out = decay.asDiagonal() * c * decay.asDiagonal();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        if (a != b) out(a, b) *= sign[a] * sign[b];
    return Eigen::MatrixXd(out + kick_var);
  };
  auto step = [&](const Eigen::MatrixXd& c) {
    return noise(verlet * noise(c) * verlet.transpose());
  };
  const int m = packed_size(dim);
  const Eigen::VectorXd offset = pack_symmetric(step(Eigen::MatrixXd::Zero(dim, dim)));
  Eigen::MatrixXd lin(m, m);
  for (int col = 0; col < m; ++col) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[col] = 1.0;
    lin.col(col) = pack_symmetric(step(unpack_symmetric(e, dim))) - offset;
  }
  const Eigen::VectorXd c =
      (Eigen::MatrixXd::Identity(m, m) - lin).partialPivLu().solve(offset);
  return unpack_symmetric(c, dim);
}

}  // namespace hchain
