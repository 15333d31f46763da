#include "hchain/flucthydro.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "hchain/dynamics.hpp"
#include "hchain/errors.hpp"

namespace hchain {

GridField inv_dirichlet_laplacian(const GridField& g) {
  const int m = g.mesh();
  if (m < 2) throw ConfigError("inv_dirichlet_laplacian: mesh must be at least 2");
  const double h2 = g.spacing() * g.spacing();
  const int n = m - 1;
  GridField w = GridField::zeros(m);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n, -1.0);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0);
  Eigen::VectorXd sup = Eigen::VectorXd::Constant(n, -1.0);
  Eigen::VectorXd rhs = h2 * g.values.segment(1, n);
  w.values.segment(1, n) = solve_tridiagonal(sub, diag, sup, rhs);
  return w;
}

double integrate(const GridField& f) {
  const int m = f.mesh();
  if (m % 2 != 0) return trapezoid(f);
  double s = f.values[0] + f.values[m];
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f.values[i];
  return s * f.spacing() / 3.0;
}

namespace {

GridField linear_profile(int mesh, double tl, double tr) {
  return GridField::sample(mesh, [&](double x) { return tl + (tr - tl) * x; });
}

void check_same_mesh(const GridField& a, const GridField& b) {
  if (a.mesh() != b.mesh()) throw ConfigError("test functions live on different meshes");
  if (!a.values.allFinite() || !b.values.allFinite())
    throw ConfigError("test function has non-finite values");
}

}  // namespace

FieldCovariance ness_field_covariance(const TestFunction& f, const TestFunction& g,
                                      double temp_left, double temp_right) {
  check_same_mesh(f, g);
  if (!(temp_left > 0.0) || !(temp_right > 0.0))
    throw ConfigError("temperatures must be positive");
  const int m = f.mesh();
  const GridField t = linear_profile(m, temp_left, temp_right);
  GridField a{t.values.cwiseProduct(f.values.cwiseAbs2())};
  GridField b{t.values.cwiseAbs2().cwiseProduct(g.values.cwiseAbs2())};
  const GridField w = inv_dirichlet_laplacian(g);
  GridField c{g.values.cwiseProduct(w.values)};
  const double dt = temp_left - temp_right;
  return {integrate(a), integrate(b) + dt * dt * integrate(c), 0.0};
}

double s_infinity(double temp_left, double temp_right) {
  if (!(temp_left > 0.0) || !(temp_right > 0.0))
    throw ConfigError("temperatures must be positive");
  const double d = temp_left - temp_right;
  const double s = temp_left + temp_right;
  return (4.0 * temp_left * temp_right + 5.0 / 3.0 * d * d) / (s * s);
}

double s_infinity_from_fields(double temp_left, double temp_right, int mesh) {
  const GridField one = GridField::sample(mesh, [](double) { return 1.0; });
  const FieldCovariance cov = ness_field_covariance(one, one, temp_left, temp_right);
  const double s = temp_left + temp_right;
  return 4.0 * cov.y_variance / (s * s);
}

SpdeIntegrator::SpdeIntegrator(const HydroState& background, const SpdeConfig& cfg,
                               std::mt19937_64 rng)
    : m_(background.u.mesh()),
      h_(1.0 / m_),
      gamma_(cfg.gamma),
      r_boundary_(cfg.r_boundary),
      scheme_(cfg.scheme),
      r_(Eigen::VectorXd::Zero(m_)),
      y_(Eigen::VectorXd::Zero(m_)),
      rng_(std::move(rng)) {
  background.validate();
  if (!(gamma_ > 0.0)) throw ConfigError("gamma must be positive");
  if (m_ < 4) throw ConfigError("mesh must be at least 4");
  if (cfg.noise_scale < 0.0) throw ConfigError("noise_scale must be nonnegative");
  const double limit = 0.5 * h_ * h_ * gamma_;
  if (scheme_ == SpdeScheme::EulerMaruyama) {
    dt_ = cfg.dt > 0.0 ? cfg.dt : 0.8 * limit;
    if (dt_ > limit)
      throw ConfigError("dt=" + std::to_string(dt_) + " exceeds the explicit stability bound " +
                        std::to_string(limit) + " (h^2 gamma / 2)");
  } else {
    dt_ = cfg.dt > 0.0 ? cfg.dt : 4.0 * limit;
  }
  // (I - a L) for the implicit half of the trapezoidal rule.
  auto implicit = [&](double a, bool neumann, Eigen::VectorXd& lo, Eigen::VectorXd& di,
                      Eigen::VectorXd& up) {
    const double s = a / (h_ * h_);
    lo = Eigen::VectorXd::Constant(m_, -s);
    up = Eigen::VectorXd::Constant(m_, -s);
    di = Eigen::VectorXd::Constant(m_, 1.0 + 2.0 * s);
    lo[0] = up[m_ - 1] = 0.0;
    const double wall = neumann ? -s : s;  // odd ghost adds, even ghost removes
    di[0] += wall;
    di[m_ - 1] += wall;
  };
  implicit(0.5 * dt_ / gamma_, r_boundary_ == FieldBoundary::Neumann, lower_r_, diag_r_, upper_r_);
  implicit(0.25 * dt_ / gamma_, false, lower_y_, diag_y_, upper_y_);

  u_ = cell_average(background.u);
  const Eigen::VectorXd temp = background.eps.values - 0.5 * background.u.values.cwiseAbs2();
  if ((temp.array() <= 0.0).any()) throw ConfigError("background temperature must be positive");
  // Faces sit on the nodes.
  c_face_.resize(m_ + 1);
  cu_face_.resize(m_ + 1);
  cy_face_.resize(m_ + 1);
  for (int f = 0; f <= m_; ++f) {
    const double wall = (f == 0 || f == m_) ? std::sqrt(2.0) : 1.0;
    const double c = wall * cfg.noise_scale * std::sqrt(2.0 * temp[f] / gamma_);
    c_face_[f] = c;
    cu_face_[f] = c * background.u.values[f];
    cy_face_[f] = c * std::sqrt(0.5 * temp[f]);
  }
  flux_r_.resize(m_ + 1);
  flux_y_.resize(m_ + 1);
}

void SpdeIntegrator::step() {
  const bool neumann = r_boundary_ == FieldBoundary::Neumann;
  // Integrated noise flux through each face over one step.
  const double amp = std::sqrt(dt_ / h_);
  for (int f = 0; f <= m_; ++f) {
    const double xi1 = normal_(rng_);
    const double xi2 = normal_(rng_);
    flux_r_[f] = amp * c_face_[f] * xi1;
    flux_y_[f] = amp * (cu_face_[f] * xi1 + cy_face_[f] * xi2);
  }
  if (neumann) flux_r_[0] = flux_r_[m_] = 0.0;

  const int last = m_ - 1;
  const double inv_h2 = 1.0 / (h_ * h_);
  // h^-2 times the second difference with odd (Dirichlet) or even ghosts.
  auto laplacian = [&](const Eigen::VectorXd& v, bool even) {
    Eigen::VectorXd out(m_);
    const double g = even ? 1.0 : -1.0;
    for (int k = 0; k < m_; ++k) {
      const double left = k == 0 ? g * v[0] : v[k - 1];
      const double right = k == last ? g * v[last] : v[k + 1];
      out[k] = (right - 2.0 * v[k] + left) * inv_h2;
    }
    return out;
  };
  auto divergence = [&](const Eigen::VectorXd& flux) {
    return (flux.tail(m_) - flux.head(m_)) / h_;
  };
  const double dr = dt_ / gamma_;
  const double dy = dt_ / (2.0 * gamma_);

  Eigen::VectorXd nr, ny;
  const Eigen::VectorXd ur = u_.cwiseProduct(r_);
  if (scheme_ == SpdeScheme::EulerMaruyama) {
    nr = r_ + dr * laplacian(r_, neumann) - divergence(flux_r_);
    ny = y_ + dy * laplacian(ur + y_, false) - divergence(flux_y_);
  } else {
    Eigen::VectorXd rhs = r_ + 0.5 * dr * laplacian(r_, neumann) - divergence(flux_r_);
    nr = solve_tridiagonal(lower_r_, diag_r_, upper_r_, std::move(rhs));
    const Eigen::VectorXd coupling = ur + u_.cwiseProduct(nr);
    rhs = y_ + 0.5 * dy * (laplacian(y_, false) + laplacian(coupling, false)) - divergence(flux_y_);
    ny = solve_tridiagonal(lower_y_, diag_y_, upper_y_, std::move(rhs));
  }
  r_ = std::move(nr);
  y_ = std::move(ny);
  time_ += dt_;
}

namespace {

GridField to_nodes(const Eigen::VectorXd& cells, bool dirichlet) {
  const int m = static_cast<int>(cells.size());
  GridField g = GridField::zeros(m);
  for (int i = 1; i < m; ++i) g.values[i] = 0.5 * (cells[i - 1] + cells[i]);
  g.values[0] = dirichlet ? 0.0 : cells[0];
  g.values[m] = dirichlet ? 0.0 : cells[m - 1];
  return g;
}

}  // namespace

GridField SpdeIntegrator::r() const {
  return to_nodes(r_, r_boundary_ == FieldBoundary::Dirichlet);
}

GridField SpdeIntegrator::y() const { return to_nodes(y_, true); }

double SpdeIntegrator::pair_r(const TestFunction& f) const {
  if (f.mesh() != m_) throw ConfigError("test function mesh differs from SPDE mesh");
  return h_ * cell_average(f).dot(r_);
}

double SpdeIntegrator::pair_y(const TestFunction& g) const {
  if (g.mesh() != m_) throw ConfigError("test function mesh differs from SPDE mesh");
  return h_ * cell_average(g).dot(y_);
}

Eigen::VectorXd cell_average(const GridField& f) {
  const int m = f.mesh();
  return 0.5 * (f.values.head(m) + f.values.tail(m));
}

double pair(const GridField& test, const GridField& field) {
  check_same_mesh(test, field);
  return trapezoid(GridField{test.values.cwiseProduct(field.values)});
}

namespace {

struct ReplicaSeries {
  std::vector<std::vector<double>> r2, y2, ry;
};

ReplicaSeries run_spde_replica(const HydroState& bg, const SpdeConfig& cfg, int replica,
                               std::span<const TestFunction> fs,
                               std::span<const TestFunction> gs) {
  SpdeIntegrator integ(bg, cfg, make_stream(cfg.seed, static_cast<std::uint64_t>(replica), 7));
  const double dt = integ.dt();
  const long burn = static_cast<long>(std::ceil(cfg.t_burn / dt));
  const long steps = static_cast<long>(std::ceil(cfg.t_final / dt));
  const std::size_t nf = fs.size(), ng = gs.size(), nc = std::min(nf, ng);
  ReplicaSeries out;
  out.r2.resize(nf);
  out.y2.resize(ng);
  out.ry.resize(nc);
  double bound = 0.0;
  for (int i = 0; i <= bg.u.mesh(); ++i)
    bound = std::max(bound, std::abs(bg.eps.values[i]));
  bound = 1e6 * (1.0 + bound) / std::sqrt(integ.dt());

  auto check = [&](long k) {
    const double norm = integ.r_cells().cwiseAbs().maxCoeff() + integ.y_cells().cwiseAbs().maxCoeff();
    if (!std::isfinite(norm) || norm > bound)
      throw NumericalError("SPDE blow-up at step " + std::to_string(k) + " (t=" +
                           std::to_string(integ.time()) + "); try dt <= " +
                           std::to_string(0.25 * integ.dt()));
  };
  for (long k = 0; k < burn; ++k) {
    integ.step();
    if (k % 1000 == 0) check(k);
  }
  std::vector<double> rv(nf), yv(ng);
  for (long k = 0; k < steps; ++k) {
    integ.step();
    if ((k + 1) % cfg.sample_every != 0) continue;
    for (std::size_t a = 0; a < nf; ++a) {
      rv[a] = integ.pair_r(fs[a]);
      out.r2[a].push_back(rv[a] * rv[a]);
    }
    for (std::size_t b = 0; b < ng; ++b) {
      yv[b] = integ.pair_y(gs[b]);
      out.y2[b].push_back(yv[b] * yv[b]);
    }
    for (std::size_t c = 0; c < nc; ++c) out.ry[c].push_back(rv[c] * yv[c]);
    if ((k + 1) % (100L * cfg.sample_every) == 0) check(k);
  }
  check(steps);
  return out;
}

EstimateWithError pool(const std::vector<ReplicaSeries>& reps,
                       std::vector<std::vector<double>> ReplicaSeries::*member, std::size_t idx,
                       int n_batches) {
  std::vector<double> means;
  std::vector<std::string> warnings;
  int len = 0;
  for (const auto& rep : reps) {
    const EstimateWithError e = batch_means((rep.*member)[idx], n_batches);
    len = e.batch_len;
    for (const auto& w : e.warnings) warnings.push_back(w);
    const auto& s = (rep.*member)[idx];
    const std::size_t bl = static_cast<std::size_t>(e.batch_len);
    for (int b = 0; b < n_batches; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < bl; ++i) sum += s[b * bl + i];
      means.push_back(sum / static_cast<double>(bl));
    }
  }
  EstimateWithError out = from_batch_means(means, len);
  for (auto& w : warnings) out.warnings.push_back(std::move(w));
  return out;
}

}  // namespace

SpdeEstimates spde_simulate(double temp_left, double temp_right, const SpdeConfig& cfg,
                            std::span<const TestFunction> fs, std::span<const TestFunction> gs) {
  if (cfg.replicas < 1) throw ConfigError("replicas must be at least 1");
  if (cfg.sample_every < 1) throw ConfigError("sample_every must be at least 1");
  if (!(cfg.t_final > 0.0) || cfg.t_burn < 0.0) throw ConfigError("invalid SPDE run length");
  for (const auto& f : fs)
    if (f.mesh() != cfg.mesh) throw ConfigError("test function mesh differs from SPDE mesh");
  for (const auto& g : gs)
    if (g.mesh() != cfg.mesh) throw ConfigError("test function mesh differs from SPDE mesh");
  const HydroState bg = HydroState::stationary(cfg.mesh, cfg.gamma, temp_left, temp_right);

  std::vector<ReplicaSeries> reps(static_cast<std::size_t>(cfg.replicas));
  const int workers = std::max(
      1, std::min<int>(cfg.replicas, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (int r = next++; r < cfg.replicas; r = next++) {
      try {
        reps[static_cast<std::size_t>(r)] = run_spde_replica(bg, cfg, r, fs, gs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  SpdeEstimates out;
  out.dt = SpdeIntegrator(bg, cfg, std::mt19937_64{}).dt();
  for (std::size_t a = 0; a < fs.size(); ++a)
    out.r_variance.push_back(pool(reps, &ReplicaSeries::r2, a, cfg.n_batches));
  for (std::size_t b = 0; b < gs.size(); ++b)
    out.y_variance.push_back(pool(reps, &ReplicaSeries::y2, b, cfg.n_batches));
  for (std::size_t c = 0; c < std::min(fs.size(), gs.size()); ++c)
    out.cross.push_back(pool(reps, &ReplicaSeries::ry, c, cfg.n_batches));
  return out;
}

FieldSample microscopic_fluctuation_fields(const ChainState& state, const ChainParams& params,
                                           const HydroState& background, const TestFunction& f,
                                           const TestFunction& g) {
  const int n = state.n_sites();
  if (n != params.n_sites) throw ConfigError("state size does not match n_sites");
  const int mesh = background.u.mesh();
  if (mesh % n != 0)
    throw ConfigError("background mesh " + std::to_string(mesh) +
                      " is not a multiple of N=" + std::to_string(n));
  if (f.mesh() != mesh || g.mesh() != mesh)
    throw ConfigError("test functions must live on the background mesh");
  const int stride = mesh / n;
  const LocalObservables obs = local_observables(state, params);
  double r = 0.0, y = 0.0;
  for (int j = 1; j <= n; ++j) {
    const int node = j * stride;
    r += f.values[node] * (obs.deformation[j] - background.u.values[node]);
    y += g.values[node] * (obs.local_energy[j] - background.eps.values[node]);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  return {scale * r, scale * y};
}

std::vector<FieldSample> microscopic_fluctuation_fields(std::span<const ChainState> states,
                                                        const ChainParams& params,
                                                        std::span<const HydroState> backgrounds,
                                                        const TestFunction& f,
                                                        const TestFunction& g) {
  if (backgrounds.size() != 1 && backgrounds.size() != states.size())
    throw ConfigError("need one background or one per state");
  std::vector<FieldSample> out;
  out.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k)
    out.push_back(microscopic_fluctuation_fields(states[k], params,
                                                 backgrounds[backgrounds.size() == 1 ? 0 : k], f, g));
  return out;
}

}  // namespace hchain
