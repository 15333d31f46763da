#include "hchain/hydro.hpp"

#include <cmath>
#include <string>

#include "hchain/errors.hpp"

namespace hchain {

GridField GridField::zeros(int mesh) { return {Eigen::VectorXd::Zero(mesh + 1)}; }

void HydroState::validate() const {
  if (u.mesh() < 2 || u.mesh() != eps.mesh()) throw ConfigError("u and eps need the same mesh >= 2");
  if (!u.values.allFinite() || !eps.values.allFinite()) throw ConfigError("hydro fields must be finite");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (!(temp_left > 0.0) || !(temp_right > 0.0)) throw ConfigError("temperatures must be > 0");
}

HydroState HydroState::stationary(int mesh, double gamma, double temp_left, double temp_right) {
  HydroState s;
  s.u = GridField::zeros(mesh);
  s.eps = GridField::sample(mesh, [&](double x) { return temp_left + (temp_right - temp_left) * x; });
  s.gamma = gamma;
  s.temp_left = temp_left;
  s.temp_right = temp_right;
  return s;
}

Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& super, Eigen::VectorXd rhs) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd c(n);
  double denom = diag[0];
  c[0] = n > 1 ? super[0] / denom : 0.0;
  rhs[0] /= denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * c[i - 1];
    if (denom == 0.0) throw NumericalError("singular tridiagonal system");
    c[i] = i + 1 < n ? super[i] / denom : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

double trapezoid(const GridField& f) {
  const int m = f.mesh();
  double s = 0.5 * (f.values[0] + f.values[m]);
  for (int i = 1; i < m; ++i) s += f.values[i];
  return s * f.spacing();
}

HydroState hydro_step(const HydroState& s, double dt) {
  s.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  const int m = s.u.mesh();
  const double h2 = s.u.spacing() * s.u.spacing();

  // u: (I - a L_N) u' = (I + a L_N) u, ghost nodes u_{-1} = u_1, u_{M+1} = u_{M-1}.
  const double au = 0.5 * dt / s.gamma / h2;
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(m + 1, -au);
  Eigen::VectorXd sup = Eigen::VectorXd::Constant(m + 1, -au);
  Eigen::VectorXd dia = Eigen::VectorXd::Constant(m + 1, 1.0 + 2.0 * au);
  sup[0] = -2.0 * au;
  sub[m] = -2.0 * au;
  const Eigen::VectorXd& u = s.u.values;
  Eigen::VectorXd rhs(m + 1);
  rhs[0] = u[0] + au * (2.0 * u[1] - 2.0 * u[0]);
  rhs[m] = u[m] + au * (2.0 * u[m - 1] - 2.0 * u[m]);
  for (int i = 1; i < m; ++i) rhs[i] = u[i] + au * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
  const Eigen::VectorXd u_new = solve_tridiagonal(sub, dia, sup, rhs);

  // eps on interior nodes, flux variable w = eps + u^2/2.
  const double ae = 0.5 * dt / (2.0 * s.gamma) / h2;
  const Eigen::VectorXd& e = s.eps.values;
  const Eigen::VectorXd w_old = e + 0.5 * u.cwiseProduct(u);
  const Eigen::VectorXd half_u2 = 0.5 * u_new.cwiseProduct(u_new);
  const double e_left = s.temp_left + half_u2[0];
  const double e_right = s.temp_right + half_u2[m];
  const double w_left = e_left + half_u2[0];
  const double w_right = e_right + half_u2[m];
  const int k = m - 1;
  Eigen::VectorXd esub = Eigen::VectorXd::Constant(k, -ae);
  Eigen::VectorXd esup = Eigen::VectorXd::Constant(k, -ae);
  Eigen::VectorXd edia = Eigen::VectorXd::Constant(k, 1.0 + 2.0 * ae);
  Eigen::VectorXd erhs(k);
  for (int i = 1; i < m; ++i) {
    const double lap_old = w_old[i + 1] - 2.0 * w_old[i] + w_old[i - 1];
    // Known part of the new-time Laplacian of w: u^2/2 terms, plus the full
    // boundary values of w next to the ends.
    const double hl = i - 1 == 0 ? w_left : half_u2[i - 1];
    const double hr = i + 1 == m ? w_right : half_u2[i + 1];
    const double known = hr - 2.0 * half_u2[i] + hl;
    erhs[i - 1] = e[i] + ae * lap_old + ae * known;
  }
  const Eigen::VectorXd interior = solve_tridiagonal(esub, edia, esup, erhs);

  HydroState out = s;
  out.u.values = u_new;
  out.eps.values[0] = e_left;
  out.eps.values[m] = e_right;
  out.eps.values.segment(1, k) = interior;
  out.time = s.time + dt;
  if (!out.u.values.allFinite() || !out.eps.values.allFinite())
    throw NumericalError("hydro step produced non-finite values at t = " + std::to_string(out.time));
  return out;
}

std::vector<HydroState> hydro_evolve(const HydroState& initial, double t_final, double dt,
                                     int sample_every) {
  if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
  std::vector<HydroState> out{initial};
  HydroState s = initial;
  const long steps = static_cast<long>(std::ceil((t_final - initial.time) / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    s = hydro_step(s, dt);
    if (k % sample_every == 0 || k == steps) out.push_back(s);
  }
  return out;
}

}  // namespace hchain
