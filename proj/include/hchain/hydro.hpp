#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hchain {

/// Values on the M+1 uniform nodes x_i = i/M of [0, 1].
struct GridField {
  Eigen::VectorXd values;

  int mesh() const { return static_cast<int>(values.size()) - 1; }
  double spacing() const { return 1.0 / mesh(); }
  double x(int i) const { return static_cast<double>(i) / mesh(); }

  static GridField zeros(int mesh);
  template <typename F>
  static GridField sample(int mesh, F&& f) {
    GridField g{Eigen::VectorXd(mesh + 1)};
    for (int i = 0; i <= mesh; ++i) g.values[i] = f(static_cast<double>(i) / mesh);
    return g;
  }
};

/// Deformation u and energy eps of the unpinned velocity-flip chain on the
/// diffusive scale:
///   u_t = gamma^{-1} u_xx,              u_x(0) = u_x(1) = 0,
///   eps_t = (2 gamma)^{-1} (eps + u^2/2)_xx,
///   (eps - u^2/2)(0) = T_L,  (eps - u^2/2)(1) = T_R.
struct HydroState {
  GridField u;
  GridField eps;
  double time = 0.0;
  double gamma = 1.0;
  double temp_left = 1.0;
  double temp_right = 1.0;

  void validate() const;
  /// Zero deformation and the linear profile between the bath temperatures.
  static HydroState stationary(int mesh, double gamma, double temp_left, double temp_right);
};

/// Crank-Nicolson step with centred second differences. u is advanced first
/// (ghost-node Neumann condition), then eps with the flux variable
/// eps + u^2/2 and the boundary values eps = T + u^2/2 taken from the new u;
/// the boundary coupling is then linear, so no iteration is needed.
/// Unconditionally stable.
HydroState hydro_step(const HydroState& state, double dt);

/// Steps to t_final, recording every `sample_every` steps (and the final state).
std::vector<HydroState> hydro_evolve(const HydroState& initial, double t_final, double dt,
                                     int sample_every = 1);

/// Trapezoidal integral of a grid field.
double trapezoid(const GridField& f);

/// Thomas algorithm for a tridiagonal system (sub, diag, super).
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& super, Eigen::VectorXd rhs);

}  // namespace hchain
