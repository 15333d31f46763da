#include "hchain/quadratic.hpp"

#include <cmath>
#include <string>

#include "hchain/errors.hpp"

namespace hchain {

QuadraticObservable::QuadraticObservable(int n_sites)
    : linear(Eigen::VectorXd::Zero(2 * n_sites)),
      quadratic(Eigen::MatrixXd::Zero(2 * n_sites, 2 * n_sites)),
      n_sites_(n_sites) {}

QuadraticObservable QuadraticObservable::from_monomials(int n_sites,
                                                        std::span<const Monomial> terms) {
  QuadraticObservable f(n_sites);
  auto index = [n_sites](const Var& v) {
    if (v.particle < 0 || v.particle >= n_sites)
      throw ConfigError("monomial refers to particle " + std::to_string(v.particle) +
                        " outside 0.." + std::to_string(n_sites - 1));
    return v.kind == Coord::Q ? v.particle : n_sites + v.particle;
  };
  for (const Monomial& m : terms) {
    switch (m.vars.size()) {
      case 0:
        f.constant += m.coefficient;
        break;
      case 1:
        f.linear[index(m.vars[0])] += m.coefficient;
        break;
      case 2: {
        const int a = index(m.vars[0]), b = index(m.vars[1]);
        f.quadratic(a, b) += 0.5 * m.coefficient;
        f.quadratic(b, a) += 0.5 * m.coefficient;
        break;
      }
      default:
        throw ConfigError("observable has degree " + std::to_string(m.vars.size()) +
                          "; only polynomials of degree <= 2 are supported");
    }
  }
  return f;
}

double QuadraticObservable::operator()(const ChainState& state) const {
  Eigen::VectorXd x(2 * n_sites_);
  x << state.q, state.p;
  return constant + linear.dot(x) + x.dot(quadratic * x);
}

QuadraticObservable apply_generator(const QuadraticObservable& f, const ChainParams& params,
                                    const SiteRates& rates, unsigned parts) {
  const int n = f.n_sites();
  if (n != params.n_sites) throw ConfigError("observable size does not match the chain");
  QuadraticObservable out(n);

  if (parts & (kHamiltonian | kBath)) {
    // Drift matrix restricted to the selected parts.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    if (parts & kHamiltonian) {
      a.topRightCorner(n, n).setIdentity();
      a.bottomLeftCorner(n, n) = -stiffness_matrix(n, params.pinning);
    }
    if (parts & kBath) a.bottomRightCorner(n, n).diagonal() = -rates.friction;
    out.linear += a.transpose() * f.linear;
    out.quadratic += f.quadratic * a + a.transpose() * f.quadratic;
  }
  if (parts & kBath) {
    for (int i = 0; i < n; ++i)
      out.constant += 2.0 * rates.friction[i] * rates.temperature[i] * f.quadratic(n + i, n + i);
  }
  if (parts & kFlip) {
    // Flip at particle k changes the sign of every term odd in p_k.
    for (int k = 0; k < n; ++k) {
      const double g = rates.flip[k];
      if (g == 0.0) continue;
      const int pk = n + k;
      out.linear[pk] += -g * f.linear[pk];
      for (int b = 0; b < 2 * n; ++b) {
        if (b == pk) continue;
        out.quadratic(pk, b) += -g * f.quadratic(pk, b);
        out.quadratic(b, pk) += -g * f.quadratic(b, pk);
      }
    }
  }
  return out;
}

double generator_apply(const QuadraticObservable& f, const ChainState& state,
                       const ChainParams& params, std::span<const double> bath_temperatures) {
  return apply_generator(f, params, site_rates(params, bath_temperatures))(state);
}

double check_current_decomposition(const ChainState& state, const ChainParams& params, int site) {
  params.validate();
  const int n = params.n_sites;
  if (params.model != Model::VelocityFlip)
    throw ConfigError("current decomposition is an identity of the velocity-flip model");
  if (params.pinning != 0.0)
    throw ConfigError("current decomposition requires the unpinned chain (pinning = 0)");
  if (site < 3 || site > n - 1)
    throw ConfigError("site " + std::to_string(site) +
                      " is adjacent to a bath; bulk sites are 3..N-1");
  const double gamma = params.flip_rate;
  // Physical site j -> 0-based particle index j-1; walls are dropped.
  auto add_q = [n](std::vector<Monomial>& t, double c, int j, int k) {
    if (j < 1 || j > n || k < 1 || k > n) return;
    t.push_back({c, {{Coord::Q, j - 1}, {Coord::Q, k - 1}}});
  };
  // r_a r_b with r_a = q_{a+1} - q_a.
  auto add_rr = [&](std::vector<Monomial>& t, double c, int a, int b) {
    add_q(t, c, a + 1, b + 1);
    add_q(t, -c, a + 1, b);
    add_q(t, -c, a, b + 1);
    add_q(t, c, a, b);
  };
  // r_a p_j
  auto add_rp = [&](std::vector<Monomial>& t, double c, int a, int j) {
    if (j < 1 || j > n) return;
    if (a + 1 >= 1 && a + 1 <= n) t.push_back({c, {{Coord::Q, a}, {Coord::P, j - 1}}});
    if (a >= 1 && a <= n) t.push_back({-c, {{Coord::Q, a - 1}, {Coord::P, j - 1}}});
  };
  std::vector<Monomial> h_terms;
  // h_j = -j^e_j / gamma = r_{j-1}(p_j + p_{j-1}) / (2 gamma)
  add_rp(h_terms, 0.5 / gamma, site - 1, site);
  add_rp(h_terms, 0.5 / gamma, site - 1, site - 1);
  auto phi_terms = [&](int j) {
    std::vector<Monomial> t;
    if (j - 1 >= 1 && j - 1 <= n)
      t.push_back({0.5 / gamma, {{Coord::P, j - 2}, {Coord::P, j - 2}}});
    add_rr(t, 0.5 / gamma, j - 1, j - 2);
    return QuadraticObservable::from_monomials(n, t);
  };
  const QuadraticObservable h = QuadraticObservable::from_monomials(n, h_terms);
  const double lh = apply_generator(h, params, site_rates(params))(state);
  const double grad_phi = phi_terms(site + 1)(state) - phi_terms(site)(state);
  const double current = local_observables(state, params).energy_current[site];
  return std::abs(current - (-grad_phi + lh));
}

}  // namespace hchain
