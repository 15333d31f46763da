#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hchain/chain.hpp"

namespace hchain {

enum class Coord { Q, P };

/// A phase-space coordinate; `particle` is 0-based (0 is physical site 1).
struct Var {
  Coord kind;
  int particle;
};

struct Monomial {
  double coefficient = 1.0;
  std::vector<Var> vars;
};

/// f(x) = constant + linear . x + x^T quadratic x over x = (q_1..q_N, p_1..p_N),
/// `quadratic` kept symmetric.
class QuadraticObservable {
 public:
  explicit QuadraticObservable(int n_sites);

  /// Rejects monomials of degree > 2.
  static QuadraticObservable from_monomials(int n_sites, std::span<const Monomial> terms);

  double operator()(const ChainState& state) const;
  int n_sites() const { return n_sites_; }

  double constant = 0.0;
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;

 private:
  int n_sites_;
};

enum GeneratorPart : unsigned {
  kHamiltonian = 1u,
  kBath = 2u,
  kFlip = 4u,
  kAllParts = 7u,
};

/// L f as a quadratic observable, restricted to the selected parts:
/// harmonic drift, Ornstein-Uhlenbeck baths (friction and diffusion), and
/// velocity flips (gamma_j/2) [f(p_j -> -p_j) - f].
QuadraticObservable apply_generator(const QuadraticObservable& f, const ChainParams& params,
                                    const SiteRates& rates, unsigned parts = kAllParts);

double generator_apply(const QuadraticObservable& f, const ChainState& state,
                       const ChainParams& params,
                       std::span<const double> bath_temperatures = {});

/// |j^e_j - (-(phi_{j+1} - phi_j) + L h_j)| at a bulk site j of the unpinned
/// velocity-flip chain, with phi_j = (p_{j-1}^2 + r_{j-1} r_{j-2})/(2 gamma)
/// and h_j = -j^e_j / gamma. `site` is the physical label and must satisfy
/// 3 <= site <= N-1 so that neither p_j nor p_{j-1} touches a bath.
double check_current_decomposition(const ChainState& state, const ChainParams& params, int site);

}  // namespace hchain
