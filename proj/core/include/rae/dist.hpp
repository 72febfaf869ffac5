#pragma once

#include <utility>
#include <vector>

#include "rae/common.hpp"
#include "rae/env.hpp"

namespace rae {

enum class DistKind {
  Uniform,       // continuous on [a,b]
  EqualRevenue,  // cdf 1 - v^-(1+eps) on [1,H), atom at H
  ExampleCor,    // cdf (e(1-v))^-1 on [0, 1-1/e], atom 1/e at 0
  Degenerate,    // point mass
  Discrete,      // finite atom list
};

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

// Immutable value distribution.  Samplers take the caller's RNG state, so
// concurrent use is race-free by construction.
class ValueDistribution {
 public:
  static ValueDistribution uniform(double a, double b);
  // Truncated equal-revenue distribution on [1, H].  `eps` tilts the tail to
  // v^-(1+eps): with eps = 0 the virtual value is identically zero on the
  // continuous part and any price in [1, H] is a monopoly price; a positive
  // eps makes the monopoly reserve strictly 1.  The perturbation is exposed
  // rather than applied silently.
  static ValueDistribution equal_revenue(double H, double eps = 0.0);
  static ValueDistribution example_cor();
  // Same law as example_cor; used as the mixing distribution of the
  // partial-allocation construction.
  static ValueDistribution partial_alloc_g() { return example_cor(); }
  static ValueDistribution degenerate(double v);
  static ValueDistribution discrete(std::vector<Atom> atoms);

  DistKind kind() const { return kind_; }
  double cdf(double v) const;
  // Density on the atomless part; 0 outside the support, input_error at an
  // atom.
  double density(double v) const;
  double quantile(double q) const;
  double sample(Rng& rng) const;
  double mean() const;
  double support_lo() const;
  double support_hi() const;
  std::vector<Atom> atoms() const;
  bool has_atom_at(double v) const;
  const std::vector<Atom>& discrete_atoms() const;

  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_eps() const { return eps_; }

 private:
  ValueDistribution() = default;
  DistKind kind_ = DistKind::Degenerate;
  double a_ = 0.0, b_ = 0.0, eps_ = 0.0;
  std::vector<Atom> atoms_;
};

// phi(v) = v - (1 - F(v)) / f(v).  Exact closed forms per kind.  Throws
// input_error at an atom or where the density vanishes.
double virtual_value(const ValueDistribution& F, double v);

// r* = inf{v : phi(v) >= 0}, bisected to 1e-9.  Verifies regularity (phi
// nondecreasing on a grid, 1e-9 slack) and throws input_error with a witness
// pair when it fails.  Degenerate distributions bypass phi: their posted
// price is the point mass.
double monopoly_reserve(const ValueDistribution& F);

struct MyersonOptions {
  int nodes_per_agent = 20000;   // continuous-part discretization
  std::size_t budget = 4000000;  // cap on product-quadrature size
};

// Expected revenue of the Myerson-optimal mechanism for independent values:
// E over v of the max-weight feasible allocation under weights
// max(phi_i(v_i), 0).  Degenerate agents contribute their value as a posted
// price; a top-of-support atom acts as a posted price at that value.
double myerson_optimal_revenue(const Environment& env,
                               const std::vector<ValueDistribution>& Fs,
                               const MyersonOptions& opts = {});

// Quantile-midpoint discretization of the continuous part; original atoms
// are preserved exactly.
ValueDistribution discretize(const ValueDistribution& F, int grid_size);

// One joint draw: a value profile and the actions played against it.
struct Scenario {
  double weight = 0.0;
  ValueProfile values;
  BidProfile actions;
};

// Discrete joint distribution over (values, actions).  The independence
// flags are recomputed from the table, never trusted from input.
class JointScenario {
 public:
  // Empty placeholder; assign a constructed scenario before use.
  JointScenario() = default;
  explicit JointScenario(std::vector<Scenario> table);

  const std::vector<Scenario>& table() const { return table_; }
  int agents() const { return n_; }

  bool independent_values(double tol = 1e-9) const;
  // For each agent i: the action a_i is conditionally independent of v_{-i}
  // given v_i, verified on the discrete support.
  bool no_bidder_communication(double tol = 1e-9) const;

  // Support of agent i's value marginal (ascending, merged within 1e-12).
  std::vector<double> value_support(int i) const;
  double value_mass(int i, double v) const;
  // Scenarios conditioned on v_i = v, weights renormalized.
  std::vector<Scenario> conditional(int i, double v) const;

 private:
  std::vector<Scenario> table_;
  int n_ = 0;
};

// Product scenario from independent per-agent (value, action) tables.
JointScenario product_scenario(
    const std::vector<std::vector<std::pair<double, std::pair<double, double>>>>&
        per_agent);  // [agent] -> list of (weight, (value, action))

}  // namespace rae
