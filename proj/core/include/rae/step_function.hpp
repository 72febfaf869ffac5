#pragma once

#include <utility>
#include <vector>

#include "rae/common.hpp"

namespace rae {

// Nondecreasing, piecewise-constant, right-continuous function on [0, inf)
// into [0,1].  The value is 0 before the first breakpoint and the last level
// afterwards.  Integrals and generalized inverses are exact.
class StepFunction {
 public:
  StepFunction() = default;
  // pairs (input, level); inputs strictly increasing >= 0, levels
  // nondecreasing in [0,1].  Redundant breakpoints (no level change) are
  // dropped.
  static StepFunction from_breakpoints(std::vector<std::pair<double, double>> pts);
  // Exact pointwise average of step functions with the given weights.
  static StepFunction average(const std::vector<std::pair<double, StepFunction>>& parts);

  double value(double b) const;
  // Generalized inverse: inf{b : value(b) >= x}.  Returns 0 for x <= 0 and
  // +inf when x exceeds the sup level.
  double inverse(double x) const;
  double sup_level() const { return pts_.empty() ? 0.0 : pts_.back().second; }
  // Exact integral of the function over [a, b].
  double integral(double a, double b) const;
  // Exact integral of the inverse over levels [za, zb] (the area between the
  // level axis and the staircase).  +inf when zb exceeds the sup level.
  double inverse_integral(double za, double zb) const;

  const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }
  bool empty() const { return pts_.empty(); }

 private:
  std::vector<std::pair<double, double>> pts_;
};

// inf{b : sf(b) >= x}; +inf sentinel when x is unattainable.
double inverse_threshold(const StepFunction& sf, double x);

// Two readings of how a reserve discounts threshold surplus.  They differ
// only when the inverse has a flat stretch exactly at the reserve:
//  - IntegralLimit integrates the inverse from the level reachable at the
//    reserve bid up to z.
//  - ZeroBelowReserve zeroes the inverse wherever it is strictly below the
//    reserve and integrates from 0.
// Single-bid analyses use IntegralLimit; generalized-cost analyses use
// ZeroBelowReserve.
enum class ReserveConvention { IntegralLimit, ZeroBelowReserve };

// Threshold surplus T(z | r): the discounted integral of the generalized
// inverse up to level z.  Exact for step functions; +inf when z exceeds the
// sup level.
double threshold_surplus(const StepFunction& sf, double z, double reserve = 0.0,
                         ReserveConvention conv = ReserveConvention::IntegralLimit);

// One attainable (cost, allocation) pair; cost may be +inf (e.g. price per
// unit of a losing bid).
struct CostPoint {
  double cost = 0.0;
  double allocation = 0.0;
};

// The set of attainable cost/allocation pairs together with its Pareto
// frontier x-hat(c) = max allocation at cost <= c.
struct CostFrontier {
  std::vector<CostPoint> points;
  StepFunction pareto;

  // Generalized threshold surplus of the frontier, ZeroBelowReserve
  // convention.
  double surplus(double z, double reserve = 0.0) const {
    return threshold_surplus(pareto, z, reserve, ReserveConvention::ZeroBelowReserve);
  }
};

// Upper-left staircase of the points: dominated points never affect it.
// Points with +inf cost are unattainable and dropped.
StepFunction pareto_frontier(const std::vector<CostPoint>& points);

inline CostFrontier make_frontier(std::vector<CostPoint> points) {
  CostFrontier f;
  f.pareto = pareto_frontier(points);
  f.points = std::move(points);
  return f;
}

}  // namespace rae
