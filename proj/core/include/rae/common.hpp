#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rae {

// Euler's number; several efficiency constants are expressed through it.
inline constexpr double kE = 2.718281828459045235360287471352662498;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default comparison slack used by feasibility checks and report margins.
inline constexpr double kTol = 1e-9;

using BidProfile = std::vector<double>;
using ValueProfile = std::vector<double>;
using Rng = std::mt19937_64;

// Invalid arguments, malformed configs, violated preconditions.  CLI exit 2.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Instance exceeds an enumeration or sampling budget.  CLI exit 3.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature or root finding failed to converge.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

inline bool almost_equal(double a, double b, double tol = kTol) {
  return std::fabs(a - b) <= tol;
}

inline bool is_finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace rae
