#pragma once

#include <complex>
#include <limits>

#include <Eigen/Core>

namespace specq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Numerical knobs shared by the analyses. Defaults target dense
/// double-precision problems up to a few hundred dimensions.
struct Tolerances {
  double spec = 1e-8;      // absolute merge/membership tolerance for spectral points
  double lin = 1e-10;      // relative tolerance for linear-solve cross-checks
  double gelfand = 1e-6;   // relative step tolerance for trace convergence
  double radius = 1e-4;    // radius estimates, bisection interval width
  double neumann = 1e-8;   // series tails and residual identities
  double divergence_ceiling = 1e12;
  double zero_relax = 0.0;  // threshold for structural-zero tests; opt-in only
  double lb_floor = 1e-6;   // bisection floor for nilpotent-like operators
  int terms = 200;          // default power-sequence horizon
  int max_terms = 1000;     // hard cap for series accumulation
};

}  // namespace specq
