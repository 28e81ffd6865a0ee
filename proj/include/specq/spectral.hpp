#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specq/quotient.hpp"
#include "specq/types.hpp"

namespace specq {

// ============================================================================
// Power-sequence traces
// ============================================================================

/// The sequence a_n = p^(T^n)^(1/n) together with its running infimum. The
/// limit estimate is the final running infimum; it never lies below the
/// quotient spectral radius. When some power hits p^(T^{n0}) = 0 the trace is
/// degenerate, terminates at n0 and the limit is exactly zero.
struct GelfandTrace {
  std::string seminorm;
  std::vector<double> powers;       // p^(T^n); overflows report as inf
  std::vector<double> terms;        // a_n
  std::vector<double> running_inf;
  double limit = kInf;
  bool converged = false;
  bool degenerate = false;
  int computed = 0;                 // number of terms actually produced
};

GelfandTrace gelfand_trace(const Operator& t, const Seminorm& p, int n_terms,
                           const Tolerances& tols = {});

/// One shared power walk for all members of the calibration.
std::vector<GelfandTrace> gelfand_traces(const Operator& t, const Calibration& p,
                                         int n_terms, const Tolerances& tols = {});

// ============================================================================
// Spectral radius relative to a calibration
// ============================================================================

struct RadiusReport {
  double estimate = kInf;           // sup over seminorms of the trace limits
  double oracle = kInf;             // max modulus over the spectral set
  double gap = kInf;                // |estimate - oracle|
  bool bounded_element = false;     // estimate finite
  std::vector<GelfandTrace> traces;
  std::vector<std::string> flagged; // labels of non-converged traces
};

RadiusReport p_spectral_radius(const Operator& t, const Calibration& p, int n_terms,
                               const Tolerances& tols = {});

// ============================================================================
// Semigroup boundedness
// ============================================================================

/// Finite-horizon test of sup_n p^((T/alpha)^n) for every seminorm. Growth is
/// declared when a value crosses the divergence ceiling or the tail of the
/// sequence climbs geometrically; otherwise the family is reported bounded on
/// the horizon.
struct SemigroupVerdict {
  bool bounded = false;
  int horizon = 0;
  std::optional<int> growth_at;     // first offending power
  std::string growth_seminorm;
  std::vector<double> sup_values;   // per seminorm, sup over the horizon
};

SemigroupVerdict bounded_semigroup_check(const Operator& t, double alpha,
                                         const Calibration& p, int n_terms,
                                         const Tolerances& tols = {});

// ============================================================================
// Neumann resolvent
// ============================================================================

enum class SeriesStatus { converged, diverged, max_terms };

/// Partial sums of sum_k T^k / lambda^{k+1} with per-seminorm tail
/// monitoring. Convergence requires the tails to fall under the series
/// tolerance and both one-sided identity residuals to verify. The direct
/// solver cross-check is recorded whenever lambda*I - T is invertible.
struct ResolventResult {
  Complex lambda;
  Matrix partial_sum;
  int terms_used = 0;
  SeriesStatus status = SeriesStatus::max_terms;
  std::vector<double> residual_left;    // p^(S(lambda I - T) - I) per seminorm
  std::vector<double> residual_right;   // p^((lambda I - T)S - I) per seminorm
  std::optional<int> divergence_at;
  std::string divergence_seminorm;
  double direct_gap = kInf;             // max entrywise |S - (lambda I - T)^{-1}|
  double cond_factor = kInf;            // inf-norm condition estimate of lambda I - T
};

ResolventResult neumann_resolvent(const Operator& t, Complex lambda, const Calibration& p,
                                  const Tolerances& tols = {});

// ============================================================================
// Radius arithmetic
// ============================================================================

struct ArithmeticCheck {
  std::string name;
  bool applicable = true;
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

/// Oracle-radius inequalities for a pair of operators: power identities for
/// n = 2, 3, scalar homogeneity, and the product/sum bounds on commuting
/// pairs. Non-commuting pairs keep the latter two checks inapplicable.
struct ArithmeticReport {
  bool commuting = false;
  std::vector<ArithmeticCheck> checks;
  bool all_pass = false;
};

ArithmeticReport radius_arithmetic_suite(const Operator& t, const Operator& s,
                                         const Calibration& p, const Tolerances& tols = {});

// ============================================================================
// Local-boundedness radius
// ============================================================================

struct BisectionStep {
  double nu = 0.0;
  bool accepted = false;
  std::string rejecting_seminorm;
  int at_n = 0;
};

/// Bisection on nu: a candidate is accepted when every mixed sequence
/// m_pq(T^n / nu^n) stays bounded over the horizon for the local-boundedness
/// witness p. Estimates at or under the floor are flagged rather than
/// reported as exact zeros.
struct LbRadiusResult {
  double estimate = kInf;
  bool at_floor = false;
  int witness = -1;
  std::string witness_label;
  double oracle = kInf;             // max modulus of the full spectrum
  std::vector<BisectionStep> steps;
};

LbRadiusResult lb_radius(const Operator& t, const Calibration& p, int n_terms,
                         const Tolerances& tols = {});

// ============================================================================
// Calibration infimum study
// ============================================================================

struct CalibrationRadiusEntry {
  std::string name;
  bool dropped = false;
  std::string drop_reason;
  double r_oracle = kInf;
  double r_estimate = kInf;
  double running_inf = kInf;        // infimum over the calibrations seen so far
  bool separating = false;
  std::optional<double> lb_estimate;  // when locally bounded for this family
  bool lb_within_bound = true;        // lb <= r_oracle + radius tolerance
};

struct AugmentedEntry {
  std::string base;
  std::vector<double> m_values;
  double r_oracle = kInf;
  bool lowered = false;             // strictly below the supplied infimum
  bool above_lb = true;             // >= lb - radius tolerance
};

/// Comparison of the calibration-relative radius across supplied families,
/// plus augmented families built from each local-boundedness witness. This
/// approximates an infimum over the supplied and constructed calibrations
/// only, not over all calibrations of the space.
struct InfimumStudy {
  std::vector<CalibrationRadiusEntry> entries;
  double infimum = kInf;
  std::vector<SpectralPoint> intersection;  // seminorms field holds calibration names
  std::vector<AugmentedEntry> augmented;
  bool ok = false;                  // every lb check and augmentation bound held
};

InfimumStudy calibration_infimum_study(const Operator& t,
                                       const std::vector<Calibration>& families,
                                       const Tolerances& tols = {},
                                       const std::vector<double>& m_values = {1.0, 2.0, 4.0});

// ============================================================================
// Resolvent distance bound
// ============================================================================

/// Check of ||(lambda I - T)^{-1}||_P >= 1 / dist(lambda, spectral set) up to
/// the radius tolerance. Skipped with a reason when the resolvent fails to be
/// universally bounded for the calibration (possible for non-separating
/// families when lambda meets a hidden part of the spectrum).
struct ResolventDistanceReport {
  Complex lambda;
  bool skipped = false;
  std::string skip_reason;
  double norm = kInf;               // sup over seminorms of the quotient resolvent norms
  double distance = 0.0;            // to the spectral set
  bool bound_holds = false;
};

ResolventDistanceReport resolvent_distance_check(const Operator& t, const Calibration& p,
                                                 Complex lambda, const Tolerances& tols = {});

/// Resolvent of the shifted point lambda + mu through the power series
/// sum_k (-mu)^k R(lambda)^{k+1}; converges when |mu| ||R(lambda)||_P < 1.
struct PerturbationSeries {
  Matrix sum;
  int terms = 0;
  bool converged = false;
  double direct_gap = kInf;         // max entrywise gap to the direct resolvent
};

PerturbationSeries resolvent_perturbation_series(const Operator& t, const Calibration& p,
                                                 Complex lambda, Complex mu,
                                                 const Tolerances& tols = {});

}  // namespace specq
