#pragma once

#include <string>
#include <vector>

#include "specq/operators.hpp"
#include "specq/types.hpp"

namespace specq {

/// Action of an operator on the quotient by the null space of a seminorm.
/// For a coordinate-sup seminorm the quotient is coordinatized by the support
/// in ascending order, the operator becomes the corresponding principal
/// block, and the induced norm is the weighted sup norm with the support
/// weights. Construction fails when the operator does not leave the null
/// space invariant.
class QuotientOperator {
 public:
  QuotientOperator(const Operator& t, const Seminorm& p, double tau = 0.0);

  const Matrix& matrix() const { return block_; }
  const Seminorm& seminorm() const { return seminorm_; }
  const std::vector<int>& coordinates() const { return seminorm_.support(); }
  const std::vector<double>& weight_scaling() const { return seminorm_.weights(); }
  int dim() const { return static_cast<int>(block_.rows()); }

  /// Induced operator norm on the quotient; coincides with p_hat of the
  /// original operator.
  double norm() const;

 private:
  Seminorm seminorm_;
  Matrix block_;
};

QuotientOperator project(const Operator& t, const Seminorm& p, double tau = 0.0);

/// Eigenvalues of a dense matrix, sorted by real then imaginary part.
std::vector<Complex> dense_spectrum(const Matrix& m);

/// Weighted sup operator norm max_i w_i sum_j |x_ij| / w_j used on quotient
/// blocks.
double weighted_sup_norm(const Matrix& x, const std::vector<double>& weights);

struct Eigenpoint {
  Complex value;
  int multiplicity = 1;
};

/// Eigenvalues of the quotient block, merged when closer than merge_tol.
/// Deterministic order: by real part, then imaginary part.
std::vector<Eigenpoint> quotient_spectrum(const QuotientOperator& q, double merge_tol = 1e-8);

/// (lambda I - block)^{-1} on the quotient. Rejects lambda within spec_tol of
/// the block spectrum.
Matrix quotient_resolvent(const QuotientOperator& q, Complex lambda, double spec_tol = 1e-8);

// ---------------------------------------------------------------------------
// Spectral sets
// ---------------------------------------------------------------------------

struct SpectralPoint {
  Complex value;
  std::vector<std::string> seminorms;   // contributing seminorm labels
  std::vector<int> multiplicities;      // parallel to seminorms
};

struct SpectralSet {
  std::vector<SpectralPoint> points;
  double merge_tol = 1e-8;

  double max_modulus() const;
  double distance(Complex lambda) const;      // kInf for an empty set
  bool contains(Complex lambda, double tol) const;
};

/// Union of the quotient spectra over a calibration, with per-point
/// provenance. Requires the operator to be quotient bounded; the error names
/// the first seminorm whose invariance fails.
SpectralSet spectral_set(const Operator& t, const Calibration& p,
                         const Tolerances& tols = {});

}  // namespace specq
