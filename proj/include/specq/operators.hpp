#pragma once

#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specq/calibration.hpp"
#include "specq/types.hpp"

namespace specq {

/// Dense linear operator on C^n with a memoized power table. The matrix is
/// immutable; the power table is a transparent cache and safe to read from
/// several threads.
class Operator {
 public:
  explicit Operator(Matrix m);

  Operator(const Operator& other);
  Operator& operator=(const Operator& other);
  Operator(Operator&& other) noexcept;
  Operator& operator=(Operator&& other) noexcept;

  static Operator identity(int n);
  static Operator zero(int n);
  static Operator diagonal(const std::vector<Complex>& entries);
  /// Weighted forward shift: (Sx)_{i+1} = w_i x_i and (Sx)_1 = 0, so the
  /// weights sit on the first subdiagonal and S^n vanishes.
  static Operator shift(int n, const std::vector<Complex>& weights);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }

  Vector apply(const Vector& x) const;
  Operator add(const Operator& other) const;
  Operator compose(const Operator& other) const;  // this after other
  Operator scale(Complex a) const;

  /// matrix()^k with all intermediate powers cached. References stay valid
  /// while the operator is alive.
  const Matrix& power(int k) const;
  int cached_powers() const;

 private:
  Matrix matrix_;
  mutable std::deque<Matrix> powers_;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Operator seminorms
// ---------------------------------------------------------------------------

/// Whether T maps the null space of p into itself. For coordinate-sup
/// seminorms this is a zero test on the off-support block: rows in the
/// support, columns outside it. Entries with modulus > tau count as leaks;
/// the default demands exact zeros.
bool invariant_under(const Matrix& t, const Seminorm& p, double tau = 0.0);
bool invariant_under(const Operator& t, const Seminorm& p, double tau = 0.0);

/// First leaking entry (row, col), 1-based, or nullopt when invariant.
std::optional<std::pair<int, int>> find_leak(const Matrix& t, const Seminorm& p,
                                             double tau = 0.0);

/// Operator seminorm p^(T) = sup { p(Tx) : p(x) <= 1 }. Infinite exactly when
/// T is not invariant for p; otherwise the weighted row-sum form
/// max_{i in F} sum_{j in F} (w_i / w_j) |t_ij| is exact.
double p_hat(const Matrix& t, const Seminorm& p, double tau = 0.0);
double p_hat(const Operator& t, const Seminorm& p, double tau = 0.0);

/// Mixed seminorm m_pq(T) = sup { q(Tx) : p(x) <= 1 }: finite exactly when
/// the block with rows in supp(q) and columns outside supp(p) vanishes, and
/// then equal to max_{i in supp(q)} sum_{j in supp(p)} (wq_i / wp_j) |t_ij|.
double m_pq(const Matrix& t, const Seminorm& p, const Seminorm& q, double tau = 0.0);
double m_pq(const Operator& t, const Seminorm& p, const Seminorm& q, double tau = 0.0);

/// A vector x with p(x) = 1 attaining p^(T) up to rounding; nullopt when
/// p^(T) is infinite or zero.
std::optional<Vector> p_hat_certificate(const Matrix& t, const Seminorm& p,
                                        double tau = 0.0);

// ---------------------------------------------------------------------------
// Boundedness classes
// ---------------------------------------------------------------------------

struct BoundednessReport {
  bool quotient_bounded = false;    // every p^(T) finite
  std::vector<double> bounds;       // p^(T) per seminorm, kInf allowed
  bool universally_bounded = false; // sup_p p^(T) finite
  double norm = kInf;               // sup_p p^(T)
  bool locally_bounded = false;     // some p has every m_pq(T) finite
  std::optional<int> witness;       // first such p, calibration index
  std::string witness_label;
  double zero_relax = 0.0;          // tau used for the structural-zero tests
};

BoundednessReport classify(const Operator& t, const Calibration& p, double tau = 0.0);

}  // namespace specq
