#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specq/types.hpp"

namespace specq {

// ============================================================================
// Seminorms
// ============================================================================

/// Weighted coordinate-sup functional p(x) = max_{i in F} w_i |x_i| over a
/// support set F of 1-based coordinates. Vectors vanishing on F form the null
/// space, so p is a norm exactly when F covers every coordinate.
class Seminorm {
 public:
  /// Support indices are 1-based and must be distinct; weights are parallel to
  /// the support and strictly positive. Entries are sorted by coordinate.
  Seminorm(int dim, std::vector<int> support, std::vector<double> weights,
           std::string label = "");

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

  double operator()(const Vector& x) const;

  bool contains(int coord) const;       // 1-based
  double weight_of(int coord) const;    // 0.0 when coord is outside the support
  int support_size() const { return static_cast<int>(support_.size()); }
  int null_space_dim() const { return dim_ - support_size(); }
  bool full_support() const { return support_size() == dim_; }

  Seminorm with_label(std::string label) const;
  bool same_functional(const Seminorm& other) const;  // exact support + weights

 private:
  int dim_;
  std::string label_;
  std::vector<int> support_;          // sorted ascending, 1-based
  std::vector<double> weights_;       // parallel to support_
  std::vector<double> by_coord_;      // dense lookup, 0 for absent coordinates
};

/// Outcome of the domination test between two seminorms on the same space.
/// `dominated` means p <= ratio * q with the minimal such ratio reported;
/// `equivalent` additionally gives the minimal reverse ratio. When domination
/// fails, `witness` is a support coordinate of p missing from q.
struct SeminormOrder {
  bool dominated = false;
  bool equivalent = false;
  double ratio = kInf;
  double reverse_ratio = kInf;
  std::optional<int> witness;
};

SeminormOrder compare(const Seminorm& p, const Seminorm& q);

/// Pointwise max of two seminorms: union support, per-coordinate max weight.
Seminorm seminorm_max(const Seminorm& a, const Seminorm& b, std::string label = "");

/// The seminorm x -> m * p(x) for m > 0.
Seminorm seminorm_scale(const Seminorm& p, double m, std::string label = "");

// ============================================================================
// Calibrations
// ============================================================================

/// Ordered family of seminorms on a common space. Unlabeled members receive
/// labels "p1", "p2", ... by position. The family is immutable; the
/// separating and principal (directed) flags are fixed at construction.
class Calibration {
 public:
  explicit Calibration(std::vector<Seminorm> seminorms, std::string name = "");

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(seminorms_.size()); }
  const std::string& name() const { return name_; }
  const std::vector<Seminorm>& seminorms() const { return seminorms_; }
  const Seminorm& operator[](int i) const { return seminorms_.at(i); }

  /// True when the supports jointly cover every coordinate, i.e. only the
  /// zero vector is null for all members.
  bool separating() const { return separating_; }

  /// True when every pair of members has a pointwise upper bound in the
  /// family (the family is directed).
  bool principal() const { return principal_; }

  std::optional<int> find(const std::string& label) const;

 private:
  int dim_;
  std::string name_;
  std::vector<Seminorm> seminorms_;
  bool separating_;
  bool principal_;
};

/// Mutual-domination matching between two calibrations: every member of one
/// family must be equivalent (two-sided domination) to some member of the
/// other. `forward[i]` / `backward[j]` hold partner indices, -1 when missing.
struct CalibrationMatch {
  bool equivalent = false;
  std::vector<int> forward;
  std::vector<int> backward;
};

CalibrationMatch q_equivalent(const Calibration& a, const Calibration& b);

/// Directed closure under pairwise max. `generated` counts the appended
/// seminorms; when the cap is hit first, `complete` is false and the partial
/// family is returned.
struct ClosureResult {
  Calibration calibration;
  bool complete = false;
  int generated = 0;
};

ClosureResult principal_closure(const Calibration& p, int cap = 64);

/// The family { max(m*p, q) : m in m_values, q in P }, ordered by m then by
/// the position of q in P. Cardinality is |m_values| * |P|; duplicates are
/// kept so provenance stays positional.
Calibration augmented_calibration(const Calibration& p_family, const Seminorm& p,
                                  const std::vector<double>& m_values,
                                  std::string name = "");

}  // namespace specq
