#include "specq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace specq {

namespace {

std::string default_label(int position) { return "p" + std::to_string(position + 1); }

std::string format_scale(double m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", m);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Seminorm
// ---------------------------------------------------------------------------

Seminorm::Seminorm(int dim, std::vector<int> support, std::vector<double> weights,
                   std::string label)
    : dim_(dim), label_(std::move(label)) {
  if (dim < 1) throw std::invalid_argument("seminorm: dimension must be positive");
  if (support.empty()) throw std::invalid_argument("seminorm: support must be nonempty");
  if (support.size() != weights.size())
    throw std::invalid_argument("seminorm: support and weights must have equal length");

  std::vector<int> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return support[a] < support[b]; });

  by_coord_.assign(dim, 0.0);
  support_.reserve(support.size());
  weights_.reserve(weights.size());
  for (int k : order) {
    int coord = support[k];
    double w = weights[k];
    if (coord < 1 || coord > dim)
      throw std::invalid_argument("seminorm: support index " + std::to_string(coord) +
                                  " outside [1," + std::to_string(dim) + "]");
    if (!support_.empty() && support_.back() == coord)
      throw std::invalid_argument("seminorm: duplicate support index " + std::to_string(coord));
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("seminorm: weight for index " + std::to_string(coord) +
                                  " must be positive and finite");
    support_.push_back(coord);
    weights_.push_back(w);
    by_coord_[coord - 1] = w;
  }
}

double Seminorm::operator()(const Vector& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("seminorm: vector has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dim_));
  double value = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k)
    value = std::max(value, weights_[k] * std::abs(x[support_[k] - 1]));
  return value;
}

bool Seminorm::contains(int coord) const {
  return coord >= 1 && coord <= dim_ && by_coord_[coord - 1] > 0.0;
}

double Seminorm::weight_of(int coord) const {
  if (coord < 1 || coord > dim_) return 0.0;
  return by_coord_[coord - 1];
}

Seminorm Seminorm::with_label(std::string label) const {
  Seminorm copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

bool Seminorm::same_functional(const Seminorm& other) const {
  return dim_ == other.dim_ && support_ == other.support_ && weights_ == other.weights_;
}

// ---------------------------------------------------------------------------
// Domination
// ---------------------------------------------------------------------------

SeminormOrder compare(const Seminorm& p, const Seminorm& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("compare: seminorms live on different spaces");

  SeminormOrder out;
  double ratio = 0.0;
  for (std::size_t k = 0; k < p.support().size(); ++k) {
    int coord = p.support()[k];
    double wq = q.weight_of(coord);
    if (wq == 0.0) {
      out.witness = coord;
      return out;  // p(e_coord) > 0 while q vanishes there: no finite ratio
    }
    ratio = std::max(ratio, p.weights()[k] / wq);
  }
  out.dominated = true;
  out.ratio = ratio;

  double reverse = 0.0;
  for (std::size_t k = 0; k < q.support().size(); ++k) {
    int coord = q.support()[k];
    double wp = p.weight_of(coord);
    if (wp == 0.0) return out;
    reverse = std::max(reverse, q.weights()[k] / wp);
  }
  out.equivalent = true;
  out.reverse_ratio = reverse;
  return out;
}

Seminorm seminorm_max(const Seminorm& a, const Seminorm& b, std::string label) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("seminorm_max: seminorms live on different spaces");
  std::vector<int> support;
  std::vector<double> weights;
  for (int coord = 1; coord <= a.dim(); ++coord) {
    double w = std::max(a.weight_of(coord), b.weight_of(coord));
    if (w > 0.0) {
      support.push_back(coord);
      weights.push_back(w);
    }
  }
  if (label.empty()) label = "max(" + a.label() + "," + b.label() + ")";
  return Seminorm(a.dim(), std::move(support), std::move(weights), std::move(label));
}

Seminorm seminorm_scale(const Seminorm& p, double m, std::string label) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("seminorm_scale: factor must be positive and finite");
  std::vector<double> weights = p.weights();
  for (double& w : weights) w *= m;
  if (label.empty()) label = format_scale(m) + "*" + p.label();
  return Seminorm(p.dim(), p.support(), std::move(weights), std::move(label));
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

namespace {

// a <= b pointwise as functions, i.e. supp(a) within supp(b) and weights
// dominated coordinatewise.
bool pointwise_leq(const Seminorm& a, const Seminorm& b) {
  for (std::size_t k = 0; k < a.support().size(); ++k) {
    int coord = a.support()[k];
    if (a.weights()[k] > b.weight_of(coord)) return false;
  }
  return true;
}

bool has_upper_bound(const std::vector<Seminorm>& family, const Seminorm& a,
                     const Seminorm& b) {
  for (const Seminorm& r : family)
    if (pointwise_leq(a, r) && pointwise_leq(b, r)) return true;
  return false;
}

bool is_directed(const std::vector<Seminorm>& family) {
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (!has_upper_bound(family, family[i], family[j])) return false;
  return true;
}

bool covers_all(const std::vector<Seminorm>& family, int dim) {
  std::vector<bool> seen(dim, false);
  for (const Seminorm& p : family)
    for (int coord : p.support()) seen[coord - 1] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

Calibration::Calibration(std::vector<Seminorm> seminorms, std::string name)
    : name_(std::move(name)), seminorms_(std::move(seminorms)) {
  if (seminorms_.empty())
    throw std::invalid_argument("calibration: at least one seminorm is required");
  dim_ = seminorms_.front().dim();
  for (std::size_t i = 0; i < seminorms_.size(); ++i) {
    if (seminorms_[i].dim() != dim_)
      throw std::invalid_argument("calibration: member " + std::to_string(i + 1) +
                                  " has mismatched dimension");
    if (seminorms_[i].label().empty())
      seminorms_[i] = seminorms_[i].with_label(default_label(static_cast<int>(i)));
  }
  separating_ = covers_all(seminorms_, dim_);
  principal_ = is_directed(seminorms_);
}

std::optional<int> Calibration::find(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (seminorms_[i].label() == label) return i;
  return std::nullopt;
}

CalibrationMatch q_equivalent(const Calibration& a, const Calibration& b) {
  CalibrationMatch match;
  if (a.dim() != b.dim())
    throw std::invalid_argument("q_equivalent: calibrations live on different spaces");
  match.forward.assign(a.size(), -1);
  match.backward.assign(b.size(), -1);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      if (compare(a[i], b[j]).equivalent) {
        match.forward[i] = j;
        break;
      }
  for (int j = 0; j < b.size(); ++j)
    for (int i = 0; i < a.size(); ++i)
      if (compare(b[j], a[i]).equivalent) {
        match.backward[j] = i;
        break;
      }
  auto found = [](int v) { return v >= 0; };
  match.equivalent = std::all_of(match.forward.begin(), match.forward.end(), found) &&
                     std::all_of(match.backward.begin(), match.backward.end(), found);
  return match;
}

ClosureResult principal_closure(const Calibration& p, int cap) {
  if (cap < 0) throw std::invalid_argument("principal_closure: cap must be nonnegative");
  std::vector<Seminorm> family = p.seminorms();
  int generated = 0;
  bool capped = false;

  // Worklist over pairs of the growing family. Every appended element is the
  // pointwise max of two members, so the closure is finite; the cap bounds it.
  bool changed = true;
  while (changed && !capped) {
    changed = false;
    const std::size_t count = family.size();
    for (std::size_t i = 0; i < count && !capped; ++i) {
      for (std::size_t j = i + 1; j < count && !capped; ++j) {
        if (has_upper_bound(family, family[i], family[j])) continue;
        if (generated == cap) {
          capped = true;
          break;
        }
        family.push_back(seminorm_max(family[i], family[j]));
        ++generated;
        changed = true;
      }
    }
  }

  ClosureResult out{Calibration(std::move(family), p.name()), false, generated};
  out.complete = out.calibration.principal();
  return out;
}

Calibration augmented_calibration(const Calibration& p_family, const Seminorm& p,
                                  const std::vector<double>& m_values,
                                  std::string name) {
  if (p.dim() != p_family.dim())
    throw std::invalid_argument("augmented_calibration: seminorm dimension mismatch");
  if (m_values.empty())
    throw std::invalid_argument("augmented_calibration: m_values must be nonempty");
  std::vector<Seminorm> family;
  family.reserve(m_values.size() * p_family.size());
  for (double m : m_values) {
    Seminorm scaled = seminorm_scale(p, m);
    for (const Seminorm& q : p_family.seminorms()) {
      std::string label = "max(" + format_scale(m) + "*" + p.label() + "," + q.label() + ")";
      family.push_back(seminorm_max(scaled, q, std::move(label)));
    }
  }
  if (name.empty()) name = p_family.name().empty() ? "augmented" : p_family.name() + "+aug";
  return Calibration(std::move(family), std::move(name));
}

}  // namespace specq
