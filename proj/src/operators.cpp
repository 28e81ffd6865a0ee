#include "specq/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace specq {

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

Operator::Operator(Matrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("operator: matrix must be square");
  if (matrix_.rows() < 1) throw std::invalid_argument("operator: dimension must be positive");
}

Operator::Operator(const Operator& other) : matrix_(other.matrix_) {}

Operator& Operator::operator=(const Operator& other) {
  if (this != &other) {
    matrix_ = other.matrix_;
    std::lock_guard<std::mutex> lock(mutex_);
    powers_.clear();
  }
  return *this;
}

Operator::Operator(Operator&& other) noexcept : matrix_(std::move(other.matrix_)) {}

Operator& Operator::operator=(Operator&& other) noexcept {
  if (this != &other) {
    matrix_ = std::move(other.matrix_);
    std::lock_guard<std::mutex> lock(mutex_);
    powers_.clear();
  }
  return *this;
}

Operator Operator::identity(int n) { return Operator(Matrix::Identity(n, n)); }

Operator Operator::zero(int n) { return Operator(Matrix::Zero(n, n)); }

Operator Operator::diagonal(const std::vector<Complex>& entries) {
  if (entries.empty()) throw std::invalid_argument("operator: empty diagonal");
  Matrix m = Matrix::Zero(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return Operator(std::move(m));
}

Operator Operator::shift(int n, const std::vector<Complex>& weights) {
  if (n < 1) throw std::invalid_argument("operator: dimension must be positive");
  if (static_cast<int>(weights.size()) != n - 1)
    throw std::invalid_argument("operator: shift on dimension " + std::to_string(n) +
                                " needs " + std::to_string(n - 1) + " weights");
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i + 1, i) = weights[i];
  return Operator(std::move(m));
}

Vector Operator::apply(const Vector& x) const {
  if (x.size() != dim())
    throw std::invalid_argument("operator: vector has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dim()));
  return matrix_ * x;
}

Operator Operator::add(const Operator& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("operator: dimension mismatch in add");
  return Operator(matrix_ + other.matrix_);
}

Operator Operator::compose(const Operator& other) const {
  if (other.dim() != dim())
    throw std::invalid_argument("operator: dimension mismatch in compose");
  return Operator(matrix_ * other.matrix_);
}

Operator Operator::scale(Complex a) const { return Operator(a * matrix_); }

const Matrix& Operator::power(int k) const {
  if (k < 0) throw std::invalid_argument("operator: negative power");
  std::lock_guard<std::mutex> lock(mutex_);
  if (powers_.empty()) powers_.push_back(Matrix::Identity(dim(), dim()));
  while (static_cast<int>(powers_.size()) <= k) powers_.push_back(powers_.back() * matrix_);
  return powers_[k];
}

int Operator::cached_powers() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return static_cast<int>(powers_.size());
}

// ---------------------------------------------------------------------------
// Operator seminorms
// ---------------------------------------------------------------------------

namespace {

void check_dims(const Matrix& t, const Seminorm& p, const char* who) {
  if (t.rows() != t.cols() || t.rows() != p.dim())
    throw std::invalid_argument(std::string(who) + ": operator and seminorm dimensions differ");
}

}  // namespace

std::optional<std::pair<int, int>> find_leak(const Matrix& t, const Seminorm& p, double tau) {
  check_dims(t, p, "find_leak");
  const int n = p.dim();
  for (int row : p.support())
    for (int col = 1; col <= n; ++col) {
      if (p.contains(col)) continue;
      if (std::abs(t(row - 1, col - 1)) > tau) return std::make_pair(row, col);
    }
  return std::nullopt;
}

bool invariant_under(const Matrix& t, const Seminorm& p, double tau) {
  return !find_leak(t, p, tau).has_value();
}

bool invariant_under(const Operator& t, const Seminorm& p, double tau) {
  return invariant_under(t.matrix(), p, tau);
}

double p_hat(const Matrix& t, const Seminorm& p, double tau) {
  check_dims(t, p, "p_hat");
  if (!invariant_under(t, p, tau)) return kInf;
  const auto& support = p.support();
  const auto& weights = p.weights();
  double best = 0.0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < support.size(); ++b)
      sum += std::abs(t(support[a] - 1, support[b] - 1)) / weights[b];
    best = std::max(best, weights[a] * sum);
  }
  return best;
}

double p_hat(const Operator& t, const Seminorm& p, double tau) {
  return p_hat(t.matrix(), p, tau);
}

double m_pq(const Matrix& t, const Seminorm& p, const Seminorm& q, double tau) {
  check_dims(t, p, "m_pq");
  check_dims(t, q, "m_pq");
  const int n = p.dim();
  for (int row : q.support())
    for (int col = 1; col <= n; ++col) {
      if (p.contains(col)) continue;
      if (std::abs(t(row - 1, col - 1)) > tau) return kInf;
    }
  double best = 0.0;
  for (std::size_t a = 0; a < q.support().size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < p.support().size(); ++b)
      sum += std::abs(t(q.support()[a] - 1, p.support()[b] - 1)) / p.weights()[b];
    best = std::max(best, q.weights()[a] * sum);
  }
  return best;
}

double m_pq(const Operator& t, const Seminorm& p, const Seminorm& q, double tau) {
  return m_pq(t.matrix(), p, q, tau);
}

std::optional<Vector> p_hat_certificate(const Matrix& t, const Seminorm& p, double tau) {
  check_dims(t, p, "p_hat_certificate");
  if (!invariant_under(t, p, tau)) return std::nullopt;
  const auto& support = p.support();
  const auto& weights = p.weights();

  double best = -1.0;
  std::size_t best_row = 0;
  for (std::size_t a = 0; a < support.size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < support.size(); ++b)
      sum += std::abs(t(support[a] - 1, support[b] - 1)) / weights[b];
    if (weights[a] * sum > best) {
      best = weights[a] * sum;
      best_row = a;
    }
  }
  if (best <= 0.0) return std::nullopt;

  // Phase-align each coordinate with the chosen row so the row sum is hit
  // exactly; coordinates the row ignores are set to their unit-ball extreme.
  Vector x = Vector::Zero(p.dim());
  for (std::size_t b = 0; b < support.size(); ++b) {
    Complex entry = t(support[best_row] - 1, support[b] - 1);
    double mod = std::abs(entry);
    Complex phase = mod > 0.0 ? std::conj(entry) / mod : Complex(1.0, 0.0);
    x[support[b] - 1] = phase / weights[b];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

BoundednessReport classify(const Operator& t, const Calibration& p, double tau) {
  if (t.dim() != p.dim())
    throw std::invalid_argument("classify: operator and calibration dimensions differ");

  BoundednessReport report;
  report.zero_relax = tau;
  report.bounds.reserve(p.size());
  double sup = 0.0;
  bool all_finite = true;
  for (const Seminorm& sn : p.seminorms()) {
    double value = p_hat(t, sn, tau);
    report.bounds.push_back(value);
    sup = std::max(sup, value);
    all_finite = all_finite && std::isfinite(value);
  }
  report.quotient_bounded = all_finite;
  report.norm = sup;
  report.universally_bounded = std::isfinite(sup);

  for (int i = 0; i < p.size(); ++i) {
    bool witness = true;
    for (int j = 0; j < p.size(); ++j)
      if (!std::isfinite(m_pq(t, p[i], p[j], tau))) {
        witness = false;
        break;
      }
    if (witness) {
      report.locally_bounded = true;
      report.witness = i;
      report.witness_label = p[i].label();
      break;
    }
  }
  return report;
}

}  // namespace specq
