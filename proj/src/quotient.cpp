#include "specq/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace specq {

QuotientOperator::QuotientOperator(const Operator& t, const Seminorm& p, double tau)
    : seminorm_(p) {
  if (t.dim() != p.dim())
    throw std::invalid_argument("project: operator and seminorm dimensions differ");
  if (auto leak = find_leak(t.matrix(), p, tau)) {
    throw std::invalid_argument(
        "project: operator does not leave the null space of " + p.label() +
        " invariant; entry (" + std::to_string(leak->first) + "," +
        std::to_string(leak->second) + ") leaks outside the support");
  }
  const auto& support = p.support();
  const int k = static_cast<int>(support.size());
  block_.resize(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) block_(a, b) = t.matrix()(support[a] - 1, support[b] - 1);
}

double QuotientOperator::norm() const { return weighted_sup_norm(block_, seminorm_.weights()); }

QuotientOperator project(const Operator& t, const Seminorm& p, double tau) {
  return QuotientOperator(t, p, tau);
}

double weighted_sup_norm(const Matrix& x, const std::vector<double>& weights) {
  if (x.rows() != x.cols() || x.rows() != static_cast<Eigen::Index>(weights.size()))
    throw std::invalid_argument("weighted_sup_norm: dimension mismatch");
  double best = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) sum += std::abs(x(i, j)) / weights[j];
    best = std::max(best, weights[i] * sum);
  }
  return best;
}

namespace {

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::vector<Complex> dense_spectrum(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_spectrum: eigensolver did not converge");
  std::vector<Complex> values(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + m.rows());
  std::sort(values.begin(), values.end(), complex_less);
  return values;
}

std::vector<Eigenpoint> quotient_spectrum(const QuotientOperator& q, double merge_tol) {
  std::vector<Eigenpoint> out;
  for (const Complex& value : dense_spectrum(q.matrix())) {
    if (!out.empty() && std::abs(value - out.back().value) <= merge_tol) {
      ++out.back().multiplicity;
    } else {
      out.push_back({value, 1});
    }
  }
  return out;
}

Matrix quotient_resolvent(const QuotientOperator& q, Complex lambda, double spec_tol) {
  double dist = kInf;
  for (const Eigenpoint& e : quotient_spectrum(q, spec_tol))
    dist = std::min(dist, std::abs(lambda - e.value));
  if (dist <= spec_tol)
    throw std::invalid_argument(
        "quotient_resolvent: lambda is within " + std::to_string(dist) +
        " of the quotient spectrum of " + q.seminorm().label());
  const int k = q.dim();
  Matrix shifted = lambda * Matrix::Identity(k, k) - q.matrix();
  return shifted.partialPivLu().solve(Matrix::Identity(k, k));
}

// ---------------------------------------------------------------------------
// Spectral sets
// ---------------------------------------------------------------------------

double SpectralSet::max_modulus() const {
  double best = 0.0;
  for (const SpectralPoint& p : points) best = std::max(best, std::abs(p.value));
  return best;
}

double SpectralSet::distance(Complex lambda) const {
  double best = kInf;
  for (const SpectralPoint& p : points) best = std::min(best, std::abs(lambda - p.value));
  return best;
}

bool SpectralSet::contains(Complex lambda, double tol) const {
  return distance(lambda) <= tol;
}

SpectralSet spectral_set(const Operator& t, const Calibration& p, const Tolerances& tols) {
  if (t.dim() != p.dim())
    throw std::invalid_argument("spectral_set: operator and calibration dimensions differ");
  for (const Seminorm& sn : p.seminorms())
    if (!invariant_under(t, sn, tols.zero_relax))
      throw std::invalid_argument("spectral_set: operator is not quotient bounded; seminorm " +
                                  sn.label() + " fails invariance");

  struct Tagged {
    Complex value;
    int seminorm;
    int multiplicity;
  };
  std::vector<Tagged> tagged;
  for (int i = 0; i < p.size(); ++i) {
    QuotientOperator q(t, p[i], tols.zero_relax);
    for (const Eigenpoint& e : quotient_spectrum(q, tols.spec))
      tagged.push_back({e.value, i, e.multiplicity});
  }
  std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    if (a.value.imag() != b.value.imag()) return a.value.imag() < b.value.imag();
    return a.seminorm < b.seminorm;
  });

  SpectralSet set;
  set.merge_tol = tols.spec;
  for (const Tagged& tg : tagged) {
    if (!set.points.empty() && std::abs(tg.value - set.points.back().value) <= tols.spec) {
      SpectralPoint& pt = set.points.back();
      pt.seminorms.push_back(p[tg.seminorm].label());
      pt.multiplicities.push_back(tg.multiplicity);
    } else {
      set.points.push_back({tg.value, {p[tg.seminorm].label()}, {tg.multiplicity}});
    }
  }
  // A seminorm may contribute several eigenvalues to one merged point; fold
  // repeated labels together and add their multiplicities.
  for (SpectralPoint& pt : set.points) {
    std::vector<std::string> labels;
    std::vector<int> mult;
    for (std::size_t k = 0; k < pt.seminorms.size(); ++k) {
      auto it = std::find(labels.begin(), labels.end(), pt.seminorms[k]);
      if (it == labels.end()) {
        labels.push_back(pt.seminorms[k]);
        mult.push_back(pt.multiplicities[k]);
      } else {
        mult[it - labels.begin()] += pt.multiplicities[k];
      }
    }
    pt.seminorms = std::move(labels);
    pt.multiplicities = std::move(mult);
  }
  return set;
}

}  // namespace specq
