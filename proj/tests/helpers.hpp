#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

#include "specq/types.hpp"

namespace testutil {

inline specq::Vector vec(std::initializer_list<specq::Complex> entries) {
  specq::Vector x(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const auto& e : entries) x(i++) = e;
  return x;
}

/// Deterministic sampling helper; avoids the library-defined distributions so
/// fixed seeds reproduce across toolchains.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return (gen_() & 1) != 0; }
  specq::Complex cplx(double radius = 1.0) {
    return {uniform(-radius, radius), uniform(-radius, radius)};
  }
  specq::Vector vector(int n, double radius = 1.0) {
    specq::Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = cplx(radius);
    return x;
  }
  std::vector<int> subset(int n) {  // nonempty subset of 1..n, ascending
    std::vector<int> out;
    for (int i = 1; i <= n; ++i)
      if (coin()) out.push_back(i);
    if (out.empty()) out.push_back(integer(1, n));
    return out;
  }
  std::vector<double> weights(std::size_t count, double lo = 0.25, double hi = 4.0) {
    std::vector<double> w(count);
    for (double& v : w) v = uniform(lo, hi);
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

inline double ulp_tol(double scale, double ulps = 4.0) {
  return ulps * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(scale));
}

}  // namespace testutil
