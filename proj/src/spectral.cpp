#include "specq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace specq {

namespace {

constexpr double kTrendSlopeTol = 5e-3;   // per-step log growth for series/semigroup trends
constexpr double kLbSlopeTol = 1e-5;      // finer discrimination for the radius bisection

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void check_dims(const Operator& t, const Calibration& p, const char* who) {
  if (t.dim() != p.dim())
    throw std::invalid_argument(std::string(who) + ": operator and calibration dimensions differ");
}

void require_quotient_bounded(const Matrix& m, const Calibration& p, const char* who) {
  for (const Seminorm& sn : p.seminorms())
    if (auto leak = find_leak(m, sn, 0.0))
      throw std::invalid_argument(std::string(who) + ": operator is not quotient bounded; entry (" +
                                  std::to_string(leak->first) + "," + std::to_string(leak->second) +
                                  ") leaks outside the support of " + sn.label());
}

/// Copy of the matrix with sub-threshold entries in the off-support blocks
/// forced to exact zeros, so powers keep the invariance structure exactly.
/// With the default threshold this is the identity map.
Matrix scrubbed(const Operator& t, const Calibration& p, double tau) {
  Matrix m = t.matrix();
  if (tau > 0.0) {
    for (const Seminorm& sn : p.seminorms())
      for (int row : sn.support())
        for (int col = 1; col <= sn.dim(); ++col) {
          if (sn.contains(col)) continue;
          if (std::abs(m(row - 1, col - 1)) <= tau) m(row - 1, col - 1) = Complex(0, 0);
        }
  }
  return m;
}

/// Tracks cur ~ T^n / exp(log_scale) with periodic rescaling, so seminorm
/// values of large powers stay available in log space without overflow.
struct PowerWalk {
  Matrix base;
  Matrix cur;
  double log_scale = 0.0;
  int n = 0;

  explicit PowerWalk(Matrix m) : base(std::move(m)) {
    cur = Matrix::Identity(base.rows(), base.cols());
  }

  void step() {
    cur = base * cur;
    ++n;
    double mx = cur.cwiseAbs().maxCoeff();
    if (mx > 1e100 || (mx > 0.0 && mx < 1e-100)) {
      cur /= mx;
      log_scale += std::log(mx);
    }
  }

  double log_p_hat(const Seminorm& p) const {
    double v = specq::p_hat(cur, p, 0.0);
    if (v == 0.0) return -kInf;
    if (!std::isfinite(v)) return kInf;
    return std::log(v) + log_scale;
  }

  double log_m_pq(const Seminorm& p, const Seminorm& q) const {
    double v = specq::m_pq(cur, p, q, 0.0);
    if (v == 0.0) return -kInf;
    if (!std::isfinite(v)) return kInf;
    return std::log(v) + log_scale;
  }
};

/// Least-squares slope of y against n over the finite points of
/// values[first..last), where values[k] belongs to n = k + 1. Returns nullopt
/// when fewer than min_points entries are finite.
std::optional<double> window_slope(const std::vector<double>& values, std::size_t first,
                                   std::size_t last, std::size_t min_points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t k = first; k < last; ++k) {
    if (!std::isfinite(values[k])) continue;
    double x = static_cast<double>(k + 1);
    sx += x;
    sy += values[k];
    sxx += x * x;
    sxy += x * values[k];
    ++count;
  }
  if (count < std::max<std::size_t>(min_points, 2)) return std::nullopt;
  double denom = count * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

/// Growth test for a log-value sequence: ceiling anywhere, or a positive
/// least-squares trend over the trailing quarter. Returns the offending index
/// (0-based into the sequence) or nullopt.
std::optional<std::size_t> detect_growth(const std::vector<double>& logs, double log_ceiling,
                                         double slope_tol) {
  for (std::size_t k = 0; k < logs.size(); ++k)
    if (logs[k] > log_ceiling) return k;
  std::size_t window = std::max<std::size_t>(8, logs.size() / 4);
  if (logs.size() < window) return std::nullopt;
  std::size_t first = logs.size() - window;
  auto slope = window_slope(logs, first, logs.size(), window / 2);
  if (slope && *slope > slope_tol) return first;
  return std::nullopt;
}

}  // namespace

// ============================================================================
// Gelfand traces
// ============================================================================

std::vector<GelfandTrace> gelfand_traces(const Operator& t, const Calibration& p, int n_terms,
                                         const Tolerances& tols) {
  check_dims(t, p, "gelfand_trace");
  if (n_terms < 2) throw std::invalid_argument("gelfand_trace: at least two terms are required");
  Matrix base = scrubbed(t, p, tols.zero_relax);
  require_quotient_bounded(base, p, "gelfand_trace");

  std::vector<GelfandTrace> traces(p.size());
  std::vector<bool> live(p.size(), true);
  for (int i = 0; i < p.size(); ++i) traces[i].seminorm = p[i].label();

  PowerWalk walk(base);
  int active = p.size();
  for (int n = 1; n <= n_terms && active > 0; ++n) {
    walk.step();
    for (int i = 0; i < p.size(); ++i) {
      if (!live[i]) continue;
      GelfandTrace& trace = traces[i];
      double lv = walk.log_p_hat(p[i]);
      if (lv == -kInf) {
        trace.powers.push_back(0.0);
        trace.terms.push_back(0.0);
        trace.running_inf.push_back(0.0);
        trace.degenerate = true;
        trace.limit = 0.0;
        trace.converged = true;
        live[i] = false;
        --active;
        continue;
      }
      trace.powers.push_back(std::exp(lv));
      double a = std::exp(lv / n);
      trace.terms.push_back(a);
      double prev = trace.running_inf.empty() ? kInf : trace.running_inf.back();
      trace.running_inf.push_back(std::min(prev, a));
    }
  }

  for (GelfandTrace& trace : traces) {
    trace.computed = static_cast<int>(trace.terms.size());
    if (trace.degenerate) continue;
    trace.limit = trace.running_inf.back();
    if (trace.computed >= 2) {
      double last = trace.terms[trace.computed - 1];
      double prev = trace.terms[trace.computed - 2];
      double scale = std::max(std::abs(last), 1e-300);
      bool small_step = std::abs(last - prev) < tols.gelfand * scale;
      // Stabilized: the running infimum moved by less than tol per step on
      // average over the last tenth of the walk.
      int w = std::max(2, trace.computed / 10);
      int back = std::max(0, trace.computed - 1 - w);
      double drop = trace.running_inf[back] - trace.running_inf[trace.computed - 1];
      bool stabilized = drop <= w * tols.gelfand * std::max(trace.limit, 1e-300);
      trace.converged = small_step && stabilized;
    }
  }
  return traces;
}

GelfandTrace gelfand_trace(const Operator& t, const Seminorm& p, int n_terms,
                           const Tolerances& tols) {
  Calibration single({p});
  return gelfand_traces(t, single, n_terms, tols).front();
}

// ============================================================================
// Radius
// ============================================================================

RadiusReport p_spectral_radius(const Operator& t, const Calibration& p, int n_terms,
                               const Tolerances& tols) {
  RadiusReport report;
  report.traces = gelfand_traces(t, p, n_terms, tols);
  double estimate = 0.0;
  for (const GelfandTrace& trace : report.traces) {
    estimate = std::max(estimate, trace.limit);
    if (!trace.converged) report.flagged.push_back(trace.seminorm);
  }
  report.estimate = estimate;
  report.oracle = spectral_set(t, p, tols).max_modulus();
  report.gap = std::abs(report.estimate - report.oracle);
  report.bounded_element = std::isfinite(report.estimate);
  return report;
}

// ============================================================================
// Semigroup boundedness
// ============================================================================

SemigroupVerdict bounded_semigroup_check(const Operator& t, double alpha, const Calibration& p,
                                         int n_terms, const Tolerances& tols) {
  check_dims(t, p, "bounded_semigroup_check");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("bounded_semigroup_check: alpha must be positive and finite");
  if (n_terms < 8)
    throw std::invalid_argument("bounded_semigroup_check: horizon must be at least 8");
  Matrix base = scrubbed(t, p, tols.zero_relax);
  require_quotient_bounded(base, p, "bounded_semigroup_check");
  base /= alpha;

  SemigroupVerdict verdict;
  verdict.horizon = n_terms;
  const double log_ceiling = std::log(tols.divergence_ceiling);

  std::vector<std::vector<double>> logs(p.size());
  PowerWalk walk(base);
  bool ceiling_hit = false;
  for (int n = 1; n <= n_terms && !ceiling_hit; ++n) {
    walk.step();
    for (int i = 0; i < p.size(); ++i) {
      logs[i].push_back(walk.log_p_hat(p[i]));
      if (logs[i].back() > log_ceiling && !ceiling_hit) {
        ceiling_hit = true;
        verdict.growth_at = n;
        verdict.growth_seminorm = p[i].label();
      }
    }
  }

  if (!ceiling_hit) {
    for (int i = 0; i < p.size(); ++i) {
      if (auto at = detect_growth(logs[i], log_ceiling, kTrendSlopeTol)) {
        verdict.growth_at = static_cast<int>(*at) + 1;
        verdict.growth_seminorm = p[i].label();
        break;
      }
    }
  }

  verdict.bounded = !verdict.growth_at.has_value();
  verdict.sup_values.assign(p.size(), 0.0);
  for (int i = 0; i < p.size(); ++i) {
    double peak = -kInf;
    for (double lv : logs[i]) peak = std::max(peak, lv);
    verdict.sup_values[i] = peak == -kInf ? 0.0 : std::exp(peak);
  }
  return verdict;
}

// ============================================================================
// Neumann resolvent
// ============================================================================

ResolventResult neumann_resolvent(const Operator& t, Complex lambda, const Calibration& p,
                                  const Tolerances& tols) {
  check_dims(t, p, "neumann_resolvent");
  if (lambda == Complex(0.0, 0.0))
    throw std::invalid_argument("neumann_resolvent: lambda must be nonzero");
  Matrix base = scrubbed(t, p, tols.zero_relax);
  require_quotient_bounded(base, p, "neumann_resolvent");

  const int n = t.dim();
  const Matrix eye = Matrix::Identity(n, n);
  const double log_ceiling = std::log(tols.divergence_ceiling);

  ResolventResult result;
  result.lambda = lambda;

  Matrix step = base / lambda;
  Matrix term = eye / lambda;
  Matrix sum = term;
  std::vector<std::vector<double>> logs(p.size());
  for (int i = 0; i < p.size(); ++i) {
    double v = p_hat(term, p[i], 0.0);
    logs[i].push_back(v > 0.0 ? std::log(v) : -kInf);
  }

  auto residuals_of = [&](const Matrix& s, std::vector<double>& left,
                          std::vector<double>& right) {
    Matrix shifted = lambda * eye - base;
    Matrix rl = s * shifted - eye;
    Matrix rr = shifted * s - eye;
    left.clear();
    right.clear();
    for (int i = 0; i < p.size(); ++i) {
      left.push_back(p_hat(rl, p[i], 0.0));
      right.push_back(p_hat(rr, p[i], 0.0));
    }
  };

  int used = 1;
  for (int k = 1; k <= tols.max_terms && result.status == SeriesStatus::max_terms; ++k) {
    term = term * step;
    sum += term;
    used = k + 1;

    bool all_small = true;
    bool all_zero = true;
    for (int i = 0; i < p.size(); ++i) {
      double v = p_hat(term, p[i], 0.0);
      logs[i].push_back(v > 0.0 ? std::log(v) : -kInf);
      all_small = all_small && v < tols.neumann;
      all_zero = all_zero && v == 0.0;
    }

    if (all_zero && term.isZero(0.0)) {
      residuals_of(sum, result.residual_left, result.residual_right);
      result.status = SeriesStatus::converged;
      break;
    }
    if (all_small) {
      residuals_of(sum, result.residual_left, result.residual_right);
      bool verified = true;
      for (int i = 0; i < p.size(); ++i)
        verified = verified && result.residual_left[i] < tols.neumann &&
                   result.residual_right[i] < tols.neumann;
      if (verified) {
        result.status = SeriesStatus::converged;
        break;
      }
    }
    if (k >= 16) {
      for (int i = 0; i < p.size(); ++i) {
        if (auto at = detect_growth(logs[i], log_ceiling, kTrendSlopeTol)) {
          result.status = SeriesStatus::diverged;
          result.divergence_at = static_cast<int>(*at);
          result.divergence_seminorm = p[i].label();
          break;
        }
      }
    }
  }

  result.partial_sum = sum;
  result.terms_used = used;
  residuals_of(sum, result.residual_left, result.residual_right);

  Matrix shifted = lambda * eye - base;
  Eigen::FullPivLU<Matrix> lu(shifted);
  if (lu.isInvertible()) {
    Matrix inverse = lu.solve(eye);
    result.direct_gap = (sum - inverse).cwiseAbs().maxCoeff();
    result.cond_factor = inf_norm(shifted) * inf_norm(inverse);
  }
  return result;
}

// ============================================================================
// Radius arithmetic
// ============================================================================

ArithmeticReport radius_arithmetic_suite(const Operator& t, const Operator& s,
                                         const Calibration& p, const Tolerances& tols) {
  check_dims(t, p, "radius_arithmetic_suite");
  check_dims(s, p, "radius_arithmetic_suite");

  auto radius = [&](const Operator& x) { return spectral_set(x, p, tols).max_modulus(); };
  auto slack = [&](double x) { return tols.lin * std::max(1.0, x); };

  ArithmeticReport report;
  double r_t = radius(t);
  double r_s = radius(s);

  Matrix ts = t.matrix() * s.matrix();
  Matrix st = s.matrix() * t.matrix();
  double comm_scale = std::max(1.0, inf_norm(t.matrix()) * inf_norm(s.matrix()));
  report.commuting = inf_norm(ts - st) <= tols.lin * comm_scale;

  {
    ArithmeticCheck check{"power_identity_2"};
    check.lhs = radius(t.compose(t));
    check.rhs = r_t * r_t;
    check.pass = std::abs(check.lhs - check.rhs) <= slack(check.rhs);
    report.checks.push_back(check);
  }
  {
    ArithmeticCheck check{"power_identity_3"};
    check.lhs = radius(t.compose(t).compose(t));
    check.rhs = r_t * r_t * r_t;
    check.pass = std::abs(check.lhs - check.rhs) <= slack(check.rhs);
    report.checks.push_back(check);
  }
  {
    ArithmeticCheck check{"scale_homogeneity"};
    check.lhs = radius(t.scale(Complex(0.0, 2.0)));
    check.rhs = 2.0 * r_t;
    check.pass = std::abs(check.lhs - check.rhs) <= slack(check.rhs);
    check.note = "factor 2i";
    report.checks.push_back(check);
  }
  {
    ArithmeticCheck check{"product_radius_bound"};
    if (report.commuting) {
      check.lhs = radius(t.compose(s));
      check.rhs = r_t * r_s;
      check.pass = check.lhs <= check.rhs + slack(check.rhs);
    } else {
      check.applicable = false;
      check.note = "pair does not commute";
    }
    report.checks.push_back(check);
  }
  {
    ArithmeticCheck check{"sum_radius_bound"};
    if (report.commuting) {
      check.lhs = radius(t.add(s));
      check.rhs = r_t + r_s;
      check.pass = check.lhs <= check.rhs + slack(check.rhs);
    } else {
      check.applicable = false;
      check.note = "pair does not commute";
    }
    report.checks.push_back(check);
  }

  report.all_pass = true;
  for (const ArithmeticCheck& check : report.checks)
    if (check.applicable && !check.pass) report.all_pass = false;
  return report;
}

// ============================================================================
// Local-boundedness radius
// ============================================================================

LbRadiusResult lb_radius(const Operator& t, const Calibration& p, int n_terms,
                         const Tolerances& tols) {
  check_dims(t, p, "lb_radius");
  if (n_terms < 32) throw std::invalid_argument("lb_radius: horizon must be at least 32");
  BoundednessReport cls = classify(t, p, tols.zero_relax);
  if (!cls.locally_bounded)
    throw std::invalid_argument("lb_radius: operator is not locally bounded for this calibration");

  LbRadiusResult result;
  result.witness = *cls.witness;
  result.witness_label = cls.witness_label;
  {
    double peak = 0.0;
    for (const Complex& e : dense_spectrum(t.matrix())) peak = std::max(peak, std::abs(e));
    result.oracle = peak;
  }

  Matrix base = scrubbed(t, p, tols.zero_relax);
  const Seminorm& witness = p[result.witness];
  const double log_ceiling = std::log(tols.divergence_ceiling);

  // The mixed sequences are candidate-independent: log m_pq(T^n / nu^n) is
  // log m_pq(T^n) - n log nu, so one walk and one slope per target seminorm
  // serve the whole bisection.
  std::vector<std::vector<double>> logs(p.size());
  PowerWalk walk(base);
  for (int n = 1; n <= n_terms; ++n) {
    walk.step();
    for (int i = 0; i < p.size(); ++i) logs[i].push_back(walk.log_m_pq(witness, p[i]));
  }

  const std::size_t window = std::max<std::size_t>(16, static_cast<std::size_t>(n_terms) / 2);
  const std::size_t first = logs[0].size() > window ? logs[0].size() - window : 0;
  std::vector<std::optional<double>> slopes(p.size());
  for (int i = 0; i < p.size(); ++i)
    slopes[i] = window_slope(logs[i], first, logs[i].size(), (logs[i].size() - first) / 2);

  auto accept = [&](double nu) -> std::pair<bool, BisectionStep> {
    BisectionStep step;
    step.nu = nu;
    double log_nu = std::log(nu);
    for (int i = 0; i < p.size(); ++i) {
      for (std::size_t k = first; k < logs[i].size(); ++k) {
        if (logs[i][k] - static_cast<double>(k + 1) * log_nu > log_ceiling) {
          step.rejecting_seminorm = p[i].label();
          step.at_n = static_cast<int>(k) + 1;
          return {false, step};
        }
      }
      if (slopes[i] && *slopes[i] - log_nu > kLbSlopeTol) {
        step.rejecting_seminorm = p[i].label();
        step.at_n = static_cast<int>(first) + 1;
        return {false, step};
      }
    }
    step.accepted = true;
    return {true, step};
  };

  auto try_nu = [&](double nu) {
    auto [ok, step] = accept(nu);
    result.steps.push_back(step);
    return ok;
  };

  if (try_nu(tols.lb_floor)) {
    result.estimate = tols.lb_floor;
    result.at_floor = true;
    return result;
  }

  double lo = tols.lb_floor;
  double hi = std::max(p_hat(base, witness, 0.0), 4.0 * tols.lb_floor);
  int guard = 0;
  while (!try_nu(hi)) {
    hi *= 2.0;
    if (++guard > 64)
      throw std::runtime_error("lb_radius: no bounded candidate found below 2^64 * ||T||");
  }
  while (hi - lo > tols.radius) {
    double mid = 0.5 * (lo + hi);
    if (try_nu(mid))
      hi = mid;
    else
      lo = mid;
  }
  result.estimate = 0.5 * (lo + hi);
  result.at_floor = false;
  return result;
}

// ============================================================================
// Calibration infimum study
// ============================================================================

InfimumStudy calibration_infimum_study(const Operator& t,
                                       const std::vector<Calibration>& families,
                                       const Tolerances& tols,
                                       const std::vector<double>& m_values) {
  if (families.empty())
    throw std::invalid_argument("calibration_infimum_study: no calibrations supplied");

  InfimumStudy study;
  study.ok = true;
  std::vector<const Calibration*> kept;
  std::vector<std::string> kept_names;
  std::vector<SpectralSet> kept_sets;

  double running = kInf;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const Calibration& family = families[f];
    CalibrationRadiusEntry entry;
    entry.name = family.name().empty() ? "calibration" + std::to_string(f + 1) : family.name();
    entry.separating = family.separating();
    if (t.dim() != family.dim()) {
      entry.dropped = true;
      entry.drop_reason = "dimension mismatch";
      study.entries.push_back(entry);
      continue;
    }
    BoundednessReport cls = classify(t, family, tols.zero_relax);
    if (!cls.quotient_bounded) {
      int bad = 0;
      while (std::isfinite(cls.bounds[bad])) ++bad;
      entry.dropped = true;
      entry.drop_reason = "not quotient bounded: seminorm " + family[bad].label() +
                          " fails invariance";
      study.entries.push_back(entry);
      continue;
    }
    SpectralSet set = spectral_set(t, family, tols);
    entry.r_oracle = set.max_modulus();
    RadiusReport radius = p_spectral_radius(t, family, tols.terms, tols);
    entry.r_estimate = radius.estimate;
    running = std::min(running, entry.r_oracle);
    entry.running_inf = running;
    if (cls.locally_bounded) {
      LbRadiusResult lb = lb_radius(t, family, std::max(tols.terms, 64), tols);
      entry.lb_estimate = lb.estimate;
      entry.lb_within_bound = lb.estimate <= entry.r_oracle + tols.radius;
      study.ok = study.ok && entry.lb_within_bound;
    }
    study.entries.push_back(entry);
    kept.push_back(&family);
    kept_names.push_back(entry.name);
    kept_sets.push_back(std::move(set));
  }
  study.infimum = running;

  // Intersection over the retained spectral sets, tagged by calibration name.
  if (!kept_sets.empty()) {
    for (const SpectralPoint& candidate : kept_sets.front().points) {
      bool everywhere = true;
      std::vector<int> mult;
      for (const SpectralSet& other : kept_sets) {
        double best = kInf;
        int m = 0;
        for (const SpectralPoint& pt : other.points) {
          double d = std::abs(pt.value - candidate.value);
          if (d < best) {
            best = d;
            m = 0;
            for (int c : pt.multiplicities) m += c;
          }
        }
        if (best > tols.spec) {
          everywhere = false;
          break;
        }
        mult.push_back(m);
      }
      if (everywhere) {
        SpectralPoint pt;
        pt.value = candidate.value;
        for (std::size_t k = 0; k < kept.size(); ++k) {
          pt.seminorms.push_back(kept_names[k]);
          pt.multiplicities.push_back(mult[k]);
        }
        study.intersection.push_back(pt);
      }
    }
  }

  // Augmented families from each local-boundedness witness.
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Calibration& family = *kept[k];
    BoundednessReport cls = classify(t, family, tols.zero_relax);
    if (!cls.locally_bounded) continue;
    Calibration augmented =
        augmented_calibration(family, family[*cls.witness], m_values);
    BoundednessReport aug_cls = classify(t, augmented, tols.zero_relax);
    AugmentedEntry entry;
    entry.base = kept_names[k];
    entry.m_values = m_values;
    if (!aug_cls.quotient_bounded) continue;
    entry.r_oracle = spectral_set(t, augmented, tols).max_modulus();
    entry.lowered = entry.r_oracle < study.infimum - 1e-12;
    for (const CalibrationRadiusEntry& base_entry : study.entries)
      if (base_entry.name == entry.base && base_entry.lb_estimate)
        entry.above_lb = entry.r_oracle >= *base_entry.lb_estimate - tols.radius;
    study.ok = study.ok && entry.above_lb;
    study.augmented.push_back(entry);
  }
  return study;
}

// ============================================================================
// Resolvent distance bound
// ============================================================================

ResolventDistanceReport resolvent_distance_check(const Operator& t, const Calibration& p,
                                                 Complex lambda, const Tolerances& tols) {
  check_dims(t, p, "resolvent_distance_check");
  SpectralSet set = spectral_set(t, p, tols);
  double dist = set.distance(lambda);
  if (dist <= tols.spec)
    throw std::invalid_argument("resolvent_distance_check: lambda lies in the spectral set");

  ResolventDistanceReport report;
  report.lambda = lambda;
  report.distance = dist;

  double full_dist = kInf;
  for (const Complex& e : dense_spectrum(t.matrix()))
    full_dist = std::min(full_dist, std::abs(lambda - e));
  if (full_dist <= tols.spec) {
    report.skipped = true;
    report.skip_reason =
        "resolvent is not universally bounded for this calibration: lambda is within "
        "tolerance of the spectrum of a complementary block";
    return report;
  }

  double norm = 0.0;
  for (const Seminorm& sn : p.seminorms()) {
    QuotientOperator q(t, sn, tols.zero_relax);
    Matrix r = quotient_resolvent(q, lambda, tols.spec);
    norm = std::max(norm, weighted_sup_norm(r, sn.weights()));
  }
  report.norm = norm;
  report.bound_holds = norm >= 1.0 / dist - tols.radius;
  return report;
}

PerturbationSeries resolvent_perturbation_series(const Operator& t, const Calibration& p,
                                                 Complex lambda, Complex mu,
                                                 const Tolerances& tols) {
  check_dims(t, p, "resolvent_perturbation_series");
  require_quotient_bounded(t.matrix(), p, "resolvent_perturbation_series");

  double full_dist = kInf;
  for (const Complex& e : dense_spectrum(t.matrix()))
    full_dist = std::min(full_dist, std::abs(lambda - e));
  if (full_dist <= tols.spec)
    throw std::invalid_argument(
        "resolvent_perturbation_series: lambda is within tolerance of the spectrum");

  const int n = t.dim();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix resolvent = (lambda * eye - t.matrix()).partialPivLu().solve(eye);

  double family_norm = 0.0;
  for (const Seminorm& sn : p.seminorms()) {
    QuotientOperator q(t, sn, tols.zero_relax);
    Matrix r = quotient_resolvent(q, lambda, tols.spec);
    family_norm = std::max(family_norm, weighted_sup_norm(r, sn.weights()));
  }

  PerturbationSeries series;
  series.sum = resolvent;
  if (std::abs(mu) * family_norm >= 1.0) return series;  // outside the convergence disc

  Matrix factor = -mu * resolvent;
  Matrix term = resolvent;
  const double stop = 1e-12 * std::max(1.0, inf_norm(resolvent));
  for (int k = 1; k <= tols.max_terms; ++k) {
    term = term * factor;
    series.sum += term;
    series.terms = k;
    if (inf_norm(term) < stop) {
      series.converged = true;
      break;
    }
  }

  Eigen::FullPivLU<Matrix> lu((lambda + mu) * eye - t.matrix());
  if (lu.isInvertible()) {
    Matrix direct = lu.solve(eye);
    series.direct_gap = (series.sum - direct).cwiseAbs().maxCoeff();
  }
  return series;
}

}  // namespace specq
