#include "specq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace specq {

Json json_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json json_complex(Complex z) { return Json::array({z.real(), z.imag()}); }

Json json_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_complex(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Json json_tolerances(const Tolerances& tols) {
  return Json{{"spec", tols.spec},
              {"lin", tols.lin},
              {"gelfand", tols.gelfand},
              {"radius", tols.radius},
              {"neumann", tols.neumann},
              {"divergence_ceiling", tols.divergence_ceiling},
              {"zero_relax", tols.zero_relax},
              {"lb_floor", tols.lb_floor},
              {"terms", tols.terms},
              {"max_terms", tols.max_terms}};
}

Json json_trace_summary(const GelfandTrace& trace) {
  Json j{{"seminorm", trace.seminorm},
         {"computed", trace.computed},
         {"limit", json_real(trace.limit)},
         {"converged", trace.converged},
         {"degenerate", trace.degenerate}};
  if (!trace.terms.empty()) {
    j["final_a"] = json_real(trace.terms.back());
    j["final_running_inf"] = json_real(trace.running_inf.back());
  }
  return j;
}

Json json_radius_report(const RadiusReport& report) {
  Json traces = Json::array();
  for (const GelfandTrace& trace : report.traces) traces.push_back(json_trace_summary(trace));
  return Json{{"r_P_estimate", json_real(report.estimate)},
              {"r_P_oracle", json_real(report.oracle)},
              {"gap", json_real(report.gap)},
              {"bounded_element", report.bounded_element},
              {"flagged", report.flagged},
              {"per_seminorm", traces}};
}

Json json_resolvent_result(const ResolventResult& result) {
  const char* status = result.status == SeriesStatus::converged   ? "converged"
                       : result.status == SeriesStatus::diverged ? "diverged"
                                                                 : "max_terms";
  Json residual_left = Json::array();
  Json residual_right = Json::array();
  for (double v : result.residual_left) residual_left.push_back(json_real(v));
  for (double v : result.residual_right) residual_right.push_back(json_real(v));
  Json j{{"lambda", json_complex(result.lambda)},
         {"status", status},
         {"terms_used", result.terms_used},
         {"residual_left", residual_left},
         {"residual_right", residual_right},
         {"direct_gap", json_real(result.direct_gap)},
         {"cond_factor", json_real(result.cond_factor)},
         {"partial_sum", json_matrix(result.partial_sum)}};
  if (result.divergence_at) {
    j["divergence_at"] = *result.divergence_at;
    j["divergence_seminorm"] = result.divergence_seminorm;
  }
  return j;
}

Json json_boundedness_report(const BoundednessReport& report) {
  Json bounds = Json::array();
  for (double v : report.bounds) bounds.push_back(json_real(v));
  Json j{{"quotient_bounded", report.quotient_bounded},
         {"bounds", bounds},
         {"universally_bounded", report.universally_bounded},
         {"norm", json_real(report.norm)},
         {"locally_bounded", report.locally_bounded},
         {"zero_relax", report.zero_relax}};
  if (report.witness) {
    j["witness"] = *report.witness + 1;  // 1-based position in the calibration
    j["witness_label"] = report.witness_label;
  }
  return j;
}

Json json_arithmetic_report(const ArithmeticReport& report) {
  Json checks = Json::array();
  for (const ArithmeticCheck& check : report.checks) {
    Json c{{"name", check.name},
           {"applicable", check.applicable},
           {"pass", check.pass},
           {"lhs", json_real(check.lhs)},
           {"rhs", json_real(check.rhs)}};
    if (!check.note.empty()) c["note"] = check.note;
    checks.push_back(c);
  }
  return Json{{"commuting", report.commuting}, {"all_pass", report.all_pass}, {"checks", checks}};
}

Json json_spectral_set(const SpectralSet& set) {
  Json points = Json::array();
  for (const SpectralPoint& pt : set.points)
    points.push_back(Json{{"value", json_complex(pt.value)},
                          {"seminorms", pt.seminorms},
                          {"multiplicities", pt.multiplicities}});
  return Json{{"points", points},
              {"max_modulus", json_real(set.max_modulus())},
              {"merge_tol", set.merge_tol}};
}

Json json_infimum_study(const InfimumStudy& study) {
  Json entries = Json::array();
  for (const CalibrationRadiusEntry& entry : study.entries) {
    Json e{{"name", entry.name}, {"dropped", entry.dropped}, {"separating", entry.separating}};
    if (entry.dropped) {
      e["drop_reason"] = entry.drop_reason;
    } else {
      e["r_oracle"] = json_real(entry.r_oracle);
      e["r_estimate"] = json_real(entry.r_estimate);
      e["running_inf"] = json_real(entry.running_inf);
      if (entry.lb_estimate) {
        e["lb_estimate"] = json_real(*entry.lb_estimate);
        e["lb_within_bound"] = entry.lb_within_bound;
      }
    }
    entries.push_back(e);
  }
  Json intersection = Json::array();
  for (const SpectralPoint& pt : study.intersection)
    intersection.push_back(Json{{"value", json_complex(pt.value)},
                                {"calibrations", pt.seminorms},
                                {"multiplicities", pt.multiplicities}});
  Json augmented = Json::array();
  for (const AugmentedEntry& entry : study.augmented)
    augmented.push_back(Json{{"base", entry.base},
                             {"m_values", entry.m_values},
                             {"r_oracle", json_real(entry.r_oracle)},
                             {"lowered", entry.lowered},
                             {"above_lb", entry.above_lb}});
  return Json{{"entries", entries},
              {"infimum", json_real(study.infimum)},
              {"intersection", intersection},
              {"augmented", augmented},
              {"ok", study.ok}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string traces_csv(const std::vector<GelfandTrace>& traces) {
  std::string out = "n,seminorm,p_hat_Tn,a_n,running_inf\n";
  for (const GelfandTrace& trace : traces) {
    for (int k = 0; k < trace.computed; ++k) {
      out += std::to_string(k + 1);
      out += ',';
      out += csv_field(trace.seminorm);
      out += ',';
      out += format_double(trace.powers[k]);
      out += ',';
      out += format_double(trace.terms[k]);
      out += ',';
      out += format_double(trace.running_inf[k]);
      out += '\n';
    }
  }
  return out;
}

std::string spectral_csv(const SpectralSet& set) {
  std::string out = "re,im,seminorm_labels\n";
  for (const SpectralPoint& pt : set.points) {
    out += format_double(pt.value.real());
    out += ',';
    out += format_double(pt.value.imag());
    out += ',';
    std::string labels;
    for (std::size_t i = 0; i < pt.seminorms.size(); ++i) {
      if (i) labels += ';';
      labels += pt.seminorms[i];
    }
    out += csv_field(labels);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open for writing: " + path);
  stream << contents;
  if (!stream) throw std::runtime_error("write failed: " + path);
}

}  // namespace specq
