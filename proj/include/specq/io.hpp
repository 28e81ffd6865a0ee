#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "specq/quotient.hpp"
#include "specq/spectral.hpp"
#include "specq/types.hpp"

namespace specq {

using Json = nlohmann::ordered_json;

/// Finite reals serialize as numbers; infinities as the string "inf" (JSON has
/// no infinity literal and null would be ambiguous with absent).
Json json_real(double v);
Json json_complex(Complex z);
Json json_matrix(const Matrix& m);

Json json_tolerances(const Tolerances& tols);

Json json_trace_summary(const GelfandTrace& trace);
Json json_radius_report(const RadiusReport& report);
Json json_resolvent_result(const ResolventResult& result);
Json json_boundedness_report(const BoundednessReport& report);
Json json_arithmetic_report(const ArithmeticReport& report);
Json json_spectral_set(const SpectralSet& set);
Json json_infimum_study(const InfimumStudy& study);

/// CSV with columns n,seminorm,p_hat_Tn,a_n,running_inf; one row per power per
/// trace, fields quoted only when they need it.
std::string traces_csv(const std::vector<GelfandTrace>& traces);

/// CSV with columns re,im,seminorm_labels; labels semicolon-joined.
std::string spectral_csv(const SpectralSet& set);

std::string format_double(double v);  // %.17g, round-trip safe
std::string csv_field(const std::string& raw);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace specq
