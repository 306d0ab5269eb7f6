#pragma once

#include <string>

#include <json.hpp>

#include "mdcert/certify.hpp"
#include "mdcert/verify.hpp"

namespace mdcert {

using Json = nlohmann::ordered_json;

// Key holding the wall-clock time; excluded from reproducibility comparisons.
inline constexpr const char* kTimestampKey = "generated_at";

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
Json number_json(double x);
double number_from_json(const Json& j);

Json row_to_json(const ReportRow& r);
ReportRow row_from_json(const Json& j);

// {"meta": ..., "summary": {...}, "rows": [...]}
Json report_to_json(const Report& rep, const Json& meta);
Report report_from_json(const Json& j);
std::string report_to_csv(const Report& rep);

Json quad_cert_json(const QuadCert& c);
Json checks_json(const std::vector<NamedCheck>& checks);
Json cascade_trace_json(const CascadeTrace& t);
Json certification_to_json(const Certification& c);
std::string certification_summary(const Certification& c);

// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);
std::string csv_number(double x);

// Copy of `j` with every timestamp key removed, recursively.
Json strip_timestamp(Json j);
std::string utc_timestamp();

}  // namespace mdcert
