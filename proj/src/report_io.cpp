#include "mdcert/report_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

namespace mdcert {

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::kInvalidArgument, "expected a number in report JSON");
}

Json row_to_json(const ReportRow& r) {
  Json j;
  j["anchor"] = r.anchor;
  j["instance"] = r.instance;
  j["lambda"] = number_json(r.lambda);
  j["window"] = r.window;
  j["evidence"] = evidence_name(r.evidence);
  j["lhs"] = number_json(r.lhs);
  j["lhs_point"] = number_json(r.lhs_point);
  j["lhs_lower"] = number_json(r.lhs_lower);
  j["rhs"] = number_json(r.rhs);
  j["slack"] = number_json(r.slack());
  j["normalized"] = r.normalized;
  j["pass"] = r.pass;
  return j;
}

ReportRow row_from_json(const Json& j) {
  ReportRow r;
  r.anchor = j.at("anchor").get<std::string>();
  require_registered_anchor(r.anchor);
  r.instance = j.at("instance").get<std::string>();
  r.lambda = number_from_json(j.at("lambda"));
  r.window = j.at("window").get<std::string>();
  r.evidence = j.at("evidence").get<std::string>() == "exact" ? Evidence::kExact
                                                                : Evidence::kUpperConf;
  r.lhs = number_from_json(j.at("lhs"));
  r.lhs_point = number_from_json(j.at("lhs_point"));
  r.lhs_lower = number_from_json(j.at("lhs_lower"));
  r.rhs = number_from_json(j.at("rhs"));
  r.normalized = j.at("normalized").get<bool>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

Json report_to_json(const Report& rep, const Json& meta) {
  Json j;
  j["meta"] = meta;
  Json s;
  s["rows"] = rep.rows.size();
  s["failures"] = rep.failures();
  s["refused"] = rep.refused;
  s["all_passed"] = rep.all_passed();
  j["summary"] = s;
  j["rows"] = Json::array();
  for (const auto& r : rep.rows) j["rows"].push_back(row_to_json(r));
  return j;
}

Report report_from_json(const Json& j) {
  Report rep;
  for (const auto& r : j.at("rows")) rep.rows.push_back(row_from_json(r));
  rep.refused = j.at("summary").at("refused").get<std::size_t>();
  return rep;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string report_to_csv(const Report& rep) {
  std::ostringstream os;
  os << "anchor,instance,lambda,window,evidence,lhs_lower,lhs_point,lhs,rhs,slack,normalized,pass\n";
  for (const auto& r : rep.rows) {
    os << csv_field(r.anchor) << ',' << csv_field(r.instance) << ',' << csv_number(r.lambda)
       << ',' << csv_field(r.window) << ',' << evidence_name(r.evidence) << ','
       << csv_number(r.lhs_lower) << ',' << csv_number(r.lhs_point) << ',' << csv_number(r.lhs)
       << ',' << csv_number(r.rhs) << ',' << csv_number(r.slack()) << ','
       << (r.normalized ? 1 : 0) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

Json quad_cert_json(const QuadCert& c) {
  return Json{{"a", number_json(c.a)}, {"delta", number_json(c.delta)}};
}

Json checks_json(const std::vector<NamedCheck>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    arr.push_back(Json{{"name", c.name},
                       {"lhs", number_json(c.lhs)},
                       {"rhs", number_json(c.rhs)},
                       {"slack", number_json(c.slack())},
                       {"passed", c.passed}});
  }
  return arr;
}

namespace {

Json numbers(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(number_json(x));
  return arr;
}

}  // namespace

Json cascade_trace_json(const CascadeTrace& t) {
  Json j;
  j["a"] = number_json(t.params.a);
  j["delta"] = number_json(t.params.delta);
  j["Cbig"] = number_json(t.params.Cbig);
  j["C1"] = number_json(t.params.C1);
  j["dim"] = t.params.dim;
  j["box0"] = t.params.box0.to_string();
  j["n_axis"] = t.params.n_axis;
  j["n"] = t.n;
  j["N"] = t.N;
  j["volumes"] = numbers(t.volumes);
  j["A"] = numbers(t.A);
  j["p"] = numbers(t.p);
  j["q"] = numbers(t.q);
  j["M"] = numbers(t.M);
  j["Delta"] = numbers(t.Delta);
  j["A_inf"] = number_json(t.A_inf);
  j["checks"] = checks_json(t.checks);
  if (t.result) j["result"] = quad_cert_json(*t.result);
  return j;
}

Json certification_to_json(const Certification& c) {
  Json j;
  j["model"] = Json{{"dim", c.model.dim},
                    {"field", field_kind_name(c.model.kind)},
                    {"distribution", c.model.cell.name()},
                    {"param", c.model.cell.param},
                    {"eps", number_json(c.model.eps)},
                    {"seed", c.model.seed}};
  j["C1_leak"] = number_json(c.C1_leak);
  j["C1"] = number_json(c.C1);
  j["C"] = number_json(c.C);
  j["big_cube"] = quad_cert_json(c.big_cube);
  j["lower_dim"] = quad_cert_json(c.lower_dim);
  j["uniform"] = quad_cert_json(c.uniform);
  j["N"] = c.N;
  j["V"] = number_json(c.V);
  j["C2"] = number_json(c.C2);
  j["cascade"] = cascade_trace_json(c.trace);
  const auto& t = c.theorem;
  j["theorem"] = Json{{"Md", number_json(t.Md)},
                      {"Nd", number_json(t.Nd)},
                      {"log2_C", number_json(t.log2_C)},
                      {"log2_C_final", number_json(t.log2_C_final)},
                      {"C_final", number_json(c.C_final())},
                      {"iterations", t.iterations},
                      {"checks", checks_json(t.checks)}};
  j["all_passed"] = c.all_passed();
  return j;
}

std::string certification_summary(const Certification& c) {
  std::ostringstream os;
  os.precision(10);
  os << "model       " << c.model.describe() << "\n"
     << "C1 (leak)   " << c.C1_leak << "\n"
     << "C1          " << c.C1 << "\n"
     << "C           " << c.C << "\n"
     << "a, delta    " << c.uniform.a << ", " << c.uniform.delta << "\n"
     << "N           " << c.N << "\n"
     << "V           " << c.V << "\n"
     << "C2          " << c.C2 << "\n"
     << "Md          " << c.theorem.Md << "\n"
     << "Nd          " << c.theorem.Nd << "\n"
     << "log2 C      " << c.theorem.log2_C << "\n"
     << "C_final     2^" << c.theorem.log2_C_final << " (" << c.C_final() << ")\n"
     << "\nchecks (slack = rhs - lhs)\n";
  auto list = [&](const std::vector<NamedCheck>& checks) {
    for (const auto& k : checks) {
      os << (k.passed ? "  ok   " : "  FAIL ") << k.name << "  slack " << k.slack() << "\n";
    }
  };
  list(c.trace.checks);
  list(c.theorem.checks);
  return os.str();
}

Json strip_timestamp(Json j) {
  if (j.is_object()) {
    j.erase(kTimestampKey);
    for (auto& [k, v] : j.items()) v = strip_timestamp(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timestamp(v);
  }
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mdcert
