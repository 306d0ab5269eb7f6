#include "mdcert/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mdcert {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "config: " + what);
}

double get_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) config_error(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

std::vector<double> get_numbers(const Json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) config_error(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) config_error(std::string(key) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> get_ints(const Json& j, const char* key, std::vector<int> fallback) {
  std::vector<int> out;
  for (double x : get_numbers(j, key, {fallback.begin(), fallback.end()})) {
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<double> fractions_of(const Json& check) {
  if (check.contains("lambda_fractions")) return get_numbers(check, "lambda_fractions", {});
  return window_points(static_cast<int>(get_number(check, "lambda_points", 20)));
}

std::vector<double> lambdas_of(const Json& check) {
  if (check.contains("lambda_values")) return get_numbers(check, "lambda_values", {});
  if (check.contains("lambda")) {
    const Json& g = check.at("lambda");
    return lambda_grid(get_number(g, "lo", -1.0), get_number(g, "hi", 1.0),
                       get_number(g, "step", 0.01));
  }
  const double top = get_number(check, "lambda_max", 2.0);
  std::vector<double> out;
  for (double f : window_points(static_cast<int>(get_number(check, "lambda_points", 20)))) {
    out.push_back(top * f);
  }
  return out;
}

std::vector<BoxSpec> boxes_of(const Json& check, const char* key, int dim) {
  std::vector<BoxSpec> out;
  if (!check.contains(key)) return out;
  for (const auto& b : check.at(key)) out.push_back(box_from_json(b, dim));
  return out;
}

VerifyOptions verify_options(const Json& cfg, const Json& check) {
  VerifyOptions o;
  o.samples = cfg.at("samples").get<std::size_t>();
  o.threads = cfg.at("threads").get<int>();
  o.confidence = cfg.at("confidence").get<double>();
  const std::string ev = check.value("evidence", std::string("exact"));
  if (ev != "exact" && ev != "monte_carlo") config_error("evidence must be exact or monte_carlo");
  o.monte_carlo = ev == "monte_carlo";
  return o;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot write " + p.string());
  f << text;
  if (!f) fail(ErrorCode::kIo, "write failed: " + p.string());
}

Json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) fail(ErrorCode::kIo, "cannot read " + p.string());
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIo, "malformed JSON in " + p.string() + ": " + e.what());
  }
}

fs::path prepare_out(const std::string& out_dir) {
  fs::path p(out_dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + out_dir + ": " + ec.message());
  return p;
}

CertifyInputs certify_inputs(const Json& cfg) {
  CertifyInputs in;
  in.model = model_from_config(cfg);
  if (cfg.contains("C1")) in.C1 = get_number(cfg, "C1", 0.0);
  if (cfg.contains("Md")) in.Md = get_number(cfg, "Md", 0.0);
  in.log2_cap = static_cast<int>(get_number(cfg, "log2_cap", kDefaultLog2Cap));
  return in;
}

Json meta_for(const char* command, const Json& cfg) {
  Json echo = cfg;
  echo.erase("threads");
  return Json{{"command", command}, {kTimestampKey, utc_timestamp()}, {"config", echo}};
}

}  // namespace

std::vector<double> window_points(int n) {
  if (n < 1) config_error("lambda_points must be >= 1");
  if (n == 1) return {1.0};
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(-1.0 + 2.0 * k / (n - 1));
  return out;
}

Json parse_config(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
}

Json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

Json effective_config(const Json& config, const RunOptions& opts) {
  if (!config.is_object()) config_error("top level must be an object");
  Json cfg = config;
  if (!cfg.contains("d")) config_error("missing required key: d");
  if (!cfg.at("d").is_number_integer() || cfg.at("d").get<int>() < 1) {
    config_error("d must be an integer >= 1");
  }
  if (opts.seed) cfg["seed"] = *opts.seed;
  if (opts.samples) cfg["samples"] = *opts.samples;
  if (opts.threads) cfg["threads"] = *opts.threads;
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!cfg.contains("samples")) cfg["samples"] = kDefaultSamples;
  if (!cfg.contains("threads")) cfg["threads"] = 1;
  if (!cfg.contains("confidence")) cfg["confidence"] = 0.95;
  if (!cfg.contains("model")) {
    cfg["model"] = Json{{"field", "cell"}, {"distribution", "gaussian"}, {"param", 1.0}};
  }
  if (!cfg.contains("checks")) cfg["checks"] = Json::array();
  if (!cfg.at("checks").is_array()) config_error("checks must be an array");
  for (const auto& c : cfg.at("checks")) {
    if (!c.is_object() || !c.contains("anchor")) config_error("every check needs an anchor");
    require_registered_anchor(c.at("anchor").get<std::string>());
  }
  if (cfg.at("samples").get<std::size_t>() < 2 * kDefaultBatches) {
    config_error("samples must be at least " + std::to_string(2 * kDefaultBatches));
  }
  return cfg;
}

FieldModel model_from_config(const Json& cfg) {
  const Json& m = cfg.at("model");
  const auto kind = field_kind_from_name(m.value("field", std::string("cell")));
  const auto cell = CellDist::from_name(m.value("distribution", std::string("gaussian")),
                                        get_number(m, "param", 1.0));
  return FieldModel::make(cfg.at("d").get<int>(), kind, cell, cfg.at("seed").get<std::uint64_t>());
}

BoxSpec box_from_json(const Json& j, int dim) {
  std::vector<Interval> iv;
  if (j.is_array()) {
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2) config_error("box intervals must be [lo, hi] pairs");
      iv.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } else if (j.is_object()) {
    std::vector<double> sides;
    if (j.contains("sides")) {
      sides = get_numbers(j, "sides", {});
    } else if (j.contains("log2_sides")) {
      for (double k : get_numbers(j, "log2_sides", {})) sides.push_back(std::ldexp(1.0, static_cast<int>(k)));
    } else {
      config_error("box needs sides or log2_sides");
    }
    const auto offset = get_numbers(j, "offset", std::vector<double>(sides.size(), 0.0));
    if (offset.size() != sides.size()) config_error("box offset length differs from sides");
    for (std::size_t k = 0; k < sides.size(); ++k) iv.push_back({offset[k], offset[k] + sides[k]});
  } else {
    config_error("box must be an array of intervals or an object");
  }
  if (static_cast<int>(iv.size()) != dim) config_error("box dimension mismatch");
  for (const auto& i : iv) {
    if (!(i.hi > i.lo)) config_error("box interval must have positive length");
  }
  return BoxSpec(iv);
}

RunOutcome cmd_certify(const Json& config, const RunOptions& opts) {
  const Json cfg = effective_config(config, opts);
  RunOutcome out;
  out.certification = certify(certify_inputs(cfg));
  out.passed = out.certification->all_passed();
  out.result = meta_for("certify", cfg);
  out.result["certification"] = certification_to_json(*out.certification);
  if (!opts.out_dir.empty()) {
    const fs::path dir = prepare_out(opts.out_dir);
    write_file(dir / "trace.json", out.result.dump(2) + "\n");
    write_file(dir / "summary.txt", certification_summary(*out.certification));
  }
  return out;
}

RunOutcome cmd_verify(const Json& config, const RunOptions& opts) {
  const Json cfg = effective_config(config, opts);
  const FieldModel model = model_from_config(cfg);
  const int d = model.dim;
  const double scale = get_number(cfg, "C_final_scale", 1.0);
  RunOutcome out;
  auto cert = [&]() -> const Certification& {
    if (!out.certification) out.certification = certify(certify_inputs(cfg));
    return *out.certification;
  };
  auto leak_C1 = [&](const Json& check) {
    return get_number(check, "C1", get_number(cfg, "C1", leak_constant(model).C1));
  };
  Json constants = Json::object();

  for (const auto& check : cfg.at("checks")) {
    const std::string anchor = check.at("anchor").get<std::string>();
    const VerifyOptions vo = verify_options(cfg, check);
    if (anchor == kAnchorSubgaussianMoment) {
      const auto fam = subgaussian_family(static_cast<int>(get_number(check, "family_size", 50)),
                                        static_cast<std::uint64_t>(get_number(check, "family_seed", 1)));
      out.report.append(check_subgaussian_moment(fam, lambdas_of(check)));
    } else if (anchor == kAnchorHalvingHolder) {
      const auto crosses = d == 1 ? std::vector<BoxSpec>{BoxSpec()} : boxes_of(check, "cross", d - 1);
      if (crosses.empty()) config_error("halving_holder needs cross boxes for d >= 2");
      for (const auto& cross : crosses) {
        for (int axis : get_ints(check, "axes", {1})) {
          for (double r : get_numbers(check, "r", {1.0, 2.5})) {
            for (double p : get_numbers(check, "p", {1.5, 2.0, 4.0})) {
              const HalvingCase hc{cross, r, p, leak_C1(check), axis};
              out.report.append(check_halving(model, hc, fractions_of(check), vo));
            }
          }
        }
      }
    } else if (anchor == kAnchorSplitUpper || anchor == kAnchorSplitLower) {
      const auto crosses = d == 1 ? std::vector<BoxSpec>{BoxSpec()} : boxes_of(check, "cross", d - 1);
      if (crosses.empty()) config_error(anchor + " needs cross boxes for d >= 2");
      std::vector<std::pair<double, double>> rs{{1.0, 1.0}, {0.5, 2.25}};
      if (check.contains("rs")) {
        rs.clear();
        for (const auto& e : check.at("rs")) rs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      }
      for (const auto& cross : crosses) {
        for (int axis : get_ints(check, "axes", {1})) {
          for (auto [r, s] : rs) {
            for (double p : get_numbers(check, "p", {1.5, 2.0, 4.0})) {
              const SplitCase sc{cross, r, s, p, axis};
              out.report.append(anchor == kAnchorSplitUpper
                                    ? check_split_upper(model, sc, lambdas_of(check), vo)
                                    : check_split_lower(model, sc, lambdas_of(check), vo));
            }
          }
        }
      }
    } else if (anchor == kAnchorModerateWindow) {
      const double C2 = check.contains("C2") ? get_number(check, "C2", 0.0) : cert().C2;
      constants["C2"] = number_json(C2);
      out.report.append(check_moderate_window(model, C2, boxes_of(check, "boxes", d),
                                              fractions_of(check), vo));
    } else if (anchor == kAnchorTheorem) {
      const double base = check.contains("C_final") ? get_number(check, "C_final", 0.0)
                                                    : cert().C_final();
      constants["C_final"] = number_json(base);
      constants["C_final_scale"] = scale;
      out.report.append(check_theorem(model, base * scale, boxes_of(check, "boxes", d),
                                      fractions_of(check), vo));
    } else if (anchor == kAnchorLeakQuadratic) {
      std::vector<LeakCase> cases;
      for (const auto& c : check.value("cases", Json::array())) {
        LeakCase lc;
        lc.split = SplitSpec{static_cast<int>(get_number(c, "axis", 1)), get_number(c, "r", 0.5)};
        lc.a = get_number(c, "a", lc.split.r - 1.0);
        lc.b = get_number(c, "b", lc.split.r + 1.0);
        if (d > 1) lc.cross = box_from_json(c.at("cross"), d - 1);
        cases.push_back(lc);
      }
      const double C1 = leak_C1(check);
      constants["C1_leak"] = number_json(C1);
      out.report.append(check_leak_bounds(model, C1, cases, fractions_of(check)));
    }
  }

  out.passed = out.report.all_passed();
  if (cfg.contains("expected_refused")) {
    out.passed = out.passed && out.report.refused == cfg.at("expected_refused").get<std::size_t>();
  }
  Json meta = meta_for("verify", cfg);
  if (out.certification) {
    constants["log2_C_final"] = number_json(out.certification->theorem.log2_C_final);
    constants["dim"] = d;
  }
  meta["constants"] = constants;
  out.result = report_to_json(out.report, meta);
  if (!opts.out_dir.empty()) {
    const fs::path dir = prepare_out(opts.out_dir);
    write_file(dir / "report.json", out.result.dump(2) + "\n");
    write_file(dir / "report.csv", report_to_csv(out.report));
    if (out.certification) {
      Json trace = meta_for("certify", cfg);
      trace["certification"] = certification_to_json(*out.certification);
      write_file(dir / "trace.json", trace.dump(2) + "\n");
    }
  }
  return out;
}

RunOutcome cmd_plotdata(const std::string& run_dir, const std::string& out_dir) {
  const fs::path dir(run_dir);
  if (run_dir.empty() || !fs::is_directory(dir)) fail(ErrorCode::kIo, "missing run directory: " + run_dir);
  const fs::path report_path = dir / "report.json";
  const fs::path trace_path = dir / "trace.json";
  if (!fs::exists(report_path) && !fs::exists(trace_path)) {
    fail(ErrorCode::kIo, "run directory holds neither report.json nor trace.json: " + run_dir);
  }
  const fs::path out = prepare_out(out_dir.empty() ? run_dir : out_dir);
  RunOutcome res;
  res.result = Json{{"files", Json::array()}};

  if (fs::exists(report_path)) {
    res.report = report_from_json(read_json(report_path));
    std::ostringstream os;
    os << "anchor,instance,lambda,lower,point,upper,bound,normalized\n";
    for (const auto& r : res.report.rows) {
      os << csv_field(r.anchor) << ',' << csv_field(r.instance) << ',' << csv_number(r.lambda) << ','
         << csv_number(r.lhs_lower) << ',' << csv_number(r.lhs_point) << ',' << csv_number(r.lhs)
         << ',' << csv_number(r.rhs) << ',' << (r.normalized ? 1 : 0) << '\n';
    }
    write_file(out / "curves.csv", os.str());
    res.result["files"].push_back("curves.csv");
  }

  if (fs::exists(trace_path)) {
    const Json trace = read_json(trace_path);
    const Json& c = trace.at("certification");
    const int d = c.at("model").at("dim").get<int>();
    const double log2_cf = number_from_json(c.at("theorem").at("log2_C_final"));
    std::ostringstream os;
    os << "v,log2_lambda_edge,lambda_edge\n";
    for (int k = 2; k <= 64; ++k) {
      const double v = std::ldexp(1.0, k);
      const double log2_edge = -log2_cf - d * std::log2(std::log(v));
      os << csv_number(v) << ',' << csv_number(log2_edge) << ',' << csv_number(std::exp2(log2_edge))
         << '\n';
    }
    write_file(out / "window.csv", os.str());
    res.result["files"].push_back("window.csv");
  }
  return res;
}

}  // namespace mdcert
