#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "mdcert/certify.hpp"
#include "mdcert/report_io.hpp"
#include "mdcert/verify.hpp"

namespace mdcert {

inline constexpr std::size_t kDefaultSamples = 1000000;

// Command-line overrides; they take precedence over the config.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<int> threads;
  std::string out_dir;  // empty: write nothing
};

struct RunOutcome {
  bool passed = true;
  Json result;  // trace JSON for certify, report JSON for verify, file list for plotdata
  Report report;
  std::optional<Certification> certification;
};

Json load_config_file(const std::string& path);
Json parse_config(const std::string& text);

// Config with overrides applied and defaults filled; throws kInvalidArgument
// naming the missing or malformed key.
Json effective_config(const Json& config, const RunOptions& opts);
FieldModel model_from_config(const Json& config);
BoxSpec box_from_json(const Json& j, int dim);

RunOutcome cmd_certify(const Json& config, const RunOptions& opts);
RunOutcome cmd_verify(const Json& config, const RunOptions& opts);
// Reads report.json and/or trace.json from run_dir; writes curves.csv and window.csv.
RunOutcome cmd_plotdata(const std::string& run_dir, const std::string& out_dir);

// n evenly spaced points in [-1, 1].
std::vector<double> window_points(int n);

}  // namespace mdcert
