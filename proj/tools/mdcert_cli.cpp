#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "mdcert/mdcert.h"

namespace {

enum Exit { kPass = 0, kRowsFailed = 1, kUsage = 2, kRuntime = 3 };

int report(mdc_context* ctx, mdc_status st, int passed, const char* command) {
  if (st == MDC_OK) {
    size_t rows = 0, failures = 0, refused = 0;
    mdc_report_counts(ctx, &rows, &failures, &refused);
    if (std::string(command) == "verify") {
      std::printf("%s: %zu rows, %zu failed, %zu refused\n", command, rows, failures, refused);
    }
    double log2_cf = 0.0;
    if (mdc_log2_c_final(ctx, &log2_cf) == MDC_OK) std::printf("log2 C_final = %.6f\n", log2_cf);
    return passed ? kPass : kRowsFailed;
  }
  std::fprintf(stderr, "%s failed (%s): %s\n", command, mdc_status_name(st), mdc_last_error(ctx));
  if (st == MDC_ERR_INVALID_ARGUMENT || st == MDC_ERR_NO_CONFIG) return kUsage;
  return kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified constants and numerical checks for moderate-deviation bounds"};
  app.require_subcommand(1);

  std::string config, out, run_dir;
  uint64_t seed = 0, samples = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--samples", samples, "override the Monte Carlo sample count");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
  };
  CLI::App* certify = app.add_subcommand("certify", "compute the constant chain and write trace.json");
  add_common(certify);
  CLI::App* verify = app.add_subcommand("verify", "run the configured checks and write reports");
  add_common(verify);
  CLI::App* plot = app.add_subcommand("plotdata", "emit CSV curves from a finished run directory");
  plot->add_option("--run", run_dir, "run directory")->required();
  plot->add_option("--out", out, "output directory (default: the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  mdc_context* ctx = mdc_create();
  if (!ctx) return kRuntime;
  int rc = kPass;
  if (!out.empty()) mdc_set_out_dir(ctx, out.c_str());
  if (*plot) {
    const mdc_status st = mdc_plotdata(ctx, run_dir.c_str());
    if (st != MDC_OK) {
      std::fprintf(stderr, "plotdata failed (%s): %s\n", mdc_status_name(st), mdc_last_error(ctx));
      rc = st == MDC_ERR_IO ? kRuntime : kUsage;
    }
  } else {
    mdc_status st = mdc_load_config_file(ctx, config.c_str());
    if (st == MDC_OK && seed) st = mdc_set_seed(ctx, seed);
    if (st == MDC_OK && samples) st = mdc_set_samples(ctx, samples);
    if (st == MDC_OK && threads) st = mdc_set_threads(ctx, threads);
    int passed = 0;
    const char* name = *certify ? "certify" : "verify";
    if (st == MDC_OK) st = *certify ? mdc_certify(ctx, &passed) : mdc_verify(ctx, &passed);
    rc = report(ctx, st, passed, name);
  }
  mdc_destroy(ctx);
  return rc;
}
