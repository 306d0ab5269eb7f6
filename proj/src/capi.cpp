#include "mdcert/mdcert.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "mdcert/cascade.hpp"
#include "mdcert/chain.hpp"
#include "mdcert/holder.hpp"
#include "mdcert/run.hpp"

struct mdc_context {
  std::optional<mdcert::Json> config;
  mdcert::RunOptions options;
  std::optional<mdcert::RunOutcome> last;
  std::string error;
};

namespace {

mdc_status to_status(mdcert::ErrorCode c) {
  const int v = static_cast<int>(c);
  return v >= 1 && v <= 10 ? static_cast<mdc_status>(v) : MDC_ERR_INTERNAL;
}

template <class F>
mdc_status guarded(mdc_context* ctx, F&& f) {
  if (!ctx) return MDC_ERR_NULL_HANDLE;
  try {
    f();
    ctx->error.clear();
    return MDC_OK;
  } catch (const mdcert::Error& e) {
    ctx->error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    ctx->error = "out of memory";
  } catch (const std::exception& e) {
    ctx->error = e.what();
  } catch (...) {
    ctx->error = "unknown error";
  }
  return MDC_ERR_INTERNAL;
}

template <class F>
mdc_status stateless(F&& f) {
  try {
    f();
    return MDC_OK;
  } catch (const mdcert::Error& e) {
    return to_status(e.code());
  } catch (...) {
    return MDC_ERR_INTERNAL;
  }
}

const mdcert::Json& require_config(const mdc_context* ctx) {
  if (!ctx->config) throw mdcert::Error(mdcert::ErrorCode::kInvalidArgument, "no config loaded");
  return *ctx->config;
}

}  // namespace

extern "C" {

const char* mdc_version(void) { return "1.0.0"; }

const char* mdc_status_name(mdc_status s) {
  switch (s) {
    case MDC_OK: return "ok";
    case MDC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDC_ERR_DEGENERATE: return "degenerate";
    case MDC_ERR_WINDOW_VIOLATION: return "window violation";
    case MDC_ERR_CHECK_FAILED: return "check failed";
    case MDC_ERR_HYPOTHESIS_FAILED: return "hypothesis failed";
    case MDC_ERR_INSUFFICIENT_SAMPLES: return "insufficient samples";
    case MDC_ERR_NOT_ANCHORED: return "not anchored";
    case MDC_ERR_SEARCH_CAP: return "search cap";
    case MDC_ERR_UNSUPPORTED: return "unsupported";
    case MDC_ERR_IO: return "io";
    case MDC_ERR_NULL_HANDLE: return "null handle";
    case MDC_ERR_NO_CONFIG: return "no config";
    case MDC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

mdc_context* mdc_create(void) { return new (std::nothrow) mdc_context(); }

void mdc_destroy(mdc_context* ctx) { delete ctx; }

const char* mdc_last_error(const mdc_context* ctx) {
  return ctx ? ctx->error.c_str() : "null handle";
}

mdc_status mdc_load_config_file(mdc_context* ctx, const char* path) {
  return guarded(ctx, [&] {
    if (!path) throw mdcert::Error(mdcert::ErrorCode::kInvalidArgument, "null path");
    ctx->config = mdcert::load_config_file(path);
  });
}

mdc_status mdc_load_config_string(mdc_context* ctx, const char* json) {
  return guarded(ctx, [&] {
    if (!json) throw mdcert::Error(mdcert::ErrorCode::kInvalidArgument, "null config text");
    ctx->config = mdcert::parse_config(json);
  });
}

mdc_status mdc_set_seed(mdc_context* ctx, uint64_t seed) {
  return guarded(ctx, [&] { ctx->options.seed = seed; });
}

mdc_status mdc_set_samples(mdc_context* ctx, uint64_t samples) {
  return guarded(ctx, [&] { ctx->options.samples = static_cast<std::size_t>(samples); });
}

mdc_status mdc_set_threads(mdc_context* ctx, int threads) {
  return guarded(ctx, [&] {
    if (threads < 1) throw mdcert::Error(mdcert::ErrorCode::kInvalidArgument, "threads must be >= 1");
    ctx->options.threads = threads;
  });
}

mdc_status mdc_set_out_dir(mdc_context* ctx, const char* dir) {
  return guarded(ctx, [&] { ctx->options.out_dir = dir ? dir : ""; });
}

mdc_status mdc_certify(mdc_context* ctx, int* passed) {
  if (ctx && !ctx->config) {
    ctx->error = "no config loaded";
    return MDC_ERR_NO_CONFIG;
  }
  return guarded(ctx, [&] {
    ctx->last.reset();
    ctx->last = mdcert::cmd_certify(require_config(ctx), ctx->options);
    if (passed) *passed = ctx->last->passed ? 1 : 0;
  });
}

mdc_status mdc_verify(mdc_context* ctx, int* passed) {
  if (ctx && !ctx->config) {
    ctx->error = "no config loaded";
    return MDC_ERR_NO_CONFIG;
  }
  return guarded(ctx, [&] {
    ctx->last.reset();
    ctx->last = mdcert::cmd_verify(require_config(ctx), ctx->options);
    if (passed) *passed = ctx->last->passed ? 1 : 0;
  });
}

mdc_status mdc_plotdata(mdc_context* ctx, const char* run_dir) {
  return guarded(ctx, [&] {
    ctx->last.reset();
    ctx->last = mdcert::cmd_plotdata(run_dir ? run_dir : "", ctx->options.out_dir);
  });
}

mdc_status mdc_result_json(const mdc_context* ctx, char** out) {
  if (!ctx) return MDC_ERR_NULL_HANDLE;
  if (!out || !ctx->last) return MDC_ERR_INVALID_ARGUMENT;
  const std::string s = ctx->last->result.dump(2);
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) return MDC_ERR_INTERNAL;
  std::memcpy(buf, s.c_str(), s.size() + 1);
  *out = buf;
  return MDC_OK;
}

mdc_status mdc_report_counts(const mdc_context* ctx, size_t* rows, size_t* failures,
                             size_t* refused) {
  if (!ctx) return MDC_ERR_NULL_HANDLE;
  if (!ctx->last) return MDC_ERR_INVALID_ARGUMENT;
  const auto& r = ctx->last->report;
  if (rows) *rows = r.rows.size();
  if (failures) *failures = r.failures();
  if (refused) *refused = r.refused;
  return MDC_OK;
}

mdc_status mdc_log2_c_final(const mdc_context* ctx, double* out) {
  if (!ctx) return MDC_ERR_NULL_HANDLE;
  if (!out || !ctx->last || !ctx->last->certification) return MDC_ERR_INVALID_ARGUMENT;
  *out = ctx->last->certification->theorem.log2_C_final;
  return MDC_OK;
}

void mdc_string_free(char* s) { std::free(s); }

mdc_status mdc_cascade_threshold(double C1, int dim, double* out) {
  if (!out) return MDC_ERR_INVALID_ARGUMENT;
  return stateless([&] { *out = mdcert::cascade_threshold(C1, dim); });
}

mdc_status mdc_theorem_log2_constant(double C1, double C2, int dim, double Md, double* log2_C,
                                     double* log2_C_final) {
  if (!log2_C || !log2_C_final) return MDC_ERR_INVALID_ARGUMENT;
  return stateless([&] {
    const auto t = mdcert::theorem_constant(C1, C2, dim, Md);
    *log2_C = t.log2_C;
    *log2_C_final = t.log2_C_final;
  });
}

mdc_status mdc_optimal_holder(double A, double x, double* p, double* q, double* value) {
  if (!p || !q || !value) return MDC_ERR_INVALID_ARGUMENT;
  return stateless([&] {
    const auto h = mdcert::optimal_holder(A, x);
    *p = h.p;
    *q = h.q;
    *value = h.min_value;
  });
}

}  // extern "C"
