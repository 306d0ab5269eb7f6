#include "mdcert/holder.hpp"

#include <sstream>

namespace mdcert {

namespace {

void require_p(double p) {
  if (!(p > 1.0)) fail(ErrorCode::kInvalidArgument, "Hoelder exponent p must exceed 1");
}

void require_radius(const char* what, double arg, const QuadCert& c) {
  if (leq_slack(std::abs(arg), c.delta)) return;
  std::ostringstream os;
  os.precision(17);
  os << "lambda outside Hoelder window: " << what << " |" << arg << "| > delta=" << c.delta;
  fail(ErrorCode::kWindowViolation, os.str());
}

}  // namespace

HolderSplit optimal_holder(double A, double x) {
  if (!(A > 0)) fail(ErrorCode::kDegenerate, "degenerate coefficient: A must be positive");
  if (!(x > 0)) fail(ErrorCode::kInvalidArgument, "x must be positive");
  return {1.0 + x / A, 1.0 + A / x, (A + x) * (A + x)};
}

double halve_combine_value(const HalvingInputs& in, double lambda) {
  require_p(in.p);
  const double q = in.p / (in.p - 1.0);
  const double l2 = lambda * lambda;
  return in.half.a * in.p * l2 + in.C1 * q * l2 / (2.0 * in.r);
}

double halve_combine_window(const HalvingInputs& in) {
  require_p(in.p);
  double log_factor = 1.0;
  if (in.dim > 1) {
    if (!(in.cross_volume > 1.0)) {
      fail(ErrorCode::kInvalidArgument, "cross-section volume must exceed 1 for d >= 2");
    }
    log_factor = log_pow(in.cross_volume, in.dim - 1);
  }
  const double v = in.r * in.cross_volume;
  return (in.p - 1.0) / in.p * std::sqrt(2.0 * v) / log_factor / in.C1;
}

double halve_combine(const HalvingInputs& in, double lambda) {
  require_radius("p*lambda/sqrt(2)", in.p * lambda / std::sqrt(2.0), in.half);
  const double edge = halve_combine_window(in);
  if (!leq_slack(std::abs(lambda), edge)) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda outside Hoelder window: C1|lambda| <= ((p-1)/p) sqrt(2v) log^-(d-1) vol B"
       << " needs |lambda| <= " << edge << ", got " << std::abs(lambda);
    fail(ErrorCode::kWindowViolation, os.str());
  }
  return halve_combine_value(in, lambda);
}

double split_combine_upper(const QuadCert& b1, const QuadCert& b2, const QuadCert& leak,
                           const SplitInputs& in, double lambda) {
  require_p(in.p);
  const double total = in.r + in.s;
  const double x1 = in.p * lambda * std::sqrt(in.r / total);
  const double x2 = in.p * lambda * std::sqrt(in.s / total);
  const double xl = in.p / (in.p - 1.0) * lambda / std::sqrt(total);
  require_radius("p*lambda*sqrt(r/(r+s))", x1, b1);
  require_radius("p*lambda*sqrt(s/(r+s))", x2, b2);
  require_radius("(p/(p-1))*lambda/sqrt(r+s)", xl, leak);
  return b1.bound(x1) / in.p + b2.bound(x2) / in.p + (in.p - 1.0) / in.p * leak.bound(xl);
}

double split_combine_lower(const QuadCert& whole, const QuadCert& leak, const SplitInputs& in,
                           double lambda) {
  require_p(in.p);
  const double total = in.r + in.s;
  const double xw = in.p * lambda;
  const double xl = in.p / (in.p - 1.0) * lambda / std::sqrt(total);
  require_radius("p*lambda", xw, whole);
  require_radius("(p/(p-1))*lambda/sqrt(r+s)", xl, leak);
  return whole.bound(xw) / in.p + (in.p - 1.0) / in.p * leak.bound(xl);
}

}  // namespace mdcert
