#include "mdcert/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mdcert {

namespace {

[[noreturn]] void chain_fail(ChainFailure f, const std::string& detail) {
  std::ostringstream os;
  os << chain_failure_name(f) << ": " << detail;
  throw ChainError(f, os.str());
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

const char* chain_failure_name(ChainFailure f) {
  switch (f) {
    case ChainFailure::kBadInput: return "invalid chain input";
    case ChainFailure::kMdTooSmall: return "Md hypothesis failed (Md < 2(2d)^(d-1))";
    case ChainFailure::kWindow: return "lambda outside the large-lambda window";
    case ChainFailure::kDepth: return "chain depth check failed (n < 1)";
    case ChainFailure::kLength: return "chain length check failed (n log^(d-1) v too large)";
    case ChainFailure::kNonPositive: return "chain denominator not positive";
    case ChainFailure::kEndpointGrowth: return "endpoint bound failed (2^(n/2)|lambda_0| > 2|lambda|)";
    case ChainFailure::kBaseWindow: return "base window check failed (lambda_0 outside moderate window)";
    case ChainFailure::kBaseVolume: return "base volume check failed (2 v_0 < (2 C2)^d)";
  }
  return "unknown chain failure";
}

ChainError::ChainError(ChainFailure failure, const std::string& what)
    : Error(failure == ChainFailure::kWindow ? ErrorCode::kWindowViolation
                                            : ErrorCode::kCheckFailed,
            what),
      failure_(failure) {}

double default_Md(int dim) { return 2.0 * std::pow(2.0 * dim, dim - 1); }

LambdaChain build_lambda_chain(const ChainParams& in) {
  const int d = in.dim;
  if (d < 1 || !(in.v > 0) || in.lambda == 0.0 || !(in.C > 0) || !(in.C1 > 0) || !(in.C2 > 0)) {
    chain_fail(ChainFailure::kBadInput, "need d >= 1, v > 0, lambda != 0, C, C1, C2 > 0");
  }
  if (!(in.Md >= default_Md(d))) {
    chain_fail(ChainFailure::kMdTooSmall, "Md=" + num(in.Md) + " < " + num(default_Md(d)));
  }
  if (!(in.C >= std::numbers::e)) chain_fail(ChainFailure::kDepth, "C must be >= e");
  if (!(in.v >= std::pow(in.C, d))) chain_fail(ChainFailure::kWindow, "v < C^d");

  const Scaling sc(d);
  const double y = in.C * std::abs(in.lambda);
  const double lower = std::sqrt(sc.S(in.v)) / log_pow(in.v, d - 1);
  const double upper = std::sqrt(in.v) / log_pow(in.v, d);
  if (!(lower < y && y <= upper)) {
    chain_fail(ChainFailure::kWindow, "C|lambda|=" + num(y) + " not in (" + num(lower) + ", " +
                                          num(upper) + "]");
  }

  LambdaChain ch;
  ch.params = in;
  const double L = std::log(std::sqrt(in.v) / y);
  const double log2_target = 2.0 * d * std::log2(in.Md) + 2.0 * d * std::log2(y) -
                             (d - 1) * std::log2(in.v) +
                             (d > 1 ? 2.0 * d * (d - 1) * std::log2(L) : 0.0);
  ch.depth_target = std::exp2(log2_target);
  int n = static_cast<int>(std::ceil(log2_target));
  // Pin n to 2^(n-1) < target <= 2^n against rounding of the ceiling.
  while (log2_target > n) ++n;
  while (log2_target <= n - 1) --n;
  ch.n = n;
  if (n < 1) chain_fail(ChainFailure::kDepth, "n=" + std::to_string(n));

  const double lhs_len = n * log_pow(in.v, d - 1);
  const double rhs_len = std::sqrt(in.v) / (2.0 * in.C1 * std::abs(in.lambda));
  if (!(lhs_len <= rhs_len)) {
    chain_fail(ChainFailure::kLength, num(lhs_len) + " > " + num(rhs_len));
  }

  ch.volumes.resize(static_cast<size_t>(n) + 1);
  ch.tilts.resize(static_cast<size_t>(n) + 1);
  ch.denominators.resize(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) ch.volumes[k] = std::ldexp(in.v, k - n);

  const double sign = in.lambda > 0 ? 1.0 : -1.0;
  const double coef = in.C1 / std::sqrt(in.v);
  double partial = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) partial += log_pow(sc.S(std::ldexp(in.v, -(k - 1))), d - 1);
    const double denom = 1.0 / std::abs(in.lambda) - coef * partial;
    ch.denominators[k] = denom;
    if (!(denom > 0)) chain_fail(ChainFailure::kNonPositive, "k=" + std::to_string(k));
    ch.tilts[n - k] = sign / (std::pow(2.0, 0.5 * k) * denom);
  }
  ch.tilts[n] = in.lambda;

  for (int k = 0; k < n; ++k) {
    const double lhs = std::sqrt(2.0) / std::abs(ch.tilts[k + 1]) - 1.0 / std::abs(ch.tilts[k]);
    const double rhs = in.C1 / std::sqrt(ch.volumes[k]) * log_pow(sc.S(2.0 * ch.volumes[k]), d - 1);
    ch.max_residual = std::max(ch.max_residual, std::abs(lhs - rhs));
  }

  const double grown = std::pow(2.0, 0.5 * n) * std::abs(ch.tilts[0]);
  if (!leq_slack(grown, 2.0 * std::abs(in.lambda))) {
    chain_fail(ChainFailure::kEndpointGrowth, num(grown) + " > " + num(2.0 * std::abs(in.lambda)));
  }
  const double v0 = ch.volumes[0];
  const double base_edge = std::sqrt(sc.S(v0)) / log_pow(v0, d - 1);
  if (!(d == 1 || v0 > 1.0) || !leq_slack(in.C * std::abs(ch.tilts[0]), base_edge)) {
    chain_fail(ChainFailure::kBaseWindow,
               "C|lambda_0|=" + num(in.C * std::abs(ch.tilts[0])) + " > " + num(base_edge));
  }
  if (!(2.0 * v0 >= std::pow(2.0 * in.C2, d))) {
    chain_fail(ChainFailure::kBaseVolume, "2v_0=" + num(2.0 * v0));
  }

  ch.phi_increment_sum = phi_chain_bound(ch, 0.0);
  return ch;
}

double phi_step_bound(double phi, double v, int dim) {
  const Scaling sc(dim);
  return phi + 1.0 / (sc.R(2.0 * v) * log_pow(sc.S(2.0 * v), dim - 1));
}

double phi_chain_bound(const LambdaChain& chain, double phi0_bound) {
  double phi = phi0_bound;
  for (int k = 0; k < chain.n; ++k) phi = phi_step_bound(phi, chain.volumes[k], chain.params.dim);
  return phi;
}

NdFactors explicit_Nd_factors(int dim, double Md) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  const int d = dim;
  NdFactors f{};
  // 2 v_0 >= (2 C2)^d >= 2^d gives log S(2 v_0) >= (d-1) log 2.
  f.log_factor = d == 1 ? 1.0 : std::pow((d - 1) * std::numbers::ln2, -(d - 1));
  f.geometric = 1.0 / (std::pow(2.0, 1.0 / d) - 1.0);
  f.growth = std::pow(2.0, 1.0 / d) * Md * Md;
  f.sup_factor = d == 1 ? 1.0 : std::pow((2.0 * d - 2.0) / std::numbers::e, 2 * d - 2);
  f.Nd = f.log_factor * f.geometric * f.growth * f.sup_factor;
  return f;
}

double explicit_Nd(int dim, double Md) { return explicit_Nd_factors(dim, Md).Nd; }

double TheoremConstant::value() const {
  if (C_final > static_cast<long double>(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(C_final);
}

std::vector<NamedCheck> theorem_candidate_checks(double log2_candidate, double C1, double C2,
                                                 int dim, double Md) {
  const int d = dim;
  using LD = long double;
  const LD ln2 = std::numbers::ln2_v<long double>;
  const LD C = std::exp2(static_cast<LD>(log2_candidate));
  const LD lc = static_cast<LD>(log2_candidate) * ln2;
  std::vector<NamedCheck> out;

  out.push_back(make_check("C >= max(C2, e^(1/d), e)",
                           std::max({C2, std::exp(1.0 / d), std::numbers::e}),
                           static_cast<double>(std::min<LD>(C, 1e300L))));
  out.push_back(make_check("Md >= 2(2d)^(d-1)", default_Md(d), Md));

  // Chain length: n <= (C / (2 C1)) log v for every v >= C^d, via
  // 2^n <= 2 Md^(2d) v (kappa log v)^(2d(d-1)).
  const LD kappa = 1.0L / (2.0L * d) + static_cast<LD>(d - 1) / std::numbers::e_v<long double>;
  const LD beta = C / (2.0L * C1) - 1.0L / ln2;
  const LD u0 = d * lc;
  const LD log_term = d > 1 ? 2.0L * d * (d - 1) * std::log2(kappa * u0) : 0.0L;
  const LD need = 1.0L + 2.0L * d * std::log2(static_cast<LD>(Md)) + log_term;
  const LD have = beta * u0;
  out.push_back(make_check("chain length: n <= sqrt(v)/(2 C1 |lambda|) log^-(d-1) v at v = C^d",
                           static_cast<double>(need),
                           static_cast<double>(std::min<LD>(have, 1e300L))));
  const LD slope_need = d > 1 ? 2.0L * d * (d - 1) / (u0 * ln2) : 0.0L;
  out.push_back(make_check("chain length: nondecreasing margin beyond v = C^d",
                           static_cast<double>(slope_need),
                           static_cast<double>(std::min<LD>(beta, 1e300L))));

  // Base volume: x / log^(d-1) x >= Md sqrt(2 C2) for x >= (d log C)^d.
  const LD x0 = std::pow(d * lc, static_cast<LD>(d));
  const LD lx0 = std::log(x0);
  out.push_back(make_check("base volume: (d log C)^d in monotone range x >= e^(d-1)",
                           static_cast<double>(d - 1), static_cast<double>(lx0)));
  const LD phi = d > 1 ? x0 / std::pow(lx0, static_cast<LD>(d - 1)) : x0;
  out.push_back(make_check("base volume: x/log^(d-1) x >= Md sqrt(2 C2)",
                           Md * std::sqrt(2.0 * C2),
                           static_cast<double>(std::min<LD>(phi, 1e300L))));
  return out;
}

TheoremConstant theorem_constant(double C1, double C2, int dim, double Md, int log2_cap) {
  if (dim < 1 || !(C1 > 0) || !(C2 > 1)) {
    fail(ErrorCode::kInvalidArgument, "theorem constant needs d >= 1, C1 > 0, C2 > 1");
  }
  if (Md <= 0) Md = default_Md(dim);
  TheoremConstant t;
  t.dim = dim;
  t.C1 = C1;
  t.C2 = C2;
  t.Md = Md;
  t.Nd = explicit_Nd(dim, Md);

  const double start = std::max({C2, std::exp(1.0 / dim), std::numbers::e});
  int k = static_cast<int>(std::ceil(std::log2(start)));
  for (; k <= log2_cap; ++k) {
    ++t.iterations;
    auto checks = theorem_candidate_checks(k, C1, C2, dim, Md);
    if (std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.passed; })) {
      t.checks = std::move(checks);
      t.C = std::exp2(static_cast<long double>(k));
      t.log2_C = k;
      const long double combined = 2.0L * C2 + static_cast<long double>(t.Nd) * t.C;
      t.C_final = std::max(t.C, combined);
      t.log2_C_final = static_cast<double>(std::log2(t.C_final));
      return t;
    }
  }
  fail(ErrorCode::kSearchCap, "no certified C below cap 2^" + std::to_string(log2_cap));
}

}  // namespace mdcert
