#include "mdcert/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mdcert/core.hpp"

namespace mdcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// log(sinh(x)/x)
double log_sinhc(double x) {
  const double a = std::abs(x);
  if (a < 1e-3) {
    const double a2 = a * a;
    return a2 / 6.0 - a2 * a2 / 180.0;
  }
  return a + std::log1p(-std::exp(-2.0 * a)) - std::numbers::ln2 - std::log(a);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

CellDist CellDist::from_name(const std::string& name, double param) {
  CellDist d;
  if (name == "gaussian") {
    d = gaussian(param);
  } else if (name == "exponential") {
    d = exponential(param);
  } else if (name == "two_point") {
    d = two_point(param);
  } else if (name == "uniform") {
    d = uniform(param);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown cell distribution '" + name + "'");
  }
  d.validate();
  return d;
}

std::string CellDist::name() const {
  std::string base;
  switch (kind) {
    case CellKind::kGaussian: base = "gaussian"; break;
    case CellKind::kExponential: base = "exponential"; break;
    case CellKind::kTwoPoint: base = "two_point"; break;
    case CellKind::kUniform: base = "uniform"; break;
  }
  return difference ? base + "_difference" : base;
}

void CellDist::validate() const {
  if (!(param > 0) || !std::isfinite(param)) {
    fail(ErrorCode::kInvalidArgument, "cell distribution parameter must be positive and finite");
  }
}

double CellDist::variance() const {
  double v = 0.0;
  switch (kind) {
    case CellKind::kGaussian: v = param * param; break;
    case CellKind::kExponential: v = 1.0 / (param * param); break;
    case CellKind::kTwoPoint: v = param * param; break;
    case CellKind::kUniform: v = param * param / 3.0; break;
  }
  return difference ? 2.0 * v : v;
}

double CellDist::mgf_radius() const {
  return kind == CellKind::kExponential ? param : kInf;
}

double CellDist::cgf(double mu) const {
  if (mu == 0.0) return 0.0;
  switch (kind) {
    case CellKind::kGaussian:
      return (difference ? 1.0 : 0.5) * param * param * mu * mu;
    case CellKind::kExponential: {
      const double x = mu / param;
      if (difference) return std::abs(x) < 1.0 ? -std::log1p(-x * x) : kInf;
      return x < 1.0 ? -x - std::log1p(-x) : kInf;
    }
    case CellKind::kTwoPoint:
      return (difference ? 2.0 : 1.0) * log_cosh(param * mu);
    case CellKind::kUniform:
      return (difference ? 2.0 : 1.0) * log_sinhc(param * mu);
  }
  return kInf;
}

double CellDist::cgf_ratio(double mu) const {
  const double mult = difference ? 2.0 : 1.0;
  switch (kind) {
    case CellKind::kGaussian:
      return 0.5 * variance();
    case CellKind::kExponential: {
      const double x = mu / param;
      const double r2 = 1.0 / (param * param);
      if (std::abs(x) >= 1e-4) return cgf(mu) / (mu * mu);
      if (difference) return r2 * (1.0 + x * x / 2.0);
      return r2 * (0.5 + x / 3.0 + x * x / 4.0 + x * x * x / 5.0);
    }
    case CellKind::kTwoPoint: {
      const double y = param * mu;
      if (std::abs(y) >= 1e-4) return cgf(mu) / (mu * mu);
      return mult * param * param * (0.5 - y * y / 12.0);
    }
    case CellKind::kUniform: {
      const double y = param * mu;
      if (std::abs(y) >= 1e-3) return cgf(mu) / (mu * mu);
      return mult * param * param * (1.0 / 6.0 - y * y / 180.0);
    }
  }
  return kInf;
}

double CellDist::abs_exp_moment(double eps) const {
  if (eps < 0) fail(ErrorCode::kInvalidArgument, "eps must be nonnegative");
  if (eps == 0.0) return 1.0;
  switch (kind) {
    case CellKind::kGaussian: {
      const double s = difference ? param * std::numbers::sqrt2 : param;
      return 2.0 * std::exp(0.5 * eps * eps * s * s) * normal_cdf(eps * s);
    }
    case CellKind::kExponential: {
      const double rho = param;
      if (eps >= rho) return kInf;
      if (difference) return rho / (rho - eps);
      const double m = 1.0 / rho;
      return rho * std::exp(eps * m) * (-std::expm1(-(rho + eps) * m)) / (rho + eps) +
             rho * std::exp(-1.0) / (rho - eps);
    }
    case CellKind::kTwoPoint: {
      const double x = eps * param;
      return difference ? 0.5 + 0.5 * std::exp(2.0 * x) : std::exp(x);
    }
    case CellKind::kUniform: {
      if (!difference) {
        const double x = eps * param;
        return std::expm1(x) / x;
      }
      const double x = 2.0 * eps * param;
      if (x < 1e-4) return 1.0 + x / 3.0 + x * x / 12.0;
      return 2.0 * (std::expm1(x) - x) / (x * x);
    }
  }
  return kInf;
}

double CellDist::cgf_ratio_sup(double m) const {
  // Each family has cgf(mu)/mu^2 either maximal at mu -> 0 (symmetric
  // bounded and Gaussian laws) or monotone in mu on each side of 0
  // (exponential laws), so the endpoints and the limit cover the supremum.
  if (!(m > 0)) return 0.5 * variance();
  if (m >= mgf_radius()) return kInf;
  const double m2 = m * m;
  return std::max({0.5 * variance(), cgf(m) / m2, cgf(-m) / m2});
}

double CellDist::sample(CounterRng& rng) const {
  auto one = [&]() -> double {
    switch (kind) {
      case CellKind::kGaussian: return param * rng.normal();
      case CellKind::kExponential: return (rng.exponential() - 1.0) / param;
      case CellKind::kTwoPoint: return rng.uniform() < 0.5 ? param : -param;
      case CellKind::kUniform: return param * (2.0 * rng.uniform() - 1.0);
    }
    return 0.0;
  };
  if (!difference) return one();
  const double a = one();
  return a - one();
}

double solve_eps(const CellDist& dist) {
  dist.validate();
  double lo = 0.0;
  double hi = std::min(1.0 / std::sqrt(dist.variance()), 0.5 * dist.mgf_radius());
  while (dist.abs_exp_moment(hi) <= 2.0) {
    lo = hi;
    hi = std::isfinite(dist.mgf_radius()) ? 0.5 * (hi + dist.mgf_radius()) : 2.0 * hi;
    if (hi - lo < 1e-300) break;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dist.abs_exp_moment(mid) <= 2.0 ? lo : hi) = mid;
  }
  return round_down(lo);
}

double quadratic_cgf_constant(const CellDist& dist) {
  dist.validate();
  auto ok = [&](double c) { return dist.cgf_ratio_sup(1.0 / c) <= c; };
  if (ok(1.0)) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) fail(ErrorCode::kSearchCap, "quadratic CGF constant search diverged");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return round_up(hi);
}

}  // namespace mdcert
