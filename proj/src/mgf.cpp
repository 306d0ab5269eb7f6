#include "mdcert/mgf.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace mdcert {

namespace {

double log_sum_exp(const std::vector<double>& terms) {
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// expm1(x)/x, equal to 1 at 0.
double expm1_ratio(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

}  // namespace

CgfEstimate empirical_cgf(std::span<const double> samples, double lambda, double confidence,
                          std::size_t batches) {
  if (!(confidence > 0.5 && confidence < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "confidence level must lie in (0.5, 1)");
  }
  if (batches < 2) fail(ErrorCode::kInvalidArgument, "need at least 2 batches");
  const std::size_t n = samples.size();
  if (n == 0 || n < 2 * batches) fail(ErrorCode::kInsufficientSamples, "insufficient samples");

  double max_abs = 0.0, shift = -std::numeric_limits<double>::infinity();
  for (double x : samples) {
    max_abs = std::max(max_abs, std::abs(lambda * x));
    shift = std::max(shift, lambda * x);
  }
  // Small tilts: average expm1 for accuracy; otherwise shift by the maximum.
  const bool small = max_abs <= 1.0;
  auto term = [&](double x) { return small ? std::expm1(lambda * x) : std::exp(lambda * x - shift); };

  std::vector<double> batch_mean(batches, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = n * b / batches, hi = n * (b + 1) / batches;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(samples[i]);
    total += s;
    batch_mean[b] = s / static_cast<double>(hi - lo);
  }
  const double mean = total / static_cast<double>(n);
  double var = 0.0;
  for (double m : batch_mean) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  const double se = std::sqrt(var / static_cast<double>(batches));

  // Both routes estimate E exp(lambda x) = level * exp(offset).
  const double level = small ? 1.0 + mean : mean;
  const double point = small ? std::log1p(mean) : shift + std::log(mean);
  const boost::math::students_t_distribution<double> t(static_cast<double>(batches - 1));
  const double q = boost::math::quantile(t, 0.5 + 0.5 * confidence);
  const double half = q * se / level;

  CgfEstimate e;
  e.lambda = lambda;
  e.point = point;
  e.lower = point - half;
  e.upper = std::max(point + half, 0.0);
  e.samples = n;
  e.confidence = confidence;
  return e;
}

ExactDist::ExactDist(std::vector<Atom> atoms, std::vector<Uniform> uniforms)
    : atoms_(std::move(atoms)), uniforms_(std::move(uniforms)) {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.prob >= 0) || !std::isfinite(a.value)) fail(ErrorCode::kInvalidArgument, "bad atom");
    total += a.prob;
  }
  for (const auto& u : uniforms_) {
    if (!(u.prob >= 0) || !(u.lo < u.hi)) fail(ErrorCode::kInvalidArgument, "bad uniform piece");
    total += u.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kInvalidArgument, "probabilities must sum to 1");
  }
}

ExactDist ExactDist::two_point(double a, double b, double p_a) {
  return ExactDist({{a, p_a}, {b, 1.0 - p_a}}, {});
}

ExactDist ExactDist::mixture(const std::vector<ExactDist>& parts, const std::vector<double>& w) {
  if (parts.size() != w.size() || parts.empty()) {
    fail(ErrorCode::kInvalidArgument, "mixture needs one weight per part");
  }
  std::vector<Atom> atoms;
  std::vector<Uniform> unis;
  for (size_t i = 0; i < parts.size(); ++i) {
    for (auto a : parts[i].atoms_) atoms.push_back({a.value, a.prob * w[i]});
    for (auto u : parts[i].uniforms_) unis.push_back({u.lo, u.hi, u.prob * w[i]});
  }
  return ExactDist(std::move(atoms), std::move(unis));
}

ExactDist ExactDist::scaled(double s) const {
  if (!(s > 0)) fail(ErrorCode::kInvalidArgument, "scale must be positive");
  ExactDist out = *this;
  for (auto& a : out.atoms_) a.value *= s;
  for (auto& u : out.uniforms_) u.lo *= s, u.hi *= s;
  return out;
}

double ExactDist::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * a.value;
  for (const auto& u : uniforms_) m += u.prob * 0.5 * (u.lo + u.hi);
  return m;
}

double ExactDist::abs_exp_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.prob * std::exp(std::abs(a.value));
  for (const auto& u : uniforms_) {
    const double L = u.hi - u.lo;
    double integral;
    if (u.lo >= 0) {
      integral = std::exp(u.hi) - std::exp(u.lo);
    } else if (u.hi <= 0) {
      integral = std::exp(-u.lo) - std::exp(-u.hi);
    } else {
      integral = std::expm1(-u.lo) + std::expm1(u.hi);
    }
    s += u.prob * integral / L;
  }
  return s;
}

double ExactDist::log_mgf(double lambda) const {
  std::vector<double> terms;
  for (const auto& a : atoms_) {
    if (a.prob > 0) terms.push_back(std::log(a.prob) + lambda * a.value);
  }
  for (const auto& u : uniforms_) {
    if (u.prob > 0) {
      terms.push_back(std::log(u.prob) + lambda * u.lo +
                      std::log(expm1_ratio(lambda * (u.hi - u.lo))));
    }
  }
  return log_sum_exp(terms);
}

std::string ExactDist::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << "atoms{";
  for (size_t i = 0; i < atoms_.size(); ++i) {
    os << (i ? "," : "") << atoms_[i].value << ":" << atoms_[i].prob;
  }
  os << "} uniforms{";
  for (size_t i = 0; i < uniforms_.size(); ++i) {
    os << (i ? "," : "") << "[" << uniforms_[i].lo << "," << uniforms_[i].hi
       << "]:" << uniforms_[i].prob;
  }
  os << "}";
  return os.str();
}

SubgaussianMomentResult subgaussian_moment_check(const ExactDist& dist, std::span<const double> lambda_grid,
                               double tolerance) {
  const double moment = dist.abs_exp_moment();
  const double mean = dist.mean();
  if (!(moment <= 2.0 + tolerance) || std::abs(mean) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "hypothesis failed: E exp|Z| = " << moment << " (needs <= 2), E Z = " << mean
       << " (needs 0)";
    fail(ErrorCode::kHypothesisFailed, os.str());
  }
  SubgaussianMomentResult r;
  r.passed = true;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (double lam : lambda_grid) {
    if (std::abs(lam) > 1.0) {
      fail(ErrorCode::kWindowViolation, "lambda outside [-1, 1]");
    }
    const double slack = lam * lam - dist.log_mgf(lam);
    if (slack < r.worst_slack) {
      r.worst_slack = slack;
      r.worst_lambda = lam;
    }
    if (slack < -tolerance) r.passed = false;
    ++r.points;
  }
  return r;
}

std::vector<ExactDist> subgaussian_family(int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ExactDist> out;
  auto calibrate = [](const ExactDist& base) {
    double lo = 0.0, hi = 1.0;
    while (base.scaled(hi).abs_exp_moment() <= 2.0) lo = hi, hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (base.scaled(mid).abs_exp_moment() <= 2.0 ? lo : hi) = mid;
    }
    return base.scaled(lo);
  };
  auto centered_pair = [&]() {
    const double p = 0.05 + 0.9 * u(gen);
    return ExactDist::two_point(1.0, -p / (1.0 - p), p);
  };
  for (int i = 0; i < count; ++i) {
    ExactDist base;
    switch (i % 3) {
      case 0:
        base = centered_pair();
        break;
      case 1: {
        const int k = 2 + static_cast<int>(3 * u(gen));
        std::vector<ExactDist> parts;
        std::vector<double> w;
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
          parts.push_back(centered_pair().scaled(0.2 + 2.0 * u(gen)));
          w.push_back(0.1 + u(gen));
          total += w.back();
        }
        for (auto& x : w) x /= total;
        base = ExactDist::mixture(parts, w);
        break;
      }
      default: {
        const double h = 0.2 + u(gen);
        const double wu = 0.1 + 0.8 * u(gen);
        base = ExactDist::mixture({ExactDist::uniform(-h, h), centered_pair()}, {wu, 1.0 - wu});
        break;
      }
    }
    out.push_back(calibrate(base));
  }
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(lo <= hi)) fail(ErrorCode::kInvalidArgument, "bad lambda grid");
  const auto n = static_cast<long long>(std::llround((hi - lo) / step));
  std::vector<double> out;
  for (long long i = 0; i <= n; ++i) out.push_back(i == n ? hi : lo + static_cast<double>(i) * step);
  return out;
}

QuadCert fit_quad_cert(std::span<const CurvePoint> curve, double safety,
                       double anchor_tolerance) {
  if (curve.empty()) fail(ErrorCode::kInvalidArgument, "empty curve");
  if (!(safety >= 1.0)) fail(ErrorCode::kInvalidArgument, "safety factor must be >= 1");
  double a = 0.0, lo = 0.0, hi = 0.0;
  for (const auto& c : curve) {
    lo = std::min(lo, c.lambda);
    hi = std::max(hi, c.lambda);
    if (c.lambda == 0.0) {
      if (c.upper > anchor_tolerance) {
        fail(ErrorCode::kNotAnchored, "curve not anchored at origin");
      }
      continue;
    }
    a = std::max(a, c.upper / (c.lambda * c.lambda));
  }
  const double radius = std::min(hi, -lo) > 0 ? std::min(hi, -lo) : std::max(hi, -lo);
  return {a * safety, radius};
}

}  // namespace mdcert
