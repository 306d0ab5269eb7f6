#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdcert/core.hpp"

namespace mdcert {

inline constexpr std::size_t kDefaultBatches = 64;

struct CgfEstimate {
  double lambda = 0.0;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;
  double confidence = 0.95;
};

// log of the sample mean of exp(lambda x) with a batched-means band on the
// log scale (Student t, batches - 1 degrees of freedom). The upper end is
// kept >= 0 because a centered CGF is nonnegative.
CgfEstimate empirical_cgf(std::span<const double> samples, double lambda,
                          double confidence = 0.95, std::size_t batches = kDefaultBatches);

// Law with an exact MGF: finitely many atoms plus uniform pieces.
class ExactDist {
 public:
  struct Atom {
    double value;
    double prob;
  };
  struct Uniform {
    double lo;
    double hi;
    double prob;
  };

  ExactDist() = default;
  ExactDist(std::vector<Atom> atoms, std::vector<Uniform> uniforms);

  static ExactDist point(double x) { return ExactDist({{x, 1.0}}, {}); }
  static ExactDist two_point(double a, double b, double p_a);  // a w.p. p_a, b otherwise
  static ExactDist uniform(double lo, double hi) { return ExactDist({}, {{lo, hi, 1.0}}); }
  // Mixture with the given weights (summing to 1).
  static ExactDist mixture(const std::vector<ExactDist>& parts, const std::vector<double>& w);

  ExactDist scaled(double s) const;
  double mean() const;
  double abs_exp_moment() const;  // E exp|Z|
  double log_mgf(double lambda) const;
  std::string describe() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Uniform> uniforms_;
};

struct SubgaussianMomentResult {
  bool passed = false;
  double worst_lambda = 0.0;
  double worst_slack = 0.0;  // min over grid of lambda^2 - log MGF(lambda)
  std::size_t points = 0;
};

// Throws kHypothesisFailed when E exp|Z| > 2 or E Z != 0 (tolerance 1e-12);
// a failed conclusion is reported through `passed`.
SubgaussianMomentResult subgaussian_moment_check(const ExactDist& dist, std::span<const double> lambda_grid,
                               double tolerance = 1e-12);

// Two-point laws and mixtures rescaled so that E exp|Z| = 2.
std::vector<ExactDist> subgaussian_family(int count, std::uint64_t seed = 1);

// lambda in [lo, hi] with the given step, endpoints included.
std::vector<double> lambda_grid(double lo, double hi, double step);

struct CurvePoint {
  double lambda;
  double upper;
};

// Smallest a with upper(lambda) <= a lambda^2 on the grid, times `safety`;
// delta is the grid radius.
QuadCert fit_quad_cert(std::span<const CurvePoint> curve, double safety = 1.0,
                       double anchor_tolerance = 1e-12);

}  // namespace mdcert
