#include <cmath>
#include <vector>

#include "doctest.h"
#include "mdcert/mgf.hpp"
#include "mdcert/rng.hpp"

using namespace mdcert;

namespace {

std::vector<double> normals(size_t n, std::uint64_t key) {
  CounterRng rng(key);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

std::vector<double> centered_exp(size_t n, std::uint64_t key) {
  CounterRng rng(key);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.exponential() - 1.0;
  return x;
}

}  // namespace

TEST_CASE("empirical CGF examples") {
  const auto x = normals(1000000, 42);
  const CgfEstimate e = empirical_cgf(x, 1.0);
  CHECK(e.point == doctest::Approx(0.5).epsilon(0.02));
  CHECK(e.lower <= 0.5);
  CHECK(0.5 <= e.upper);
  CHECK(e.lower <= e.point);
  CHECK(e.point <= e.upper);
  CHECK(e.samples == 1000000);

  const std::vector<double> zeros(1000, 0.0);
  const CgfEstimate z = empirical_cgf(zeros, 3.0);
  CHECK(z.point == 0.0);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  const auto y = centered_exp(1000000, 7);
  const double truth = -std::log(0.5) - 0.5;
  CHECK(std::abs(truth - 0.19315) < 1e-5);
  const CgfEstimate c = empirical_cgf(y, 0.5);
  CHECK(c.lower <= truth);
  CHECK(truth <= c.upper);

  try {
    empirical_cgf(std::vector<double>(100, 1.0), 1.0);
    FAIL("expected throw");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kInsufficientSamples);
    CHECK(std::string(err.what()) == "insufficient samples");
  }
  CHECK_THROWS_AS(empirical_cgf(x, 1.0, 0.4), Error);
}

TEST_CASE("large tilts use the shifted route without overflow") {
  const auto x = normals(100000, 9);
  const CgfEstimate e = empirical_cgf(x, 30.0);
  CHECK(std::isfinite(e.point));
  CHECK(std::isfinite(e.upper));
  const CgfEstimate f = empirical_cgf(x, 1e-6);
  CHECK(std::isfinite(f.point));
  CHECK(std::abs(f.point) < 1e-8);
}

TEST_CASE("band coverage on a Gaussian sample") {
  int covered = 0;
  for (int run = 0; run < 200; ++run) {
    const auto x = normals(20000, 1000 + run);
    const CgfEstimate e = empirical_cgf(x, 0.5);
    if (e.lower <= 0.125 && 0.125 <= e.upper) ++covered;
  }
  CHECK(covered >= 180);
}

TEST_CASE("band widens with the tilt on the exponential model") {
  const auto y = centered_exp(200000, 3);
  double prev = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const CgfEstimate e = empirical_cgf(y, 0.05 * i);
    const double width = e.upper - e.lower;
    CHECK(width >= prev);
    prev = width;
    CHECK(e.upper >= 0);
  }
  for (int i = -9; i <= 9; ++i) CHECK(empirical_cgf(y, 0.05 * i).upper >= 0);
}

TEST_CASE("subgaussian moment examples") {
  const double l2 = std::log(2.0);
  const auto grid = lambda_grid(-1, 1, 0.01);
  CHECK(grid.size() == 201);
  CHECK(grid.front() == -1.0);
  CHECK(grid.back() == 1.0);
  const ExactDist tp = ExactDist::two_point(l2, -l2, 0.5);
  CHECK(tp.abs_exp_moment() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(tp.log_mgf(1.0) == doctest::Approx(std::log(1.25)).epsilon(1e-14));
  CHECK(std::abs(tp.log_mgf(1.0) - 0.22314) < 1e-5);
  CHECK(subgaussian_moment_check(tp, grid).passed);
  CHECK(subgaussian_moment_check(ExactDist::point(0), grid).passed);
  try {
    subgaussian_moment_check(ExactDist::two_point(1, -1, 0.5), grid);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHypothesisFailed);
    CHECK(std::string(e.what()).find("hypothesis failed") == 0);
  }
  CHECK_THROWS_AS(subgaussian_moment_check(ExactDist::two_point(0.3, -0.1, 0.5), grid), Error);
}

TEST_CASE("uniform pieces") {
  const ExactDist u = ExactDist::uniform(-0.5, 0.5);
  CHECK(u.abs_exp_moment() == doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-15));
  CHECK(u.log_mgf(1.0) == doctest::Approx(std::log(std::sinh(0.5) / 0.5)).epsilon(1e-14));
  CHECK(u.log_mgf(0.0) == 0.0);
  const ExactDist right = ExactDist::uniform(0.5, 1.5);
  CHECK(right.abs_exp_moment() == doctest::Approx(std::exp(1.5) - std::exp(0.5)));
  CHECK(right.mean() == 1.0);
}

TEST_CASE("calibrated family") {
  const auto fam = subgaussian_family(50);
  CHECK(fam.size() == 50);
  const auto grid = lambda_grid(-1, 1, 0.01);
  for (const auto& d : fam) {
    CAPTURE(d.describe());
    CHECK(std::abs(d.abs_exp_moment() - 2.0) < 1e-12);
    CHECK(std::abs(d.mean()) < 1e-12);
    CHECK(subgaussian_moment_check(d, grid).passed);
  }
}

TEST_CASE("quadratic certificate fitting") {
  std::vector<CurvePoint> gauss, zero, expo;
  for (int i = -100; i <= 100; ++i) {
    const double l = i / 100.0;
    gauss.push_back({l, 0.5 * l * l});
    zero.push_back({l, 0.0});
    const double m = l / 2;
    expo.push_back({m, -std::log(1 - m) - m});
  }
  QuadCert q = fit_quad_cert(gauss);
  CHECK(q.a == 0.5);
  CHECK(q.delta == 1.0);
  CHECK(fit_quad_cert(zero).a == 0.0);
  q = fit_quad_cert(expo);
  CHECK(q.a == doctest::Approx((std::log(2.0) - 0.5) / 0.25).epsilon(1e-14));
  CHECK(std::abs(q.a - 0.77259) < 1e-5);
  CHECK(q.delta == 0.5);
  CHECK(fit_quad_cert(gauss, 1.5).a == 0.75);
  gauss[100].upper = 1e-6;
  try {
    fit_quad_cert(gauss);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotAnchored);
    CHECK(std::string(e.what()) == "curve not anchored at origin");
  }
}
