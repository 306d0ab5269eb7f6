#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mdcert/chain.hpp"

using namespace mdcert;

namespace {

ChainParams pinned() {
  ChainParams p;
  p.dim = 1;
  p.v = 4096;
  p.C = 34;
  p.C1 = 1;
  p.C2 = 34;
  p.Md = 2;
  p.lambda = 4.0 / 34.0;
  return p;
}

// Independent recursion: lambda_{k} from lambda_{k+1} via
// 1/|lambda_k| = sqrt2/|lambda_{k+1}| - (C1/sqrt v_k) log^(d-1) S(2 v_k).
std::vector<double> backward_tilts(const ChainParams& p, int n) {
  std::vector<double> out(n + 1);
  out[n] = std::abs(p.lambda);
  for (int k = n - 1; k >= 0; --k) {
    const double vk = p.v * std::pow(2.0, k - n);
    const double s2 = std::pow(2 * vk, (p.dim - 1.0) / p.dim);
    const double lg = p.dim == 1 ? 1.0 : std::pow(std::log(s2), p.dim - 1);
    out[k] = 1.0 / (std::sqrt(2.0) / out[k + 1] - p.C1 / std::sqrt(vk) * lg);
  }
  return out;
}

}  // namespace

TEST_CASE("pinned d=1 chain") {
  const LambdaChain ch = build_lambda_chain(pinned());
  CHECK(ch.n == 6);
  CHECK(ch.volumes.front() == 64.0);
  CHECK(ch.volumes.back() == 4096.0);
  const double lambda0 = 1.0 / (8.0 * (8.5 - 6.0 / 64.0));
  CHECK(ch.tilts[0] == doctest::Approx(lambda0).epsilon(1e-13));
  CHECK(std::abs(ch.tilts[0] - 0.0148699) < 1e-7);
  CHECK(8.0 * ch.tilts[0] <= 2.0 * (4.0 / 34.0));
  CHECK(std::abs(ch.phi_increment_sum - 63.0 / 4096.0) < 1e-9);
  CHECK(2.0 * ch.volumes[0] >= 2.0 * 64.0);
  const auto oracle = backward_tilts(pinned(), 6);
  for (int k = 0; k <= 6; ++k) CHECK(ch.tilts[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
}

TEST_CASE("depth bracketing example: Md=2, C|lambda|=4") {
  // Md^2 (C|l|)^2 = 64 and 2^5 < 64 <= 2^6.
  const LambdaChain ch = build_lambda_chain(pinned());
  CHECK(ch.depth_target == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(std::exp2(ch.n - 1) < 64.0);
  CHECK(64.0 <= std::exp2(ch.n));
}

TEST_CASE("phi chain bound") {
  const LambdaChain ch = build_lambda_chain(pinned());
  CHECK(phi_chain_bound(ch, 0.25) == 0.25 + ch.phi_increment_sum);
  double phi = 0.1;
  for (int k = 0; k < ch.n; ++k) phi = phi_step_bound(phi, ch.volumes[k], 1);
  CHECK(phi == phi_chain_bound(ch, 0.1));
  LambdaChain empty;
  empty.params.dim = 1;
  CHECK(phi_chain_bound(empty, 0.7) == 0.7);
  const double inc = phi_step_bound(0.0, 2048.0, 2);
  CHECK(inc == doctest::Approx(1.0 / (64.0 * std::log(64.0))).epsilon(1e-14));
  CHECK(std::abs(inc - 0.0037570183) < 1e-10);
}

TEST_CASE("chain invariants on a grid of windowed tuples") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1);
  int built = 0;
  for (int i = 0; i < 200; ++i) {
    ChainParams p;
    p.dim = 1 + i % 2;
    p.C1 = 3;
    p.C2 = 4;
    p.C = p.dim == 1 ? 32.0 * (1 + 3 * u(gen)) : 64.0 * (1 + 3 * u(gen));
    p.Md = default_Md(p.dim);
    p.v = std::exp2(36.0 + 24.0 * u(gen));
    const double d = p.dim;
    const double lo = std::sqrt(std::pow(p.v, (d - 1) / d)) / std::pow(std::log(p.v), d - 1);
    const double hi = std::sqrt(p.v) / std::pow(std::log(p.v), d);
    REQUIRE(lo < hi);
    const double y = lo + (hi - lo) * (0.001 + 0.999 * u(gen));
    p.lambda = (i % 4 < 2 ? 1.0 : -1.0) * y / p.C;
    const LambdaChain ch = build_lambda_chain(p);
    ++built;
    const double target = std::pow(p.Md, 2 * d) * std::pow(y, 2 * d) / std::pow(p.v, d - 1) *
                          std::pow(std::log(std::sqrt(p.v) / y), 2 * d * (d - 1));
    CHECK(std::exp2(ch.n - 1) < target * (1 + 1e-12));
    CHECK(target <= std::exp2(ch.n) * (1 + 1e-12));
    for (double den : ch.denominators) CHECK(den > 0);
    for (double t : ch.tilts) CHECK((t > 0) == (p.lambda > 0));
    CHECK(ch.max_residual <= 1e-10);
    for (int k = 0; k < ch.n; ++k) {
      const double vk = ch.volumes[k];
      const double s2 = std::pow(2 * vk, (d - 1) / d);
      const double lg = p.dim == 1 ? 1.0 : std::log(s2);
      const double res = std::sqrt(2.0) / std::abs(ch.tilts[k + 1]) - 1.0 / std::abs(ch.tilts[k]) -
                         p.C1 / std::sqrt(vk) * lg;
      CHECK(std::abs(res) <= 1e-10);
    }
    CHECK(std::pow(2.0, ch.n / 2.0) * std::abs(ch.tilts[0]) <= 2 * std::abs(p.lambda));
    const double v0 = ch.volumes[0];
    const double edge = std::sqrt(std::pow(v0, (d - 1) / d)) / (p.dim == 1 ? 1.0 : std::log(v0));
    CHECK(p.C * std::abs(ch.tilts[0]) <= edge * (1 + 1e-12));
  }
  CHECK(built == 200);
}

TEST_CASE("chain errors name the failed hypothesis") {
  auto failure_of = [](ChainParams p) {
    try {
      build_lambda_chain(p);
    } catch (const ChainError& e) {
      return e.failure();
    }
    return ChainFailure::kBadInput;
  };
  ChainParams p = pinned();
  p.Md = 1;
  CHECK(failure_of(p) == ChainFailure::kMdTooSmall);
  p = pinned();
  p.lambda = 0.5 / 34;
  CHECK(failure_of(p) == ChainFailure::kWindow);
  p = pinned();
  p.lambda = 8.0 / 34;
  CHECK(failure_of(p) == ChainFailure::kWindow);
  p = pinned();
  p.C2 = 65;
  CHECK(failure_of(p) == ChainFailure::kBaseVolume);
  p = pinned();
  p.C1 = 60;
  CHECK(failure_of(p) == ChainFailure::kLength);
  p = pinned();
  p.lambda = 0;
  CHECK_THROWS_AS(build_lambda_chain(p), ChainError);
}

TEST_CASE("explicit N_d") {
  CHECK(explicit_Nd(1, 2) == doctest::Approx(8.0).epsilon(1e-14));
  const NdFactors f2 = explicit_Nd_factors(2, 8);
  CHECK(f2.geometric == doctest::Approx(std::sqrt(2.0) + 1).epsilon(1e-14));
  CHECK(f2.sup_factor == doctest::Approx(4.0 / std::exp(2.0)).epsilon(1e-14));
  // Grid oracle for sup_{x>=1} ln^2 x / x.
  double best = 0;
  for (double x = 1; x < 100; x += 1e-4) best = std::max(best, std::pow(std::log(x), 2) / x);
  CHECK(best == doctest::Approx(0.54134).epsilon(1e-5));
  CHECK(f2.log_factor == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
  CHECK(default_Md(1) == 2.0);
  CHECK(default_Md(2) == 8.0);
  CHECK(default_Md(3) == 72.0);
}

TEST_CASE("theorem constant") {
  const TheoremConstant t = theorem_constant(1, 34, 1, 2);
  for (const auto& c : t.checks) CHECK_MESSAGE(c.passed, c.name);
  CHECK(t.C_final >= 2.0L * 34);
  CHECK(t.C >= 34.0L);
  // Regression pin for d=1, C1=1, C2=34, M_1=2.
  CHECK(t.log2_C == 24.0);
  CHECK(t.C_final == 68.0L + 8.0L * std::exp2(24.0L));
  INFO("log2 C_final = " << t.log2_C_final);

  // Monotone in C1 and C2.
  for (int d = 1; d <= 2; ++d) {
    double prev_c2 = -1;
    for (double C2 : {4.0, 16.0, 64.0, 256.0}) {
      double prev_c1 = -1;
      for (double C1 : {0.5, 1.0, 3.0, 4.0}) {
        if (C1 > C2) continue;
        const TheoremConstant tc = theorem_constant(C1, C2, d);
        CHECK(tc.log2_C_final >= prev_c1);
        prev_c1 = tc.log2_C_final;
        CHECK(tc.C_final >= 2.0L * C2);
      }
      const double at3 = theorem_constant(3, C2, d).log2_C_final;
      CHECK(at3 >= prev_c2);
      prev_c2 = at3;
    }
  }
  CHECK_THROWS_AS(theorem_constant(3, 1e6, 2, 0, 8), Error);
}
