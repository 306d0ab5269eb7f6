#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mdcert/cascade.hpp"

using namespace mdcert;

namespace {

CascadeParams pinned_d1(int n = 10) {
  CascadeParams p;
  p.a = 1;
  p.delta = 1;
  p.Cbig = 34;
  p.C1 = 1;
  p.dim = 1;
  p.box0 = BoxSpec::cube(1, 34);
  p.n_axis = {n};
  return p;
}

}  // namespace

TEST_CASE("pinned d=1 cascade: A_inf closed form") {
  const CascadeTrace t = run_cascade(pinned_d1());
  const double oracle = 1.0 + (std::sqrt(2.0) + 1.0) / std::sqrt(34.0);
  CHECK(t.A_inf == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(std::abs(t.A_inf - 1.41403) < 1e-5);
  CHECK(t.A_inf <= std::sqrt(2.0));
  CHECK(t.find("A_inf <= sqrt(2a)")->passed);
  CHECK(t.find("A_k strictly increasing")->passed);
  CHECK(t.find("Delta_{k+1} <= (sqrt2/p_k) Delta_k")->passed);
  CHECK(t.find("p_k q_k = p_k + q_k")->passed);
  // C1 = 1 is below the documented C1 >= 3, and the direct q_k check notices.
  CHECK_FALSE(t.find("q_k <= sqrt(a R(vol B_{k+1}))")->passed);
  CHECK_THROWS_AS(doubling_cascade(pinned_d1()), Error);
}

TEST_CASE("pinned d=1 cascade: M_k constant") {
  const CascadeTrace t = run_cascade(pinned_d1());
  for (double m : t.M) CHECK(m == 1.0);
  for (size_t k = 0; k + 1 < t.A.size(); ++k) {
    const double step = std::pow(2.0, -(static_cast<double>(k) + 1) / 2.0) / std::sqrt(34.0);
    CHECK(t.A[k + 1] - t.A[k] == doctest::Approx(step).epsilon(1e-8));
  }
}

TEST_CASE("d=2 target radius M at volume 4096") {
  CascadeParams p;
  p.a = 1;
  p.delta = 1e6;
  p.Cbig = 32;
  p.C1 = 1;
  p.dim = 2;
  p.box0 = BoxSpec::cube(2, 32);
  p.n_axis = {1, 1};
  const CascadeTrace t = run_cascade(p);
  CHECK(t.volumes[2] == 4096.0);
  CHECK(t.M[2] == doctest::Approx(8.0 / std::log(64.0)).epsilon(1e-14));
  CHECK(std::abs(t.M[2] - 1.9235934) < 1e-7);
}

TEST_CASE("cascade with C1 = 3 above threshold passes and certifies 2a") {
  const double C1 = 3;
  for (int d = 1; d <= 3; ++d) {
    const double C = cascade_threshold(C1, d);
    CascadeParams p;
    p.C1 = C1;
    p.dim = d;
    p.Cbig = C;
    p.box0 = BoxSpec::cube(d, C);
    p.a = std::max(1.0, C / C);
    p.delta = 1e9;
    p.n_axis.assign(d, 0);
    CascadeTrace probe = run_cascade(p);
    p.n_axis.assign(d, (probe.N + d - 1) / d);
    const CascadeTrace t = doubling_cascade(p);
    REQUIRE(t.result.has_value());
    CHECK(t.result->a >= 2.0 * p.a);
    CHECK(t.result->a - 2.0 * p.a < 1e-10);
    CHECK(t.result->delta <= t.M[t.n]);
    CHECK(t.A_inf <= std::sqrt(2.0 * p.a) + 1e-9);
  }
}

TEST_CASE("cascade properties on random instances") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int endpoint_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const double C1 = 3.0 + 5.0 * u(gen);
    const double Cbig = cascade_threshold(C1, d) * (1.0 + u(gen));
    std::vector<double> sides(d);
    for (auto& s : sides) s = Cbig * (1.0 + 0.999 * u(gen));
    CascadeParams p;
    p.C1 = C1;
    p.dim = d;
    p.Cbig = Cbig;
    p.box0 = BoxSpec::from_sides(sides);
    const double R0 = std::pow(p.box0.volume(), 1.0 / d);
    p.a = Cbig / R0 * (1.0 + 3.0 * u(gen));
    p.delta = 10.0 * u(gen) + 0.1;
    p.n_axis.assign(d, 8 + static_cast<int>(8 * u(gen)));
    const CascadeTrace t = run_cascade(p);
    for (size_t k = 0; k + 1 < t.A.size(); ++k) CHECK(t.A[k] < t.A[k + 1]);
    CHECK(t.A_inf <= std::sqrt(2.0 * p.a) + 1e-9);
    for (size_t k = 0; k < t.p.size(); ++k) {
      CHECK(t.Delta[k + 1] <= std::sqrt(2.0) / t.p[k] * t.Delta[k] * (1 + 1e-12));
      if (static_cast<int>(k) >= t.N) {
        CHECK(t.M[k + 1] <= std::sqrt(2.0) / t.p[k] * t.M[k] * (1 + 1e-12));
      }
    }
    // Endpoint claim versus direct evaluation at every k in [0, N].
    if (holder_product_bound(t, 0) && holder_product_bound(t, t.N)) {
      ++endpoint_checked;
      for (int k = 0; k <= t.N; ++k) {
        double prod = 1.0;
        for (int j = k; j < t.N; ++j) prod *= t.p[j];
        CHECK(prod <= std::pow(2.0, (t.N - k) / (2.0 * d)) * (1 + 1e-12));
      }
    }
  }
  CHECK(endpoint_checked == 100);
}

TEST_CASE("cascade threshold") {
  // Oracle: the three explicit conditions, scanned on powers of two.
  for (int d = 1; d <= 3; ++d) {
    for (double C1 : {1.0, 3.0, 10.0}) {
      const double g = 1.0 / (std::pow(2.0, 1.0 / (2 * d)) - 1.0);
      const double need = std::max({C1, C1 * g * g / std::pow(std::sqrt(2.0) - 1, 2),
                                    C1 / std::pow(std::sqrt(3.0) - std::sqrt(2.0), 2)});
      const double expect = std::exp2(std::ceil(std::log2(need)));
      CHECK(cascade_threshold(C1, d) == expect);
    }
  }
  CHECK(cascade_threshold(1, 1) == 64.0);
}

TEST_CASE("uniform good sweep") {
  const QuadCert step = uniform_good_step({1, 1}, {1, 1}, 1, 4);
  CHECK(step.a == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(step.delta == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(uniform_good_step({1, 1}, {1, 1}, 4, 4), Error);
  const QuadCert lim = uniform_good_step({0, 1e9}, {1, 1}, 4 - 1e-9, 4);
  CHECK(lim.a == doctest::Approx(2.0).epsilon(1e-8));
  const QuadCert two = uniform_good_sweep({1, 1}, {1, 1}, 1, 4, 2);
  CHECK(two.a == doctest::Approx(2.0 * 10.0 * 4.0 + 2.0).epsilon(1e-10));
  // d = 1 with the leak bound (C1, 1/C1) as the lower certificate.
  const QuadCert d1 = uniform_good_sweep({3, 1.0 / 3}, {1, 1}, 2, 8, 1);
  CHECK(d1.a == doctest::Approx(2.0 * 8 / 2 + 2.0 * 3 / 2).epsilon(1e-12));
}

TEST_CASE("moderate constant") {
  CHECK(moderate_constant(1, 2, 1, 34, 34) == 34.0);
  const double floor = moderate_constant(0.5, 0.25, 1, 0.5, 0.5);
  CHECK(floor > 1.0);
  CHECK(floor < 1.0 + 1e-6);
  CHECK(moderate_constant(2, 3, 2, 10, 1296) == doctest::Approx(36.0).epsilon(1e-14));
}

TEST_CASE("uniform depth meets its bound") {
  for (int d = 1; d <= 2; ++d) {
    const double C = cascade_threshold(3, d);
    const int N = uniform_cascade_depth(C, 3, d, 0.5);
    const double g = std::pow(2.0, 1.0 / (2 * d)) - 1.0;
    const double bound = std::exp(1.0 / g) * std::pow(2.0, -N / (2.0 * d)) / 3.0 *
                         std::sqrt(std::pow(2 * C, d) / C);
    CHECK(bound <= 0.5);
    if (N > 0) {
      const double prev = bound * std::pow(2.0, 1.0 / (2.0 * d));
      const bool c1 = std::pow(2.0, -N / (2.0 * d)) <= g;
      const bool c3 = std::exp(1.0 / g) <= std::pow(2.0, (N - 1) / (2.0 * d));
      CHECK_FALSE((prev <= 0.5 && c1 && c3));
    }
  }
}
