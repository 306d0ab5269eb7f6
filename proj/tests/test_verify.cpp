#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdcert/verify.hpp"

using namespace mdcert;

namespace {

FieldModel model(int d, CellDist cell, FieldKind kind = FieldKind::kCell) {
  return FieldModel::make(d, kind, cell, 7);
}

// Sum of squared overlaps of [lo,hi] with unit cells, by direct cell loop.
double brute_sum_sq(double lo, double hi) {
  double s = 0.0;
  for (double z = std::floor(lo) - 1; z <= hi + 1; z += 1.0) {
    const double w = std::max(0.0, std::min(hi, z + 1) - std::max(lo, z));
    s += w * w;
  }
  return s;
}

std::vector<double> fractions() { return {-1.0, -0.75, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 1.0}; }

}  // namespace

TEST_CASE("cgf ratio matches the direct quotient near the series switch") {
  for (const auto& c : {CellDist::exponential(1.5), CellDist::two_point(0.7), CellDist::uniform(2.0),
                        CellDist::exponential(1.0).diff(), CellDist::two_point(1.0).diff()}) {
    for (double mu : {3e-4, 1.2e-3, -2e-3}) {
      CHECK(c.cgf_ratio(mu) == doctest::Approx(c.cgf(mu) / (mu * mu)).epsilon(1e-6));
    }
    CHECK(c.cgf_ratio(1e-200) == doctest::Approx(c.variance() / 2).epsilon(1e-12));
  }
}

TEST_CASE("shift supremum dominates a dense brute-force scan") {
  for (const auto& cell : {CellDist::gaussian(1.0), CellDist::exponential(1.0), CellDist::two_point(1.0)}) {
    const FieldModel m = model(1, cell);
    const BoxSpec b({{0.3, 2.9}});
    const double l = 0.8;
    const ShiftSup sup = sup_shift_cgf(m, b, l);
    CHECK(sup.exact);
    double scan = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const std::vector<double> s{k / 2000.0};
      scan = std::max(scan, exact_cgf(m, b.shifted(s), l));
    }
    CHECK(sup.value >= scan - 1e-12);
    CHECK(sup.value <= scan + 1e-5);
  }
}

TEST_CASE("gaussian shift supremum equals the brute-force variance maximum") {
  const FieldModel m = model(1, CellDist::gaussian(1.0));
  const double lo = -1.25, hi = 1.25;
  double best = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double s = k / 1000.0;
    best = std::max(best, brute_sum_sq(lo + s, hi + s));
  }
  const double l = 0.6;
  CHECK(sup_shift_cgf(m, BoxSpec({{lo, hi}}), l).value ==
        doctest::Approx(0.5 * l * l * best / (hi - lo)).epsilon(1e-9));
}

TEST_CASE("anchor registry is fixed") {
  CHECK(anchor_registry().size() == 7);
  CHECK(is_registered_anchor("theorem_bound"));
  CHECK_FALSE(is_registered_anchor("unknown_anchor_x"));
  CHECK_THROWS_AS(make_row("unknown_anchor_x", "", 0.1, "", Evidence::kExact, 0, 1), Error);
}

TEST_CASE("row pass uses tolerance only for exact evidence") {
  CHECK(make_row(kAnchorTheorem, "", 0.1, "", Evidence::kExact, 1.0 + 5e-10, 1.0).pass);
  CHECK_FALSE(make_row(kAnchorTheorem, "", 0.1, "", Evidence::kExact, 1.0 + 2e-9, 1.0).pass);
  CgfEstimate e;
  e.upper = 1.0 + 1e-12;
  CHECK_FALSE(make_mc_row(kAnchorTheorem, "", 0.1, "", e, 1.0).pass);
}

TEST_CASE("subgaussian moment holds on a calibrated family") {
  const auto fam = subgaussian_family(20);
  const Report rep = check_subgaussian_moment(fam, lambda_grid(-1.0, 1.0, 0.05));
  CHECK(rep.rows.size() == 20 * 41);
  CHECK(rep.all_passed());
  const Report out = check_subgaussian_moment({fam[0]}, {-1.5, 0.5, 2.0});
  CHECK(out.refused == 2);
  CHECK_THROWS_AS(check_subgaussian_moment({ExactDist::two_point(-3, 3, 0.5)}, {0.5}), Error);
}

TEST_CASE("halving bound on the exact gaussian oracle, d = 1 and 2") {
  const VerifyOptions opts;
  for (double p : {1.5, 2.0, 4.0}) {
    for (double r : {1.0, 2.5, 4.0}) {
      HalvingCase c1{BoxSpec(), r, p, 1.0, 1};
      const Report a = check_halving(model(1, CellDist::gaussian(1.0)), c1, fractions(), opts);
      CHECK(a.rows.size() == 10);
      CHECK(a.all_passed());
      HalvingCase c2{BoxSpec({{0.0, 3.5}}), r, p, 3.0, 1};
      const Report b = check_halving(model(2, CellDist::gaussian(1.0)), c2, fractions(), opts);
      CHECK(b.all_passed());
      c2.axis = 2;
      CHECK(check_halving(model(2, CellDist::gaussian(1.0)), c2, fractions(), opts).all_passed());
    }
  }
}

TEST_CASE("halving refuses out-of-window points and narrow cross boxes") {
  const VerifyOptions opts;
  HalvingCase c{BoxSpec(), 2.0, 2.0, 1.0, 1};
  const Report a = check_halving(model(1, CellDist::gaussian(1.0)), c, {-1.2, -0.5, 0.5, 1.0, 1.3}, opts);
  CHECK(a.rows.size() == 3);
  CHECK(a.refused == 2);
  HalvingCase narrow{BoxSpec({{0.0, 2.0}}), 2.0, 2.0, 3.0, 1};
  CHECK(check_halving(model(2, CellDist::gaussian(1.0)), narrow, {0.5}, opts).refused == 1);
}

TEST_CASE("halving bound with exponential cells, exact and sampled") {
  const FieldModel m = model(1, CellDist::exponential(1.0));
  const double C1 = leak_constant(m).C1;
  HalvingCase c{BoxSpec(), 1.5, 2.0, C1, 1};
  CHECK(check_halving(m, c, fractions(), {}).all_passed());
  VerifyOptions mc;
  mc.monte_carlo = true;
  mc.samples = 200000;
  const Report rep = check_halving(m, c, {-1.0, -0.5, 0.5, 1.0}, mc);
  CHECK(rep.all_passed());
  for (const auto& row : rep.rows) {
    CHECK(row.evidence == Evidence::kUpperConf);
    CHECK(row.lhs_lower <= row.lhs_point);
    CHECK(row.lhs_point <= row.lhs);
  }
}

TEST_CASE("split bounds on exact oracles with the axis permuted") {
  const auto lambdas = lambda_grid(-2.0, 2.0, 0.2);
  const VerifyOptions opts;
  for (double p : {1.5, 2.0, 4.0}) {
    for (auto [r, s] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.25}, std::pair{3.3, 1.7}}) {
      SplitCase c1{BoxSpec(), r, s, p, 1};
      const FieldModel g1 = model(1, CellDist::gaussian(1.0));
      CHECK(check_split_upper(g1, c1, lambdas, opts).all_passed());
      CHECK(check_split_lower(g1, c1, lambdas, opts).all_passed());
      const FieldModel g2 = model(2, CellDist::gaussian(1.0));
      for (int axis : {1, 2}) {
        SplitCase c2{BoxSpec({{0.4, 3.0}}), r, s, p, axis};
        CHECK(check_split_upper(g2, c2, lambdas, opts).all_passed());
        CHECK(check_split_lower(g2, c2, lambdas, opts).all_passed());
      }
    }
  }
  const FieldModel e1 = model(1, CellDist::two_point(1.0));
  SplitCase c{BoxSpec(), 0.7, 1.6, 2.0, 1};
  CHECK(check_split_upper(e1, c, lambdas, opts).all_passed());
  CHECK(check_split_lower(e1, c, lambdas, opts).all_passed());
}

TEST_CASE("moderate window bound on gaussian boxes") {
  const FieldModel m = model(2, CellDist::gaussian(1.0));
  const double C2 = 8.0;
  const std::vector<BoxSpec> boxes{BoxSpec({{0, 8}, {0, 8}}), BoxSpec({{0.5, 16.5}, {0, 9}}),
                                   BoxSpec({{0, 4}, {0, 32}})};
  const Report rep = check_moderate_window(m, C2, boxes, {-1.0, 0.5, 1.0, 1.5}, {});
  CHECK(rep.rows.size() == 6);
  CHECK(rep.refused == 2 + 4);
  CHECK(rep.all_passed());
}

TEST_CASE("theorem rows are normalized gaussian variances") {
  const FieldModel m = model(1, CellDist::gaussian(1.0));
  const BoxSpec b({{0.3, 40.8}});
  const Report rep = check_theorem(m, 50.0, {b}, {1.0, -0.5, 1.5}, {});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.refused == 1);
  CHECK(rep.rows[0].normalized);
  CHECK(rep.rows[0].lhs == doctest::Approx(0.5 * brute_sum_sq(0.3, 40.8)).epsilon(1e-12));
  CHECK(rep.rows[0].rhs == doctest::Approx(50.0 * 40.5));
  CHECK(rep.rows[0].window.find("extrapolated") != std::string::npos);
  CHECK(rep.all_passed());
  CHECK_FALSE(check_theorem(m, 0.1, {b}, {1.0}, {}).all_passed());
}

TEST_CASE("theorem rows survive tilts whose square underflows") {
  const FieldModel m = model(1, CellDist::exponential(1.0));
  const BoxSpec b({{0.0, 4096.0}});
  const double C = std::ldexp(1.0, 740);
  const Report exact = check_theorem(m, C, {b}, {1.0}, {});
  REQUIRE(exact.rows.size() == 1);
  CHECK(exact.rows[0].lhs == doctest::Approx(0.5 * 4096.0));
  VerifyOptions mc;
  mc.monte_carlo = true;
  mc.samples = 20000;
  const Report est = check_theorem(m, C, {b}, {1.0}, mc);
  REQUIRE(est.rows.size() == 1);
  CHECK(std::isfinite(est.rows[0].lhs));
  CHECK(est.rows[0].lhs > 0);
  CHECK(est.all_passed());
}

TEST_CASE("leak bounds for two-point d = 1 and gaussian d = 2") {
  const FieldModel t = model(1, CellDist::two_point(1.0));
  const double C1 = leak_constant(t).C1;
  std::vector<LeakCase> cases;
  for (double r : {0.25, 0.5, 0.9, 2.0}) cases.push_back({SplitSpec{1, r}, -1.0, r + 1.5, BoxSpec()});
  const Report a = check_leak_bounds(t, C1, cases, fractions());
  CHECK(a.rows.size() == 40);
  CHECK(a.all_passed());
  for (const auto& row : a.rows) {
    if (row.instance.find("r=2,") != std::string::npos) CHECK(row.lhs == 0.0);
  }
  const FieldModel g = model(2, CellDist::gaussian(1.0));
  const double C1g = leak_constant(g).C1;
  const std::vector<LeakCase> gc{{SplitSpec{1, 0.5}, -2.0, 3.0, BoxSpec({{0.0, 6.0}})},
                                 {SplitSpec{2, 1.3}, 0.0, 4.0, BoxSpec({{0.2, 9.7}})},
                                 {SplitSpec{1, 0.5}, -2.0, 3.0, BoxSpec({{0.0, 1.0}})}};
  const Report b = check_leak_bounds(g, C1g, gc, fractions());
  CHECK(b.rows.size() == 20);
  CHECK(b.refused == 10);
  CHECK(b.all_passed());
}

TEST_CASE("moderate supremum shrinks as the width constraint grows") {
  const FieldModel m = model(2, CellDist::exponential(1.0));
  VerifyOptions opts;
  opts.samples = 20000;
  const double l = 0.4;
  // Volume 4096 boxes of widths 4, 8, 16, 32, 64.
  std::vector<std::pair<double, double>> point;  // (width, point estimate)
  for (int k = 2; k <= 6; ++k) {
    const BoxSpec b({{0.0, std::ldexp(1.0, k)}, {0.5, 0.5 + std::ldexp(1.0, 12 - k)}});
    const auto xs = box_samples(m, b, true, opts);
    point.emplace_back(b.width(), empirical_cgf(xs, l).point);
  }
  auto sup_with_width = [&](double w) {
    double s = -INFINITY;
    for (auto [width, p] : point) {
      if (width >= w) s = std::max(s, p);
    }
    return s;
  };
  for (double C : {4.0, 8.0, 16.0}) {
    for (double M : {C, 2 * C, 4 * C}) CHECK(sup_with_width(M) <= sup_with_width(C));
  }
}
