#pragma once

#include <string>

#include "mdcert/rng.hpp"

namespace mdcert {

enum class CellKind { kGaussian, kExponential, kTwoPoint, kUniform };

// Mean-zero law of one lattice cell variable. With `difference` set the law
// is that of xi' - xi for independent copies (the leak increment).
struct CellDist {
  CellKind kind = CellKind::kGaussian;
  double param = 1.0;  // sigma | rate | half-gap h | half-width h
  bool difference = false;

  static CellDist gaussian(double sigma) { return {CellKind::kGaussian, sigma, false}; }
  static CellDist exponential(double rate) { return {CellKind::kExponential, rate, false}; }
  static CellDist two_point(double h) { return {CellKind::kTwoPoint, h, false}; }
  static CellDist uniform(double h) { return {CellKind::kUniform, h, false}; }
  // Parses "gaussian", "exponential", "two_point", "uniform".
  static CellDist from_name(const std::string& name, double param);

  CellDist diff() const { return {kind, param, true}; }
  std::string name() const;
  void validate() const;

  double variance() const;
  // log E exp(mu Z); +inf outside the domain of the MGF.
  double cgf(double mu) const;
  // cgf(mu)/mu^2, accurate for tiny mu (series near 0); variance/2 at mu = 0.
  double cgf_ratio(double mu) const;
  // E exp(eps |Z|) for eps >= 0; +inf when it diverges.
  double abs_exp_moment(double eps) const;
  // sup over 0 < |mu| <= m of cgf(mu)/mu^2 (and the mu -> 0 limit).
  double cgf_ratio_sup(double m) const;
  // Left edge of the MGF domain for mu > 0 (+inf when entire).
  double mgf_radius() const;

  double sample(CounterRng& rng) const;
};

// Largest eps with E exp(eps |Z|) <= 2, rounded down.
double solve_eps(const CellDist& dist);

// Smallest c >= 1 with cgf(mu) <= c mu^2 for all |mu| <= 1/c.
double quadratic_cgf_constant(const CellDist& dist);

}  // namespace mdcert
