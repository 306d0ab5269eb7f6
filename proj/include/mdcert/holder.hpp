#pragma once

#include "mdcert/core.hpp"

namespace mdcert {

struct HolderSplit {
  double p;
  double q;
  double min_value;  // (A + x)^2
};

// Minimizes A^2 p + x^2 q over Hoelder conjugates p, q.
HolderSplit optimal_holder(double A, double x);

// Bound on the CGF of a box doubled along one axis from the certificate of
// its half. `r` is half the doubled side, `cross_volume` the volume of the
// (d-1)-dimensional cross-section (1 for d = 1).
struct HalvingInputs {
  QuadCert half;
  double p = 2.0;
  double C1 = 3.0;
  double r = 1.0;
  double cross_volume = 1.0;
  int dim = 1;
};

// Formula only: a p lambda^2 + C1 (p/(p-1)) lambda^2 / (2r).
double halve_combine_value(const HalvingInputs& in, double lambda);
// Same value after checking both validity windows.
double halve_combine(const HalvingInputs& in, double lambda);
// Largest |lambda| admitted by the leak window of the halving step.
double halve_combine_window(const HalvingInputs& in);

// Box B = [-r, s] x B0 split at 0 into B1, B2; the leak lives on B0.
struct SplitInputs {
  double r = 1.0;
  double s = 1.0;
  double p = 2.0;
};

double split_combine_upper(const QuadCert& b1, const QuadCert& b2, const QuadCert& leak,
                           const SplitInputs& in, double lambda);

// Upper bound on f_B1(lambda sqrt(r/(r+s))) + f_B2(lambda sqrt(s/(r+s))).
double split_combine_lower(const QuadCert& whole, const QuadCert& leak,
                           const SplitInputs& in, double lambda);

}  // namespace mdcert
