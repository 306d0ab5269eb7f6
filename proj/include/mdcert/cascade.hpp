#pragma once

#include <optional>
#include <vector>

#include "mdcert/core.hpp"

namespace mdcert {

// Inputs of the volume-doubling cascade: a certificate (a, delta) for the
// base box box0 with sides in [Cbig, 2 Cbig), propagated to the box with
// sides 2^{n_j} r_j.
struct CascadeParams {
  double a = 1.0;
  double delta = 1.0;
  double Cbig = 64.0;
  double C1 = 3.0;
  int dim = 1;
  BoxSpec box0;
  std::vector<int> n_axis;
};

struct CascadeTrace {
  CascadeParams params;
  int n = 0;   // n_1 + ... + n_d
  int N = 0;   // depth from which Delta_k = M_k
  std::vector<double> volumes;  // vol B_k, k = 0..K
  std::vector<double> A;        // k = 0..K
  std::vector<double> p;        // k = 0..K-1
  std::vector<double> q;        // k = 0..K-1
  std::vector<double> M;        // k = 0..K
  std::vector<double> Delta;    // k = 0..K
  double A_inf = 0.0;
  std::vector<NamedCheck> checks;
  std::optional<QuadCert> result;  // (2a, M_n), present iff every check passed

  bool all_passed() const;
  const NamedCheck* first_failure() const;
  const NamedCheck* find(const std::string& name) const;
};

// Builds every sequence and records each inequality as a named check.
// Throws only on malformed input.
CascadeTrace run_cascade(const CascadeParams& params);

// run_cascade, then throws kCheckFailed naming the first failed inequality.
CascadeTrace doubling_cascade(const CascadeParams& params);

// p_k ... p_{N-1} <= 2^{(N-k)/(2d)}; `k` in [0, N].
bool holder_product_bound(const CascadeTrace& t, int k);

// Explicit sufficient conditions on Cbig (for every admissible a and box0).
std::vector<NamedCheck> cascade_threshold_checks(double Cbig, double C1, int dim);
// Smallest power of two passing cascade_threshold_checks.
double cascade_threshold(double C1, int dim);

// Smallest N meeting the three depth conditions with the box-uniform bound
// on Delta_0 (valid for every base box with sides in [C, 2C)).
int uniform_cascade_depth(double C, double C1, int dim, double delta);

// One axis step of the uniform-goodness sweep over sides in [c, Cbig].
QuadCert uniform_good_step(const QuadCert& lower_dim, const QuadCert& current, double c,
                           double Cbig);
// `dim` successive axis steps starting from the certificate of [0, Cbig]^d.
QuadCert uniform_good_sweep(const QuadCert& lower_dim, const QuadCert& big_cube, double c,
                            double Cbig, int dim);

// Constant valid in the moderate window: max(C, V^(1/d), 2a, C1 sqrt(a), 1+).
double moderate_constant(double C1, double a, int dim, double cascade_C, double V);

}  // namespace mdcert
