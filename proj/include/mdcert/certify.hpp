#pragma once

#include <optional>
#include <vector>

#include "mdcert/cascade.hpp"
#include "mdcert/chain.hpp"
#include "mdcert/core.hpp"
#include "mdcert/fields.hpp"

namespace mdcert {

struct CertifyInputs {
  FieldModel model;
  std::optional<double> C1;  // overrides the leak constant
  std::optional<double> Md;
  int log2_cap = kDefaultLog2Cap;
};

// Every constant of the certification chain with the checks behind it.
struct Certification {
  FieldModel model;
  double C1_leak = 0.0;    // leak constant of the model
  double C1 = 0.0;         // constant used by the cascade, >= 3
  double C = 0.0;          // cascade threshold
  QuadCert big_cube;       // certificate of [0, 2C]^d
  QuadCert lower_dim;      // leak certificate for cross boxes of width >= C
  QuadCert uniform;        // uniform certificate for sides in [C, 2C]
  int N = 0;               // uniform cascade depth
  double V = 0.0;          // 2^N (2C)^d
  double C2 = 0.0;
  CascadeTrace trace;      // representative cascade from [0, C]^d
  TheoremConstant theorem;

  double C_final() const { return theorem.value(); }
  bool all_passed() const;
};

// Certificate (a, delta) of every shift of [0, side]^d from the cell law:
// f_B(lambda) <= vol K(lambda/sqrt vol) <= a lambda^2 for |lambda| <= m sqrt(vol).
QuadCert cube_certificate(const FieldModel& m, double side);

Certification certify(const CertifyInputs& in);

}  // namespace mdcert
