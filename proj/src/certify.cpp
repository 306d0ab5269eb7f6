#include "mdcert/certify.hpp"

#include <algorithm>
#include <cmath>

namespace mdcert {

bool Certification::all_passed() const {
  return trace.all_passed() &&
         std::all_of(theorem.checks.begin(), theorem.checks.end(),
                     [](const NamedCheck& c) { return c.passed; });
}

QuadCert cube_certificate(const FieldModel& m, double side) {
  m.validate();
  if (!(side > 0)) fail(ErrorCode::kInvalidArgument, "cube side must be positive");
  const double mw = std::min(1.0, 0.5 * m.cell.mgf_radius());
  return {round_up(m.cell.cgf_ratio_sup(mw)), round_down(mw * std::pow(side, 0.5 * m.dim))};
}

Certification certify(const CertifyInputs& in) {
  Certification out;
  out.model = in.model;
  const int d = in.model.dim;
  out.C1_leak = leak_constant(in.model).C1;
  if (in.C1) {
    if (!(*in.C1 >= out.C1_leak)) {
      fail(ErrorCode::kInvalidArgument, "C1 below the leak constant of the model");
    }
    out.C1 = *in.C1;
  } else {
    out.C1 = std::max(out.C1_leak, 3.0);
  }
  out.C = cascade_threshold(out.C1, d);
  out.big_cube = cube_certificate(in.model, 2.0 * out.C);
  out.lower_dim = {out.C1, round_down(std::pow(out.C, 0.5 * (d - 1)) / out.C1)};
  out.uniform = uniform_good_sweep(out.lower_dim, out.big_cube, out.C, 2.0 * out.C, d);
  out.uniform.a = std::max(out.uniform.a, 1.0);
  out.N = uniform_cascade_depth(out.C, out.C1, d, out.uniform.delta);
  out.V = std::ldexp(std::pow(2.0 * out.C, d), out.N);
  out.C2 = moderate_constant(out.C1, out.uniform.a, d, out.C, out.V);

  CascadeParams cp;
  cp.a = out.uniform.a;
  cp.delta = out.uniform.delta;
  cp.Cbig = out.C;
  cp.C1 = out.C1;
  cp.dim = d;
  cp.box0 = BoxSpec::cube(d, out.C);
  cp.n_axis.assign(d, std::max(1, (out.N + d - 1) / d));
  out.trace = doubling_cascade(cp);

  out.theorem = theorem_constant(out.C1, out.C2, d, in.Md.value_or(0.0), in.log2_cap);
  return out;
}

}  // namespace mdcert
