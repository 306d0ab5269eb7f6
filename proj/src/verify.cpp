#include "mdcert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mdcert/parallel.hpp"

namespace mdcert {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string edge_text(const std::string& condition, double edge) {
  return condition + ", |lambda| <= " + fmt(edge);
}

double frac_part(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

// Shifts s in [0,1) putting an endpoint of an interval on the lattice.
void add_breakpoints(std::set<double>& out, const Interval& iv) {
  out.insert(frac_part(-iv.lo));
  out.insert(frac_part(-iv.hi));
}

// Candidate shifts: lattice breakpoints of every listed box (where the sup
// is attained for cell fields) plus a uniform grid for kernel fields.
std::vector<std::vector<double>> shift_candidates(const FieldModel& m,
                                                  const std::vector<BoxSpec>& boxes,
                                                  int grid_points) {
  std::vector<std::vector<double>> out{{}};
  for (int j = 0; j < m.dim; ++j) {
    std::set<double> axis{0.0};
    for (const auto& b : boxes) add_breakpoints(axis, b[j]);
    if (m.kind == FieldKind::kKernel) {
      for (int k = 0; k < grid_points; ++k) axis.insert(static_cast<double>(k) / grid_points);
    }
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double s : axis) {
        auto v = prefix;
        v.push_back(s);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

template <class F>
ShiftSup sup_over(const FieldModel& m, const std::vector<BoxSpec>& boxes, int grid_points,
                  F&& value_at) {
  ShiftSup best;
  best.value = -std::numeric_limits<double>::infinity();
  best.exact = m.kind == FieldKind::kCell;
  for (const auto& s : shift_candidates(m, boxes, grid_points)) {
    const double v = value_at(s);
    if (v > best.value || std::isnan(v)) {
      best.value = v;
      best.shift = s;
    }
  }
  return best;
}

// Normalized samples per box, drawn once and reused across lambda.
class SampleCache {
 public:
  SampleCache(const FieldModel& m, const VerifyOptions& opts) : m_(m), opts_(opts) {}

  CgfEstimate cgf(const BoxSpec& box, double lambda) {
    auto [it, fresh] = cache_.try_emplace(box.to_string());
    if (fresh) it->second = box_samples(m_, box, true, opts_);
    return empirical_cgf(it->second, lambda, opts_.confidence, opts_.batches);
  }

 private:
  const FieldModel& m_;
  const VerifyOptions& opts_;
  std::map<std::string, std::vector<double>> cache_;
};

std::string model_box(const FieldModel& m, const BoxSpec& b) {
  return m.describe() + "; B=" + b.to_string();
}

}  // namespace

const char* evidence_name(Evidence e) { return e == Evidence::kExact ? "exact" : "upper_conf"; }

ReportRow make_row(std::string anchor, std::string instance, double lambda, std::string window,
                   Evidence evidence, double lhs, double rhs, bool normalized) {
  require_registered_anchor(anchor);
  ReportRow r;
  r.anchor = std::move(anchor);
  r.instance = std::move(instance);
  r.lambda = lambda;
  r.window = std::move(window);
  r.evidence = evidence;
  r.lhs = r.lhs_point = r.lhs_lower = lhs;
  r.rhs = rhs;
  r.normalized = normalized;
  const double tol = evidence == Evidence::kExact ? kExactTolerance : 0.0;
  r.pass = std::isfinite(lhs) && !std::isnan(rhs) && rhs - lhs >= -tol;
  return r;
}

ReportRow make_mc_row(std::string anchor, std::string instance, double lambda,
                      std::string window, const CgfEstimate& est, double rhs) {
  ReportRow r = make_row(std::move(anchor), std::move(instance), lambda, std::move(window),
                         Evidence::kUpperConf, est.upper, rhs);
  r.lhs_point = est.point;
  r.lhs_lower = est.lower;
  return r;
}

void Report::append(const Report& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  refused += other.refused;
}

bool Report::all_passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return !r.pass; }));
}

const std::vector<std::string>& anchor_registry() {
  static const std::vector<std::string> names{
      kAnchorSubgaussianMoment, kAnchorHalvingHolder,   kAnchorSplitUpper,
      kAnchorSplitLower,        kAnchorModerateWindow,  kAnchorTheorem,
      kAnchorLeakQuadratic};
  return names;
}

bool is_registered_anchor(const std::string& name) {
  const auto& r = anchor_registry();
  return std::find(r.begin(), r.end(), name) != r.end();
}

void require_registered_anchor(const std::string& name) {
  if (!is_registered_anchor(name)) fail(ErrorCode::kInvalidArgument, "unknown anchor: " + name);
}

ShiftSup sup_shift_cgf(const FieldModel& m, const BoxSpec& box, double lambda, int grid_points) {
  return sup_over(m, {box}, grid_points, [&](const std::vector<double>& s) {
    return exact_cgf(m, box.shifted(s), lambda);
  });
}

double leak_profile_cgf(const FieldModel& m, const BoxSpec& crossbox, double mu) {
  const CellDist dz = m.cell.diff();
  if (m.dim == 1) return dz.cgf(mu);
  if (crossbox.dim() != m.dim - 1) fail(ErrorCode::kInvalidArgument, "cross box dimension mismatch");
  FieldModel lower = m;
  lower.dim = m.dim - 1;
  lower.cell = dz;
  return sup_shift_cgf(lower, crossbox, mu).value;
}

BoxSpec insert_axis(const BoxSpec& cross, int axis, Interval iv) {
  const int d = cross.dim() + 1;
  if (axis < 1 || axis > d) fail(ErrorCode::kInvalidArgument, "axis out of range");
  std::vector<Interval> out;
  for (int j = 0, k = 0; j < d; ++j) out.push_back(j == axis - 1 ? iv : cross[k++]);
  return BoxSpec(out);
}

std::vector<double> box_samples(const FieldModel& m, const BoxSpec& box, bool normalized,
                                const VerifyOptions& opts) {
  const double scale = normalized ? 1.0 / std::sqrt(box.volume()) : 1.0;
  return parallel_samples(opts.samples, opts.threads, [&](std::size_t i) {
    return scale * sample_box_integral_fast(m, box, kStreamOriginal, i);
  });
}

Report check_subgaussian_moment(const std::vector<ExactDist>& family,
                                const std::vector<double>& lambdas) {
  Report rep;
  for (const auto& z : family) {
    const double moment = z.abs_exp_moment();
    if (!(moment <= 2.0 * (1.0 + 1e-12)) || std::abs(z.mean()) > 1e-12) {
      fail(ErrorCode::kHypothesisFailed,
           "hypothesis failed: E exp|Z| = " + fmt(moment) + ", E Z = " + fmt(z.mean()));
    }
    for (double l : lambdas) {
      if (std::abs(l) > 1.0) {
        ++rep.refused;
        continue;
      }
      rep.rows.push_back(make_row(kAnchorSubgaussianMoment, z.describe(), l, "|lambda| <= 1",
                                  Evidence::kExact, z.log_mgf(l), l * l));
    }
  }
  return rep;
}

Report check_halving(const FieldModel& m, const HalvingCase& c,
                     const std::vector<double>& fractions, const VerifyOptions& opts) {
  m.validate();
  if (!(c.p > 1.0) || !(c.r > 0) || !(c.C1 > 0)) {
    fail(ErrorCode::kInvalidArgument, "halving case needs p > 1, r > 0, C1 > 0");
  }
  const bool flat = m.dim == 1;
  const double vcross = flat ? 1.0 : c.cross.volume();
  const BoxSpec b1 = flat ? BoxSpec({{0.0, c.r}}) : insert_axis(c.cross, c.axis, {0.0, c.r});
  const BoxSpec b2 = flat ? BoxSpec({{-c.r, c.r}}) : insert_axis(c.cross, c.axis, {-c.r, c.r});
  const double logf = flat ? 1.0 : log_pow(vcross, m.dim - 1);
  const double edge = (c.p - 1.0) / c.p * std::sqrt(2.0 * c.r * vcross) / logf / c.C1;
  const std::string window =
      edge_text("C1|lambda| <= ((p-1)/p) sqrt(2v) / log^(d-1) vol B", edge);
  const std::string inst = model_box(m, b2) + "; p=" + fmt(c.p) + ", C1=" + fmt(c.C1);

  Report rep;
  SampleCache mc(m, opts);
  const bool wide = flat || c.cross.width() >= c.C1;
  for (double f : fractions) {
    if (std::abs(f) > 1.0 || !wide) {
      ++rep.refused;
      continue;
    }
    const double l = f * edge;
    const ShiftSup lhs = sup_shift_cgf(m, b2, l);
    const double rhs = 2.0 / c.p * sup_shift_cgf(m, b1, c.p * l / std::sqrt(2.0)).value +
                       c.C1 * c.p / (c.p - 1.0) * l * l / (2.0 * c.r);
    if (opts.monte_carlo) {
      rep.rows.push_back(make_mc_row(kAnchorHalvingHolder, inst, l, window,
                                     mc.cgf(b2.shifted(lhs.shift), l), rhs));
    } else {
      rep.rows.push_back(
          make_row(kAnchorHalvingHolder, inst, l, window, Evidence::kExact, lhs.value, rhs));
    }
  }
  return rep;
}

namespace {

struct SplitBoxes {
  BoxSpec b1, b2, whole;
  double vcross;
};

SplitBoxes split_boxes(const FieldModel& m, const SplitCase& c) {
  m.validate();
  if (!(c.p > 1.0) || !(c.r > 0) || !(c.s > 0)) {
    fail(ErrorCode::kInvalidArgument, "split case needs p > 1, r > 0, s > 0");
  }
  if (m.dim == 1) return {BoxSpec({{-c.r, 0.0}}), BoxSpec({{0.0, c.s}}), BoxSpec({{-c.r, c.s}}), 1.0};
  return {insert_axis(c.cross, c.axis, {-c.r, 0.0}), insert_axis(c.cross, c.axis, {0.0, c.s}),
          insert_axis(c.cross, c.axis, {-c.r, c.s}), c.cross.volume()};
}

std::string split_instance(const FieldModel& m, const SplitBoxes& sb, const SplitCase& c) {
  return model_box(m, sb.whole) + "; split axis " + std::to_string(c.axis) + " at 0, p=" +
         fmt(c.p);
}

}  // namespace

Report check_split_upper(const FieldModel& m, const SplitCase& c,
                         const std::vector<double>& lambdas, const VerifyOptions& opts) {
  const SplitBoxes sb = split_boxes(m, c);
  const double t = c.r + c.s;
  const double q = c.p / (c.p - 1.0);
  const std::string inst = split_instance(m, sb, c);
  Report rep;
  SampleCache mc(m, opts);
  for (double l : lambdas) {
    const ShiftSup lhs = sup_shift_cgf(m, sb.whole, l);
    const double rhs = sup_shift_cgf(m, sb.b1, c.p * l * std::sqrt(c.r / t)).value / c.p +
                       sup_shift_cgf(m, sb.b2, c.p * l * std::sqrt(c.s / t)).value / c.p +
                       leak_profile_cgf(m, c.cross, -q * l / std::sqrt(t)) / q;
    if (opts.monte_carlo) {
      rep.rows.push_back(make_mc_row(kAnchorSplitUpper, inst, l, "all lambda",
                                     mc.cgf(sb.whole.shifted(lhs.shift), l), rhs));
    } else {
      rep.rows.push_back(
          make_row(kAnchorSplitUpper, inst, l, "all lambda", Evidence::kExact, lhs.value, rhs));
    }
  }
  return rep;
}

Report check_split_lower(const FieldModel& m, const SplitCase& c,
                         const std::vector<double>& lambdas, const VerifyOptions& opts) {
  const SplitBoxes sb = split_boxes(m, c);
  const double t = c.r + c.s;
  const double q = c.p / (c.p - 1.0);
  const std::string inst = split_instance(m, sb, c);
  Report rep;
  SampleCache mc(m, opts);
  for (double l : lambdas) {
    const double l1 = l * std::sqrt(c.r / t);
    const double l2 = l * std::sqrt(c.s / t);
    // Both halves sit at the same position, so the sup runs over common shifts.
    const ShiftSup lhs = sup_over(m, {sb.b1, sb.b2}, 8, [&](const std::vector<double>& s) {
      return exact_cgf(m, sb.b1.shifted(s), l1) + exact_cgf(m, sb.b2.shifted(s), l2);
    });
    const double rhs = sup_shift_cgf(m, sb.whole, c.p * l).value / c.p +
                       leak_profile_cgf(m, c.cross, q * l / std::sqrt(t)) / q;
    if (opts.monte_carlo) {
      CgfEstimate e1 = mc.cgf(sb.b1.shifted(lhs.shift), l1);
      const CgfEstimate e2 = mc.cgf(sb.b2.shifted(lhs.shift), l2);
      e1.point += e2.point;
      e1.lower += e2.lower;
      e1.upper += e2.upper;
      rep.rows.push_back(make_mc_row(kAnchorSplitLower, inst, l, "all lambda", e1, rhs));
    } else {
      rep.rows.push_back(
          make_row(kAnchorSplitLower, inst, l, "all lambda", Evidence::kExact, lhs.value, rhs));
    }
  }
  return rep;
}

Report check_moderate_window(const FieldModel& m, double C2, const std::vector<BoxSpec>& boxes,
                             const std::vector<double>& fractions, const VerifyOptions& opts) {
  m.validate();
  if (!(C2 > 0)) fail(ErrorCode::kInvalidArgument, "C2 must be positive");
  const Scaling sc(m.dim);
  Report rep;
  SampleCache mc(m, opts);
  for (const auto& b : boxes) {
    if (b.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
    const double v = b.volume();
    const bool admissible = v >= std::pow(C2, m.dim) && b.width() >= C2;
    const double edge = std::sqrt(sc.S(v)) / log_pow(v, m.dim - 1) / C2;
    const std::string window = edge_text("C2|lambda| <= sqrt(S(v)) / log^(d-1) v", edge);
    const std::string inst = model_box(m, b) + "; C2=" + fmt(C2);
    for (double f : fractions) {
      if (std::abs(f) > 1.0 || !admissible) {
        ++rep.refused;
        continue;
      }
      const double l = f * edge;
      const ShiftSup lhs = sup_shift_cgf(m, b, l);
      const double rhs = C2 * l * l;
      if (opts.monte_carlo) {
        rep.rows.push_back(make_mc_row(kAnchorModerateWindow, inst, l, window,
                                       mc.cgf(b.shifted(lhs.shift), l), rhs));
      } else {
        rep.rows.push_back(
            make_row(kAnchorModerateWindow, inst, l, window, Evidence::kExact, lhs.value, rhs));
      }
    }
  }
  return rep;
}

Report check_theorem(const FieldModel& m, double C, const std::vector<BoxSpec>& boxes,
                     const std::vector<double>& fractions, const VerifyOptions& opts) {
  m.validate();
  if (std::isinf(C)) fail(ErrorCode::kUnsupported, "C exceeds the double range");
  if (!(C > 0)) fail(ErrorCode::kInvalidArgument, "C must be positive");
  Report rep;
  for (const auto& b : boxes) {
    if (b.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
    const double v = b.volume();
    if (!(v > 1.0)) {
      rep.refused += fractions.size();
      continue;
    }
    const double edge = 1.0 / (C * log_pow(v, m.dim));
    std::string window = edge_text("C|lambda| <= 1/log^d vol B", edge);
    if (b.width() < C) window += "; extrapolated: width B below C";
    const std::string inst = model_box(m, b) + "; C=" + fmt(C);
    const double rhs = C * v;
    std::vector<double> xs;
    for (double f : fractions) {
      if (std::abs(f) > 1.0 || f == 0.0) {
        ++rep.refused;
        continue;
      }
      const double l = f * edge;
      if (opts.monte_carlo) {
        if (xs.empty()) xs = box_samples(m, b, false, opts);
        CgfEstimate e = empirical_cgf(xs, l, opts.confidence, opts.batches);
        const long double l2 = static_cast<long double>(l) * l;
        e.point = static_cast<double>(e.point / l2);
        e.lower = static_cast<double>(e.lower / l2);
        e.upper = static_cast<double>(e.upper / l2);
        ReportRow row = make_mc_row(kAnchorTheorem, inst, l, window, e, rhs);
        row.normalized = true;
        rep.rows.push_back(row);
      } else {
        double lhs = 0.0;
        for (const auto& c : box_classes(m.kind, b)) {
          lhs += static_cast<double>(c.count) * c.weight * c.weight * m.cell.cgf_ratio(l * c.weight);
        }
        rep.rows.push_back(make_row(kAnchorTheorem, inst, l, window, Evidence::kExact, lhs, rhs,
                                    true));
      }
    }
  }
  return rep;
}

Report check_leak_bounds(const FieldModel& m, double C1, const std::vector<LeakCase>& cases,
                         const std::vector<double>& fractions) {
  m.validate();
  if (!(C1 > 0)) fail(ErrorCode::kInvalidArgument, "C1 must be positive");
  Report rep;
  for (const auto& c : cases) {
    std::ostringstream inst;
    inst << m.describe() << "; split axis " << c.split.axis << " at r=" << fmt(c.split.r)
         << ", a=" << fmt(c.a) << ", b=" << fmt(c.b);
    double vol = 1.0;
    double edge = 1.0 / C1;
    bool admissible = true;
    std::string window = edge_text("C1|lambda| <= 1", edge);
    if (m.dim > 1) {
      inst << "; B=" << c.cross.to_string();
      vol = c.cross.volume();
      admissible = c.cross.width() >= C1 && vol > 1.0;
      edge = admissible ? 1.0 / (C1 * log_pow(vol, m.dim - 1)) : 0.0;
      window = edge_text("C1|lambda| <= 1/log^(d-1) vol B, width B >= C1", edge);
    }
    for (double f : fractions) {
      if (std::abs(f) > 1.0 || !admissible) {
        ++rep.refused;
        continue;
      }
      const double l = f * edge;
      const double lhs = exact_leak_cgf(m, c.split, c.a, c.b, c.cross, l);
      rep.rows.push_back(make_row(kAnchorLeakQuadratic, inst.str(), l, window, Evidence::kExact,
                                  lhs, C1 * vol * l * l));
    }
  }
  return rep;
}

}  // namespace mdcert
