#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mdcert/core.hpp"
#include "mdcert/fields.hpp"
#include "mdcert/mgf.hpp"

namespace mdcert {

enum class Evidence { kExact, kUpperConf };
const char* evidence_name(Evidence e);

// Absolute tolerance on rhs - lhs for exact rows; upper_conf rows get none.
inline constexpr double kExactTolerance = 1e-9;

struct ReportRow {
  std::string anchor;
  std::string instance;
  double lambda = 0.0;
  std::string window;
  Evidence evidence = Evidence::kExact;
  double lhs = 0.0;        // exact value or upper confidence end
  double lhs_point = 0.0;  // point estimate (= lhs for exact rows)
  double lhs_lower = 0.0;  // lower confidence end (= lhs for exact rows)
  double rhs = 0.0;
  bool normalized = false;  // lhs and rhs divided by lambda^2
  bool pass = false;

  double slack() const { return rhs - lhs; }
};

ReportRow make_row(std::string anchor, std::string instance, double lambda, std::string window,
                   Evidence evidence, double lhs, double rhs, bool normalized = false);
ReportRow make_mc_row(std::string anchor, std::string instance, double lambda,
                      std::string window, const CgfEstimate& est, double rhs);

struct Report {
  std::vector<ReportRow> rows;
  std::size_t refused = 0;  // grid points outside the cited window

  void append(const Report& other);
  bool all_passed() const;
  std::size_t failures() const;
};

// Fixed set of anchor names a report row may cite.
const std::vector<std::string>& anchor_registry();
bool is_registered_anchor(const std::string& name);
// Throws kInvalidArgument for a name outside the registry.
void require_registered_anchor(const std::string& name);

inline constexpr const char* kAnchorSubgaussianMoment = "subgaussian_moment";
inline constexpr const char* kAnchorHalvingHolder = "halving_holder";
inline constexpr const char* kAnchorSplitUpper = "split_holder_upper";
inline constexpr const char* kAnchorSplitLower = "split_holder_lower";
inline constexpr const char* kAnchorModerateWindow = "moderate_window_bound";
inline constexpr const char* kAnchorTheorem = "theorem_bound";
inline constexpr const char* kAnchorLeakQuadratic = "leak_quadratic_bound";

struct VerifyOptions {
  bool monte_carlo = false;  // left sides from samples (upper confidence end)
  std::size_t samples = 100000;
  int threads = 1;
  double confidence = 0.95;
  std::size_t batches = kDefaultBatches;
};

// Supremum over shifts of the normalized CGF of a box. Cell fields are
// scanned at the per-axis breakpoints plus a uniform grid; for gaussian
// cells the per-axis maxima multiply and the value is exact.
struct ShiftSup {
  double value = 0.0;
  std::vector<double> shift;
  bool exact = false;
};
ShiftSup sup_shift_cgf(const FieldModel& m, const BoxSpec& box, double lambda,
                       int grid_points = 8);

// Supremum over leaks of a (d-1)-dimensional cross box of the CGF of
// (1/sqrt(vol)) int Y. The straddle weight t <= 1 is taken to its limit 1.
// For d = 1 this is the CGF of one cell difference.
double leak_profile_cgf(const FieldModel& m, const BoxSpec& crossbox, double mu);

// Box whose axis `axis` (1-based) is `iv` and whose other axes are `cross`.
BoxSpec insert_axis(const BoxSpec& cross, int axis, Interval iv);

// Normalized samples of (1/sqrt(vol B)) int_B X, or unnormalized.
std::vector<double> box_samples(const FieldModel& m, const BoxSpec& box, bool normalized,
                                const VerifyOptions& opts);

// log E exp(lambda Z) <= lambda^2 for E exp|Z| = 2 and |lambda| <= 1.
Report check_subgaussian_moment(const std::vector<ExactDist>& family,
                                const std::vector<double>& lambdas);

struct HalvingCase {
  BoxSpec cross;  // empty for d = 1
  double r = 1.0;
  double p = 2.0;
  double C1 = 3.0;
  int axis = 1;
};
// f_{[-r,r]xB}(lambda) <= (2/p) f_{[0,r]xB}(p lambda/sqrt 2) + C1 (p/(p-1)) lambda^2/(2r)
// at lambda = frac * window edge; |frac| > 1 is refused.
Report check_halving(const FieldModel& m, const HalvingCase& c,
                     const std::vector<double>& fractions, const VerifyOptions& opts);

struct SplitCase {
  BoxSpec cross;
  double r = 1.0;
  double s = 1.0;
  double p = 2.0;
  int axis = 1;
};
Report check_split_upper(const FieldModel& m, const SplitCase& c,
                         const std::vector<double>& lambdas, const VerifyOptions& opts);
Report check_split_lower(const FieldModel& m, const SplitCase& c,
                         const std::vector<double>& lambdas, const VerifyOptions& opts);

// f(lambda) <= C2 lambda^2 on boxes of volume v >= C2^d and width >= C2 for
// lambda = frac * sqrt(S(v)) / (C2 log^(d-1) v).
Report check_moderate_window(const FieldModel& m, double C2, const std::vector<BoxSpec>& boxes,
                             const std::vector<double>& fractions, const VerifyOptions& opts);

// log E exp(lambda int_B X) <= C vol(B) lambda^2 at lambda = frac / (C log^d vol B).
// Rows are normalized by lambda^2. Boxes narrower than C are evaluated and
// marked as extrapolated in the window column.
Report check_theorem(const FieldModel& m, double C, const std::vector<BoxSpec>& boxes,
                     const std::vector<double>& fractions, const VerifyOptions& opts);

struct LeakCase {
  SplitSpec split;
  double a = 0.0;
  double b = 1.0;
  BoxSpec cross;
};
// d = 1: log E exp(lambda Y) <= C1 lambda^2 on C1|lambda| <= 1.
// d >= 2: log E exp(lambda int_B Y) <= C1 vol(B) lambda^2 on
// C1|lambda| <= 1/log^(d-1) vol B with width B >= C1.
Report check_leak_bounds(const FieldModel& m, double C1, const std::vector<LeakCase>& cases,
                         const std::vector<double>& fractions);

}  // namespace mdcert
