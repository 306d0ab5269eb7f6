#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdcert/core.hpp"
#include "mdcert/distributions.hpp"

namespace mdcert {

// Cell field: X_t = xi_z on the unit cell z + [0,1)^d.
// Kernel field: X_t = xi_z k(t - z) with k(u) = prod_j 6 u_j (1 - u_j) on [0,1]^d.
enum class FieldKind { kCell, kKernel };

struct FieldModel {
  int dim = 1;
  FieldKind kind = FieldKind::kCell;
  CellDist cell;
  double eps = 0.0;  // exponential-moment scale for unit reference boxes
  std::uint64_t seed = 0;

  // Fills eps with solve_eps(cell); every unit box is dominated by the aligned cell.
  static FieldModel make(int dim, FieldKind kind, CellDist cell, std::uint64_t seed);
  std::string describe() const;
  void validate() const;
};

FieldKind field_kind_from_name(const std::string& name);
const char* field_kind_name(FieldKind k);

// Integral of the per-axis cell density of cell z over [lo, hi].
double axis_weight(FieldKind kind, std::int64_t z, double lo, double hi);

// Cells meeting one axis interval, grouped by equal weight.
struct AxisClass {
  double weight;
  std::int64_t count;
  double sum_sq() const { return weight * weight * static_cast<double>(count); }
};
std::vector<AxisClass> axis_classes(FieldKind kind, Interval iv);

// Product classes over all axes: at most 3^d entries.
std::vector<AxisClass> box_classes(FieldKind kind, const BoxSpec& box);

// Random streams: the original field and the fresh copies used by a split.
inline constexpr std::uint64_t kStreamOriginal = 0;
inline constexpr std::uint64_t kStreamMinus = 1;
inline constexpr std::uint64_t kStreamPlus = 2;

struct SplitSpec {
  int axis = 1;   // 1-based
  double r = 0.0;
  std::uint64_t tag() const;
};

enum class SplitPart { kOriginal, kMinus, kPlus };

// Value of xi_z in the given stream; fresh streams are keyed by the split tag.
double cell_value(const FieldModel& m, std::uint64_t stream, std::span<const std::int64_t> z,
                  std::uint64_t replica, std::uint64_t tag = 0);

// Coupled sampler: same (seed, replica) gives the same xi_z for every box.
double sample_box_integral(const FieldModel& m, const BoxSpec& box, std::uint64_t replica);

// Integral over `box` of X^0, X^- or X^+ of the split. X^- keeps the
// original cells whose left edge along the split axis is < r and uses fresh
// copies elsewhere; X^+ keeps the original cells with left edge >= r.
double sample_split_integral(const FieldModel& m, const SplitSpec& split, SplitPart part,
                             const BoxSpec& box, std::uint64_t replica);

// Leak integral over the (d-1)-dimensional cross box, reduced to the cells
// straddling the hyperplane. For d = 1 pass an empty cross box.
double sample_leak(const FieldModel& m, const SplitSpec& split, double a, double b,
                   const BoxSpec& crossbox, std::uint64_t replica);

// Same leak from the three box integrals of the defining identity.
double sample_leak_structural(const FieldModel& m, const SplitSpec& split, double a, double b,
                              const BoxSpec& crossbox, std::uint64_t replica);

// Weight of a straddling cell along the split axis: density mass on [r, min(b, ceil r)].
double leak_axis_weight(const FieldModel& m, const SplitSpec& split, double a, double b);

// Distributional sampler for large boxes: sums of equal-weight cells are
// drawn in closed form. Same law as sample_box_integral, not coupled to it.
double sample_box_integral_fast(const FieldModel& m, const BoxSpec& box, std::uint64_t stream,
                                std::uint64_t replica);
double sample_leak_fast(const FieldModel& m, const SplitSpec& split, double a, double b,
                        const BoxSpec& crossbox, std::uint64_t replica);

// Exact oracles.
double box_variance(const FieldModel& m, const BoxSpec& box);
// log E exp(lambda S_B) with S_B = (1/sqrt(vol B)) int_B X, or unnormalized.
double exact_cgf(const FieldModel& m, const BoxSpec& box, double lambda, bool normalized = true);
// Gaussian-only variant; throws "oracle requires gaussian cells" otherwise.
double exact_cgf_gaussian(const FieldModel& m, const BoxSpec& box, double lambda);
// log E exp(lambda int_B Y) for the leak.
double exact_leak_cgf(const FieldModel& m, const SplitSpec& split, double a, double b,
                      const BoxSpec& crossbox, double lambda);

// m points per axis over [0,1)^d.
std::vector<std::vector<double>> uniform_shift_grid(int dim, int points_per_axis);
double shifted_sup_cgf(const FieldModel& m, const BoxSpec& box, double lambda,
                       const std::vector<std::vector<double>>& shift_grid);

struct MomentHypothesisResult {
  bool passed = false;
  double worst = 0.0;             // largest (upper bound on) E exp(eps |int|) over shifts
  std::vector<double> worst_shift;
  std::string evidence;           // "exact" or "upper_conf"
};

MomentHypothesisResult verify_moment_hypothesis(const FieldModel& m, const BoxSpec& refbox, double eps,
                              const std::vector<std::vector<double>>& shift_grid,
                              std::size_t samples, double confidence = 0.95);

// Leak constant: d = 1 gives max(1/eps^2, 1) from the leak moment scale;
// d >= 2 gives the smallest c with K_Y(mu) <= c mu^2 on |mu| <= 1/c for one
// leak cell, which bounds every leak box integral of width >= c.
struct LeakConstant {
  double eps_leak = 0.0;  // d = 1 only
  double C1 = 0.0;
};
LeakConstant leak_constant(const FieldModel& m);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> x, std::vector<double> y);

}  // namespace mdcert
