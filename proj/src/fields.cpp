#include "mdcert/fields.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace mdcert {

namespace {

// Antiderivative of 6u(1-u).
double kernel_mass(double u) { return u * u * (3.0 - 2.0 * u); }

struct AxisCell {
  std::int64_t z;
  double w;
};

std::vector<AxisCell> axis_cells(FieldKind kind, Interval iv) {
  std::vector<AxisCell> out;
  const auto z0 = static_cast<std::int64_t>(std::floor(iv.lo));
  const auto z1 = static_cast<std::int64_t>(std::ceil(iv.hi));
  for (std::int64_t z = z0; z < z1; ++z) {
    const double w = axis_weight(kind, z, iv.lo, iv.hi);
    if (w > 0) out.push_back({z, w});
  }
  return out;
}

// Calls f(z, weight) for every cell meeting the box.
template <class F>
void for_each_cell(FieldKind kind, const std::vector<Interval>& ivs, F&& f) {
  const int d = static_cast<int>(ivs.size());
  std::vector<std::vector<AxisCell>> axes;
  for (const auto& iv : ivs) {
    axes.push_back(axis_cells(kind, iv));
    if (axes.back().empty()) return;
  }
  std::vector<size_t> idx(d, 0);
  std::vector<std::int64_t> z(d);
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      z[j] = axes[j][idx[j]].z;
      w *= axes[j][idx[j]].w;
    }
    f(std::span<const std::int64_t>(z), w);
    int j = d - 1;
    while (j >= 0 && ++idx[j] == axes[j].size()) idx[j--] = 0;
    if (j < 0) return;
  }
}

std::vector<Interval> insert_axis(const BoxSpec& cross, int axis0, Interval iv) {
  std::vector<Interval> ivs = cross.intervals();
  ivs.insert(ivs.begin() + axis0, iv);
  return ivs;
}

void check_split(const FieldModel& m, const SplitSpec& s, double a, double b,
                 const BoxSpec& cross) {
  if (s.axis < 1 || s.axis > m.dim) fail(ErrorCode::kInvalidArgument, "split axis out of range");
  if (!(a < s.r && s.r < b)) fail(ErrorCode::kInvalidArgument, "split needs a < r < b");
  if (cross.dim() != m.dim - 1) {
    fail(ErrorCode::kInvalidArgument, "cross box must have dimension d - 1");
  }
}

// URBG adaptor so std distributions draw from a counter-based stream.
struct CounterEngine {
  using result_type = std::uint64_t;
  CounterRng rng;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return rng.next(); }
};

// Sum of n iid cells in closed form where one exists.
double sample_sum(const CellDist& c, std::int64_t n, CounterEngine& g) {
  const double dn = static_cast<double>(n);
  auto plain = [&]() -> double {
    switch (c.kind) {
      case CellKind::kGaussian:
        return c.param * std::sqrt(dn) * std::normal_distribution<double>(0.0, 1.0)(g);
      case CellKind::kExponential:
        return (std::gamma_distribution<double>(dn, 1.0)(g) - dn) / c.param;
      case CellKind::kTwoPoint: {
        const auto k = std::binomial_distribution<std::int64_t>(n, 0.5)(g);
        return c.param * static_cast<double>(2 * k - n);
      }
      case CellKind::kUniform: {
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += c.param * (2.0 * g.rng.uniform() - 1.0);
        return s;
      }
    }
    return 0.0;
  };
  if (!c.difference) return plain();
  if (c.kind == CellKind::kGaussian) {
    return c.param * std::sqrt(2.0 * dn) * std::normal_distribution<double>(0.0, 1.0)(g);
  }
  const double x = plain();
  return x - plain();
}

double sample_classes(const CellDist& c, const std::vector<AxisClass>& classes,
                      CounterEngine& g) {
  double s = 0.0;
  for (const auto& k : classes) s += k.weight * sample_sum(c, k.count, g);
  return s;
}

}  // namespace

FieldKind field_kind_from_name(const std::string& name) {
  if (name == "cell") return FieldKind::kCell;
  if (name == "kernel") return FieldKind::kKernel;
  fail(ErrorCode::kInvalidArgument, "unknown field kind '" + name + "'");
}

const char* field_kind_name(FieldKind k) { return k == FieldKind::kCell ? "cell" : "kernel"; }

FieldModel FieldModel::make(int dim, FieldKind kind, CellDist cell, std::uint64_t seed) {
  FieldModel m;
  m.dim = dim;
  m.kind = kind;
  m.cell = cell;
  m.seed = seed;
  m.validate();
  m.eps = solve_eps(cell);
  return m;
}

void FieldModel::validate() const {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "field dimension must be >= 1");
  cell.validate();
}

std::string FieldModel::describe() const {
  std::ostringstream os;
  os << field_kind_name(kind) << " field, d=" << dim << ", cells " << cell.name() << "("
     << cell.param << ")";
  return os.str();
}

double axis_weight(FieldKind kind, std::int64_t z, double lo, double hi) {
  const double zf = static_cast<double>(z);
  const double a = std::max(lo, zf);
  const double b = std::min(hi, zf + 1.0);
  if (!(b > a)) return 0.0;
  if (kind == FieldKind::kCell) return b - a;
  return kernel_mass(b - zf) - kernel_mass(a - zf);
}

std::vector<AxisClass> axis_classes(FieldKind kind, Interval iv) {
  const auto z0 = static_cast<std::int64_t>(std::floor(iv.lo));
  const auto z1 = static_cast<std::int64_t>(std::ceil(iv.hi)) - 1;
  std::vector<AxisClass> out;
  auto add = [&](double w, std::int64_t n) {
    if (!(w > 0) || n <= 0) return;
    for (auto& c : out) {
      if (c.weight == w) {
        c.count += n;
        return;
      }
    }
    out.push_back({w, n});
  };
  if (z0 == z1) {
    add(axis_weight(kind, z0, iv.lo, iv.hi), 1);
    return out;
  }
  add(axis_weight(kind, z0, iv.lo, iv.hi), 1);
  add(1.0, z1 - z0 - 1);
  add(axis_weight(kind, z1, iv.lo, iv.hi), 1);
  return out;
}

std::vector<AxisClass> box_classes(FieldKind kind, const BoxSpec& box) {
  std::vector<AxisClass> acc{{1.0, 1}};
  for (int j = 0; j < box.dim(); ++j) {
    std::vector<AxisClass> next;
    for (const auto& a : acc) {
      for (const auto& b : axis_classes(kind, box[j])) {
        next.push_back({a.weight * b.weight, a.count * b.count});
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::uint64_t SplitSpec::tag() const {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(r));
  std::memcpy(&bits, &r, sizeof(bits));
  return mix_in(mix_in(0x5EEDULL, static_cast<std::uint64_t>(axis)), bits);
}

double cell_value(const FieldModel& m, std::uint64_t stream, std::span<const std::int64_t> z,
                  std::uint64_t replica, std::uint64_t tag) {
  const std::uint64_t seed = stream == kStreamOriginal ? m.seed : mix_in(m.seed, tag);
  CounterRng rng(cell_key(seed, stream, z, replica));
  return m.cell.sample(rng);
}

double sample_box_integral(const FieldModel& m, const BoxSpec& box, std::uint64_t replica) {
  if (box.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  double s = 0.0;
  for_each_cell(m.kind, box.intervals(), [&](std::span<const std::int64_t> z, double w) {
    s += w * cell_value(m, kStreamOriginal, z, replica);
  });
  return s;
}

double sample_split_integral(const FieldModel& m, const SplitSpec& split, SplitPart part,
                             const BoxSpec& box, std::uint64_t replica) {
  if (box.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  if (split.axis < 1 || split.axis > m.dim) {
    fail(ErrorCode::kInvalidArgument, "split axis out of range");
  }
  const int k = split.axis - 1;
  const std::uint64_t tag = split.tag();
  double s = 0.0;
  for_each_cell(m.kind, box.intervals(), [&](std::span<const std::int64_t> z, double w) {
    const bool left = static_cast<double>(z[k]) < split.r;
    std::uint64_t stream = kStreamOriginal;
    if (part == SplitPart::kMinus && !left) stream = kStreamMinus;
    if (part == SplitPart::kPlus && left) stream = kStreamPlus;
    s += w * cell_value(m, stream, z, replica, tag);
  });
  return s;
}

double leak_axis_weight(const FieldModel& m, const SplitSpec& split, double a, double b) {
  if (!(a < split.r && split.r < b)) fail(ErrorCode::kInvalidArgument, "split needs a < r < b");
  const double s = std::floor(split.r);
  if (s == split.r) return 0.0;
  return axis_weight(m.kind, static_cast<std::int64_t>(s), split.r, b);
}

double sample_leak(const FieldModel& m, const SplitSpec& split, double a, double b,
                   const BoxSpec& crossbox, std::uint64_t replica) {
  check_split(m, split, a, b, crossbox);
  const double t = leak_axis_weight(m, split, a, b);
  if (t == 0.0) return 0.0;
  const int k = split.axis - 1;
  const auto s = static_cast<std::int64_t>(std::floor(split.r));
  const std::uint64_t tag = split.tag();
  std::vector<std::int64_t> full(m.dim);
  double sum = 0.0;
  auto add = [&](std::span<const std::int64_t> zc, double w) {
    for (int j = 0, c = 0; j < m.dim; ++j) full[j] = j == k ? s : zc[c++];
    sum += w * (cell_value(m, kStreamPlus, full, replica, tag) -
                cell_value(m, kStreamOriginal, full, replica));
  };
  if (m.dim == 1) {
    add({}, 1.0);
  } else {
    for_each_cell(m.kind, crossbox.intervals(), add);
  }
  return t * sum;
}

double sample_leak_structural(const FieldModel& m, const SplitSpec& split, double a, double b,
                              const BoxSpec& crossbox, std::uint64_t replica) {
  check_split(m, split, a, b, crossbox);
  const int k = split.axis - 1;
  const BoxSpec left(insert_axis(crossbox, k, {a, split.r}));
  const BoxSpec right(insert_axis(crossbox, k, {split.r, b}));
  const BoxSpec whole(insert_axis(crossbox, k, {a, b}));
  return sample_split_integral(m, split, SplitPart::kMinus, left, replica) +
         sample_split_integral(m, split, SplitPart::kPlus, right, replica) -
         sample_split_integral(m, split, SplitPart::kOriginal, whole, replica);
}

double sample_box_integral_fast(const FieldModel& m, const BoxSpec& box, std::uint64_t stream,
                                std::uint64_t replica) {
  if (box.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  CounterEngine g{CounterRng(cell_key(mix_in(m.seed, 0xFA57ULL), stream, {}, replica))};
  return sample_classes(m.cell, box_classes(m.kind, box), g);
}

double sample_leak_fast(const FieldModel& m, const SplitSpec& split, double a, double b,
                        const BoxSpec& crossbox, std::uint64_t replica) {
  check_split(m, split, a, b, crossbox);
  const double t = leak_axis_weight(m, split, a, b);
  if (t == 0.0) return 0.0;
  CounterEngine g{CounterRng(cell_key(mix_in(m.seed, split.tag()), 0x1EA4ULL, {}, replica))};
  const std::vector<AxisClass> classes =
      m.dim == 1 ? std::vector<AxisClass>{{1.0, 1}} : box_classes(m.kind, crossbox);
  return t * sample_classes(m.cell.diff(), classes, g);
}

double box_variance(const FieldModel& m, const BoxSpec& box) {
  double s = 0.0;
  for (const auto& c : box_classes(m.kind, box)) s += c.sum_sq();
  return m.cell.variance() * s;
}

double exact_cgf(const FieldModel& m, const BoxSpec& box, double lambda, bool normalized) {
  if (box.dim() != m.dim) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  if (lambda == 0.0) return 0.0;
  const double scale = normalized ? 1.0 / std::sqrt(box.volume()) : 1.0;
  double s = 0.0;
  for (const auto& c : box_classes(m.kind, box)) {
    s += static_cast<double>(c.count) * m.cell.cgf(lambda * c.weight * scale);
  }
  return s;
}

double exact_cgf_gaussian(const FieldModel& m, const BoxSpec& box, double lambda) {
  if (m.cell.kind != CellKind::kGaussian) {
    fail(ErrorCode::kUnsupported, "oracle requires gaussian cells");
  }
  return 0.5 * lambda * lambda * box_variance(m, box) / box.volume();
}

double exact_leak_cgf(const FieldModel& m, const SplitSpec& split, double a, double b,
                      const BoxSpec& crossbox, double lambda) {
  check_split(m, split, a, b, crossbox);
  const double t = leak_axis_weight(m, split, a, b);
  if (t == 0.0 || lambda == 0.0) return 0.0;
  const CellDist dz = m.cell.diff();
  if (m.dim == 1) return dz.cgf(lambda * t);
  double s = 0.0;
  for (const auto& c : box_classes(m.kind, crossbox)) {
    s += static_cast<double>(c.count) * dz.cgf(lambda * t * c.weight);
  }
  return s;
}

std::vector<std::vector<double>> uniform_shift_grid(int dim, int points_per_axis) {
  if (dim < 1 || points_per_axis < 1) fail(ErrorCode::kInvalidArgument, "bad shift grid");
  std::vector<std::vector<double>> out{{}};
  for (int j = 0; j < dim; ++j) {
    std::vector<std::vector<double>> next;
    for (const auto& s : out) {
      for (int i = 0; i < points_per_axis; ++i) {
        auto t = s;
        t.push_back(static_cast<double>(i) / points_per_axis);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

double shifted_sup_cgf(const FieldModel& m, const BoxSpec& box, double lambda,
                       const std::vector<std::vector<double>>& shift_grid) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : shift_grid) best = std::max(best, exact_cgf(m, box.shifted(s), lambda));
  return best;
}

MomentHypothesisResult verify_moment_hypothesis(const FieldModel& m, const BoxSpec& refbox, double eps,
                              const std::vector<std::vector<double>>& shift_grid,
                              std::size_t samples, double confidence) {
  if (!(eps > 0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  const boost::math::normal_distribution<double> nd;
  const double zq = boost::math::quantile(nd, confidence);
  MomentHypothesisResult res;
  res.evidence = "exact";
  res.worst = 0.0;
  for (const auto& s : shift_grid) {
    const BoxSpec box = refbox.shifted(s);
    double value = 0.0;
    std::int64_t ncells = 0;
    for (const auto& c : box_classes(m.kind, box)) ncells += c.count;
    if (m.cell.kind == CellKind::kGaussian) {
      value = CellDist::gaussian(std::sqrt(box_variance(m, box))).abs_exp_moment(eps);
    } else if (m.cell.kind == CellKind::kTwoPoint && ncells <= 20) {
      std::vector<double> w;
      for (const auto& c : box_classes(m.kind, box)) w.insert(w.end(), c.count, c.weight);
      const std::size_t patterns = std::size_t{1} << w.size();
      double acc = 0.0;
      for (std::size_t bits = 0; bits < patterns; ++bits) {
        double x = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          x += (bits >> i & 1 ? 1.0 : -1.0) * w[i] * m.cell.param;
        }
        acc += std::exp(eps * std::abs(x));
      }
      value = acc / static_cast<double>(patterns);
    } else {
      if (samples < 2) fail(ErrorCode::kInsufficientSamples, "insufficient samples");
      double mean = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < samples; ++i) {
        const double x = std::exp(eps * std::abs(sample_box_integral(m, box, i)));
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
      }
      const double sd = std::sqrt(m2 / static_cast<double>(samples - 1));
      value = mean + zq * sd / std::sqrt(static_cast<double>(samples));
      res.evidence = "upper_conf";
    }
    if (value >= res.worst) {
      res.worst = value;
      res.worst_shift = s;
    }
  }
  res.passed = res.worst <= 2.0;
  return res;
}

LeakConstant leak_constant(const FieldModel& m) {
  m.validate();
  if (m.cell.difference) fail(ErrorCode::kUnsupported, "leak constant needs a base cell law");
  LeakConstant lc;
  if (m.dim == 1) {
    // The straddling weight is below 1, so the full-cell difference is the worst leak.
    lc.eps_leak = solve_eps(m.cell.diff());
    lc.C1 = std::max(1.0 / (lc.eps_leak * lc.eps_leak), 1.0);
  } else {
    // Width >= C1 >= e keeps log^(d-1) vol >= 1 inside the leak window.
    lc.C1 = std::max(quadratic_cgf_constant(m.cell.diff()), std::numbers::e);
  }
  return lc;
}

double ks_statistic(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) fail(ErrorCode::kInsufficientSamples, "insufficient samples");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  size_t i = 0, j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return best;
}

}  // namespace mdcert
