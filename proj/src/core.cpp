#include "mdcert/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace mdcert {

BoxSpec::BoxSpec(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) fail(ErrorCode::kInvalidArgument, "box needs dim >= 1");
  for (const auto& iv : intervals_) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      fail(ErrorCode::kInvalidArgument, "box interval must satisfy alpha < beta (finite)");
    }
  }
}

BoxSpec BoxSpec::cube(int dim, double side) {
  return BoxSpec(std::vector<Interval>(static_cast<size_t>(dim), Interval{0.0, side}));
}

BoxSpec BoxSpec::from_sides(std::span<const double> sides) {
  std::vector<Interval> ivs;
  ivs.reserve(sides.size());
  for (double s : sides) ivs.push_back({0.0, s});
  return BoxSpec(std::move(ivs));
}

double BoxSpec::volume() const {
  double v = 1.0;
  for (const auto& iv : intervals_) v *= iv.length();
  return v;
}

double BoxSpec::width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals_) w = std::min(w, iv.length());
  return w;
}

BoxSpec BoxSpec::shifted(std::span<const double> shift) const {
  std::vector<Interval> ivs = intervals_;
  for (size_t j = 0; j < ivs.size() && j < shift.size(); ++j) {
    ivs[j].lo += shift[j];
    ivs[j].hi += shift[j];
  }
  return BoxSpec(std::move(ivs));
}

BoxSpec BoxSpec::with_interval(int axis, Interval iv) const {
  std::vector<Interval> ivs = intervals_;
  ivs.at(static_cast<size_t>(axis)) = iv;
  return BoxSpec(std::move(ivs));
}

BoxSpec BoxSpec::without_axis(int axis) const {
  std::vector<Interval> ivs;
  for (int j = 0; j < dim(); ++j) {
    if (j != axis) ivs.push_back(intervals_[j]);
  }
  if (ivs.empty()) return BoxSpec();
  return BoxSpec(std::move(ivs));
}

BoxSpec BoxSpec::axis_first(int axis) const {
  std::vector<Interval> ivs{intervals_.at(static_cast<size_t>(axis))};
  for (int j = 0; j < dim(); ++j) {
    if (j != axis) ivs.push_back(intervals_[j]);
  }
  return BoxSpec(std::move(ivs));
}

std::string BoxSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (int j = 0; j < dim(); ++j) {
    if (j) os << 'x';
    os << '[' << intervals_[j].lo << ',' << intervals_[j].hi << ']';
  }
  return os.str();
}

VolumeWidth box_volume_width(const BoxSpec& b) { return {b.volume(), b.width()}; }

Halving halve_longest(const BoxSpec& b) {
  int axis = 0;
  for (int j = 1; j < b.dim(); ++j) {
    if (b.side(j) > b.side(axis)) axis = j;
  }
  const Interval iv = b[axis];
  const double r = 0.5 * iv.length();
  const double mid = iv.lo + r;
  return {b.with_interval(axis, {iv.lo, mid}), axis + 1, r, mid};
}

bool cert_subsumes(const QuadCert& c1, const QuadCert& c2) {
  return c1.a <= c2.a && c1.delta >= c2.delta;
}

void EngineConstants::validate() const {
  if (!(eps > 0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!(C1 >= 3)) fail(ErrorCode::kInvalidArgument, "C1 must be >= 3");
  if (!(C2 > 1)) fail(ErrorCode::kInvalidArgument, "C2 must be > 1");
  if (!(C1 <= C2 && C2 <= C)) fail(ErrorCode::kInvalidArgument, "need C1 <= C2 <= C");
  const double md_min = 2.0 * std::pow(2.0 * dim, dim - 1);
  if (!(Md >= md_min)) fail(ErrorCode::kInvalidArgument, "Md below 2(2d)^(d-1)");
  const double c_min = std::max({C2, std::exp(1.0 / dim), std::exp(1.0)});
  if (!(C >= c_min)) fail(ErrorCode::kInvalidArgument, "C below max(C2, e^(1/d), e)");
}

Scaling::Scaling(int dim) : dim_(dim) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "dimension must be >= 1");
}

double Scaling::R(double v) const { return std::pow(v, 1.0 / dim_); }

double Scaling::S(double v) const {
  if (dim_ == 1) return 1.0;
  return std::pow(v, static_cast<double>(dim_ - 1) / dim_);
}

double log_pow(double x, int k) {
  if (k == 0) return 1.0;
  return std::pow(std::log(x), k);
}

long double log_pow(long double x, int k) {
  if (k == 0) return 1.0L;
  return std::pow(std::log(x), static_cast<long double>(k));
}

double round_up(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  const double y = x + std::abs(x) * kCertSlack;
  return std::nextafter(y, std::numeric_limits<double>::infinity());
}

double round_down(double x) {
  if (!std::isfinite(x)) return x;
  const double y = x - std::abs(x) * kCertSlack;
  return std::max(0.0, std::nextafter(y, -std::numeric_limits<double>::infinity()));
}

bool leq_slack(double lhs, double rhs) {
  if (lhs <= rhs) return true;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return lhs - rhs <= kCertSlack * scale;
}

NamedCheck make_check(std::string name, double lhs, double rhs) {
  NamedCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.passed = leq_slack(lhs, rhs);
  return c;
}

}  // namespace mdcert
