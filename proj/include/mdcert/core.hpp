#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdcert/error.hpp"

namespace mdcert {

// Relative slack used by every comparison that gates a certificate.
inline constexpr double kCertSlack = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
};

// Axis-aligned box in R^d. Axes are 1-based in user-facing results and
// 0-based for indexing.
class BoxSpec {
 public:
  BoxSpec() = default;
  explicit BoxSpec(std::vector<Interval> intervals);

  static BoxSpec cube(int dim, double side);
  static BoxSpec from_sides(std::span<const double> sides);

  int dim() const { return static_cast<int>(intervals_.size()); }
  const Interval& operator[](int axis) const { return intervals_[axis]; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  double volume() const;
  double width() const;
  double side(int axis) const { return intervals_[axis].length(); }

  BoxSpec shifted(std::span<const double> shift) const;
  BoxSpec with_interval(int axis, Interval iv) const;
  // Drops one axis, giving the (d-1)-dimensional cross-section box.
  BoxSpec without_axis(int axis) const;
  // Moves `axis` to position 0 and keeps the order of the others.
  BoxSpec axis_first(int axis) const;

  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;
};

struct VolumeWidth {
  double volume;
  double width;
};

VolumeWidth box_volume_width(const BoxSpec& b);

struct Halving {
  BoxSpec half;
  int axis;          // 1-based
  double r;          // half of the halved side
  double midpoint;   // coordinate of the cutting hyperplane
};

// Left half along the longest axis; ties go to the lowest axis index.
Halving halve_longest(const BoxSpec& b);

// Quadratic domination certificate: f(lambda) <= a lambda^2 for |lambda| <= delta.
struct QuadCert {
  double a = 0.0;
  double delta = 0.0;

  double bound(double lambda) const { return a * lambda * lambda; }
  bool covers(double lambda) const { return std::abs(lambda) <= delta; }
};

// True iff c1 is at least as strong as c2.
bool cert_subsumes(const QuadCert& c1, const QuadCert& c2);

struct EngineConstants {
  double eps = 1.0;
  double C1 = 3.0;
  double C2 = 3.0;
  double C = 3.0;
  double Md = 2.0;
  double Nd = 8.0;
  int dim = 1;

  // Throws kInvalidArgument naming the first violated relation.
  void validate() const;
};

// R(v) = v^(1/d), S(v) = v^((d-1)/d) and the log^k convention.
class Scaling {
 public:
  explicit Scaling(int dim);

  int dim() const { return dim_; }
  double R(double v) const;
  double S(double v) const;

 private:
  int dim_;
};

// log^k(x) with log^0(x) = 1 for every x.
double log_pow(double x, int k);
long double log_pow(long double x, int k);

// Conservative rounding for certificate arithmetic.
double round_up(double x);
double round_down(double x);

// lhs <= rhs up to kCertSlack relative to the larger magnitude.
bool leq_slack(double lhs, double rhs);

// Result of one named inequality inside a computation.
struct NamedCheck {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;

  double slack() const { return rhs - lhs; }
};

NamedCheck make_check(std::string name, double lhs, double rhs);

}  // namespace mdcert
