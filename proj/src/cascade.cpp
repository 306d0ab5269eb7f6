#include "mdcert/cascade.hpp"
#include "mdcert/holder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mdcert {

namespace {

constexpr int kMaxDepth = 100000;

// Sum over i >= 1 of 2^{-i/(2d)}.
double half_geometric(int d) { return 1.0 / (std::pow(2.0, 1.0 / (2.0 * d)) - 1.0); }

// Collapses per-k inequalities into one check carrying the worst index.
class WorstOf {
 public:
  explicit WorstOf(std::string name) : name_(std::move(name)) {}

  void add(int k, double lhs, double rhs) {
    const double excess = (lhs - rhs) / std::max({std::abs(rhs), std::abs(lhs), 1e-300});
    if (!seen_ || excess > excess_) {
      seen_ = true;
      excess_ = excess;
      k_ = k;
      lhs_ = lhs;
      rhs_ = rhs;
    }
  }

  NamedCheck finish() const {
    if (!seen_) return make_check(name_ + " [vacuous]", 0.0, 0.0);
    std::ostringstream os;
    os << name_ << " [worst k=" << k_ << "]";
    return make_check(os.str(), lhs_, rhs_);
  }

 private:
  std::string name_;
  bool seen_ = false;
  double excess_ = 0.0;
  int k_ = 0;
  double lhs_ = 0.0;
  double rhs_ = 0.0;
};

void validate(const CascadeParams& in) {
  if (in.dim < 1) fail(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (in.box0.dim() != in.dim) fail(ErrorCode::kInvalidArgument, "box0 dimension mismatch");
  if (static_cast<int>(in.n_axis.size()) != in.dim) {
    fail(ErrorCode::kInvalidArgument, "n_axis must have one entry per axis");
  }
  for (int n : in.n_axis) {
    if (n < 0) fail(ErrorCode::kInvalidArgument, "n_axis entries must be >= 0");
  }
  if (!(in.a > 0) || !(in.delta > 0) || !(in.C1 > 0) || !(in.Cbig > 0)) {
    fail(ErrorCode::kInvalidArgument, "a, delta, C1, Cbig must be positive");
  }
}

// Closed-form sequences of the cascade, evaluated for any k.
struct Sequences {
  Scaling sc;
  double a, C1, vol0, R0, step;

  Sequences(const CascadeParams& in)
      : sc(in.dim), a(in.a), C1(in.C1), vol0(in.box0.volume()),
        R0(sc.R(vol0)), step(std::sqrt(in.C1 / sc.R(vol0))) {}

  double volume(int k) const { return std::ldexp(vol0, k); }
  double A(int k) const {
    double sum = 0.0;
    for (int i = 1; i <= k; ++i) sum += std::pow(2.0, -i / (2.0 * sc.dim()));
    return std::sqrt(a) + step * sum;
  }
  double x(int k) const { return std::sqrt(C1 / sc.R(volume(k + 1))); }
  double M(int k) const {
    const double s = sc.S(volume(k));
    return std::sqrt(s / a) / log_pow(s, sc.dim() - 1) / C1;
  }
};

}  // namespace

bool CascadeTrace::all_passed() const { return first_failure() == nullptr; }

const NamedCheck* CascadeTrace::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

const NamedCheck* CascadeTrace::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name.rfind(name, 0) == 0) return &c;
  }
  return nullptr;
}

CascadeTrace run_cascade(const CascadeParams& in) {
  validate(in);
  const int d = in.dim;
  const Sequences seq(in);
  const Scaling& sc = seq.sc;

  CascadeTrace t;
  t.params = in;
  for (int n : in.n_axis) t.n += n;

  // Input hypotheses.
  for (int j = 0; j < d; ++j) {
    std::ostringstream lo, hi;
    lo << "box0 side " << j + 1 << " >= Cbig";
    hi << "box0 side " << j + 1 << " < 2 Cbig";
    t.checks.push_back(make_check(lo.str(), in.Cbig, in.box0.side(j)));
    NamedCheck upper = make_check(hi.str(), in.box0.side(j), 2.0 * in.Cbig);
    upper.passed = in.box0.side(j) < 2.0 * in.Cbig;
    t.checks.push_back(upper);
  }
  t.checks.push_back(make_check("a >= Cbig / R(vol B0)", in.Cbig / seq.R0, in.a));
  t.checks.push_back(make_check("Cbig >= C1", in.C1, in.Cbig));

  // Halving geometry from the target box down to B0.
  {
    std::vector<Interval> ivs;
    for (int j = 0; j < d; ++j) {
      const Interval iv = in.box0[j];
      ivs.push_back({iv.lo, iv.lo + std::ldexp(iv.length(), in.n_axis[j])});
    }
    BoxSpec box(std::move(ivs));
    WorstOf longest("halved side 2r >= R(vol B_{k+1})");
    WorstOf cross("cross-section vol <= S(vol B_{k+1})");
    for (int k = t.n - 1; k >= 0; --k) {
      const double vol = box.volume();
      const Halving h = halve_longest(box);
      longest.add(k, sc.R(vol), 2.0 * h.r);
      cross.add(k, vol / (2.0 * h.r), sc.S(vol));
      box = h.half;
    }
    t.checks.push_back(longest.finish());
    t.checks.push_back(cross.finish());
    double mismatch = 0.0;
    for (int j = 0; j < d; ++j) mismatch = std::max(mismatch, std::abs(box.side(j) - in.box0.side(j)));
    t.checks.push_back(make_check("halving reaches B0", mismatch, 0.0));
  }

  // Depth N: smallest integer meeting the three conditions.
  const double g2d = std::pow(2.0, 1.0 / (2.0 * d)) - 1.0;
  const double tail_sum = 1.0 / g2d;  // sum_{k>=0} 2^{-(k+1)/(2d)}
  double prod_over_sqrt2 = 1.0;       // prod_{k<N} p_k / sqrt2
  double delta0 = seq.M(0);
  int N = 0;
  for (;; ++N) {
    if (N > kMaxDepth) fail(ErrorCode::kCheckFailed, "cascade depth N exceeds search cap");
    if (N > 0) {
      const double pk = 1.0 + seq.x(N - 1) / seq.A(N - 1);
      prod_over_sqrt2 *= pk / std::sqrt(2.0);
    }
    delta0 = prod_over_sqrt2 * seq.M(N);
    const bool c1 = std::pow(2.0, -(N + 1) / (2.0 * d)) <= g2d;
    const bool c2 = delta0 <= in.delta;
    const bool c3 = std::exp(tail_sum) <= std::pow(2.0, N / (2.0 * d));
    if (c1 && c2 && c3) break;
  }
  t.N = N;
  t.checks.push_back(make_check("N: 2^(-(N+1)/(2d)) <= 2^(1/(2d)) - 1",
                                std::pow(2.0, -(N + 1) / (2.0 * d)), g2d));
  t.checks.push_back(make_check("N: Delta_0 <= delta", delta0, in.delta));
  t.checks.push_back(make_check("N: exp(sum 2^(-(k+1)/(2d))) <= 2^(N/(2d))", std::exp(tail_sum),
                                std::pow(2.0, N / (2.0 * d))));

  // Sequences up to K = max(n, N).
  const int K = std::max(t.n, N);
  for (int k = 0; k <= K; ++k) {
    t.volumes.push_back(seq.volume(k));
    t.A.push_back(seq.A(k));
    t.M.push_back(seq.M(k));
  }
  for (int k = 0; k < K; ++k) {
    const HolderSplit hs = optimal_holder(t.A[k], seq.x(k));
    t.p.push_back(hs.p);
    t.q.push_back(hs.q);
  }
  t.Delta.assign(static_cast<size_t>(K) + 1, 0.0);
  for (int k = K; k >= 0; --k) {
    if (k >= N) {
      t.Delta[k] = t.M[k];
    } else {
      t.Delta[k] = t.p[k] / std::sqrt(2.0) * t.Delta[k + 1];
    }
  }
  t.A_inf = std::sqrt(in.a) + seq.step * half_geometric(d);

  // Recorded inequalities.
  t.checks.push_back(make_check("A_inf <= sqrt(2a)", t.A_inf, std::sqrt(2.0 * in.a)));
  {
    WorstOf inc("A_k strictly increasing");
    for (int k = 0; k < K; ++k) inc.add(k, t.A[k], t.A[k + 1]);
    NamedCheck c = inc.finish();
    for (int k = 0; k < K; ++k) c.passed = c.passed && t.A[k] < t.A[k + 1];
    t.checks.push_back(c);
  }
  WorstOf qbound("q_k <= sqrt(3a/C1) sqrt(R(vol B_{k+1}))");
  WorstOf mrep("q_k <= sqrt(a R(vol B_{k+1}))");
  WorstOf pdecay("p_k - 1 <= 2^(-(k+1)/(2d))");
  WorstOf conj("p_k q_k = p_k + q_k");
  WorstOf dstep("Delta_{k+1} <= (sqrt2/p_k) Delta_k");
  WorstOf mstep("M_{k+1} <= (sqrt2/p_k) M_k for k >= N");
  WorstOf dm("Delta_k <= M_k for k < N");
  WorstOf pdec("p_k nonincreasing");
  for (int k = 0; k < K; ++k) {
    const double Rk1 = sc.R(t.volumes[k + 1]);
    qbound.add(k, t.q[k], std::sqrt(3.0 * in.a / in.C1) * std::sqrt(Rk1));
    mrep.add(k, t.q[k], std::sqrt(in.a * Rk1));
    pdecay.add(k, t.p[k] - 1.0, std::pow(2.0, -(k + 1) / (2.0 * d)));
    const double pq = t.p[k] * t.q[k];
    conj.add(k, std::abs(pq - (t.p[k] + t.q[k])), kCertSlack * pq);
    dstep.add(k, t.Delta[k + 1], std::sqrt(2.0) / t.p[k] * t.Delta[k]);
    if (k >= N) mstep.add(k, t.M[k + 1], std::sqrt(2.0) / t.p[k] * t.M[k]);
    if (k + 1 < K) pdec.add(k, t.p[k + 1], t.p[k]);
  }
  for (int k = 0; k < N; ++k) dm.add(k, t.Delta[k], t.M[k]);
  t.checks.push_back(qbound.finish());
  // With C1 >= 3 this follows from the previous bound; otherwise it is checked directly.
  NamedCheck mcheck = mrep.finish();
  if (in.C1 >= 3.0) mcheck.passed = mcheck.passed || t.find("q_k <= sqrt(3a/C1)")->passed;
  t.checks.push_back(mcheck);
  t.checks.push_back(pdecay.finish());
  t.checks.push_back(conj.finish());
  t.checks.push_back(dstep.finish());
  t.checks.push_back(mstep.finish());
  t.checks.push_back(pdec.finish());
  {
    double prod = 1.0;
    for (int k = 0; k < N; ++k) prod *= t.p[k];
    t.checks.push_back(
        make_check("log-convex endpoint k=0: p_0...p_{N-1} <= 2^(N/(2d))", prod,
                   std::pow(2.0, N / (2.0 * d))));
  }
  t.checks.push_back(dm.finish());
  t.checks.push_back(make_check("target depth n >= N", static_cast<double>(N), t.n));

  if (t.all_passed()) {
    t.result = QuadCert{round_up(2.0 * in.a), round_down(t.M[t.n])};
  }
  return t;
}

CascadeTrace doubling_cascade(const CascadeParams& params) {
  CascadeTrace t = run_cascade(params);
  if (const NamedCheck* f = t.first_failure()) {
    std::ostringstream os;
    os.precision(17);
    os << "cascade inequality failed: " << f->name << " (lhs=" << f->lhs << ", rhs=" << f->rhs
       << ")";
    fail(ErrorCode::kCheckFailed, os.str());
  }
  return t;
}

bool holder_product_bound(const CascadeTrace& t, int k) {
  if (k < 0 || k > t.N) fail(ErrorCode::kInvalidArgument, "k must lie in [0, N]");
  double prod = 1.0;
  for (int j = k; j < t.N; ++j) prod *= t.p[j];
  return leq_slack(prod, std::pow(2.0, (t.N - k) / (2.0 * t.params.dim)));
}

std::vector<NamedCheck> cascade_threshold_checks(double Cbig, double C1, int dim) {
  const double g = half_geometric(dim);
  const double s21 = std::sqrt(2.0) - 1.0;
  const double s32 = std::sqrt(3.0) - std::sqrt(2.0);
  return {
      make_check("Cbig >= C1", C1, Cbig),
      make_check("A_inf <= sqrt(2a): C1 G^2/(sqrt2-1)^2 <= Cbig", C1 * g * g / (s21 * s21), Cbig),
      make_check("q_k bound: C1/(sqrt3-sqrt2)^2 <= Cbig", C1 / (s32 * s32), Cbig),
  };
}

double cascade_threshold(double C1, int dim) {
  if (!(C1 > 0) || dim < 1) fail(ErrorCode::kInvalidArgument, "need C1 > 0 and d >= 1");
  double c = 1.0;
  for (int i = 0; i < 2000; ++i, c *= 2.0) {
    const auto checks = cascade_threshold_checks(c, C1, dim);
    if (std::all_of(checks.begin(), checks.end(), [](const NamedCheck& k) { return k.passed; })) {
      return c;
    }
  }
  fail(ErrorCode::kSearchCap, "cascade threshold search exceeded cap");
}

int uniform_cascade_depth(double C, double C1, int dim, double delta) {
  const int d = dim;
  const double g2d = std::pow(2.0, 1.0 / (2.0 * d)) - 1.0;
  const double tail = std::exp(1.0 / g2d);
  const double base = tail / C1 * std::sqrt(std::pow(2.0 * C, d) / C);
  for (int N = 0; N <= kMaxDepth; ++N) {
    const double scale = std::pow(2.0, N / (2.0 * d));
    if (std::pow(2.0, -(N + 1) / (2.0 * d)) <= g2d && tail <= scale && base / scale <= delta) {
      return N;
    }
  }
  fail(ErrorCode::kSearchCap, "uniform cascade depth exceeds search cap");
}

QuadCert uniform_good_step(const QuadCert& lower_dim, const QuadCert& current, double c,
                           double Cbig) {
  if (!(c > 0) || !(c < Cbig)) fail(ErrorCode::kInvalidArgument, "need 0 < c < Cbig");
  const double a = 2.0 * current.a * Cbig / c + 2.0 * lower_dim.a / c;
  const double delta = std::min(0.5 * current.delta * std::sqrt(c / Cbig),
                                0.5 * lower_dim.delta * std::sqrt(c));
  return {round_up(a), round_down(delta)};
}

QuadCert uniform_good_sweep(const QuadCert& lower_dim, const QuadCert& big_cube, double c,
                            double Cbig, int dim) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  QuadCert cert = big_cube;
  for (int axis = 0; axis < dim; ++axis) cert = uniform_good_step(lower_dim, cert, c, Cbig);
  return cert;
}

double moderate_constant(double C1, double a, int dim, double cascade_C, double V) {
  const double floor = 1.0 + 1e-9;
  return std::max({cascade_C, std::pow(V, 1.0 / dim), 2.0 * a, C1 * std::sqrt(a), floor});
}

}  // namespace mdcert
