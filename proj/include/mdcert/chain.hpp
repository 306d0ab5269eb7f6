#pragma once

#include <string>
#include <vector>

#include "mdcert/core.hpp"

namespace mdcert {

// Which hypothesis of the large-lambda argument failed.
enum class ChainFailure {
  kBadInput,
  kMdTooSmall,         // Md below 2 (2d)^(d-1)
  kWindow,             // lambda outside sqrt(S(v))/log^(d-1) v < C|lambda| <= sqrt(v)/log^d v
  kDepth,              // chain length n < 1 (needs Md >= (2d)^(d-1), C >= e)
  kLength,             // n log^(d-1) v > sqrt(v) / (2 C1 |lambda|)
  kNonPositive,        // a chain denominator is not positive
  kEndpointGrowth,     // 2^(n/2) |lambda_0| > 2 |lambda|
  kBaseWindow,         // C |lambda_0| above sqrt(S(v_0)) / log^(d-1) v_0
  kBaseVolume,         // 2 v_0 < (2 C2)^d
};

const char* chain_failure_name(ChainFailure f);

class ChainError : public Error {
 public:
  ChainError(ChainFailure failure, const std::string& what);
  ChainFailure failure() const noexcept { return failure_; }

 private:
  ChainFailure failure_;
};

struct ChainParams {
  int dim = 1;
  double v = 0.0;
  double lambda = 0.0;
  double C = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double Md = 0.0;
};

struct LambdaChain {
  ChainParams params;
  int n = 0;
  double depth_target = 0.0;       // Md^(2d) (C|l|)^(2d) / v^(d-1) log^(2d(d-1))(sqrt v / (C|l|))
  std::vector<double> volumes;     // v_k = 2^-(n-k) v, k = 0..n
  std::vector<double> tilts;       // lambda_k, lambda_n = lambda
  std::vector<double> denominators;  // 1/|lambda| - (C1/sqrt v) sum_{i<k} log^(d-1) S(2^-i v)
  double max_residual = 0.0;       // recursion residual over k
  double phi_increment_sum = 0.0;
};

LambdaChain build_lambda_chain(const ChainParams& params);

// One application of the single-doubling phi bound from v to 2v.
double phi_step_bound(double phi, double v, int dim);
// phi0_bound plus the telescoped increments along the chain.
double phi_chain_bound(const LambdaChain& chain, double phi0_bound);

struct NdFactors {
  double log_factor;   // bound on log^-(d-1) S(2 v_0)
  double geometric;    // sum_{k>=1} 2^(-k/d)
  double growth;       // 2^(1/d) Md^2
  double sup_factor;   // sup_{x>=1} log^(2d-2)(x) / x
  double Nd;
};

NdFactors explicit_Nd_factors(int dim, double Md);
double explicit_Nd(int dim, double Md);

// Weakest admissible Md = 2 (2d)^(d-1).
double default_Md(int dim);

struct TheoremConstant {
  int dim = 1;
  double C1 = 0.0;
  double C2 = 0.0;
  double Md = 0.0;
  double Nd = 0.0;
  long double C = 0.0L;        // accepted search candidate
  long double C_final = 0.0L;  // max(C, 2 C2 + Nd C)
  double log2_C = 0.0;
  double log2_C_final = 0.0;
  int iterations = 0;
  std::vector<NamedCheck> checks;  // sufficient conditions at the accepted candidate

  // C_final as a double; +inf when it exceeds the double range.
  double value() const;
};

// Named sufficient conditions at candidate C = 2^log2_candidate.
std::vector<NamedCheck> theorem_candidate_checks(double log2_candidate, double C1, double C2,
                                                 int dim, double Md);

inline constexpr int kDefaultLog2Cap = 4096;

// Doubling search over powers of two C >= max(C2, e^(1/d), e).
TheoremConstant theorem_constant(double C1, double C2, int dim, double Md = 0.0,
                                 int log2_cap = kDefaultLog2Cap);

}  // namespace mdcert
