#ifndef LSDECAY_COUNTEREXAMPLE_HPP
#define LSDECAY_COUNTEREXAMPLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsdecay/growth.hpp"

namespace lsdecay {

// Parameters of the doubling-form hypothesis
//   phi(2k) <= c_tilde / g(k)^alpha * [phi(k)]^beta,  k >= k0 > 0.
struct DoublingParams {
  double c_tilde = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double k0 = 1.0;
  GrowthFunction gf;
  double phi0 = 1.0;
};

void validate_doubling_params(const DoublingParams& dp);

// Taking h = 2k in the full hypothesis yields the doubling form with the
// same constant.
double equivalence_forward(double c);

// For 0 < beta < 1 the doubling form implies the full form with
//   c = max{ c_tilde * 4^(mu*alpha), cbar^(1-beta) },
// where cbar is the power-envelope constant of the full form built from the
// case-1 constant c_tilde * 4^(mu*alpha).
double equivalence_backward_constant(const DoublingParams& dp);

// Pointwise maximum over all non-increasing phi with phi(k0) = phi0 that
// satisfy the doubling constraint for every k >= k0 (not just grid points):
// the value at k is obtained by chaining the constraint down the dyadic
// ladder k, k/2, ..., into [k0, 2k0), where the maximal phi is phi0.
double doubling_envelope_value(const DoublingParams& dp, double k);

struct PairCheckReport {
  int pairs = 0;
  int violations = 0;
  double worst_margin = 0.0;  // max of (phi(h) - allowed)/allowed over pairs
  double worst_h = 0.0, worst_k = 0.0;
};

// Samples random (h, k) pairs with h > k >= k0 and checks the full-form
// inequality phi(h) <= c_full / g(h-k)^alpha * phi(k)^beta for phi the
// doubling-extremal envelope.
PairCheckReport verify_full_form(const DoublingParams& dp, double c_full,
                                 int n_pairs, uint64_t seed,
                                 double k_span = 1e4, double tol = 1e-12);

// phi(k) = exp(-(ln k)^2), k >= 1: satisfies the doubling form with
// c_tilde = 2^(-ln 2), g(k) = k^(ln 2), alpha = 2, beta = 1 as an exact
// identity, yet admits no envelope of the form phi0 * e^(1 - lambda(k-k0)).
struct BetaOneWitnessReport {
  std::vector<double> k_values;
  std::vector<double> identity_residuals;  // relative
  double worst_identity_residual = 0.0;
  struct LambdaProbe {
    double lambda = 0.0;
    double max_exponent = 0.0;  // max over k <= 1e6 of lambda*k - (ln k)^2
    double k_at_max = 0.0;
    bool unbounded_witnessed = false;  // exponent exceeds ln(1e6)
  };
  std::vector<LambdaProbe> probes;
};

inline constexpr double kDefaultLambdaProbes[] = {1e-3, 1e-2, 1e-1, 1.0};

BetaOneWitnessReport witness_beta_one(
    std::span<const double> k_values,
    std::span<const double> lambdas = kDefaultLambdaProbes);

// phi(k) = exp(-k): satisfies the doubling form with g(k) = k^2,
// beta = 3/2, c_tilde = 1 for k >= k0(alpha), yet never vanishes, so no
// finite vanishing level can exist.
struct BetaGtOneWitnessReport {
  double alpha = 1.0;
  long long k0_integer = 0;      // smallest integer k0 with k^(2a) <= e^(k/2)
                                 // for all k >= k0
  std::optional<double> k0_real; // bisection refinement when requested
  bool fails_just_below = false; // the inequality fails at k0 - 1
  bool tail_certified = false;   // k/2 - 2*alpha*ln k increasing beyond 4*alpha
  std::vector<double> grid_k;
  std::vector<double> doubling_log_residuals;  // 2a*ln k - k/2, must be <= 0
  double worst_doubling_log_residual = 0.0;
  double min_log_phi = 0.0;  // ln phi over probed levels; finite => phi > 0
};

BetaGtOneWitnessReport witness_beta_gt_one(double alpha,
                                           bool refine_real = false,
                                           int grid_points = 100,
                                           double grid_k_max = 1e3);

}  // namespace lsdecay

#endif
