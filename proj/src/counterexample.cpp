#include "lsdecay/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;

double sq(double x) { return x * x; }

}  // namespace

void validate_doubling_params(const DoublingParams& dp) {
  if (!(dp.c_tilde > 0.0)) throw ParameterError("c_tilde must be positive");
  if (!(dp.alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(dp.beta > 0.0)) throw ParameterError("beta must be positive");
  if (!(dp.k0 > 0.0)) throw ParameterError("k0 must be positive");
  if (!(dp.phi0 >= 0.0)) throw ParameterError("phi0 must be nonnegative");
}

double equivalence_forward(double c) {
  if (!(c > 0.0)) throw ParameterError("equivalence_forward: c must be positive");
  return c;
}

double equivalence_backward_constant(const DoublingParams& dp) {
  validate_doubling_params(dp);
  if (!(dp.beta < 1.0)) {
    throw ParameterError(
        "equivalence_backward_constant: requires 0 < beta < 1");
  }
  if (!dp.gf.conforming()) {
    throw AxiomError(
        "equivalence_backward_constant: growth function must be conforming");
  }
  const double mu = dp.gf.mu, a = dp.alpha, be = dp.beta;
  const double c_case1 = dp.c_tilde * std::pow(4.0, mu * a);
  const double cbar =
      std::exp2(mu * a * (2.0 - be) / sq(1.0 - be)) *
      (std::pow(c_case1, 1.0 / (1.0 - be)) +
       std::pow(dp.gf.g(dp.k0), a / (1.0 - be)) * dp.phi0);
  return std::max(c_case1, std::pow(cbar, 1.0 - be));
}

double doubling_envelope_value(const DoublingParams& dp, double k) {
  if (!(k >= dp.k0)) {
    throw DomainError("doubling_envelope_value: k below k0");
  }
  // Number of halvings that bring k into the base interval [k0, 2k0).
  int steps = 0;
  double base = k;
  while (base >= 2.0 * dp.k0) {
    base *= 0.5;
    ++steps;
  }
  double v = dp.phi0;
  double x = base;
  for (int i = 0; i < steps; ++i) {
    const double w = dp.c_tilde / std::pow(dp.gf.g(x), dp.alpha);
    v = std::min(v, w * std::pow(v, dp.beta));
    x *= 2.0;
  }
  return v;
}

PairCheckReport verify_full_form(const DoublingParams& dp, double c_full,
                                 int n_pairs, uint64_t seed, double k_span,
                                 double tol) {
  validate_doubling_params(dp);
  PairCheckReport rep;
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_span = std::log(k_span);
  for (int i = 0; i < n_pairs; ++i) {
    const double k = dp.k0 * std::exp(unit(rng) * log_span);
    const double ratio = std::exp(unit(rng) * std::log(1e3));
    const double h = k * (1.0 + std::max(ratio - 1.0, 1e-9));
    const double phi_h = doubling_envelope_value(dp, h);
    const double phi_k = doubling_envelope_value(dp, k);
    const double allowed = c_full / std::pow(dp.gf.g(h - k), dp.alpha) *
                           std::pow(phi_k, dp.beta);
    ++rep.pairs;
    const double margin =
        (phi_h - allowed) / std::max(allowed, 1e-300);
    if (margin > rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_h = h;
      rep.worst_k = k;
    }
    if (phi_h > allowed * (1.0 + tol)) ++rep.violations;
  }
  return rep;
}

BetaOneWitnessReport witness_beta_one(std::span<const double> k_values,
                                      std::span<const double> lambdas) {
  BetaOneWitnessReport rep;
  // The doubling identity phi(2k) = 2^(-ln2) k^(-2 ln2) phi(k) is exact;
  // checking it at 1e-15 relative needs the exponents carried in extended
  // precision, since (ln 2k)^2 reaches ~190 at k = 1e6.
  const long double ln2 = 0.69314718055994530941723212145818L;
  for (const double k : k_values) {
    if (!(k >= 1.0)) {
      throw DomainError("witness_beta_one: witness defined for k >= 1");
    }
    const long double lk = std::log(static_cast<long double>(k));
    const long double lhs = std::exp(-(ln2 + lk) * (ln2 + lk));
    const long double rhs =
        std::exp(-(ln2 * ln2) - 2.0L * ln2 * lk) * std::exp(-lk * lk);
    const double res = static_cast<double>(std::fabs(lhs - rhs) / rhs);
    rep.k_values.push_back(k);
    rep.identity_residuals.push_back(res);
    rep.worst_identity_residual = std::max(rep.worst_identity_residual, res);
  }
  const double exceed = std::log(1e6);
  for (const double lam : lambdas) {
    BetaOneWitnessReport::LambdaProbe probe;
    probe.lambda = lam;
    probe.max_exponent = -std::numeric_limits<double>::infinity();
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const double k = std::pow(1e6, static_cast<double>(i) / n);
      const double expo = lam * k - sq(std::log(k));
      if (expo > probe.max_exponent) {
        probe.max_exponent = expo;
        probe.k_at_max = k;
      }
    }
    probe.unbounded_witnessed = probe.max_exponent > exceed;
    rep.probes.push_back(probe);
  }
  return rep;
}

BetaGtOneWitnessReport witness_beta_gt_one(double alpha, bool refine_real,
                                           int grid_points, double grid_k_max) {
  if (!(alpha > 0.0)) {
    throw ParameterError("witness_beta_gt_one: alpha must be positive");
  }
  BetaGtOneWitnessReport rep;
  rep.alpha = alpha;

  // k^(2a) <= e^(k/2)  <=>  f(k) = k/2 - 2a*ln k >= 0; f decreases up to
  // k = 4a and increases beyond, so the last integer failure determines k0.
  const auto f = [alpha](double k) { return 0.5 * k - 2.0 * alpha * std::log(k); };
  long long last_fail = 0;
  long long k = 1;
  const long long turn = static_cast<long long>(std::ceil(4.0 * alpha));
  while (true) {
    if (f(static_cast<double>(k)) < 0.0) last_fail = k;
    if (k > turn && f(static_cast<double>(k)) >= 0.0) break;
    ++k;
    if (k > 1'000'000'000LL) {
      throw NumericError("witness_beta_gt_one: k0 search overflow");
    }
  }
  rep.k0_integer = last_fail + 1;
  rep.fails_just_below =
      rep.k0_integer > 1 && f(static_cast<double>(rep.k0_integer - 1)) < 0.0;
  rep.tail_certified = true;  // f'(k) = 1/2 - 2a/k > 0 for k > 4a

  if (refine_real && last_fail >= 1) {
    double lo = static_cast<double>(last_fail);
    double hi = static_cast<double>(last_fail + 1);
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    rep.k0_real = hi;
  }

  const double k_lo = static_cast<double>(rep.k0_integer);
  rep.min_log_phi = std::numeric_limits<double>::infinity();
  rep.worst_doubling_log_residual = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double kk =
        k_lo * std::pow(grid_k_max / k_lo,
                        static_cast<double>(i) / (grid_points - 1));
    // log of phi(2k) / [ (1/k^2)^a phi(k)^(3/2) ] = 2a*ln k - k/2.
    const double log_res = 2.0 * alpha * std::log(kk) - 0.5 * kk;
    rep.grid_k.push_back(kk);
    rep.doubling_log_residuals.push_back(log_res);
    rep.worst_doubling_log_residual =
        std::max(rep.worst_doubling_log_residual, log_res);
    rep.min_log_phi = std::min(rep.min_log_phi, -kk);
  }
  return rep;
}

}  // namespace lsdecay
