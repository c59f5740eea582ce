#include "lsdecay/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kE = 2.718281828459045235360287;

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    const double u = llo + (lhi - llo) * static_cast<double>(i) / (n - 1);
    out.push_back(std::exp(u));
  }
  out.back() = hi;
  return out;
}

}  // namespace

GrowthFunction growth_identity() {
  GrowthFunction gf;
  gf.kind = GrowthFunction::Kind::Identity;
  gf.name = "identity";
  gf.g = [](double t) { return t; };
  gf.g_prime = [](double) { return 1.0; };
  gf.mu = 1.0;
  gf.g_prime_at_zero = 1.0;
  gf.satisfies_g1 = true;
  gf.satisfies_g3 = true;
  return gf;
}

GrowthFunction growth_loglinear() {
  GrowthFunction gf;
  gf.kind = GrowthFunction::Kind::LogLinear;
  gf.name = "loglinear";
  gf.g = [](double t) { return t * std::log(kE + t); };
  gf.g_prime = [](double t) { return std::log(kE + t) + t / (kE + t); };
  gf.mu = 2.0;
  gf.g_prime_at_zero = 1.0;
  gf.satisfies_g1 = true;
  gf.satisfies_g3 = true;
  return gf;
}

GrowthFunction growth_power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw ParameterError("growth_power: exponent must be positive and finite");
  }
  GrowthFunction gf;
  gf.kind = GrowthFunction::Kind::Power;
  gf.power_exponent = p;
  gf.name = "power:" + std::to_string(p);
  gf.g = [p](double t) { return std::pow(t, p); };
  gf.g_prime = [p](double t) {
    if (t == 0.0) {
      if (p > 1.0) return 0.0;
      if (p == 1.0) return 1.0;
      return std::numeric_limits<double>::infinity();
    }
    return p * std::pow(t, p - 1.0);
  };
  gf.mu = std::max(p, 1.0);
  gf.satisfies_g1 = (p >= 1.0);  // concave for p < 1, and not C1 at 0
  if (p == 1.0) {
    gf.g_prime_at_zero = 1.0;
    gf.satisfies_g3 = true;
  } else if (p > 1.0) {
    gf.g_prime_at_zero = 0.0;
    gf.satisfies_g3 = false;
  } else {
    gf.g_prime_at_zero = std::numeric_limits<double>::infinity();
    gf.satisfies_g3 = true;
  }
  return gf;
}

double eval_growth(const GrowthFunction& gf, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("eval_growth: t must be finite and nonnegative");
  }
  if (t == 0.0) return 0.0;
  return gf.g(t);
}

namespace {

void record(AxiomCheck& chk, double violation, double t, double u) {
  if (violation > chk.worst_violation) {
    chk.worst_violation = violation;
    chk.witness_t = t;
    chk.witness_u = u;
  }
}

}  // namespace

AxiomReport verify_axioms(const GrowthFunction& gf, double t_max,
                          int sample_count, double tol) {
  if (!(t_max > 0.0)) throw ParameterError("verify_axioms: t_max must be > 0");
  if (sample_count < 3) {
    throw ParameterError("verify_axioms: sample_count must be >= 3");
  }

  AxiomReport rep;
  rep.growth_name = gf.name;
  rep.mu = gf.mu;
  rep.g_prime_at_zero = gf.g_prime_at_zero;

  const std::vector<double> ts =
      log_spaced(t_max * 1e-6, t_max, sample_count);
  const int n_axis = std::max(3, static_cast<int>(std::sqrt(
                                     static_cast<double>(sample_count))));
  // lambda axis stays strictly above 1; the lattice spans (1, t_max].
  std::vector<double> lambdas = log_spaced(1.0, t_max, n_axis + 1);
  lambdas.erase(lambdas.begin());

  AxiomCheck zero{"g(0)=0"};
  {
    const double v = gf.g(0.0);
    record(zero, std::abs(v), 0.0, 0.0);
  }

  AxiomCheck positive{"positivity"};
  AxiomCheck monotone{"monotonicity"};
  AxiomCheck convex{"convexity"};
  AxiomCheck doubling{"doubling"};
  AxiomCheck slope{"initial-slope"};
  AxiomCheck euler{"derivative-vs-mu"};   // g'(t) t <= mu g(t)
  AxiomCheck cross{"cross-derivative"};   // g'(t1) t2 <= g'(t1) t1 + g'(t2) t2

  if (!(gf.g_prime_at_zero > 0.0)) record(slope, 1.0, 0.0, 0.0);

  for (size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double gt = gf.g(t);
    if (!(gt > 0.0)) record(positive, 1.0, t, 0.0);
    if (i > 0) {
      const double prev = gf.g(ts[i - 1]);
      record(monotone, (prev - gt) / std::max(std::abs(gt), 1e-300), t, 0.0);
    }
    if (i + 2 < ts.size()) {
      const double a = ts[i], b = ts[i + 1], c = ts[i + 2];
      const double d1 = (gf.g(b) - gf.g(a)) / (b - a);
      const double d2 = (gf.g(c) - gf.g(b)) / (c - b);
      record(convex, (d1 - d2) / std::max(std::abs(d2), 1e-300), b, c);
    }
    const double dgt = gf.g_prime(t);
    record(euler, (dgt * t - gf.mu * gt) / std::max(gf.mu * gt, 1e-300), t, 0.0);
  }

  for (const double t : ts) {
    const double gt = gf.g(t);
    for (const double lam : lambdas) {
      const double lhs = gf.g(lam * t);
      const double rhs = std::pow(lam, gf.mu) * gt;
      record(doubling, (lhs - rhs) / std::max(rhs, 1e-300), t, lam);
    }
  }

  const std::vector<double> pair_ts = log_spaced(t_max * 1e-6, t_max, n_axis);
  for (const double t1 : pair_ts) {
    const double d1 = gf.g_prime(t1);
    for (const double t2 : pair_ts) {
      const double lhs = d1 * t2;
      const double rhs = d1 * t1 + gf.g_prime(t2) * t2;
      record(cross, (lhs - rhs) / (1.0 + std::abs(lhs)), t1, t2);
    }
  }

  for (AxiomCheck* chk :
       {&zero, &positive, &monotone, &convex, &doubling, &slope, &euler,
        &cross}) {
    chk->pass = chk->worst_violation <= tol;
    rep.all_pass = rep.all_pass && chk->pass;
    rep.checks.push_back(*chk);
  }
  rep.mu_estimate = estimate_mu(gf, t_max, sample_count);
  return rep;
}

double estimate_mu(const GrowthFunction& gf, double t_max, int sample_count) {
  const int n_axis = std::max(3, static_cast<int>(std::sqrt(
                                     static_cast<double>(sample_count))));
  const std::vector<double> ts = log_spaced(t_max * 1e-6, t_max, n_axis);
  std::vector<double> lambdas = log_spaced(1.0, t_max, n_axis + 1);
  lambdas.erase(lambdas.begin());
  double est = 1.0;
  for (const double t : ts) {
    const double gt = gf.g(t);
    if (!(gt > 0.0)) continue;
    for (const double lam : lambdas) {
      const double r = std::log(gf.g(lam * t) / gt) / std::log(lam);
      est = std::max(est, r);
    }
  }
  return est;
}

}  // namespace lsdecay
