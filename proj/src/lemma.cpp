#include "lsdecay/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdecay/envelope.hpp"
#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kE = 2.718281828459045235360287;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// Smallest x >= lo with pred(x) true, located by geometric doubling and
// bisection; the returned point always satisfies pred. The predicate is
// assumed to hold from some point on (guaranteed by the limit guards).
template <typename Pred>
double find_smallest(Pred pred, double lo, const char* what) {
  if (pred(lo)) return lo;
  double a = lo, b = lo;
  bool found = false;
  for (int i = 0; i < 2000; ++i) {
    a = b;
    b *= 2.0;
    if (b > 1e290) break;
    if (pred(b)) {
      found = true;
      break;
    }
  }
  if (!found) {
    throw ApplicabilityError(std::string(what) +
                             ": no admissible value found below 1e290");
  }
  while (b - a > 1e-12 * b) {
    const double mid = a + 0.5 * (b - a);
    if (pred(mid)) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

// Numerical check that f decays to zero: f must be strictly decreasing on
// sixteen samples per decade over the five decades [1e6*scale, 1e11*scale].
template <typename F>
bool tail_strictly_decreasing(F f, double scale) {
  const double lo = 1e6 * scale;
  const int per_decade = 16, decades = 5;
  double prev = f(lo);
  if (!std::isfinite(prev)) return false;
  for (int i = 1; i <= per_decade * decades; ++i) {
    const double x = lo * std::pow(10.0, static_cast<double>(i) / per_decade);
    const double v = f(x);
    if (!std::isfinite(v) || !(v < prev)) return false;
    prev = v;
  }
  return true;
}

// Grid maximum of f over [x0, 1e6*x0] combined with the decreasing-tail
// probe beyond; a non-decreasing tail means the supremum is not certified
// by the grid and the caller must fail rather than truncate.
template <typename F>
double sup_with_tail_probe(F f, double x0, const char* what) {
  if (!tail_strictly_decreasing(f, x0)) {
    throw ApplicabilityError(std::string(what) +
                             ": tail is not strictly decreasing; supremum "
                             "not certifiable on a finite grid");
  }
  const int n = 2048;
  double best = -kInf;
  for (int i = 0; i < n; ++i) {
    const double x = x0 * std::pow(1e6, static_cast<double>(i) / (n - 1));
    best = std::max(best, f(x));
  }
  if (!std::isfinite(best)) {
    throw NumericError(std::string(what) + ": non-finite supremum");
  }
  return best;
}

void require_conforming(const LemmaParams& p, Strictness strictness,
                        std::string* provenance) {
  if (p.gf.conforming()) return;
  if (strictness == Strictness::Strict) {
    throw AxiomError("growth function '" + p.gf.name +
                     "' is not convex/non-decreasing; refused in strict mode");
  }
  *provenance += " [warning: non-conforming growth function '" + p.gf.name +
                 "' accepted in permissive mode]";
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Classical:
      return "classical";
    case Variant::PowerWeighted:
      return "power-weighted";
    case Variant::FirstGeneralized:
      return "first-generalized";
    case Variant::SecondGeneralized:
      return "second-generalized";
  }
  return "?";
}

void validate_params(const LemmaParams& p) {
  if (!(p.c > 0.0) || !std::isfinite(p.c)) {
    throw ParameterError("c must be positive and finite");
  }
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
    throw ParameterError("alpha must be positive and finite");
  }
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
    throw ParameterError("beta must be positive and finite");
  }
  if (!(p.theta >= 0.0) || !std::isfinite(p.theta)) {
    throw ParameterError("theta must be nonnegative and finite");
  }
  if (!(p.phi0 >= 0.0) || !std::isfinite(p.phi0)) {
    throw ParameterError("phi0 must be nonnegative and finite");
  }
  if (!std::isfinite(p.k0)) throw ParameterError("k0 must be finite");
  if (p.variant == Variant::Classical) {
    if (p.theta != 0.0) {
      throw ParameterError("theta must be 0 for the classical variant");
    }
  } else if (!(p.k0 > 0.0)) {
    throw ParameterError("k0 must be positive for weighted variants");
  }
}

double recursion_weight(const LemmaParams& p, double h, double k) {
  if (!(h > k)) throw DomainError("recursion_weight: requires h > k");
  switch (p.variant) {
    case Variant::Classical:
      return p.c / std::pow(h - k, p.alpha);
    case Variant::PowerWeighted:
      return p.c * std::pow(h, p.theta * p.alpha) / std::pow(h - k, p.alpha);
    case Variant::FirstGeneralized:
      return p.c * std::pow(h, p.theta * p.alpha) /
             std::pow(p.gf.g(h - k), p.alpha);
    case Variant::SecondGeneralized:
      return p.c * std::pow(p.gf.g(h), p.theta * p.alpha) /
             std::pow(h - k, p.alpha);
  }
  return kInf;
}

DecayBound classical_bound(const LemmaParams& p) {
  validate_params(p);
  if (p.variant != Variant::Classical) {
    throw ParameterError("classical_bound: wrong variant");
  }
  DecayBound b;
  b.k0 = p.k0;
  if (p.beta > 1.0) {
    const double d =
        std::pow(p.c * std::pow(p.phi0, p.beta - 1.0) *
                     std::exp2(p.alpha * p.beta / (p.beta - 1.0)),
                 1.0 / p.alpha);
    b.shape = Vanishes{p.k0 + d};
    b.provenance = "classical-i";
  } else if (p.beta == 1.0) {
    const double tau = std::pow(p.c * kE, 1.0 / p.alpha);
    b.shape = StretchedExp{p.phi0, p.k0, tau, 1.0};
    b.provenance = "classical-ii";
  } else {
    if (!(p.k0 > 0.0)) {
      throw ParameterError("classical_bound: beta < 1 requires k0 > 0");
    }
    const double rate = p.alpha / (1.0 - p.beta);
    const double constant =
        std::exp2(p.alpha / sq(1.0 - p.beta)) *
        (std::pow(p.c, 1.0 / (1.0 - p.beta)) +
         std::pow(2.0 * p.k0, rate) * p.phi0);
    b.shape = PowerEnvelope{constant, rate, false};
    b.provenance = "classical-iii";
  }
  return b;
}

DecayBound gzm_bound(const LemmaParams& p) {
  validate_params(p);
  if (p.variant != Variant::PowerWeighted) {
    throw ParameterError("gzm_bound: wrong variant");
  }
  if (!(p.theta < 1.0)) {
    throw ApplicabilityError(
        "gzm_bound: theta must lie in [0,1); branch formulas are undefined "
        "otherwise");
  }
  const double a = p.alpha, th = p.theta, om = 1.0 - th;
  DecayBound b;
  b.k0 = p.k0;
  if (p.beta > 1.0) {
    const double be = p.beta;
    const double L = std::max(
        2.0 * p.k0,
        std::pow(p.c, 1.0 / (om * a)) *
            std::pow(p.phi0, (be - 1.0) / (om * a)) *
            std::exp2((be + th + 1.0 / (be - 1.0)) / (om * be)));
    b.shape = Vanishes{2.0 * L};
    b.provenance = "power-weighted-i";
  } else if (p.beta == 1.0) {
    const double tau = std::max(
        {p.k0, std::pow(p.c * kE * std::exp2(th * a), 1.0 / (om * a)),
         std::pow(p.c * kE * std::exp2((2.0 - th) * th * a / om) *
                      std::pow(om, a),
                  1.0 / (om * a))});
    b.shape = StretchedExp{p.phi0, p.k0, tau, om};
    b.provenance = "power-weighted-ii";
  } else {
    const double be = p.beta;
    const double tail = std::pow(2.0 * p.k0, om * a / (1.0 - be)) * p.phi0;
    const double c2 = std::exp2(om * a / sq(1.0 - be)) *
                      (std::pow(p.c * std::exp2(th * a), 1.0 / (1.0 - be)) +
                       tail);
    const double c1 = std::max(std::pow(4.0, om * a) * p.c * std::exp2(th * a),
                               std::pow(c2, 1.0 - be));
    const double constant =
        std::exp2(om * a / sq(1.0 - be)) *
        (std::pow(c1 * std::exp2(th * a), 1.0 / (1.0 - be)) + tail);
    b.shape = PowerEnvelope{constant, a * om / (1.0 - be), false};
    b.provenance = "power-weighted-iii";
  }
  return b;
}

DecayBound first_gen_bound(const LemmaParams& p,
                           std::optional<double> tau_hint,
                           Strictness strictness) {
  validate_params(p);
  if (p.variant != Variant::FirstGeneralized) {
    throw ParameterError("first_gen_bound: wrong variant");
  }
  DecayBound b;
  b.k0 = p.k0;
  b.provenance = "first-generalized";
  require_conforming(p, strictness, &b.provenance);

  const auto& g = p.gf.g;
  const double a = p.alpha, th = p.theta, mu = p.gf.mu;

  // Weight decay condition: L^theta / g(L) -> 0.
  if (!tail_strictly_decreasing(
          [&](double L) { return std::pow(L, th) / g(L); },
          std::max(p.k0, 1.0))) {
    throw ApplicabilityError(
        "first_gen_bound: L^theta/g(L) does not decay to zero; hypothesis "
        "not applicable for this (theta, g)");
  }

  if (p.beta > 1.0) {
    const double be = p.beta;
    const double rhs = std::pow(p.c, 1.0 / a) *
                       std::pow(p.phi0, (be - 1.0) / a) *
                       std::exp2((mu * be + th + mu / (be - 1.0)) / be);
    const double L = find_smallest(
        [&](double L) { return g(L) / std::pow(L, th) >= rhs; }, 2.0 * p.k0,
        "first_gen_bound: vanishing level");
    b.shape = Vanishes{2.0 * L};
    b.provenance += "-i";
  } else if (p.beta == 1.0) {
    if (!(th < 1.0)) {
      throw ApplicabilityError(
          "first_gen_bound: beta = 1 requires theta < 1");
    }
    const double gp0 = p.gf.g_prime_at_zero;
    if (!(gp0 > 0.0)) {
      throw ApplicabilityError(
          "first_gen_bound: beta = 1 needs g'(0+) > 0");
    }
    const double om = 1.0 - th;
    const double lb =
        std::pow(std::pow(p.c * kE, 1.0 / a) *
                     std::exp2((2.0 - th) * th / om) * om / gp0,
                 1.0 / om);
    double tau = std::max(p.k0, lb);
    if (tau_hint) {
      tau = std::max(tau, *tau_hint);
      b.provenance += "-ii [tau hint " + std::to_string(*tau_hint) + "]";
    } else {
      // Certify phi(k0+tau) <= phi(k0)/e against the extremal envelope,
      // which dominates every phi satisfying the hypothesis.
      const double level = envelope_decay_level(p, p.phi0 / kE, tau);
      tau = std::max(tau, level - p.k0);
      b.provenance += "-ii [tau certified by envelope]";
    }
    b.shape = StretchedExp{p.phi0, p.k0, tau, om};
  } else {
    const double be = p.beta, om = 1.0 - th;
    const double gp0 = p.gf.g_prime_at_zero;
    if (th > 0.0 && !(gp0 > 0.0)) {
      throw ApplicabilityError(
          "first_gen_bound: beta < 1 with theta > 0 needs g'(0+) > 0");
    }
    const double c3 = p.c * std::exp2(th * a) / std::pow(gp0, th * a);
    const double rate = om * a / (1.0 - be);
    const double constant =
        std::exp2(mu * om * a * (2.0 - be) / sq(1.0 - be)) *
        (std::pow(c3, 1.0 / (1.0 - be)) + std::pow(g(p.k0), rate) * p.phi0);
    b.shape = PowerEnvelope{constant, rate, true};
    b.provenance += "-iii";
  }
  return b;
}

DecayBound second_gen_bound(const LemmaParams& p,
                            std::optional<double> theta_tilde,
                            std::optional<double> eps0,
                            Strictness strictness) {
  validate_params(p);
  if (p.variant != Variant::SecondGeneralized) {
    throw ParameterError("second_gen_bound: wrong variant");
  }
  DecayBound b;
  b.k0 = p.k0;
  b.provenance = "second-generalized";
  require_conforming(p, strictness, &b.provenance);

  const auto& g = p.gf.g;
  const double a = p.alpha, th = p.theta, mu = p.gf.mu;
  const double scale = std::max(p.k0, 1.0);

  if (p.beta > 1.0) {
    const double be = p.beta;
    if (!(th < 1.0)) {
      throw ApplicabilityError("second_gen_bound: beta > 1 requires theta < 1");
    }
    if (!tail_strictly_decreasing(
            [&](double L) { return std::pow(g(L), th) / L; }, scale)) {
      throw ApplicabilityError(
          "second_gen_bound: g(L)^theta/L does not decay to zero");
    }
    double L;
    if (p.phi0 == 0.0) {
      L = 2.0 * p.k0;
    } else {
      const double rhs = std::pow(p.c, -1.0 / a) *
                         std::exp2(-(mu * th + be + 1.0 / (be - 1.0)) / be) *
                         std::pow(p.phi0, (1.0 - be) / a);
      L = find_smallest(
          [&](double L) { return std::pow(g(L), th) / L <= rhs; },
          2.0 * p.k0, "second_gen_bound: vanishing level");
    }
    b.shape = Vanishes{2.0 * L};
    b.provenance += "-i";
  } else if (p.beta == 1.0) {
    if (!(mu * th < 1.0)) {
      throw ApplicabilityError("second_gen_bound: beta = 1 requires mu*theta < 1");
    }
    const double tt = theta_tilde.value_or(0.5 * (th + 1.0));
    if (!(tt > th)) {
      throw ParameterError("second_gen_bound: theta_tilde must exceed theta");
    }
    if (!tail_strictly_decreasing(
            [&](double L) { return std::pow(g(L), tt) / L; }, scale)) {
      throw ApplicabilityError(
          "second_gen_bound: g(L)^theta_tilde/L does not decay to zero; "
          "supply a smaller theta_tilde");
    }
    const double q = tt / (tt - th);
    const double r = th / (tt - th);
    double m_sup = 1.0;
    if (th > 0.0) {
      m_sup = sup_with_tail_probe(
          [&](double s) {
            return std::pow(g(std::pow(s, q)), th) / std::pow(s, r);
          },
          1.0, "second_gen_bound: sup over shifted levels");
    }
    const double c2_factor = p.c * std::exp2((q + 1.0) * mu * th * a) /
                             std::pow(q, a) * std::pow(m_sup, a);
    const auto admissible = [&](double tau) {
      const bool cond_first_step =
          p.c * std::pow(g(p.k0 + tau), th * a) / std::pow(tau, a) <=
          1.0 / kE;
      const bool cond_chain =
          c2_factor * std::pow(tau, (mu * th - 1.0) * a) < 1.0 / kE;
      return cond_first_step && cond_chain;
    };
    const double tau = find_smallest(admissible, std::max(p.k0, 0.5),
                                     "second_gen_bound: shift tau");
    b.shape = StretchedExp{p.phi0, p.k0, tau, 1.0 - th / tt};
    b.provenance += "-ii";
  } else {
    const double be = p.beta;
    if (!(th < 1.0)) {
      throw ApplicabilityError("second_gen_bound: beta < 1 requires theta < 1");
    }
    const double e0 = eps0.value_or(0.5 * (1.0 - th));
    if (!(e0 > 0.0 && e0 < 1.0 - th)) {
      throw ParameterError("second_gen_bound: eps0 must lie in (0, 1-theta)");
    }
    const auto ratio = [&](double k) {
      return p.gf.g_prime(k) / std::pow(g(k), 1.0 - th - e0);
    };
    const double t_sup =
        sup_with_tail_probe(ratio, p.k0, "second_gen_bound: derivative sup");
    const double T = p.c * std::exp2(mu * th * a) * std::pow(t_sup, a);
    const double rate = e0 * a / (1.0 - be);
    const double constant =
        std::exp2(mu * e0 * a * (2.0 - be) / sq(1.0 - be)) *
        (std::pow(T, 1.0 / (1.0 - be)) + p.phi0 * std::pow(g(p.k0), rate));
    b.shape = PowerEnvelope{constant, rate, true};
    b.provenance += "-iii";
  }
  return b;
}

double eval_bound(const DecayBound& b, const GrowthFunction& gf, double k) {
  if (const auto* v = std::get_if<Vanishes>(&b.shape)) {
    if (!(k >= 0.0)) throw DomainError("eval_bound: k must be >= 0");
    return k >= v->level ? 0.0 : kInf;
  }
  if (const auto* s = std::get_if<StretchedExp>(&b.shape)) {
    if (!(k >= s->k0)) {
      throw DomainError("eval_bound: k below the envelope's k0");
    }
    return s->phi0 * std::exp(1.0 - std::pow((k - s->k0) / s->tau, s->power));
  }
  const auto& pe = std::get<PowerEnvelope>(b.shape);
  if (!(k >= b.k0)) throw DomainError("eval_bound: k below the envelope's k0");
  const double base = pe.in_g ? gf.g(k) : k;
  return pe.constant * std::pow(base, -pe.rate);
}

GiustiResult giusti_iterate(double C, double B, double beta, double x0,
                            int n) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw ParameterError("giusti_iterate: C must be positive");
  }
  if (!(B > 1.0)) throw ParameterError("giusti_iterate: B must exceed 1");
  if (!(beta > 1.0)) throw ParameterError("giusti_iterate: beta must exceed 1");
  if (!(x0 >= 0.0)) throw ParameterError("giusti_iterate: x0 must be >= 0");
  if (n < 1) throw ParameterError("giusti_iterate: n must be >= 1");

  GiustiResult res;
  res.threshold = std::pow(C, -1.0 / (beta - 1.0)) *
                  std::pow(B, -1.0 / sq(beta - 1.0));
  res.below_threshold = x0 <= res.threshold * (1.0 + 1e-12);
  res.values.reserve(static_cast<size_t>(n));
  if (x0 == 0.0) {
    res.values.assign(static_cast<size_t>(n), 0.0);
    res.decay_holds = true;
    return res;
  }
  // The recurrence is iterated through the gap z_i = ln(x_i / bound_i),
  // bound_i = B^(-i/(beta-1)) x0, which obeys z_{i+1} = beta z_i + delta
  // with delta = (beta-1) ln(x0/threshold). The threshold is a repelling
  // fixed point, so this form is what keeps an exactly-at-threshold start
  // on its orbit instead of amplifying one rounding into overflow.
  const double delta =
      (beta - 1.0) * (std::log(x0) - std::log(res.threshold));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double bound = std::pow(B, -i / (beta - 1.0)) * x0;
    res.values.push_back(std::exp(z) * bound);
    res.worst_decay_excess = std::max(res.worst_decay_excess, std::expm1(z));
    z = std::min(beta * z + delta, 1e9);  // saturate once divergence is clear
  }
  res.decay_holds = res.worst_decay_excess <= 1e-9;
  return res;
}

}  // namespace lsdecay
