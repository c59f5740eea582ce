#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lsdecay/errors.hpp"
#include "lsdecay/lemma.hpp"

using namespace lsdecay;

namespace {

constexpr double kE = 2.718281828459045235360287;

LemmaParams make(Variant v, double c, double alpha, double beta, double theta,
                 double k0, double phi0, GrowthFunction gf = growth_identity()) {
  LemmaParams p;
  p.variant = v;
  p.c = c;
  p.alpha = alpha;
  p.beta = beta;
  p.theta = theta;
  p.k0 = k0;
  p.phi0 = phi0;
  p.gf = std::move(gf);
  return p;
}

}  // namespace

TEST_CASE("classical bound, all three branches") {
  // beta > 1: d^alpha = c*phi0^(beta-1)*2^(alpha*beta/(beta-1)) = 4.
  const auto b1 = classical_bound(make(Variant::Classical, 1, 1, 2, 0, 1, 1));
  CHECK(std::get<Vanishes>(b1.shape).level == doctest::Approx(5.0).epsilon(1e-14));

  // beta = 1: tau = (c e)^(1/alpha) = e, so phi(k) <= e^(1 - k/e) from k0=0.
  const auto b2 = classical_bound(make(Variant::Classical, 1, 1, 1, 0, 0, 1));
  const auto& se = std::get<StretchedExp>(b2.shape);
  CHECK(se.tau == doctest::Approx(kE).epsilon(1e-15));
  CHECK(se.power == 1.0);

  // beta = 1/2: constant 2^4 * (1 + 4) = 80, rate 2.
  const auto b3 = classical_bound(make(Variant::Classical, 1, 1, 0.5, 0, 1, 1));
  const auto& pe = std::get<PowerEnvelope>(b3.shape);
  CHECK(pe.constant == doctest::Approx(80.0).epsilon(1e-14));
  CHECK(pe.rate == doctest::Approx(2.0));
  CHECK_FALSE(pe.in_g);

  CHECK_THROWS_AS(classical_bound(make(Variant::Classical, 1, 1, -1, 0, 1, 1)),
                  ParameterError);
  CHECK_THROWS_AS(classical_bound(make(Variant::Classical, 1, 1, 0.5, 0, -1, 1)),
                  ParameterError);
  // k0 <= 0 is fine for the other branches.
  CHECK_NOTHROW(classical_bound(make(Variant::Classical, 1, 1, 2, 0, -3, 1)));
}

TEST_CASE("power-weighted bound") {
  // L = max{2, 2^((1/((1-1/2)*2))*(2 + 1/2 + 1))} = 2^3.5.
  const auto b1 =
      gzm_bound(make(Variant::PowerWeighted, 1, 2, 2, 0.5, 1, 1));
  CHECK(std::get<Vanishes>(b1.shape).level ==
        doctest::Approx(2.0 * std::exp2(3.5)).epsilon(1e-14));

  const auto b2 = gzm_bound(make(Variant::PowerWeighted, 1, 1, 1, 0.5, 1, 1));
  CHECK(std::get<StretchedExp>(b2.shape).power == doctest::Approx(0.5));

  CHECK_THROWS_AS(gzm_bound(make(Variant::PowerWeighted, 1, 1, 2, 1.0, 1, 1)),
                  ApplicabilityError);
  CHECK_THROWS_AS(gzm_bound(make(Variant::PowerWeighted, 1, 1, 2, 0.5, -1, 1)),
                  ParameterError);
}

TEST_CASE("first generalization, vanishing branch by bisection") {
  // g = identity, theta = 0: smallest L >= 2 with L >= 2^1.5.
  const auto b = first_gen_bound(
      make(Variant::FirstGeneralized, 1, 1, 2, 0, 1, 1, growth_identity()));
  CHECK(std::get<Vanishes>(b.shape).level ==
        doctest::Approx(2.0 * std::exp2(1.5)).epsilon(1e-9));
}

TEST_CASE("first generalization, power-envelope branch") {
  const auto b = first_gen_bound(
      make(Variant::FirstGeneralized, 1, 1, 0.5, 0, 1, 1, growth_identity()));
  const auto& pe = std::get<PowerEnvelope>(b.shape);
  CHECK(pe.constant == doctest::Approx(128.0).epsilon(1e-14));
  CHECK(pe.rate == doctest::Approx(2.0));
  CHECK(pe.in_g);
}

TEST_CASE("first generalization accepts theta = 1 for the log-linear weight") {
  // L^1 / (L ln(e+L)) -> 0, so theta = 1 is admissible here.
  const auto b = first_gen_bound(
      make(Variant::FirstGeneralized, 1, 1, 2, 1.0, 1, 1, growth_loglinear()));
  CHECK(std::holds_alternative<Vanishes>(b.shape));
  // ... but not for the identity weight, where L^theta/g(L) = 1.
  CHECK_THROWS_AS(
      first_gen_bound(
          make(Variant::FirstGeneralized, 1, 1, 2, 1.0, 1, 1, growth_identity())),
      ApplicabilityError);
}

TEST_CASE("first generalization strictness") {
  const auto witness = growth_power(std::log(2.0));
  auto p = make(Variant::FirstGeneralized, 1, 1, 2, 0, 1, 1, witness);
  CHECK_THROWS_AS(first_gen_bound(p), AxiomError);
  const auto b = first_gen_bound(p, std::nullopt, Strictness::Permissive);
  CHECK(b.provenance.find("warning") != std::string::npos);
}

TEST_CASE("first generalization beta = 1 with tau hint") {
  auto p = make(Variant::FirstGeneralized, 1, 1, 1, 0, 1, 1, growth_identity());
  const auto b = first_gen_bound(p, 50.0);
  const auto& se = std::get<StretchedExp>(b.shape);
  CHECK(se.tau >= 50.0);
  CHECK(se.power == doctest::Approx(1.0));
  // lower-bound formula at theta = 0: (ce)^(1/alpha)/g'(0+) = e.
  const auto b2 = first_gen_bound(p, 0.1);
  CHECK(std::get<StretchedExp>(b2.shape).tau >= kE - 1e-12);
}

TEST_CASE("second generalization, vanishing branch") {
  const auto b = second_gen_bound(
      make(Variant::SecondGeneralized, 1, 1, 2, 0.5, 1, 1, growth_identity()));
  // L^(−1/2) <= 2^(−(1/2)(1/2+2+1)) = 2^(−1.75)  =>  L = 2^3.5.
  CHECK(std::get<Vanishes>(b.shape).level ==
        doctest::Approx(2.0 * std::exp2(3.5)).epsilon(1e-9));
}

TEST_CASE("second generalization, beta = 1 keeps power 1 at theta 0") {
  for (const auto& gf : {growth_identity(), growth_loglinear()}) {
    const auto b = second_gen_bound(
        make(Variant::SecondGeneralized, 1, 1, 1, 0, 1, 1, gf));
    CHECK(std::get<StretchedExp>(b.shape).power == doctest::Approx(1.0));
  }
}

TEST_CASE("second generalization, T via grid supremum") {
  // g = t ln(e+t), theta = 0.3, eps0 = 0.2: the maximized ratio is
  // (ln(e+k) + k/(e+k)) / (k ln(e+k))^(1/2), largest near k0.
  const auto gf = growth_loglinear();
  auto p = make(Variant::SecondGeneralized, 1, 1, 0.5, 0.3, 1, 1, gf);
  const auto b = second_gen_bound(p, std::nullopt, 0.2);
  const auto& pe = std::get<PowerEnvelope>(b.shape);
  CHECK(pe.in_g);
  CHECK(pe.rate == doctest::Approx(0.2 * 1.0 / 0.5));

  // Independent oracle: dense scan of the ratio.
  const auto ratio = [&](double k) {
    return gf.g_prime(k) / std::pow(gf.g(k), 1.0 - 0.3 - 0.2);
  };
  double sup = 0.0;
  double arg = 1.0;
  for (int i = 0; i <= 200000; ++i) {
    const double k = std::pow(10.0, 7.0 * i / 200000.0);
    if (ratio(k) > sup) {
      sup = ratio(k);
      arg = k;
    }
  }
  CHECK(arg == doctest::Approx(1.0));  // attained at k0, decreasing beyond
  const double T = 1.0 * std::exp2(gf.mu * 0.3 * 1.0) * sup;
  const double expect =
      std::exp2(2.0 * 0.2 * 1.0 * 1.5 / 0.25) *
      (std::pow(T, 2.0) + 1.0 * std::pow(gf.g(1.0), 0.4));
  CHECK(pe.constant == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("second generalization guard failures") {
  // mu*theta >= 1 for the log-linear weight at theta 0.6.
  CHECK_THROWS_AS(
      second_gen_bound(
          make(Variant::SecondGeneralized, 1, 1, 1, 0.6, 1, 1, growth_loglinear())),
      ApplicabilityError);
  // theta_tilde below theta.
  CHECK_THROWS_AS(
      second_gen_bound(
          make(Variant::SecondGeneralized, 1, 1, 1, 0.2, 1, 1, growth_identity()),
          0.1),
      ParameterError);
  // eps0 outside (0, 1-theta).
  CHECK_THROWS_AS(
      second_gen_bound(
          make(Variant::SecondGeneralized, 1, 1, 0.5, 0.2, 1, 1, growth_identity()),
          std::nullopt, 0.9),
      ParameterError);
  // g(L)^theta/L does not vanish for the quadratic weight at theta 0.8.
  CHECK_THROWS_AS(
      second_gen_bound(make(Variant::SecondGeneralized, 1, 1, 2, 0.8, 1, 1,
                            growth_power(2.0)),
                      std::nullopt, std::nullopt, Strictness::Permissive),
      ApplicabilityError);
}

TEST_CASE("eval_bound") {
  const auto gf = growth_identity();
  DecayBound van{Vanishes{5.0}, 1.0, ""};
  CHECK(eval_bound(van, gf, 7.0) == 0.0);
  CHECK(eval_bound(van, gf, 5.0) == 0.0);
  CHECK(std::isinf(eval_bound(van, gf, 4.9)));

  DecayBound se{StretchedExp{1.0, 0.0, kE, 1.0}, 0.0, ""};
  CHECK(eval_bound(se, gf, 0.0) == doctest::Approx(kE).epsilon(1e-15));
  CHECK_THROWS_AS(eval_bound(se, gf, -0.5), DomainError);

  DecayBound pe{PowerEnvelope{80.0, 2.0, false}, 1.0, ""};
  CHECK(eval_bound(pe, gf, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_bound(pe, gf, 0.5), DomainError);

  DecayBound pg{PowerEnvelope{80.0, 2.0, true}, 1.0, ""};
  const auto ll = growth_loglinear();
  CHECK(eval_bound(pg, ll, 4.0) ==
        doctest::Approx(80.0 / std::pow(ll.g(4.0), 2.0)).epsilon(1e-15));
}

TEST_CASE("eval_bound is non-increasing in k") {
  const auto gf = growth_loglinear();
  const DecayBound bounds[] = {
      {Vanishes{5.0}, 1.0, ""},
      {StretchedExp{2.0, 1.0, 3.0, 0.5}, 1.0, ""},
      {PowerEnvelope{7.0, 1.5, true}, 1.0, ""},
      {PowerEnvelope{7.0, 1.5, false}, 1.0, ""},
  };
  for (const auto& b : bounds) {
    double prev = eval_bound(b, gf, 1.0);
    for (double k = 1.05; k < 100.0; k *= 1.37) {
      const double v = eval_bound(b, gf, k);
      CHECK(v <= prev * (1.0 + 1e-15));
      prev = v;
    }
  }
}

TEST_CASE("giusti iteration matches direct evaluation") {
  // x0 at the exact threshold C^(-1)B^(-1) = 1/2: pure geometric decay.
  const auto r1 = giusti_iterate(1, 2, 2, 0.5, 5);
  const std::vector<double> expect1 = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  REQUIRE(r1.values.size() == 5);
  for (size_t i = 0; i < 5; ++i) {
    CHECK(r1.values[i] == doctest::Approx(expect1[i]).epsilon(1e-15));
  }
  CHECK(r1.below_threshold);
  CHECK(r1.decay_holds);

  // Above the threshold the sequence diverges: 1, 1, 2, 16, 2048, ...
  const auto r2 = giusti_iterate(1, 2, 2, 1.0, 4);
  const std::vector<double> expect2 = {1.0, 1.0, 2.0, 16.0};
  REQUIRE(r2.values.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(r2.values[i] == doctest::Approx(expect2[i]).epsilon(1e-15));
  }
  CHECK_FALSE(r2.below_threshold);
  CHECK_FALSE(r2.decay_holds);

  // Zero is a fixed point.
  const auto r3 = giusti_iterate(3.7, 2.5, 1.7, 0.0, 6);
  for (const double v : r3.values) CHECK(v == 0.0);
  CHECK(r3.decay_holds);

  CHECK_THROWS_AS(giusti_iterate(1, 1, 2, 1, 3), ParameterError);
  CHECK_THROWS_AS(giusti_iterate(1, 2, 1, 1, 3), ParameterError);
}

TEST_CASE("giusti decay at the threshold for seeded random triples") {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> uc(0.1, 10.0), ub(1.5, 4.0),
      ube(1.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double C = uc(rng), B = ub(rng), beta = ube(rng);
    const double x0 = std::pow(C, -1.0 / (beta - 1.0)) *
                      std::pow(B, -1.0 / ((beta - 1.0) * (beta - 1.0)));
    const auto r = giusti_iterate(C, B, beta, x0, 51);
    INFO("C=", C, " B=", B, " beta=", beta, " excess=", r.worst_decay_excess);
    CHECK(r.below_threshold);
    CHECK(r.worst_decay_excess <= 1e-9);
  }
}

TEST_CASE("theta = 0 reduction agrees with the classical branch shapes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uc(0.1, 10.0), ua(0.5, 2.0),
      uk(0.5, 2.0), up(0.1, 10.0);
  for (const double beta : {1.7, 1.0, 0.5}) {
    for (int trial = 0; trial < 25; ++trial) {
      auto p = make(Variant::Classical, uc(rng), ua(rng), beta, 0, uk(rng),
                    up(rng));
      const auto cb = classical_bound(p);
      p.variant = Variant::PowerWeighted;
      const auto gb = gzm_bound(p);
      p.variant = Variant::FirstGeneralized;
      p.gf = growth_identity();
      const auto fb = first_gen_bound(p);
      CHECK(cb.shape.index() == gb.shape.index());
      CHECK(cb.shape.index() == fb.shape.index());
      if (const auto* v = std::get_if<Vanishes>(&cb.shape)) {
        CHECK(std::isfinite(v->level));
        CHECK(std::isfinite(std::get<Vanishes>(gb.shape).level));
        CHECK(std::isfinite(std::get<Vanishes>(fb.shape).level));
      }
    }
  }
}

TEST_CASE("conclusions are monotone in c and phi0") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uc(0.1, 5.0), ua(0.5, 2.0),
      uk(0.5, 2.0), up(0.1, 5.0), uth(0.0, 0.8);
  const auto level_of = [](const DecayBound& b) {
    return std::get<Vanishes>(b.shape).level;
  };
  const auto const_of = [](const DecayBound& b) {
    return std::get<PowerEnvelope>(b.shape).constant;
  };
  const auto tau_of = [](const DecayBound& b) {
    return std::get<StretchedExp>(b.shape).tau;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const double c = uc(rng), a = ua(rng), k0 = uk(rng), phi0 = up(rng),
                 th = uth(rng);
    const auto bump = [&](LemmaParams base, auto proj, auto compute) {
      auto more_c = base;
      more_c.c *= 1.5;
      auto more_phi = base;
      more_phi.phi0 *= 1.5;
      CHECK(proj(compute(more_c)) >= proj(compute(base)) * (1.0 - 1e-12));
      CHECK(proj(compute(more_phi)) >= proj(compute(base)) * (1.0 - 1e-12));
    };
    const auto cl = [](const LemmaParams& q) { return classical_bound(q); };
    const auto gz = [](const LemmaParams& q) { return gzm_bound(q); };
    const auto fg = [](const LemmaParams& q) { return first_gen_bound(q); };
    const auto sg = [](const LemmaParams& q) { return second_gen_bound(q); };

    bump(make(Variant::Classical, c, a, 2.0, 0, k0, phi0), level_of, cl);
    bump(make(Variant::Classical, c, a, 0.5, 0, k0, phi0), const_of, cl);
    bump(make(Variant::PowerWeighted, c, a, 2.0, th, k0, phi0), level_of, gz);
    bump(make(Variant::PowerWeighted, c, a, 0.5, th, k0, phi0), const_of, gz);
    bump(make(Variant::FirstGeneralized, c, a, 2.0, th, k0, phi0,
              growth_loglinear()),
         level_of, fg);
    bump(make(Variant::FirstGeneralized, c, a, 0.5, th, k0, phi0,
              growth_loglinear()),
         const_of, fg);
    bump(make(Variant::SecondGeneralized, c, a, 2.0, th * 0.9, k0, phi0,
              growth_identity()),
         level_of, sg);
    bump(make(Variant::SecondGeneralized, c, a, 0.5, th * 0.9, k0, phi0,
              growth_identity()),
         const_of, sg);
    // beta = 1: the rate 1/tau must not increase, i.e. tau must not shrink.
    bump(make(Variant::Classical, c, a, 1.0, 0, k0, phi0), tau_of, cl);
    bump(make(Variant::PowerWeighted, c, a, 1.0, th, k0, phi0), tau_of, gz);
  }
}

TEST_CASE("branch selection is total and exclusive") {
  for (const double beta : {0.4, 1.0, 1.6}) {
    const auto b = classical_bound(make(Variant::Classical, 1, 1, beta, 0, 1, 1));
    const bool is_v = std::holds_alternative<Vanishes>(b.shape);
    const bool is_s = std::holds_alternative<StretchedExp>(b.shape);
    const bool is_p = std::holds_alternative<PowerEnvelope>(b.shape);
    CHECK(int(is_v) + int(is_s) + int(is_p) == 1);
    CHECK(is_v == (beta > 1.0));
    CHECK(is_s == (beta == 1.0));
    CHECK(is_p == (beta < 1.0));
  }
}
