#ifndef LSDECAY_LEMMA_HPP
#define LSDECAY_LEMMA_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsdecay/growth.hpp"

namespace lsdecay {

// Which weight multiplies [phi(k)]^beta in the recursion hypothesis
//   phi(h) <= W(h,k) * [phi(k)]^beta   for all h > k >= k0:
//
//   Classical          W = c / (h-k)^alpha
//   PowerWeighted      W = c * h^(theta*alpha) / (h-k)^alpha
//   FirstGeneralized   W = c * h^(theta*alpha) / g(h-k)^alpha
//   SecondGeneralized  W = c * g(h)^(theta*alpha) / (h-k)^alpha
enum class Variant { Classical, PowerWeighted, FirstGeneralized, SecondGeneralized };

struct LemmaParams {
  Variant variant = Variant::Classical;
  double c = 1.0;
  double alpha = 1.0;
  double beta = 2.0;
  double theta = 0.0;  // 0 for Classical
  double k0 = 1.0;     // any sign allowed for Classical only
  double phi0 = 1.0;   // phi(k0)
  GrowthFunction gf;   // ignored for Classical / PowerWeighted
};

// Throws ParameterError if the record violates its invariants
// (c, alpha, beta > 0; theta >= 0; phi0 >= 0; k0 > 0 unless Classical).
void validate_params(const LemmaParams& p);

// The recursion weight W(h,k) for h > k.
double recursion_weight(const LemmaParams& p, double h, double k);

// phi(k) = 0 for every k >= level.
struct Vanishes {
  double level = 0.0;
};

// phi(k) <= phi0 * exp(1 - ((k-k0)/tau)^power), k >= k0.
struct StretchedExp {
  double phi0 = 0.0;
  double k0 = 0.0;
  double tau = 1.0;
  double power = 1.0;  // in (0,1]
};

// phi(k) <= constant * (1/g(k))^rate if in_g, else constant * (1/k)^rate.
struct PowerEnvelope {
  double constant = 0.0;
  double rate = 1.0;
  bool in_g = false;
};

struct DecayBound {
  std::variant<Vanishes, StretchedExp, PowerEnvelope> shape;
  double k0 = 0.0;  // applicability threshold of the conclusion
  std::string provenance;
};

enum class Strictness { Strict, Permissive };

// Conclusions of the plain recursion (k0 may have any sign except in the
// beta < 1 branch, which requires k0 > 0):
//   beta > 1: Vanishes{k0 + d},  d^alpha = c*phi0^(beta-1)*2^(alpha*beta/(beta-1))
//   beta = 1: StretchedExp with tau = (c*e)^(1/alpha), power 1
//   beta < 1: PowerEnvelope{2^(alpha/(1-beta)^2) * {c^(1/(1-beta)) +
//             (2k0)^(alpha/(1-beta)) phi0}, alpha/(1-beta), in k}
DecayBound classical_bound(const LemmaParams& p);

// Conclusions of the h^(theta*alpha)-weighted recursion, 0 <= theta < 1.
DecayBound gzm_bound(const LemmaParams& p);

// Conclusions of the g(h-k)-weighted recursion. Requires the weight decay
// condition L^theta/g(L) -> 0, which is probed numerically. For beta = 1
// the conclusion needs a shift tau satisfying phi(k0+tau) <= phi(k0)/e; when
// tau_hint is absent that condition is certified against the extremal
// envelope (which dominates every admissible phi), otherwise the hint is
// trusted and recorded in the provenance.
DecayBound first_gen_bound(const LemmaParams& p,
                           std::optional<double> tau_hint = std::nullopt,
                           Strictness strictness = Strictness::Strict);

// Conclusions of the g(h)^(theta*alpha)-weighted recursion. Branch guards:
//   beta > 1: theta < 1 and g(L)^theta/L -> 0
//   beta = 1: mu*theta < 1 and some theta_tilde > theta with
//             g(L)^theta_tilde/L -> 0 (default (theta+1)/2, clipped below 1)
//   beta < 1: theta < 1 and some eps0 in (0, 1-theta) with
//             g'(k)/g(k)^(1-theta-eps0) -> 0 (default (1-theta)/2)
// Suprema over unbounded ranges are grid maxima on [x0, 1e6*x0] extended by
// a five-decade strictly-decreasing tail probe; probe failure is an
// ApplicabilityError rather than a silent truncation.
DecayBound second_gen_bound(const LemmaParams& p,
                            std::optional<double> theta_tilde = std::nullopt,
                            std::optional<double> eps0 = std::nullopt,
                            Strictness strictness = Strictness::Strict);

// Envelope value at k. Vanishes yields 0 at and beyond its level and +inf
// below it (the conclusion carries no information there). The other shapes
// throw DomainError below their k0.
double eval_bound(const DecayBound& b, const GrowthFunction& gf, double k);

struct GiustiResult {
  std::vector<double> values;          // x_0 .. x_{n-1}
  double threshold = 0.0;              // C^(-1/(beta-1)) * B^(-1/(beta-1)^2)
  bool below_threshold = false;        // x0 <= threshold (1e-12 slack)
  bool decay_holds = false;            // x_i <= B^(-i/(beta-1)) x0 for all i
  double worst_decay_excess = 0.0;     // max_i x_i/(B^(-i/(beta-1)) x0) - 1
};

// Iterates x_{i+1} = C * B^i * x_i^beta (the inequality taken with equality)
// and reports whether the geometric decay guaranteed below the threshold
// held for the computed prefix. Requires C > 0, B > 1, beta > 1, x0 >= 0,
// n >= 1. The decay exponent is implemented as 1/(beta-1).
GiustiResult giusti_iterate(double C, double B, double beta, double x0, int n);

const char* variant_name(Variant v);

}  // namespace lsdecay

#endif
