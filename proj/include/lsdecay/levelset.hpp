#ifndef LSDECAY_LEVELSET_HPP
#define LSDECAY_LEVELSET_HPP

#include <Eigen/Core>
#include <variant>
#include <vector>

#include "lsdecay/growth.hpp"

namespace lsdecay {

// Sampled distribution function of a field: measures[j] = |{ |u| > levels[j] }|.
struct DistributionProfile {
  std::vector<double> levels;    // increasing, >= 0
  std::vector<double> measures;  // non-increasing, in [0, total_measure]
  double total_measure = 0.0;
};

DistributionProfile distribution_function(const Eigen::ArrayXd& field,
                                          double cell_volume,
                                          std::vector<double> levels);

// Grid estimate of the smallest gamma with |{|f| > l}| <= gamma / l^m:
// sup over levels of levels[j]^m * measures[j] (with g(levels[j]) in place
// of levels[j] when gf is supplied, for claims about g(|u|)).
double weak_quasi_norm(const DistributionProfile& prof, double m,
                       const GrowthFunction* gf = nullptr);

struct FitDiagnostics {
  double slope = 0.0;
  double intercept = 0.0;
  double rel_residual = 0.0;  // max |residual| / fitted y-range
  int points = 0;
};

struct Bounded {
  double level = 0.0;
};
struct ExpIntegrable {
  double lambda = 0.0;
  double rho = 0.0;  // in (0, 1]
  bool open_bound = false;
  FitDiagnostics fit;
};
struct WeakLebesgue {
  double exponent = 0.0;
  double quasi_norm = 0.0;
  bool composed_with_g = false;
  bool open_bound = false;
  FitDiagnostics fit;
};
struct Unclassified {
  FitDiagnostics exp_fit;
  FitDiagnostics weak_fit;
};

struct DecayClass {
  std::variant<Bounded, ExpIntegrable, WeakLebesgue, Unclassified> cls;
};

struct ClassifierConfig {
  // Normalized RMS residual (per y-range) a fit must stay under.
  double max_rel_residual = 0.1;
  // The exp-integrable fit must keep its slope within this relative drift
  // when refit on the deeper half of its window.
  double max_slope_drift = 0.15;
  // The weak-Lebesgue fit runs on levels holding at most this fraction of
  // the total measure.
  double tail_fraction = 0.05;
  // Levels with measure below this are excluded from fits and count as
  // noise for the boundedness test.
  double noise_floor = 0.0;
  // A zero tail certifies a bound only when it starts within this k-ratio
  // of the last solid level; a resolution-limited singular peak carries a
  // few stray cells across a much longer span.
  double max_bounded_gap_ratio = 1.25;
  int min_levels = 8;
};

// Tests in order: (1) Bounded -- the measures reach 0 and stay 0;
// (2) ExpIntegrable -- ln(1 - ln(phi/phi0)) is linear in ln k with slope in
// (0,1]; (3) WeakLebesgue -- ln phi is linear in ln g(k); otherwise
// Unclassified with both fit diagnostics. First passing test wins.
DecayClass classify_decay(const DistributionProfile& prof,
                          const GrowthFunction& gf,
                          const ClassifierConfig& cfg = {});

enum class RegimeKind { Variational, DegeneratePde };

struct RegimeSpec {
  int n = 3;                // dimension
  double p = 2.0;           // growth exponent (2 for the PDE case)
  double sigma_or_m = 2.0;  // data integrability exponent
  double theta_deg = 0.0;   // degeneracy exponent (0 for variational)
};

// The decay class the application theorems assign from the data exponent
// relative to its critical value (n/p, resp. n/2). Open-ended regimes are
// reported as the supremal value with the open flag set. Data-dependent
// constants the theorems do not pin (the bounded level, the critical-case
// lambda) are returned as +inf sentinels.
DecayClass predicted_regime(const RegimeSpec& spec, RegimeKind kind);

const char* decay_class_name(const DecayClass& dc);

}  // namespace lsdecay

#endif
