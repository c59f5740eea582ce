#include "lsdecay/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FitInput {
  std::vector<double> x, y;
};

FitDiagnostics fit_line(const FitInput& in) {
  FitDiagnostics fit;
  fit.points = static_cast<int>(in.x.size());
  if (fit.points < 2) {
    fit.rel_residual = kInf;
    return fit;
  }
  const auto n = static_cast<double>(fit.points);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sx += in.x[i];
    sy += in.y[i];
    sxx += in.x[i] * in.x[i];
    sxy += in.x[i] * in.y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) {
    fit.rel_residual = kInf;
    return fit;
  }
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0, ylo = in.y[0], yhi = in.y[0];
  for (int i = 0; i < fit.points; ++i) {
    const double d = in.y[i] - (fit.slope * in.x[i] + fit.intercept);
    ss += d * d;
    ylo = std::min(ylo, in.y[i]);
    yhi = std::max(yhi, in.y[i]);
  }
  fit.rel_residual = std::sqrt(ss / n) / std::max(yhi - ylo, 1e-12);
  return fit;
}

FitInput deeper_half(const FitInput& in) {
  FitInput out;
  const size_t half = in.x.size() / 2;
  out.x.assign(in.x.begin() + half, in.x.end());
  out.y.assign(in.y.begin() + half, in.y.end());
  return out;
}

}  // namespace

DistributionProfile distribution_function(const Eigen::ArrayXd& field,
                                          double cell_volume,
                                          std::vector<double> levels) {
  if (field.size() == 0) {
    throw DomainError("distribution_function: empty field");
  }
  if (!(cell_volume > 0.0)) {
    throw ParameterError("distribution_function: cell_volume must be positive");
  }
  for (size_t j = 0; j + 1 < levels.size(); ++j) {
    if (!(levels[j] < levels[j + 1])) {
      throw ParameterError("distribution_function: levels must increase");
    }
  }
  std::vector<double> mags(field.data(), field.data() + field.size());
  for (double& v : mags) v = std::abs(v);
  std::sort(mags.begin(), mags.end());

  DistributionProfile prof;
  prof.total_measure = cell_volume * static_cast<double>(mags.size());
  prof.levels = std::move(levels);
  prof.measures.reserve(prof.levels.size());
  for (const double lvl : prof.levels) {
    const auto it = std::upper_bound(mags.begin(), mags.end(), lvl);
    prof.measures.push_back(cell_volume *
                            static_cast<double>(mags.end() - it));
  }
  return prof;
}

double weak_quasi_norm(const DistributionProfile& prof, double m,
                       const GrowthFunction* gf) {
  if (!(m > 0.0)) throw ParameterError("weak_quasi_norm: m must be positive");
  double sup = 0.0;
  for (size_t j = 0; j < prof.levels.size(); ++j) {
    const double l = gf ? gf->g(prof.levels[j]) : prof.levels[j];
    if (l <= 0.0) continue;
    sup = std::max(sup, std::pow(l, m) * prof.measures[j]);
  }
  return sup;
}

DecayClass classify_decay(const DistributionProfile& prof,
                          const GrowthFunction& gf,
                          const ClassifierConfig& cfg) {
  const size_t n = prof.levels.size();
  if (n == 0) throw InsufficientDataError("classify_decay: empty profile");

  // (1) Bounded: a contiguous zero tail reached from solid data. Levels
  // whose measure sits below the noise floor are resolution noise; a zero
  // tail only certifies a bound when the noisy gap between the last solid
  // level and the tail is short in k (a resolution-limited singular peak
  // holds a few cells over a long k-span instead).
  size_t tail_start = n;
  while (tail_start > 0 && prof.measures[tail_start - 1] == 0.0) --tail_start;
  if (tail_start < n) {
    bool certified = tail_start == 0;
    if (!certified) {
      size_t solid = tail_start;  // one past the last solid level
      while (solid > 0 && prof.measures[solid - 1] < cfg.noise_floor) --solid;
      if (solid == tail_start) {
        certified = true;  // the tail directly follows solid data
      } else if (solid > 0) {
        certified = prof.levels[tail_start] <=
                    cfg.max_bounded_gap_ratio * prof.levels[solid - 1];
      }
    }
    if (certified) {
      return DecayClass{Bounded{prof.levels[tail_start]}};
    }
  }

  // Usable levels for the fits: positive, above the noise floor, k > 0.
  std::vector<size_t> usable;
  for (size_t j = 0; j < n; ++j) {
    if (prof.levels[j] > 0.0 && prof.measures[j] > 0.0 &&
        prof.measures[j] >= cfg.noise_floor) {
      usable.push_back(j);
    }
  }
  if (static_cast<int>(usable.size()) < cfg.min_levels) {
    throw InsufficientDataError(
        "classify_decay: fewer than the required usable levels");
  }

  const double phi0 = prof.measures[usable.front()];

  // (2) Exponential integrability: phi ~ phi0 * e^(1 - lambda k^rho),
  // fitted over the whole positive-measure tail. This is the strongest
  // fitted claim, so its acceptance also requires the slope to be stable
  // when refit on the deeper half of the window; a power-law profile seen
  // through this transform drifts by tens of percent there.
  FitInput exp_in;
  for (const size_t j : usable) {
    const double arg = 1.0 - std::log(prof.measures[j] / phi0);
    if (!(arg > 0.0)) continue;
    exp_in.x.push_back(std::log(prof.levels[j]));
    exp_in.y.push_back(std::log(arg));
  }
  const FitDiagnostics exp_fit = fit_line(exp_in);
  const FitDiagnostics exp_deep = fit_line(deeper_half(exp_in));
  const bool exp_stable =
      std::abs(exp_deep.slope - exp_fit.slope) <=
      cfg.max_slope_drift * std::max(std::abs(exp_fit.slope), 1e-12);
  if (exp_fit.points >= cfg.min_levels &&
      exp_fit.rel_residual <= cfg.max_rel_residual && exp_stable &&
      exp_fit.slope > 0.0 && exp_fit.slope <= 1.0 + 1e-9) {
    ExpIntegrable cls;
    cls.rho = std::min(exp_fit.slope, 1.0);
    cls.lambda = std::exp(exp_fit.intercept);
    cls.fit = exp_fit;
    return DecayClass{cls};
  }

  // (3) Weak-Lebesgue: phi ~ C * g(k)^(-exponent). The exponent is a decay
  // property of the tail, so the fit runs where at most tail_fraction of
  // the total measure remains (all usable levels if that leaves too few).
  FitInput weak_in;
  for (const size_t j : usable) {
    if (prof.measures[j] > cfg.tail_fraction * prof.total_measure) continue;
    weak_in.x.push_back(std::log(gf.g(prof.levels[j])));
    weak_in.y.push_back(std::log(prof.measures[j]));
  }
  if (static_cast<int>(weak_in.x.size()) < cfg.min_levels) {
    weak_in.x.clear();
    weak_in.y.clear();
    for (const size_t j : usable) {
      weak_in.x.push_back(std::log(gf.g(prof.levels[j])));
      weak_in.y.push_back(std::log(prof.measures[j]));
    }
  }
  const FitDiagnostics weak_fit = fit_line(weak_in);
  if (weak_fit.points >= cfg.min_levels &&
      weak_fit.rel_residual <= cfg.max_rel_residual && weak_fit.slope < 0.0) {
    WeakLebesgue cls;
    cls.exponent = -weak_fit.slope;
    cls.composed_with_g = gf.kind != GrowthFunction::Kind::Identity;
    cls.quasi_norm = weak_quasi_norm(prof, cls.exponent, &gf);
    cls.fit = weak_fit;
    return DecayClass{cls};
  }

  return DecayClass{Unclassified{exp_fit, weak_fit}};
}

DecayClass predicted_regime(const RegimeSpec& spec, RegimeKind kind) {
  if (spec.n < 1) throw ParameterError("predicted_regime: n must be >= 1");
  const double n = static_cast<double>(spec.n);

  if (kind == RegimeKind::Variational) {
    if (!(spec.p > 1.0 && spec.p < n)) {
      throw ApplicabilityError("predicted_regime: requires p in (1, n)");
    }
    const double sigma = spec.sigma_or_m;
    if (!(sigma > 1.0)) {
      throw ApplicabilityError("predicted_regime: requires sigma > 1");
    }
    const double critical = n / spec.p;
    if (sigma > critical) return DecayClass{Bounded{kInf}};
    if (sigma == critical) {
      return DecayClass{ExpIntegrable{kInf, 1.0, false, {}}};
    }
    const double exponent = n * spec.p * sigma / (n - spec.p * sigma);
    return DecayClass{WeakLebesgue{exponent, 0.0, true, false, {}}};
  }

  // Degenerate PDE case: p = 2, source in weak-L^m, m > (2*)' = 2n/(n+2).
  if (spec.n <= 2) {
    throw ApplicabilityError("predicted_regime: PDE theorem needs n > 2");
  }
  const double m = spec.sigma_or_m;
  const double m_lower = 2.0 * n / (n + 2.0);
  if (!(m > m_lower)) {
    throw ApplicabilityError(
        "predicted_regime: requires m > 2n/(n+2) for the PDE theorem");
  }
  const double th = spec.theta_deg;
  const double mu = 2.0;  // g(t) = t ln(e+t) throughout the PDE theorem
  if (m > 0.5 * n) {
    if (!(th >= 0.0 && th < 1.0)) {
      throw ApplicabilityError("predicted_regime: bounded regime needs theta < 1");
    }
    return DecayClass{Bounded{kInf}};
  }
  if (m == 0.5 * n) {
    if (!(mu * th < 1.0)) {
      throw ApplicabilityError(
          "predicted_regime: critical regime needs mu*theta < 1");
    }
    return DecayClass{ExpIntegrable{kInf, 1.0 - th, true, {}}};
  }
  if (!(th >= 0.0 && th < 1.0)) {
    throw ApplicabilityError("predicted_regime: weak regime needs theta < 1");
  }
  const double m_ss = n * m / (n - 2.0 * m);  // m** = nm/(n-2m)
  return DecayClass{WeakLebesgue{m_ss * (1.0 - th), 0.0, true, true, {}}};
}

const char* decay_class_name(const DecayClass& dc) {
  if (std::holds_alternative<Bounded>(dc.cls)) return "bounded";
  if (std::holds_alternative<ExpIntegrable>(dc.cls)) return "exp-integrable";
  if (std::holds_alternative<WeakLebesgue>(dc.cls)) return "weak-lebesgue";
  return "unclassified";
}

}  // namespace lsdecay
