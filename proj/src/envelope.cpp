#include "lsdecay/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr size_t kMaxLevels = 20000;
constexpr double kResidualFloor = 1e-300;

}  // namespace

double EnvelopeProfile::value_at(double k) const {
  const auto& ls = grid.levels;
  if (ls.empty() || k < ls.front()) {
    throw DomainError("EnvelopeProfile::value_at: k below k0");
  }
  auto it = std::upper_bound(ls.begin(), ls.end(), k);
  return values[static_cast<size_t>(it - ls.begin()) - 1];
}

LevelGrid build_grid(const LemmaParams& p, double k_max, int n_geometric,
                     const std::optional<DecayBound>& bound_hint) {
  validate_params(p);
  if (!(k_max > p.k0)) {
    throw DomainError("build_grid: k_max must exceed k0");
  }
  if (n_geometric < 16) {
    throw ParameterError("build_grid: n_geometric must be >= 16");
  }

  std::vector<std::pair<double, LevelTag>> pts;
  pts.reserve(static_cast<size_t>(n_geometric) + 128);

  if (p.k0 > 0.0) {
    const double l0 = std::log(p.k0), l1 = std::log(k_max);
    for (int i = 0; i < n_geometric; ++i) {
      const double u = l0 + (l1 - l0) * static_cast<double>(i) /
                                (n_geometric - 1);
      pts.emplace_back(std::exp(u), LevelTag::Geometric);
    }
  } else {
    for (int i = 0; i < n_geometric; ++i) {
      pts.emplace_back(p.k0 + (k_max - p.k0) * static_cast<double>(i) /
                                  (n_geometric - 1),
                       LevelTag::Geometric);
    }
  }
  pts.front().first = p.k0;
  pts.back().first = k_max;

  if (bound_hint) {
    if (const auto* v = std::get_if<Vanishes>(&bound_hint->shape)) {
      const double V = v->level;
      for (int i = 0; i <= 40; ++i) {
        const double t = V * (1.0 - std::exp2(-(i + 1.0)));
        if (t > p.k0 && t <= k_max) {
          pts.emplace_back(t, LevelTag::ProofSequenceI);
        }
        const double s = p.k0 + (V - p.k0) * (1.0 - std::exp2(-double(i)));
        if (s > p.k0 && s <= k_max) {
          pts.emplace_back(s, LevelTag::ProofSequenceI);
        }
      }
      if (V > p.k0 && V <= k_max) {
        pts.emplace_back(V, LevelTag::ProofSequenceI);
      }
    } else if (const auto* se = std::get_if<StretchedExp>(&bound_hint->shape)) {
      for (int s = 1; s <= 4096; ++s) {
        const double k =
            p.k0 + se->tau * std::pow(static_cast<double>(s), 1.0 / se->power);
        if (k > k_max) break;
        pts.emplace_back(k, LevelTag::ProofSequenceII);
      }
    } else if (p.k0 > 0.0) {
      // Power-envelope conclusions are proved along the dyadic chain.
      for (double k = 2.0 * p.k0; k <= k_max; k *= 2.0) {
        pts.emplace_back(k, LevelTag::Geometric);
      }
    }
  }

  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  LevelGrid grid;
  grid.levels.reserve(pts.size());
  grid.tags.reserve(pts.size());
  for (const auto& [lvl, tag] : pts) {
    if (!std::isfinite(lvl)) throw NumericError("build_grid: non-finite level");
    if (!grid.levels.empty() && lvl == grid.levels.back()) continue;
    grid.levels.push_back(lvl);
    grid.tags.push_back(tag);
  }
  return grid;
}

EnvelopeProfile extremal_envelope(const LemmaParams& p, const LevelGrid& grid) {
  validate_params(p);
  const size_t n = grid.size();
  if (n == 0 || grid.levels.front() != p.k0) {
    throw DomainError("extremal_envelope: grid must start at k0");
  }
  if (n > kMaxLevels) {
    throw CapacityError("extremal_envelope: grid exceeds 20000 levels");
  }

  EnvelopeProfile prof;
  prof.grid = grid;
  prof.values.assign(n, 0.0);
  prof.values[0] = p.phi0;
  for (size_t j = 1; j < n; ++j) {
    double v = prof.values[j - 1];
    const double h = grid.levels[j];
    for (size_t i = 0; i < j; ++i) {
      const double w = recursion_weight(p, h, grid.levels[i]);
      if (!std::isfinite(w)) {
        throw NumericError("extremal_envelope: non-finite recursion weight");
      }
      v = std::min(v, w * std::pow(prof.values[i], p.beta));
    }
    prof.values[j] = v;
  }
  return prof;
}

AdmissibilityReport check_admissible(const EnvelopeProfile& prof,
                                     const LemmaParams& p, PairSet pairs) {
  AdmissibilityReport rep;
  rep.worst_residual = -kInf;
  const auto& ls = prof.grid.levels;
  const size_t n = ls.size();
  for (size_t j = 1; j < n; ++j) {
    for (size_t i = 0; i < j; ++i) {
      if (pairs == PairSet::DoublingOnly &&
          std::abs(ls[j] - 2.0 * ls[i]) > 1e-12 * ls[j]) {
        continue;
      }
      const double allowed =
          recursion_weight(p, ls[j], ls[i]) * std::pow(prof.values[i], p.beta);
      const double res = (prof.values[j] - allowed) /
                         std::max(allowed, kResidualFloor);
      ++rep.pairs_checked;
      if (res > rep.worst_residual) {
        rep.worst_residual = res;
        rep.worst_i = i;
        rep.worst_j = j;
      }
    }
  }
  if (rep.pairs_checked == 0) rep.worst_residual = 0.0;
  return rep;
}

DominanceReport check_dominance(const DecayBound& b, const EnvelopeProfile& prof,
                                const GrowthFunction& gf, double slack,
                                double vanish_tol) {
  if (!(slack >= 0.0)) throw ParameterError("check_dominance: slack must be >= 0");
  DominanceReport rep;
  const auto& ls = prof.grid.levels;
  const double phi0 = prof.values.empty() ? 0.0 : prof.values.front();

  const auto* van = std::get_if<Vanishes>(&b.shape);
  bool vanish_found = false;
  for (size_t j = 0; j < ls.size(); ++j) {
    const double k = ls[j];
    const double env = prof.values[j];
    const double bd = eval_bound(b, gf, k);
    const double ratio = env / std::max(bd, kResidualFloor);
    rep.rows.push_back({k, env, bd, ratio});
    if (van) {
      if (k >= van->level && !vanish_found) {
        vanish_found = true;
        rep.vanish_checked = true;
        rep.envelope_at_vanish = env;
        if (env > vanish_tol * phi0) rep.pass = false;
      }
      continue;  // below the vanishing level the bound carries no information
    }
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_level = k;
    }
    if (env > (1.0 + slack) * bd + kResidualFloor) rep.pass = false;
  }
  if (van && !vanish_found) rep.pass = false;  // grid never reaches the level
  return rep;
}

double envelope_decay_level(const LemmaParams& p, double target,
                            double span_hint) {
  double hi = p.k0 + 4.0 * std::max({p.k0, span_hint, 1e-12});
  for (int pass = 0; pass < 16; ++pass) {
    LevelGrid grid = build_grid(p, hi, 512);
    EnvelopeProfile prof = extremal_envelope(p, grid);
    for (size_t j = 0; j < grid.size(); ++j) {
      if (prof.values[j] <= target) return grid.levels[j];
    }
    hi *= 8.0;
    if (hi > 1e280) break;
  }
  throw ApplicabilityError(
      "envelope_decay_level: envelope never decays below the target within "
      "the search range");
}

}  // namespace lsdecay
