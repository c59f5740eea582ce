#ifndef LSDECAY_ENVELOPE_HPP
#define LSDECAY_ENVELOPE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "lsdecay/lemma.hpp"

namespace lsdecay {

enum class LevelTag { Geometric, ProofSequenceI, ProofSequenceII };

// Strictly increasing finite level set starting at k0.
struct LevelGrid {
  std::vector<double> levels;
  std::vector<LevelTag> tags;
  size_t size() const { return levels.size(); }
};

// Grid samples of the pointwise-maximal non-increasing phi with
// phi(k0) = phi0 satisfying the recursion constraint on every grid pair.
struct EnvelopeProfile {
  LevelGrid grid;
  std::vector<double> values;

  // Envelope value at an arbitrary k >= k0: the value at the largest grid
  // level <= k (sound upper bound for any admissible phi by monotonicity).
  double value_at(double k) const;
};

// Log-spaced levels on [k0, k_max] (uniform spacing if k0 <= 0, which only
// the classical variant permits) unioned with the refinement sequences the
// lemma proofs iterate over, chosen by the hint's conclusion shape:
//   Vanishes{V}:      V*(1 - 2^-(i+1)) and k0 + (V-k0)*(1 - 2^-i), plus V;
//   StretchedExp:     k0 + tau * s^(1/power);
//   PowerEnvelope:    the dyadic chain k0 * 2^s (log-spaced, tagged geometric).
// Deduplicated, sorted, truncated to [k0, k_max].
LevelGrid build_grid(const LemmaParams& p, double k_max, int n_geometric,
                     const std::optional<DecayBound>& bound_hint = std::nullopt);

// Exact grid maximum by dynamic programming:
//   values[j] = min(values[j-1], min_{i<j} W(levels[j], levels[i]) * values[i]^beta).
// O(N^2); grids beyond 20000 levels are refused (CapacityError).
EnvelopeProfile extremal_envelope(const LemmaParams& p, const LevelGrid& grid);

struct AdmissibilityReport {
  double worst_residual = 0.0;  // <= 0 for the extremal envelope
  size_t worst_i = 0, worst_j = 0;
  size_t pairs_checked = 0;
};

enum class PairSet { AllPairs, DoublingOnly };

// Relative slack of the profile against the recursion constraints:
// max over pairs of (values[j] - W*values[i]^beta) / max(W*values[i]^beta, floor).
// DoublingOnly restricts to grid pairs with levels[j] = 2*levels[i].
AdmissibilityReport check_admissible(const EnvelopeProfile& prof,
                                     const LemmaParams& p,
                                     PairSet pairs = PairSet::AllPairs);

struct DominanceRow {
  double level = 0.0;
  double envelope = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct DominanceReport {
  bool pass = true;
  double worst_ratio = 0.0;  // envelope / bound over checked levels
  double worst_level = 0.0;
  // For Vanishes bounds: envelope at the first grid level >= the vanishing
  // threshold, compared against vanish_tol * phi0.
  double envelope_at_vanish = 0.0;
  bool vanish_checked = false;
  std::vector<DominanceRow> rows;
};

// Checks envelope(k) <= (1+slack) * bound(k) at every grid level in the
// bound's applicability range. Failures are report entries, not errors.
DominanceReport check_dominance(const DecayBound& b, const EnvelopeProfile& prof,
                                const GrowthFunction& gf, double slack,
                                double vanish_tol = 1e-10);

// Smallest grid level l with envelope(l) <= target, on a self-extending
// geometric grid; used to certify the beta = 1 shift of the first
// generalization. span_hint seeds the initial search range.
double envelope_decay_level(const LemmaParams& p, double target,
                            double span_hint);

}  // namespace lsdecay

#endif
