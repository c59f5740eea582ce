#ifndef LSDECAY_IO_HPP
#define LSDECAY_IO_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lsdecay/counterexample.hpp"
#include "lsdecay/envelope.hpp"
#include "lsdecay/growth.hpp"
#include "lsdecay/lemma.hpp"
#include "lsdecay/levelset.hpp"
#include "lsdecay/pde.hpp"

namespace lsdecay {

using nlohmann::json;

// 17 significant digits: round-trip exact for 64-bit floats.
std::string format_sig17(double v);

// {"kind": "identity" | "loglinear" | "power", "p": real}
json growth_to_json(const GrowthFunction& gf);
GrowthFunction growth_from_json(const json& j);

Variant variant_from_string(const std::string& s);

json params_to_json(const LemmaParams& p);
LemmaParams params_from_json(const json& j);

json bound_to_json(const DecayBound& b);

json axiom_report_to_json(const AxiomReport& rep);
json giusti_to_json(const GiustiResult& res);
json decay_class_to_json(const DecayClass& dc);
json dominance_summary_to_json(const DominanceReport& rep);
json admissibility_to_json(const AdmissibilityReport& rep);
json pair_check_to_json(const PairCheckReport& rep);
json beta_one_report_to_json(const BetaOneWitnessReport& rep);
json beta_gt_one_report_to_json(const BetaGtOneWitnessReport& rep);
json agreement_to_json(const RegimeAgreement& agr);

PdeProblem problem_from_json(const json& j);
json problem_to_json(const PdeProblem& prob);

// CSV emitters. Every file carries a header row; numeric cells use
// format_sig17.
void write_envelope_csv(std::ostream& os, const DominanceReport& rep);
void write_profile_csv(std::ostream& os, const DistributionProfile& prof,
                       const std::vector<double>* bound = nullptr);

// Flat binary field: two little-endian uint64 (dimension, resolution per
// axis) followed by resolution^dimension little-endian IEEE-754 doubles in
// row-major cell order.
void write_field_binary(std::ostream& os, int n, int resolution,
                        const Eigen::ArrayXd& field);
struct BinaryField {
  int n = 0;
  int resolution = 0;
  Eigen::ArrayXd field;
};
BinaryField read_field_binary(std::istream& is);

}  // namespace lsdecay

#endif
