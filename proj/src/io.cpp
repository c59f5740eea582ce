#include "lsdecay/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

const json& require_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw ConfigError(std::string("missing required field: ") + name);
  }
  return *it;
}

double number_field(const json& j, const char* name) {
  const json& f = require_field(j, name);
  if (!f.is_number()) {
    throw ConfigError(std::string("field must be a number: ") + name);
  }
  return f.get<double>();
}

void put_u64_le(std::ostream& os, uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

uint64_t get_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw DomainError("binary field: truncated header");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

std::string format_sig17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json growth_to_json(const GrowthFunction& gf) {
  json j;
  switch (gf.kind) {
    case GrowthFunction::Kind::Identity:
      j["kind"] = "identity";
      break;
    case GrowthFunction::Kind::LogLinear:
      j["kind"] = "loglinear";
      break;
    case GrowthFunction::Kind::Power:
      j["kind"] = "power";
      j["p"] = gf.power_exponent;
      break;
  }
  return j;
}

GrowthFunction growth_from_json(const json& j) {
  const json& kind = require_field(j, "kind");
  if (!kind.is_string()) throw ConfigError("growth.kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "identity") return growth_identity();
  if (k == "loglinear") return growth_loglinear();
  if (k == "power") return growth_power(number_field(j, "p"));
  throw ConfigError("unknown growth kind: " + k);
}

Variant variant_from_string(const std::string& s) {
  if (s == "classical") return Variant::Classical;
  if (s == "power" || s == "power-weighted" || s == "gzm") {
    return Variant::PowerWeighted;
  }
  if (s == "first" || s == "first-generalized") {
    return Variant::FirstGeneralized;
  }
  if (s == "second" || s == "second-generalized") {
    return Variant::SecondGeneralized;
  }
  throw ConfigError("unknown variant: " + s);
}

json params_to_json(const LemmaParams& p) {
  json j;
  j["variant"] = variant_name(p.variant);
  j["c"] = p.c;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["theta"] = p.theta;
  j["k0"] = p.k0;
  j["phi0"] = p.phi0;
  j["growth"] = growth_to_json(p.gf);
  return j;
}

LemmaParams params_from_json(const json& j) {
  LemmaParams p;
  const json& v = require_field(j, "variant");
  if (!v.is_string()) throw ConfigError("variant must be a string");
  p.variant = variant_from_string(v.get<std::string>());
  p.c = number_field(j, "c");
  p.alpha = number_field(j, "alpha");
  p.beta = number_field(j, "beta");
  p.theta = j.value("theta", 0.0);
  p.k0 = number_field(j, "k0");
  p.phi0 = number_field(j, "phi0");
  if (j.contains("growth")) {
    p.gf = growth_from_json(j.at("growth"));
  } else {
    p.gf = growth_identity();
  }
  validate_params(p);
  return p;
}

json bound_to_json(const DecayBound& b) {
  json j;
  j["k0"] = b.k0;
  j["provenance"] = b.provenance;
  if (const auto* v = std::get_if<Vanishes>(&b.shape)) {
    j["kind"] = "vanishes";
    j["level"] = v->level;
  } else if (const auto* s = std::get_if<StretchedExp>(&b.shape)) {
    j["kind"] = "stretched-exp";
    j["phi0"] = s->phi0;
    j["tau"] = s->tau;
    j["power"] = s->power;
  } else {
    const auto& pe = std::get<PowerEnvelope>(b.shape);
    j["kind"] = "power-envelope";
    j["constant"] = pe.constant;
    j["rate"] = pe.rate;
    j["in_g"] = pe.in_g;
  }
  return j;
}

json axiom_report_to_json(const AxiomReport& rep) {
  json j;
  j["growth"] = rep.growth_name;
  j["mu"] = rep.mu;
  j["g_prime_at_zero"] = finite_or_string(rep.g_prime_at_zero);
  j["mu_estimate"] = rep.mu_estimate;
  j["all_pass"] = rep.all_pass;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"worst_violation", finite_or_string(c.worst_violation)},
                      {"witness_t", c.witness_t},
                      {"witness_u", c.witness_u}});
  }
  j["checks"] = checks;
  return j;
}

json giusti_to_json(const GiustiResult& res) {
  json j;
  j["threshold"] = res.threshold;
  j["below_threshold"] = res.below_threshold;
  j["decay_holds"] = res.decay_holds;
  j["worst_decay_excess"] = finite_or_string(res.worst_decay_excess);
  j["values"] = json::array();
  for (const double v : res.values) j["values"].push_back(finite_or_string(v));
  return j;
}

namespace {

json fit_to_json(const FitDiagnostics& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"rel_residual", finite_or_string(f.rel_residual)},
          {"points", f.points}};
}

}  // namespace

json decay_class_to_json(const DecayClass& dc) {
  json j;
  j["class"] = decay_class_name(dc);
  if (const auto* b = std::get_if<Bounded>(&dc.cls)) {
    j["level"] = finite_or_string(b->level);
  } else if (const auto* e = std::get_if<ExpIntegrable>(&dc.cls)) {
    j["lambda"] = finite_or_string(e->lambda);
    j["rho"] = e->rho;
    j["open_bound"] = e->open_bound;
    j["fit"] = fit_to_json(e->fit);
  } else if (const auto* w = std::get_if<WeakLebesgue>(&dc.cls)) {
    j["exponent"] = w->exponent;
    j["quasi_norm"] = w->quasi_norm;
    j["composed_with_g"] = w->composed_with_g;
    j["open_bound"] = w->open_bound;
    j["fit"] = fit_to_json(w->fit);
  } else {
    const auto& u = std::get<Unclassified>(dc.cls);
    j["exp_fit"] = fit_to_json(u.exp_fit);
    j["weak_fit"] = fit_to_json(u.weak_fit);
  }
  return j;
}

json dominance_summary_to_json(const DominanceReport& rep) {
  json j;
  j["pass"] = rep.pass;
  j["worst_ratio"] = finite_or_string(rep.worst_ratio);
  j["worst_level"] = rep.worst_level;
  j["vanish_checked"] = rep.vanish_checked;
  j["envelope_at_vanish"] = rep.envelope_at_vanish;
  j["levels"] = rep.rows.size();
  return j;
}

json admissibility_to_json(const AdmissibilityReport& rep) {
  return {{"worst_residual", finite_or_string(rep.worst_residual)},
          {"worst_i", rep.worst_i},
          {"worst_j", rep.worst_j},
          {"pairs_checked", rep.pairs_checked}};
}

json pair_check_to_json(const PairCheckReport& rep) {
  return {{"pairs", rep.pairs},
          {"violations", rep.violations},
          {"worst_margin", finite_or_string(rep.worst_margin)},
          {"worst_h", rep.worst_h},
          {"worst_k", rep.worst_k}};
}

json beta_one_report_to_json(const BetaOneWitnessReport& rep) {
  json j;
  j["worst_identity_residual"] = rep.worst_identity_residual;
  json rows = json::array();
  for (size_t i = 0; i < rep.k_values.size(); ++i) {
    rows.push_back({{"k", rep.k_values[i]},
                    {"residual", rep.identity_residuals[i]}});
  }
  j["identity"] = rows;
  json probes = json::array();
  for (const auto& p : rep.probes) {
    probes.push_back({{"lambda", p.lambda},
                      {"max_exponent", p.max_exponent},
                      {"k_at_max", p.k_at_max},
                      {"unbounded_witnessed", p.unbounded_witnessed}});
  }
  j["exponential_envelope_failure"] = probes;
  return j;
}

json beta_gt_one_report_to_json(const BetaGtOneWitnessReport& rep) {
  json j;
  j["alpha"] = rep.alpha;
  j["k0"] = rep.k0_integer;
  if (rep.k0_real) j["k0_real"] = *rep.k0_real;
  j["fails_just_below"] = rep.fails_just_below;
  j["tail_certified"] = rep.tail_certified;
  j["worst_doubling_log_residual"] =
      finite_or_string(rep.worst_doubling_log_residual);
  j["min_log_phi"] = rep.min_log_phi;
  j["grid_points"] = rep.grid_k.size();
  return j;
}

json agreement_to_json(const RegimeAgreement& agr) {
  json j;
  j["measured"] = decay_class_to_json(agr.measured);
  j["predicted"] = decay_class_to_json(agr.predicted);
  j["tags_agree"] = agr.tags_agree;
  if (agr.predicted_bound > 0.0) {
    j["measured_exponent"] = agr.measured_exponent;
    j["predicted_bound"] = agr.predicted_bound;
    j["exponent_below_bound"] = agr.exponent_below_bound;
    j["within_informational_band"] = agr.within_informational_band;
  }
  if (!agr.notes.empty()) j["notes"] = agr.notes;
  return j;
}

PdeProblem problem_from_json(const json& j) {
  PdeProblem prob;
  prob.n = static_cast<int>(j.value("n", 3));
  prob.resolution = static_cast<int>(number_field(j, "resolution"));
  prob.a_low = j.value("a_low", 1.0);
  prob.a_high = j.value("a_high", prob.a_low);
  prob.theta_deg = j.value("theta_deg", 0.0);
  prob.harmonic_faces = j.value("harmonic_faces", false);
  const json& src = require_field(j, "source");
  const std::string kind = require_field(src, "kind").get<std::string>();
  if (kind == "zero") {
    prob.source.kind = SourceSpec::Kind::Zero;
  } else if (kind == "constant") {
    prob.source.kind = SourceSpec::Kind::Constant;
    prob.source.value = number_field(src, "value");
  } else if (kind == "radial-singular") {
    prob.source.kind = SourceSpec::Kind::RadialSingular;
    prob.source.m_target = number_field(src, "m_target");
    if (src.contains("center")) {
      prob.source.center = src.at("center").get<std::vector<double>>();
    }
    if (src.contains("cap") && !src.at("cap").is_null()) {
      prob.source.cap = src.at("cap").get<double>();
    }
  } else {
    throw ConfigError("unknown source kind: " + kind);
  }
  validate_problem(prob);
  return prob;
}

json problem_to_json(const PdeProblem& prob) {
  json src;
  switch (prob.source.kind) {
    case SourceSpec::Kind::Zero:
      src["kind"] = "zero";
      break;
    case SourceSpec::Kind::Constant:
      src["kind"] = "constant";
      src["value"] = prob.source.value;
      break;
    case SourceSpec::Kind::RadialSingular:
      src["kind"] = "radial-singular";
      src["m_target"] = prob.source.m_target;
      if (!prob.source.center.empty()) src["center"] = prob.source.center;
      if (prob.source.cap) src["cap"] = *prob.source.cap;
      break;
  }
  return {{"n", prob.n},
          {"resolution", prob.resolution},
          {"a_low", prob.a_low},
          {"a_high", prob.a_high},
          {"theta_deg", prob.theta_deg},
          {"harmonic_faces", prob.harmonic_faces},
          {"source", src}};
}

void write_envelope_csv(std::ostream& os, const DominanceReport& rep) {
  os << "level,envelope,bound,ratio\n";
  for (const auto& row : rep.rows) {
    os << format_sig17(row.level) << ',' << format_sig17(row.envelope) << ','
       << format_sig17(row.bound) << ',' << format_sig17(row.ratio) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const DistributionProfile& prof,
                       const std::vector<double>* bound) {
  os << (bound ? "level,measure,bound\n" : "level,measure\n");
  for (size_t j = 0; j < prof.levels.size(); ++j) {
    os << format_sig17(prof.levels[j]) << ',' << format_sig17(prof.measures[j]);
    if (bound) os << ',' << format_sig17((*bound)[j]);
    os << '\n';
  }
}

void write_field_binary(std::ostream& os, int n, int resolution,
                        const Eigen::ArrayXd& field) {
  put_u64_le(os, static_cast<uint64_t>(n));
  put_u64_le(os, static_cast<uint64_t>(resolution));
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    put_u64_le(os, std::bit_cast<uint64_t>(field[i]));
  }
}

BinaryField read_field_binary(std::istream& is) {
  BinaryField bf;
  bf.n = static_cast<int>(get_u64_le(is));
  bf.resolution = static_cast<int>(get_u64_le(is));
  if (bf.n < 1 || bf.n > 8 || bf.resolution < 1 || bf.resolution > 4096) {
    throw DomainError("binary field: implausible header");
  }
  long long cells = 1;
  for (int d = 0; d < bf.n; ++d) cells *= bf.resolution;
  bf.field.resize(cells);
  for (long long i = 0; i < cells; ++i) {
    bf.field[i] = std::bit_cast<double>(get_u64_le(is));
  }
  return bf;
}

}  // namespace lsdecay
