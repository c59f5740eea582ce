#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "lsdecay/errors.hpp"
#include "lsdecay/io.hpp"

using namespace lsdecay;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file: " + path);
  os << text;
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

struct BoundCli {
  std::string variant;
  std::optional<double> c, alpha, beta, theta, k0, phi0, power_p;
  std::string growth;
  std::string config_path;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with the parameters");
    cmd->add_option("--variant", variant,
                    "classical | power | first | second");
    cmd->add_option("--c", c, "constant c > 0");
    cmd->add_option("--alpha", alpha, "exponent alpha > 0");
    cmd->add_option("--beta", beta, "exponent beta > 0");
    cmd->add_option("--theta", theta, "weight exponent theta >= 0");
    cmd->add_option("--k0", k0, "base level k0");
    cmd->add_option("--phi0", phi0, "initial value phi(k0)");
    cmd->add_option("--growth", growth, "identity | loglinear | power");
    cmd->add_option("--p", power_p, "exponent for --growth power");
  }

  // File values first, flags override, then presence checks that name the
  // missing field.
  LemmaParams resolve() const {
    json j = config_path.empty() ? json::object() : load_json_file(config_path);
    if (!variant.empty()) j["variant"] = variant;
    if (c) j["c"] = *c;
    if (alpha) j["alpha"] = *alpha;
    if (beta) j["beta"] = *beta;
    if (theta) j["theta"] = *theta;
    if (k0) j["k0"] = *k0;
    if (phi0) j["phi0"] = *phi0;
    if (!growth.empty()) {
      json g;
      g["kind"] = growth;
      if (power_p) g["p"] = *power_p;
      j["growth"] = g;
    }
    return params_from_json(j);
  }
};

DecayBound compute_bound(const LemmaParams& p, std::optional<double> tau_hint,
                         std::optional<double> theta_tilde,
                         std::optional<double> eps0, bool permissive) {
  const Strictness strict =
      permissive ? Strictness::Permissive : Strictness::Strict;
  switch (p.variant) {
    case Variant::Classical:
      return classical_bound(p);
    case Variant::PowerWeighted:
      return gzm_bound(p);
    case Variant::FirstGeneralized:
      return first_gen_bound(p, tau_hint, strict);
    case Variant::SecondGeneralized:
      return second_gen_bound(p, theta_tilde, eps0, strict);
  }
  throw ParameterError("unknown variant");
}

double default_k_max(const LemmaParams& p, const DecayBound& b) {
  if (const auto* v = std::get_if<Vanishes>(&b.shape)) {
    return std::max(v->level * 2.5, p.k0 * 4.0);
  }
  if (const auto* s = std::get_if<StretchedExp>(&b.shape)) {
    return p.k0 + s->tau * std::pow(30.0, 1.0 / s->power);
  }
  return p.k0 * 65536.0;
}

struct EnvelopeJob {
  LemmaParams params;
  std::optional<double> tau_hint, theta_tilde, eps0;
  bool permissive = false;
  double k_max = 0.0;  // 0: derive from the bound
  int n_levels = 192;
  double slack = 0.05;
  double vanish_tol = 1e-10;
};

json run_envelope_job(const EnvelopeJob& job, DominanceReport* full_report) {
  const DecayBound b = compute_bound(job.params, job.tau_hint, job.theta_tilde,
                                     job.eps0, job.permissive);
  const double k_max =
      job.k_max > 0.0 ? job.k_max : default_k_max(job.params, b);
  const LevelGrid grid = build_grid(job.params, k_max, job.n_levels, b);
  const EnvelopeProfile prof = extremal_envelope(job.params, grid);
  const DominanceReport rep =
      check_dominance(b, prof, job.params.gf, job.slack, job.vanish_tol);
  json out;
  out["params"] = params_to_json(job.params);
  out["bound"] = bound_to_json(b);
  out["k_max"] = k_max;
  out["dominance"] = dominance_summary_to_json(rep);
  if (full_report) *full_report = rep;
  return out;
}

int sweep_concurrency(size_t jobs) {
  unsigned cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("LEVELSET_DECAY_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<size_t>(cap, jobs));
}

std::string axiom_report_text(const AxiomReport& rep) {
  std::ostringstream os;
  os << "growth function: " << rep.growth_name << " (mu = " << rep.mu
     << ", mu estimate = " << rep.mu_estimate << ")\n";
  for (const auto& c : rep.checks) {
    os << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name
       << "  worst violation " << format_sig17(c.worst_violation) << "\n";
  }
  os << (rep.all_pass ? "all checks passed\n" : "violations found\n");
  return os.str();
}

std::string beta_one_text(const BetaOneWitnessReport& rep) {
  std::ostringstream os;
  os << "doubling identity for phi(k) = exp(-(ln k)^2), "
        "c = 2^(-ln 2), g(k) = k^(ln 2), alpha = 2\n";
  os << "  checked k values: " << rep.k_values.size()
     << ", worst relative residual "
     << format_sig17(rep.worst_identity_residual) << "\n";
  os << "exponential envelope failure witnesses (phi admits no bound "
        "phi0*e^(1-lambda(k-k0))):\n";
  for (const auto& p : rep.probes) {
    os << "  lambda = " << p.lambda << ": max exponent lambda*k - (ln k)^2 = "
       << format_sig17(p.max_exponent) << " at k = " << format_sig17(p.k_at_max)
       << (p.unbounded_witnessed ? "  (exceeds ln 1e6)" : "") << "\n";
  }
  return os.str();
}

std::string beta_gt_one_text(const BetaGtOneWitnessReport& rep) {
  std::ostringstream os;
  os << "phi(k) = exp(-k) satisfies the doubling form with g(k) = k^2, "
        "beta = 3/2, c = 1 from k0 = "
     << rep.k0_integer << " (alpha = " << rep.alpha << ")\n";
  if (rep.k0_real) os << "  real-valued crossing: " << *rep.k0_real << "\n";
  os << "  inequality fails at k0 - 1: " << (rep.fails_just_below ? "yes" : "no")
     << "; tail monotone beyond 4*alpha: "
     << (rep.tail_certified ? "yes" : "no") << "\n";
  os << "  worst doubling log-residual on the grid: "
     << format_sig17(rep.worst_doubling_log_residual) << " (must be <= 0)\n";
  os << "  min ln phi over probed levels: " << format_sig17(rep.min_log_phi)
     << " (finite, so phi > 0 everywhere: no vanishing level exists)\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-set decay bounds, envelopes and counterexamples"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- gcheck ----
  auto* gcheck = app.add_subcommand("gcheck", "audit growth-function axioms");
  struct {
    std::string growth = "loglinear";
    double p = 1.5, tmax = 1e3, tol = 1e-12;
    int samples = 10000;
    std::string format = "json", out;
  } gopt;
  gcheck->add_option("--growth", gopt.growth, "identity | loglinear | power");
  gcheck->add_option("--p", gopt.p, "exponent for --growth power");
  gcheck->add_option("--tmax", gopt.tmax, "upper end of the sample lattice");
  gcheck->add_option("--samples", gopt.samples, "sample count");
  gcheck->add_option("--tol", gopt.tol, "relative tolerance");
  gcheck->add_option("--format", gopt.format, "json | text");
  gcheck->add_option("--out", gopt.out, "output path (default stdout)");
  gcheck->callback([&] {
    json gj;
    gj["kind"] = gopt.growth;
    gj["p"] = gopt.p;
    const GrowthFunction gf = growth_from_json(gj);
    const AxiomReport rep = verify_axioms(gf, gopt.tmax, gopt.samples, gopt.tol);
    write_text(gopt.out, gopt.format == "text"
                             ? axiom_report_text(rep)
                             : axiom_report_to_json(rep).dump(2) + "\n");
  });

  // ---- bound ----
  auto* bound = app.add_subcommand("bound", "compute a decay bound");
  BoundCli bopt;
  bopt.add_options(bound);
  struct {
    std::optional<double> tau_hint, theta_tilde, eps0;
    bool permissive = false;
    std::string out;
  } bflags;
  bound->add_option("--tau-hint", bflags.tau_hint,
                    "trusted shift for the first generalization at beta = 1");
  bound->add_option("--theta-tilde", bflags.theta_tilde,
                    "auxiliary exponent for the second generalization");
  bound->add_option("--eps0", bflags.eps0,
                    "auxiliary exponent for the second generalization");
  bound->add_flag("--permissive", bflags.permissive,
                  "accept non-conforming growth functions with a warning");
  bound->add_option("--out", bflags.out, "output path (default stdout)");
  bound->callback([&] {
    const LemmaParams p = bopt.resolve();
    const DecayBound b = compute_bound(p, bflags.tau_hint, bflags.theta_tilde,
                                       bflags.eps0, bflags.permissive);
    write_text(bflags.out, bound_to_json(b).dump(2) + "\n");
  });

  // ---- envelope ----
  auto* envelope =
      app.add_subcommand("envelope", "extremal envelope and dominance check");
  BoundCli eopt;
  eopt.add_options(envelope);
  struct {
    std::optional<double> tau_hint, theta_tilde, eps0;
    bool permissive = false;
    double kmax = 0.0, slack = 0.05, vanish_tol = 1e-10;
    int levels = 192;
    std::string out, summary, sweep;
  } eflags;
  envelope->add_option("--tau-hint", eflags.tau_hint, "");
  envelope->add_option("--theta-tilde", eflags.theta_tilde, "");
  envelope->add_option("--eps0", eflags.eps0, "");
  envelope->add_flag("--permissive", eflags.permissive, "");
  envelope->add_option("--kmax", eflags.kmax,
                       "grid upper end (default derived from the bound)");
  envelope->add_option("--levels", eflags.levels, "geometric level count");
  envelope->add_option("--slack", eflags.slack, "multiplicative slack");
  envelope->add_option("--vanish-tol", eflags.vanish_tol,
                       "relative tolerance at the vanishing level");
  envelope->add_option("--out", eflags.out,
                       "CSV output path (default stdout)");
  envelope->add_option("--summary", eflags.summary, "JSON summary path");
  envelope->add_option("--sweep", eflags.sweep,
                       "JSON array of parameter sets to run as a batch");
  envelope->callback([&] {
    if (!eflags.sweep.empty()) {
      const json items = load_json_file(eflags.sweep);
      if (!items.is_array()) {
        throw ConfigError("sweep file must hold a JSON array");
      }
      std::vector<EnvelopeJob> jobs;
      for (const auto& item : items) {
        EnvelopeJob job;
        job.params = params_from_json(item);
        if (item.contains("k_max")) job.k_max = item.at("k_max").get<double>();
        if (item.contains("levels")) {
          job.n_levels = item.at("levels").get<int>();
        }
        if (item.contains("slack")) job.slack = item.at("slack").get<double>();
        jobs.push_back(job);
      }
      std::vector<json> results(jobs.size());
      std::vector<std::string> errors(jobs.size());
      std::atomic<size_t> next{0};
      const int workers = sweep_concurrency(jobs.size());
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (size_t i = next.fetch_add(1); i < jobs.size();
               i = next.fetch_add(1)) {
            try {
              results[i] = run_envelope_job(jobs[i], nullptr);
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      json out = json::array();
      for (size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i].empty()) {
          out.push_back({{"index", i}, {"error", errors[i]}});
        } else {
          results[i]["index"] = i;
          out.push_back(results[i]);
        }
      }
      write_text(eflags.out, out.dump(2) + "\n");
      return;
    }
    EnvelopeJob job;
    job.params = eopt.resolve();
    job.tau_hint = eflags.tau_hint;
    job.theta_tilde = eflags.theta_tilde;
    job.eps0 = eflags.eps0;
    job.permissive = eflags.permissive;
    job.k_max = eflags.kmax;
    job.n_levels = eflags.levels;
    job.slack = eflags.slack;
    job.vanish_tol = eflags.vanish_tol;
    DominanceReport rep;
    const json summary = run_envelope_job(job, &rep);
    std::ostringstream csv;
    write_envelope_csv(csv, rep);
    write_text(eflags.out, csv.str());
    if (!eflags.summary.empty()) {
      write_text(eflags.summary, summary.dump(2) + "\n");
    }
    if (!rep.pass) exit_code = 1;
  });

  // ---- equivalence ----
  auto* equiv = app.add_subcommand(
      "equivalence", "doubling-form equivalence constants and verifier");
  struct {
    double ctilde = 1.0, alpha = 1.0, beta = 0.5, k0 = 1.0, phi0 = 1.0,
           p = 1.5;
    std::string growth = "identity";
    int pairs = 10000;
    uint64_t seed = 0;
    std::string format = "json", out;
  } qopt;
  equiv->add_option("--ctilde", qopt.ctilde, "doubling-form constant");
  equiv->add_option("--alpha", qopt.alpha, "");
  equiv->add_option("--beta", qopt.beta, "must lie in (0,1)");
  equiv->add_option("--k0", qopt.k0, "");
  equiv->add_option("--phi0", qopt.phi0, "");
  equiv->add_option("--growth", qopt.growth, "identity | loglinear | power");
  equiv->add_option("--p", qopt.p, "");
  equiv->add_option("--pairs", qopt.pairs, "sampled (h,k) pairs");
  equiv->add_option("--seed", qopt.seed, "RNG seed");
  equiv->add_option("--format", qopt.format, "json | text");
  equiv->add_option("--out", qopt.out, "");
  equiv->callback([&] {
    DoublingParams dp;
    dp.c_tilde = qopt.ctilde;
    dp.alpha = qopt.alpha;
    dp.beta = qopt.beta;
    dp.k0 = qopt.k0;
    dp.phi0 = qopt.phi0;
    json gj;
    gj["kind"] = qopt.growth;
    gj["p"] = qopt.p;
    dp.gf = growth_from_json(gj);
    const double c_full = equivalence_backward_constant(dp);
    const PairCheckReport rep =
        verify_full_form(dp, c_full, qopt.pairs, qopt.seed);
    json out;
    out["forward_constant"] = equivalence_forward(qopt.ctilde);
    out["backward_constant"] = c_full;
    out["verifier"] = pair_check_to_json(rep);
    if (qopt.format == "text") {
      std::ostringstream os;
      os << "forward: c_tilde = c = " << format_sig17(qopt.ctilde) << "\n"
         << "backward: full-form constant " << format_sig17(c_full) << "\n"
         << "verifier: " << rep.violations << " violations over " << rep.pairs
         << " sampled pairs (worst margin "
         << format_sig17(rep.worst_margin) << ")\n";
      write_text(qopt.out, os.str());
    } else {
      write_text(qopt.out, out.dump(2) + "\n");
    }
    if (rep.violations > 0) exit_code = 1;
  });

  // ---- counterexample ----
  auto* cex = app.add_subcommand("counterexample",
                                 "non-equivalence witness reports");
  struct {
    std::string which;
    double alpha = 1.0;
    bool refine = false;
    std::string format = "text", out;
  } xopt;
  cex->add_option("which", xopt.which, "beta1 | beta-gt-1")->required();
  cex->add_option("--alpha", xopt.alpha, "exponent for beta-gt-1");
  cex->add_flag("--refine-real", xopt.refine, "real-valued k0 by bisection");
  cex->add_option("--format", xopt.format, "json | text");
  cex->add_option("--out", xopt.out, "");
  cex->callback([&] {
    if (xopt.which == "beta1") {
      std::vector<double> ks;
      for (int i = 0; i < 200; ++i) ks.push_back(std::pow(1e6, i / 199.0));
      const auto rep = witness_beta_one(ks);
      write_text(xopt.out, xopt.format == "json"
                               ? beta_one_report_to_json(rep).dump(2) + "\n"
                               : beta_one_text(rep));
    } else if (xopt.which == "beta-gt-1") {
      const auto rep = witness_beta_gt_one(xopt.alpha, xopt.refine);
      write_text(xopt.out, xopt.format == "json"
                               ? beta_gt_one_report_to_json(rep).dump(2) + "\n"
                               : beta_gt_one_text(rep));
    } else {
      throw ConfigError("unknown counterexample: " + xopt.which);
    }
  });

  // ---- pde-solve ----
  auto* solve = app.add_subcommand("pde-solve",
                                   "solve the degenerate Dirichlet problem");
  struct {
    std::string config;
    double picard_tol = 1e-8, linear_tol = 1e-10, damping = 0.7;
    int max_picard = 200;
    std::string out = "field.bin", report;
  } sopt;
  solve->add_option("--config", sopt.config, "problem JSON")->required();
  solve->add_option("--picard-tol", sopt.picard_tol, "");
  solve->add_option("--linear-tol", sopt.linear_tol, "");
  solve->add_option("--max-picard", sopt.max_picard, "");
  solve->add_option("--damping", sopt.damping, "");
  solve->add_option("--out", sopt.out, "binary field path");
  solve->add_option("--report", sopt.report, "JSON diagnostics (default stdout)");
  solve->callback([&] {
    const PdeProblem prob = problem_from_json(load_json_file(sopt.config));
    const PdeSolution sol = solve_picard(prob, sopt.picard_tol,
                                         sopt.linear_tol, sopt.max_picard,
                                         sopt.damping);
    {
      std::ofstream os(sopt.out, std::ios::binary);
      if (!os) throw ConfigError("cannot open output file: " + sopt.out);
      write_field_binary(os, prob.n, prob.resolution, sol.field);
    }
    json rep;
    rep["problem"] = problem_to_json(prob);
    rep["picard_iterations"] = sol.picard_iterations;
    rep["final_update_norm"] = sol.final_update_norm;
    rep["linear_residual"] = sol.linear_residual;
    rep["max_abs_u"] = sol.field.abs().maxCoeff();
    rep["field_path"] = sopt.out;
    write_text(sopt.report, rep.dump(2) + "\n");
  });

  // ---- pde-analyze ----
  auto* analyze = app.add_subcommand(
      "pde-analyze", "distribution profile and regime agreement");
  struct {
    std::string config, field;
    double picard_tol = 1e-8, linear_tol = 1e-10;
    int max_picard = 200;
    std::string profile_csv = "pde_profile.csv", report;
  } aopt;
  analyze->add_option("--config", aopt.config, "problem JSON")->required();
  analyze->add_option("--field", aopt.field,
                      "binary field from pde-solve (default: solve now)");
  analyze->add_option("--picard-tol", aopt.picard_tol, "");
  analyze->add_option("--linear-tol", aopt.linear_tol, "");
  analyze->add_option("--max-picard", aopt.max_picard, "");
  analyze->add_option("--profile-csv", aopt.profile_csv, "profile CSV path");
  analyze->add_option("--report", aopt.report,
                      "JSON agreement report (default stdout)");
  analyze->callback([&] {
    const PdeProblem prob = problem_from_json(load_json_file(aopt.config));
    PdeSolution sol;
    if (!aopt.field.empty()) {
      std::ifstream is(aopt.field, std::ios::binary);
      if (!is) throw ConfigError("cannot open field file: " + aopt.field);
      BinaryField bf = read_field_binary(is);
      if (bf.n != prob.n || bf.resolution != prob.resolution) {
        throw DomainError("field file does not match the problem grid");
      }
      sol.field = std::move(bf.field);
    } else {
      sol = solve_picard(prob, aopt.picard_tol, aopt.linear_tol,
                         aopt.max_picard);
    }
    const RegimeAgreement agr = analyze_solution(sol, prob);
    std::ostringstream csv;
    write_profile_csv(csv, agr.profile);
    write_text(aopt.profile_csv, csv.str());
    write_text(aopt.report, agreement_to_json(agr).dump(2) + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
