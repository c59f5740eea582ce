#include "lsdecay/pde.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lsdecay/errors.hpp"

namespace lsdecay {

namespace {

constexpr double kE = 2.718281828459045235360287;

long long cell_count(const PdeProblem& prob) {
  long long cells = 1;
  for (int d = 0; d < prob.n; ++d) cells *= prob.resolution;
  return cells;
}

std::vector<long long> strides(const PdeProblem& prob) {
  std::vector<long long> s(static_cast<size_t>(prob.n));
  long long acc = 1;
  for (int d = 0; d < prob.n; ++d) {
    s[static_cast<size_t>(d)] = acc;
    acc *= prob.resolution;
  }
  return s;
}

}  // namespace

void validate_problem(const PdeProblem& prob) {
  if (prob.n < 3) throw ParameterError("pde: dimension must be >= 3");
  if (prob.resolution < 9) throw ParameterError("pde: resolution must be >= 9");
  if (prob.resolution % 2 == 0) {
    throw ParameterError("pde: resolution must be odd (a center cell must exist)");
  }
  if (!(prob.a_low > 0.0)) throw ParameterError("pde: a_low must be positive");
  if (!(prob.a_high >= prob.a_low)) {
    throw ParameterError("pde: a_high must be >= a_low");
  }
  if (!(prob.theta_deg >= 0.0)) {
    throw ParameterError("pde: theta_deg must be >= 0");
  }
  if (cell_count(prob) > 40'000'000LL) {
    throw CapacityError("pde: grid exceeds the supported cell count");
  }
  if (prob.source.kind == SourceSpec::Kind::RadialSingular) {
    const double n = static_cast<double>(prob.n);
    if (!(prob.source.m_target > 2.0 * n / (n + 2.0))) {
      throw ApplicabilityError(
          "pde: the radial source needs m_target > 2n/(n+2)");
    }
    if (!prob.source.center.empty() &&
        prob.source.center.size() != static_cast<size_t>(prob.n)) {
      throw ParameterError("pde: source center has wrong dimension");
    }
  }
}

double coefficient_a(double s, double a_low, double theta_deg) {
  const double m = std::abs(s);
  return a_low /
         (std::pow(1.0 + m, theta_deg) * std::pow(std::log(kE + m), theta_deg));
}

Eigen::ArrayXd build_source(const PdeProblem& prob) {
  validate_problem(prob);
  const long long cells = cell_count(prob);
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(cells);
  if (prob.source.kind == SourceSpec::Kind::Zero) return f;
  if (prob.source.kind == SourceSpec::Kind::Constant) {
    f.setConstant(prob.source.value);
    return f;
  }

  const double h = 1.0 / (prob.resolution + 1);
  const double expo = -static_cast<double>(prob.n) / prob.source.m_target;
  const double cap = prob.source.cap.value_or(std::pow(0.5 * h, expo));
  std::vector<double> center = prob.source.center;
  if (center.empty()) center.assign(static_cast<size_t>(prob.n), 0.5);

  const auto st = strides(prob);
  for (long long idx = 0; idx < cells; ++idx) {
    double r2 = 0.0;
    for (int d = 0; d < prob.n; ++d) {
      const long long i = (idx / st[static_cast<size_t>(d)]) % prob.resolution;
      const double x = (static_cast<double>(i) + 1.0) * h;
      r2 += (x - center[static_cast<size_t>(d)]) *
            (x - center[static_cast<size_t>(d)]);
    }
    const double r = std::sqrt(r2);
    f[idx] = r > 0.0 ? std::min(cap, std::pow(r, expo)) : cap;
  }
  return f;
}

namespace {

Eigen::SparseMatrix<double> assemble(const PdeProblem& prob,
                                     const Eigen::ArrayXd& s_frozen) {
  const long long cells = cell_count(prob);
  const double h = 1.0 / (prob.resolution + 1);
  const double inv_h2 = 1.0 / (h * h);
  const auto st = strides(prob);

  const auto face_coeff = [&](long long idx, long long nb) {
    const double s_here = s_frozen[idx];
    const double s_there = nb >= 0 ? s_frozen[nb] : 0.0;  // Dirichlet ghost
    if (prob.harmonic_faces) {
      const double a1 = coefficient_a(s_here, prob.a_low, prob.theta_deg);
      const double a2 = coefficient_a(s_there, prob.a_low, prob.theta_deg);
      return 2.0 * a1 * a2 / (a1 + a2);
    }
    return coefficient_a(0.5 * (s_here + s_there), prob.a_low, prob.theta_deg);
  };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(cells) * (2 * prob.n + 1));
  for (long long idx = 0; idx < cells; ++idx) {
    double diag = 0.0;
    for (int d = 0; d < prob.n; ++d) {
      const long long stride = st[static_cast<size_t>(d)];
      const long long i = (idx / stride) % prob.resolution;
      for (const int side : {-1, +1}) {
        const long long ni = i + side;
        const bool interior = ni >= 0 && ni < prob.resolution;
        const long long nb = interior ? idx + side * stride : -1;
        const double a = face_coeff(idx, nb) * inv_h2;
        diag += a;
        if (interior) {
          trip.emplace_back(static_cast<int>(idx), static_cast<int>(nb), -a);
        }
      }
    }
    trip.emplace_back(static_cast<int>(idx), static_cast<int>(idx), diag);
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(cells),
                                static_cast<int>(cells));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

PdeSolution solve_picard(const PdeProblem& prob, double picard_tol,
                         double linear_tol, int max_picard, double damping) {
  validate_problem(prob);
  if (!(picard_tol > 0.0) || !(linear_tol > 0.0)) {
    throw ParameterError("solve_picard: tolerances must be positive");
  }
  if (max_picard < 1) throw ParameterError("solve_picard: max_picard must be >= 1");

  const Eigen::ArrayXd f = build_source(prob);
  const Eigen::VectorXd rhs = f.matrix();
  const double rhs_norm = rhs.norm();
  const long long cells = cell_count(prob);

  PdeSolution sol;
  sol.field = Eigen::ArrayXd::Zero(cells);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(cells);

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(linear_tol);
  cg.setMaxIterations(20000);

  double omega = damping;
  int halvings = 0;
  double prev_update = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int it = 1; it <= max_picard; ++it) {
    const Eigen::SparseMatrix<double> A = assemble(prob, u.array());
    cg.compute(A);
    const Eigen::VectorXd u_hat = cg.solveWithGuess(rhs, u);
    if (cg.info() != Eigen::Success) {
      throw NumericError("solve_picard: conjugate-gradient stagnation");
    }
    const Eigen::VectorXd u_next = (1.0 - omega) * u + omega * u_hat;
    const double update = (u_next - u).cwiseAbs().maxCoeff();
    sol.update_history.push_back(update);
    u = u_next;
    sol.picard_iterations = it;
    sol.final_update_norm = update;
    if (update <= picard_tol) {
      converged = true;
      break;
    }
    if (update > prev_update && halvings < 5) {
      omega *= 0.5;
      ++halvings;
    }
    prev_update = update;
  }
  if (!converged) {
    std::string history = "solve_picard: no convergence after " +
                          std::to_string(sol.picard_iterations) +
                          " iterations; update norms:";
    const size_t show = std::min<size_t>(sol.update_history.size(), 8);
    for (size_t i = sol.update_history.size() - show;
         i < sol.update_history.size(); ++i) {
      history += " " + std::to_string(sol.update_history[i]);
    }
    throw ConvergenceError(history);
  }

  // Final undamped solve so the field satisfies its own frozen system.
  const Eigen::SparseMatrix<double> A = assemble(prob, u.array());
  cg.compute(A);
  u = cg.solveWithGuess(rhs, u);
  if (cg.info() != Eigen::Success) {
    throw NumericError("solve_picard: conjugate-gradient stagnation");
  }
  sol.linear_residual =
      rhs_norm > 0.0 ? (A * u - rhs).norm() / rhs_norm : (A * u).norm();
  sol.field = u.array();
  return sol;
}

double source_quasi_norm(const PdeProblem& prob, double r_lo_cells,
                         double r_hi, int n_levels) {
  validate_problem(prob);
  if (prob.source.kind != SourceSpec::Kind::RadialSingular) {
    throw ApplicabilityError("source_quasi_norm: needs the radial source");
  }
  const double h = 1.0 / (prob.resolution + 1);
  const double m = prob.source.m_target;
  const double n = static_cast<double>(prob.n);
  const double lam_lo = std::pow(r_hi, -n / m);
  const double lam_hi = std::pow(r_lo_cells * h, -n / m);
  std::vector<double> levels;
  for (int i = 0; i < n_levels; ++i) {
    levels.push_back(lam_lo * std::pow(lam_hi / lam_lo,
                                       static_cast<double>(i) / (n_levels - 1)));
  }
  const Eigen::ArrayXd f = build_source(prob);
  const double cell_volume = std::pow(h, n);
  const DistributionProfile prof = distribution_function(f, cell_volume, levels);
  return weak_quasi_norm(prof, m);
}

RegimeAgreement analyze_solution(const PdeSolution& sol,
                                 const PdeProblem& prob) {
  validate_problem(prob);
  RegimeAgreement agr;
  const GrowthFunction gf = growth_loglinear();
  const double h = 1.0 / (prob.resolution + 1);
  const double cell_volume = std::pow(h, static_cast<double>(prob.n));

  if (prob.source.kind == SourceSpec::Kind::RadialSingular) {
    agr.predicted = predicted_regime(
        RegimeSpec{prob.n, 2.0, prob.source.m_target, prob.theta_deg},
        RegimeKind::DegeneratePde);
  } else {
    // Bounded data: in weak-L^m for every m, so the bounded regime applies.
    agr.predicted = DecayClass{Bounded{std::numeric_limits<double>::infinity()}};
  }

  const Eigen::ArrayXd mags = sol.field.abs();
  const double max_u = mags.size() > 0 ? mags.maxCoeff() : 0.0;
  if (max_u == 0.0) {
    agr.profile = distribution_function(sol.field, cell_volume, {0.0});
    agr.measured = DecayClass{Bounded{0.0}};
  } else {
    std::vector<double> sorted(mags.data(), mags.data() + mags.size());
    std::sort(sorted.begin(), sorted.end());
    double p10 = sorted[sorted.size() / 10];
    if (!(p10 > 0.0)) p10 = max_u * 1e-6;
    std::vector<double> levels;
    const int n_levels = 64;
    for (int i = 0; i < n_levels; ++i) {
      levels.push_back(p10 * std::pow(max_u / p10,
                                      static_cast<double>(i) / (n_levels - 1)));
    }
    levels.back() = max_u;
    agr.profile = distribution_function(sol.field, cell_volume, levels);
    ClassifierConfig cfg;
    cfg.noise_floor = 4.0 * cell_volume;
    agr.measured = classify_decay(agr.profile, gf, cfg);
  }

  agr.tags_agree = agr.measured.cls.index() == agr.predicted.cls.index();
  if (const auto* mw = std::get_if<WeakLebesgue>(&agr.measured.cls)) {
    if (const auto* pw = std::get_if<WeakLebesgue>(&agr.predicted.cls)) {
      agr.measured_exponent = mw->exponent;
      agr.predicted_bound = pw->exponent;
      agr.exponent_below_bound = mw->exponent < pw->exponent;
      agr.within_informational_band =
          std::abs(mw->exponent - pw->exponent) <= 0.35 * pw->exponent;
      agr.notes = pw->open_bound
                      ? "predicted exponent is an open upper bound"
                      : "";
    }
  }
  return agr;
}

}  // namespace lsdecay
