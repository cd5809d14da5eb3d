#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "app/commands.hpp"
#include "app/suite.hpp"
#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/continuity/continuity.hpp"
#include "kahlerlab/criterion/criterion.hpp"
#include "kahlerlab/toric/library.hpp"

namespace kahlerlab::app {

namespace {

using criterion::Rational;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

RunConfig derived(const RunConfig& base, const std::string& command, const std::string& model) {
  RunConfig c;
  c.command = command;
  c.model = model;
  c.seed = base.seed;
  c.out = base.out;
  return c;
}

void merge_run(Report& into, const std::string& prefix, const RunConfig& cfg) {
  into.merge(prefix, dispatch(cfg));
}

Report identity_suite(const RunConfig& base) {
  Report rep;
  const auto start = Clock::now();
  for (const char* model : {"cp1", "cp2"}) merge_run(rep, model, derived(base, "identities", model));
  RunConfig spot = derived(base, "identities", "cp3");
  spot.nodes = 16;
  merge_run(rep, "cp3_reduced", spot);
  const double t = seconds_since(start);
  rep.results["timing"] = t;
  rep.require("runtime_seconds", t, "<=", 120.0);
  return rep;
}

Report stability_suite(const RunConfig& base) {
  Report rep;
  for (const char* model : {"cp1", "cp2", "cp3"}) {
    RunConfig cfg = derived(base, "functionals", model);
    cfg.nodes = std::string(model) == "cp3" ? 16 : 32;
    validate(cfg);
    Report sub;
    add_stability(cfg, 100, sub);
    rep.merge(model, std::move(sub));
  }
  return rep;
}

Report inequality_suite(const RunConfig& base) {
  Report rep;
  for (const char* model : {"cp1", "cp2", "cp3"}) {
    RunConfig cfg = derived(base, "functionals", model);
    validate(cfg);
    Report sub;
    add_functional_library(cfg, sub);
    rep.merge(model, std::move(sub));
  }
  return rep;
}

Report alpha_golden(const RunConfig& base) {
  struct Golden {
    const char* model;
    int m, k;
    double value, tol;
  };
  // ρ ~ |z|^{2c} near a common zero gives the threshold 1/c: span{z²} on CP¹ (c = 2),
  // span{z, z²} on CP¹ (c = 1), span{z₁³} on CP² (c = 3).
  const Golden rows[] = {{"cp1", 1, 1, 0.5, 0.02}, {"cp1", 1, 2, 1.0, 0.05}, {"cp2", 1, 1, 1.0 / 3.0, 0.02}};
  Report rep;
  const auto start = Clock::now();
  for (const auto& g : rows) {
    RunConfig cfg = derived(base, "alpha", g.model);
    cfg.m = g.m;
    cfg.k = g.k;
    Report sub = dispatch(cfg);
    const double est = sub.results["estimate"].is_number() ? sub.results["estimate"].get<double>() : INFINITY;
    const std::string name = std::string(g.model) + "_m" + std::to_string(g.m) + "_k" + std::to_string(g.k);
    sub.require("golden_error", std::abs(est - g.value), "<=", g.tol);
    sub.results["golden"] = g.value;
    rep.merge(name, std::move(sub));
  }
  const double t = seconds_since(start);
  rep.results["timing"] = t;
  rep.require("runtime_seconds", t, "<=", 180.0);
  return rep;
}

Report bergman_normalisation(const RunConfig& base) {
  Report rep;
  for (int m = 1; m <= 4; ++m) {
    RunConfig cfg = derived(base, "bergman", "cp1");
    cfg.m = m;
    cfg.samples = 50;
    merge_run(rep, "cp1_m" + std::to_string(m), cfg);
  }
  for (int m = 1; m <= 2; ++m) {
    RunConfig cfg = derived(base, "bergman", "cp2");
    cfg.m = m;
    cfg.samples = 50;
    cfg.nodes = 32;
    merge_run(rep, "cp2_m" + std::to_string(m), cfg);
  }
  return rep;
}

Report bergman_approximation_suite(const RunConfig&) {
  Report rep;
  const toric::ToricFanoModel cp1(1);
  json rows = json::array();
  for (const auto& phi : toric::library(1)) {
    const double g1 = bergman::bergman_approximation(cp1, 1, *phi).gap;
    const double g4 = bergman::bergman_approximation(cp1, 4, *phi).gap;
    rows.push_back({{"potential", phi->label()}, {"gap_m1", g1}, {"gap_m4", g4}});
    rep.require(phi->label() + "_gap_m4_minus_m1", g4 - g1, "<", 0.0);
  }
  rep.results["gaps"] = rows;
  rep.exact["potentials"] = rows.size();
  CsvTable named({"potential", "gap_m1", "gap_m4"});
  for (const auto& r : rows)
    named.add({r["potential"].get<std::string>(), number_text(r["gap_m1"].get<double>()),
               number_text(r["gap_m4"].get<double>())});
  rep.tables["bergman_gaps.csv"] = std::move(named);
  return rep;
}

double max_identity_residual(const std::vector<continuity::ContinuityState>& states) {
  double worst = 0.0;
  for (const auto& p : continuity::verify_path_identity(states)) worst = std::max(worst, p.residual);
  return worst;
}

Report continuity_suite(const RunConfig& base) {
  Report rep;
  auto start = Clock::now();
  {
    RunConfig cfg = derived(base, "continuity", "cp1");
    cfg.dt = 0.01;
    merge_run(rep, "cp1_trivial", cfg);
  }
  {
    RunConfig cfg = derived(base, "continuity", "cp2");
    cfg.dt = 0.05;
    cfg.m = 0;
    merge_run(rep, "cp2_trivial", cfg);
  }
  const std::string chi = "bump_gauss";
  {
    RunConfig cfg = derived(base, "continuity", "cp1");
    cfg.perturbation = chi;
    cfg.dt = 0.01;
    cfg.delta = 0.05;
    cfg.m = 1;
    merge_run(rep, "cp1_perturbed", cfg);

    // Δt halving for the path identity and mesh doubling for min ρ, on the same path.
    const auto data = continuity::ricci_potential(toric::ToricFanoModel(1, toric::library_potential(1, chi)));
    continuity::PathOptions po;
    po.dt = 0.01;
    po.m = 1;
    const auto coarse = continuity::run_path(data, po);
    po.dt = 0.005;
    const auto fine = continuity::run_path(data, po);
    rep.require("cp1_halving/complete", coarse.complete && fine.complete);
    const double r0 = max_identity_residual(coarse.states), r1 = max_identity_residual(fine.states);
    rep.results["cp1_halving"] = {{"residual_dt_0.01", r0}, {"residual_dt_0.005", r1}, {"ratio", r0 / r1}};
    rep.require("cp1_halving/identity_reduction_ratio", r0 / r1, ">=", 3.0);

    continuity::PathOptions dense = po;
    dense.dt = 0.05;
    dense.quadrature_level = 1;
    dense.solver.degree = 80;
    const auto refined = continuity::run_path(data, dense);
    double worst = 0.0;
    std::size_t matched = 0;
    for (const auto& s : refined.states)
      for (const auto& c : coarse.states)
        if (std::abs(c.t - s.t) < 1e-9) {
          worst = std::max(worst, std::abs(s.min_rho / c.min_rho - 1.0));
          ++matched;
        }
    rep.results["cp1_mesh_doubling"] = {{"matched_states", matched}, {"max_min_rho_relative_change", worst}};
    rep.require("cp1_mesh_doubling/complete", refined.complete && matched == refined.states.size());
    rep.require("cp1_mesh_doubling/min_rho_relative_change", worst, "<=", 0.05);
  }
  const double t1 = seconds_since(start);
  rep.require("cp1_runtime_seconds", t1, "<=", 300.0);
  start = Clock::now();
  {
    RunConfig cfg = derived(base, "continuity", "cp2");
    cfg.perturbation = chi;
    cfg.dt = 0.05;
    cfg.m = 0;
    cfg.k = 2;
    cfg.alpha1 = "1/2";
    cfg.alphak = "4/5";
    cfg.lambda = "11/10";
    merge_run(rep, "cp2_perturbed", cfg);
  }
  const double t2 = seconds_since(start);
  rep.results["timing"] = {{"cp1", t1}, {"cp2", t2}};
  rep.require("cp2_runtime_seconds", t2, "<=", 1200.0);
  return rep;
}

Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int den_max) {
  const int q = std::uniform_int_distribution<int>(1, den_max)(rng);
  const Rational width = hi - lo;
  const Rational scale = width * q;
  // p/q uniform over the grid of denominators q inside (lo, hi).
  const long long steps = static_cast<long long>(std::ceil(static_cast<double>(scale)));
  const long long p = std::uniform_int_distribution<long long>(1, std::max<long long>(1, steps - 1))(rng);
  Rational r = lo + Rational(p, q);
  if (r >= hi) r = (lo + hi) / 2;
  return r;
}

Report criterion_algebra(const RunConfig& base) {
  Report rep;
  std::mt19937_64 rng(base.seed);
  std::ostringstream digest;

  int tuples = 0, cancelled = 0, attempts = 0;
  while (tuples < 10000 && attempts < 1000000) {
    ++attempts;
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const int k = std::uniform_int_distribution<int>(2, n)(rng);
    criterion::CriterionParameters p;
    p.n = n;
    p.k = k;
    p.beta1 = random_rational(rng, Rational(0), Rational(2), 97);
    p.betak = random_rational(rng, Rational(-1), Rational(1, n), 97);
    p.lambda = random_rational(rng, Rational(1), Rational(3), 97);
    p.alpha1 = Rational(1) / (1 + p.beta1) + Rational(1, 1000);
    p.alphak = Rational(1) / (1 + p.betak) + Rational(1, 1000);
    if (!criterion::admissible(p)) continue;
    ++tuples;
    const auto lc = criterion::verify_linear_combination(n, k, p.beta1, p.betak, p.lambda);
    cancelled += lc.cancels() ? 1 : 0;
    if (tuples % 1000 == 0)
      digest << n << ':' << k << ':' << criterion::to_string(p.beta1) << ':' << criterion::to_string(p.betak) << ':'
             << criterion::to_string(p.lambda) << ';';
  }
  rep.require("admissible_tuples_found", tuples == 10000);
  rep.require("Ik_and_mean_coefficients_vanish", cancelled == tuples);

  int inputs = 0, feasible = 0, boundary = 0, positive = 0;
  while (inputs < 10000) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const int k = std::uniform_int_distribution<int>(2, n)(rng);
    const Rational a1 = random_rational(rng, Rational(0), Rational(3, 2), 60);
    const Rational ak = random_rational(rng, Rational(0), Rational(3, 2), 60);
    ++inputs;
    const auto v = criterion::check_alpha_criterion(n, k, a1, ak);  // throws if the forms disagree
    if (v.feasibility == criterion::Feasibility::kBoundary) ++boundary;
    if (!v.feasible()) continue;
    ++feasible;
    const auto choice = criterion::choose_parameters(n, k, a1, ak);
    const auto& p = *choice.parameters;
    const auto lc = criterion::verify_linear_combination(n, k, p.beta1, p.betak, p.lambda);
    positive += (lc.coeff_sup > 0 && criterion::admissible(p)) ? 1 : 0;
  }
  rep.require("forms_equivalent_on_inputs", inputs == 10000);
  rep.require("sup_coefficient_positive_for_choices", positive == feasible && feasible > 0);

  const auto eps = criterion::epsilon_margin(3, 2, Rational(4, 5));
  rep.require("epsilon_example_is_1_over_12", eps && *eps == Rational(1, 12));
  RunConfig cli = derived(base, "criterion", "cp1");
  cli.n = 3;
  cli.k = 2;
  cli.alpha1 = "4/5";
  cli.alphak = "4/5";
  Report example = dispatch(cli);
  example.require("example_feasible", example.results["verdict"]["feasibility"] == "feasible");
  rep.merge("cli_example", std::move(example));

  rep.results["tuples"] = tuples;
  rep.results["tuple_attempts"] = attempts;
  rep.results["inputs"] = inputs;
  rep.results["feasible"] = feasible;
  rep.results["boundary"] = boundary;
  rep.results["epsilon_example"] = eps ? criterion::to_string(*eps) : "none";
  rep.exact["tuples"] = tuples;
  rep.exact["tuple_attempts"] = attempts;
  rep.exact["cancelled"] = cancelled;
  rep.exact["feasible"] = feasible;
  rep.exact["boundary"] = boundary;
  rep.exact["sup_positive"] = positive;
  rep.exact["epsilon_example"] = rep.results["epsilon_example"];
  rep.exact["sample_digest"] = exact_hash(digest.str());
  return rep;
}

Report probe_suite(const RunConfig& base) {
  Report rep;
  for (int m = 1; m <= 2; ++m) {
    RunConfig cfg = derived(base, "bergman", "cp1");
    cfg.m = m;
    cfg.probe = 2;
    cfg.random_rays = 200;
    cfg.s_max = 40.0;
    cfg.s_step = 2.0;
    cfg.samples = 1;
    Report sub = dispatch(cfg);
    sub.require("probe_rays", sub.results["probe"]["rays"].get<double>(), ">=", 200.0);
    rep.merge("cp1_m" + std::to_string(m), std::move(sub));
  }
  return rep;
}

Report run_criterion_suite(int id, const RunConfig& cfg) {
  switch (id) {
    case 1: return identity_suite(cfg);
    case 2: return stability_suite(cfg);
    case 3: return inequality_suite(cfg);
    case 4: return alpha_golden(cfg);
    case 5: return bergman_normalisation(cfg);
    case 6: return bergman_approximation_suite(cfg);
    case 7: return continuity_suite(cfg);
    case 8: return criterion_algebra(cfg);
    case 9: return probe_suite(cfg);
  }
  throw UsageError("only", "no criterion " + std::to_string(id));
}

// Largest relative difference between numeric leaves of two result trees; timing entries skipped.
double max_numeric_drift(const json& a, const json& b, bool& same_shape) {
  if (a.is_object() && b.is_object()) {
    double worst = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "timing") continue;
      if (!b.contains(it.key())) {
        same_shape = false;
        continue;
      }
      worst = std::max(worst, max_numeric_drift(it.value(), b[it.key()], same_shape));
    }
    return worst;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) same_shape = false;
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      worst = std::max(worst, max_numeric_drift(a[i], b[i], same_shape));
    return worst;
  }
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (x == y) return 0.0;
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
  }
  if (a != b) same_shape = false;
  return 0.0;
}

}  // namespace

const std::vector<std::string>& criterion_titles() {
  static const std::vector<std::string> titles{
      "Identity suite",         "I_k stability",        "Functional inequalities", "Alpha golden values",
      "Bergman normalization",  "Bergman approximation", "Continuity path",         "Criterion algebra",
      "Eigenvalue probe",       "Determinism",
  };
  return titles;
}

std::vector<int> selected_criteria(const RunConfig& cfg) {
  std::vector<int> ids;
  std::stringstream ss(cfg.only);
  std::string item;
  while (std::getline(ss, item, ',')) ids.push_back(std::stoi(item));
  if (ids.empty())
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

SuiteOutcome run_battery(const RunConfig& cfg) {
  SuiteOutcome out;
  const auto ids = selected_criteria(cfg);
  std::vector<int> base_ids;
  for (int id : ids)
    if (id != 10) base_ids.push_back(id);
  CsvTable table({"criterion", "title", "pass", "seconds"});
  const auto run_all = [&](Report& into, std::vector<CriterionOutcome>* per) {
    for (int id : base_ids) {
      const auto start = Clock::now();
      Report sub;
      try {
        sub = run_criterion_suite(id, cfg);
      } catch (const std::exception& e) {
        sub.results["error"] = e.what();
        sub.require("completed_without_error", false);
      }
      const double t = seconds_since(start);
      if (per) per->push_back({id, criterion_titles()[id - 1], sub.pass(), t});
      into.merge("criterion" + std::to_string(id), std::move(sub));
    }
  };
  run_all(out.report, &out.criteria);
  if (std::find(ids.begin(), ids.end(), 10) != ids.end()) {
    const auto start = Clock::now();
    Report again;
    run_all(again, nullptr);
    const std::string h1 = exact_hash(out.report.exact), h2 = exact_hash(again.exact);
    bool same_shape = true;
    const double drift = max_numeric_drift(out.report.results, again.results, same_shape);
    Report det;
    det.results = {{"first_hash", h1}, {"second_hash", h2}, {"max_relative_drift", drift}};
    det.require("exact_hashes_equal", h1 == h2);
    det.require("result_trees_match", same_shape);
    det.require("quadrature_reproducible_to_1e-12", drift, "<=", 1e-12);
    const bool pass = det.pass();
    out.criteria.push_back({10, criterion_titles()[9], pass, seconds_since(start)});
    out.report.merge("criterion10", std::move(det));
  }
  for (const auto& c : out.criteria)
    table.add({std::to_string(c.id), c.title, c.pass ? "pass" : "fail", number_text(c.seconds)});
  out.report.tables["suite.csv"] = std::move(table);
  json summary = json::array();
  for (const auto& c : out.criteria)
    summary.push_back({{"criterion", c.id}, {"title", c.title}, {"pass", c.pass}});
  out.report.results["criteria"] = summary;
  return out;
}

Report run_suite(const RunConfig& cfg) { return run_battery(cfg).report; }

}  // namespace kahlerlab::app
