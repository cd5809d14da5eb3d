#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "kahlerlab/alpha/alpha.hpp"
#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/continuity/continuity.hpp"
#include "kahlerlab/criterion/criterion.hpp"
#include "kahlerlab/error.hpp"
#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/grid_potential.hpp"
#include "kahlerlab/toric/library.hpp"

namespace kahlerlab::app {

namespace {

using criterion::Rational;
using toric::PotentialPtr;
using toric::ToricFanoModel;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string rational_text(const Rational& q) { return criterion::to_string(q); }

int default_samples(const RunConfig& cfg, int fallback) { return cfg.samples > 0 ? cfg.samples : fallback; }

std::vector<std::pair<std::string, PotentialPtr>> potential_list(const RunConfig& cfg, bool with_zero) {
  const int n = cfg.dim();
  std::vector<std::pair<std::string, PotentialPtr>> out;
  if (!cfg.potential.empty()) {
    out.emplace_back(cfg.potential, named_potential(n, cfg.potential));
    return out;
  }
  if (with_zero) out.emplace_back("zero", std::make_shared<toric::ZeroPotential>());
  for (const auto& p : toric::library(n)) out.emplace_back(p->label(), p);
  return out;
}

Rational parse_or(const std::string& text, const Rational& fallback) {
  return text.empty() ? fallback : criterion::parse_rational(text);
}

std::vector<std::vector<double>> read_rays(const std::string& path, std::size_t width) {
  std::ifstream in(path);
  if (!in) throw UsageError("rays", "cannot open '" + path + "'");
  std::vector<std::vector<double>> rays;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        if (number == 1 && rays.empty()) break;  // header row
        throw UsageError("rays", path + ":" + std::to_string(number) + ": not a number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (row.size() != width)
      throw UsageError("rays", path + ":" + std::to_string(number) + ": expected " + std::to_string(width) +
                                   " exponents, got " + std::to_string(row.size()));
    rays.push_back(std::move(row));
  }
  if (rays.empty()) throw UsageError("rays", "no rays in '" + path + "'");
  return rays;
}

}  // namespace

PotentialPtr reference_perturbation(int n, const std::string& spec) {
  if (spec.empty() || spec == "fs" || spec == "zero") return nullptr;
  return named_potential(n, spec);
}

PotentialPtr named_potential(int n, const std::string& spec) {
  if (spec.rfind("csv:", 0) == 0)
    return std::make_shared<toric::GridPotential>(toric::GridPotential::from_csv_file(n, spec.substr(4)));
  return toric::library_potential(n, spec);
}

ToricFanoModel make_model(const RunConfig& cfg) {
  const int n = cfg.dim();
  toric::QuadratureSpec spec;
  spec.nodes_per_axis = cfg.nodes;
  return ToricFanoModel(n, reference_perturbation(n, cfg.perturbation), spec);
}

Report run_identities(const RunConfig& cfg) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  const double tol = n <= 2 ? 1e-6 : 1e-4;
  auto list = potential_list(cfg, true);
  if (cfg.potential.empty()) {
    std::mt19937_64 rng(cfg.seed);
    const int extra = default_samples(cfg, 4);
    for (int i = 0; i < extra; ++i) {
      auto p = toric::random_potential(n, rng);
      list.emplace_back("random" + std::to_string(i) + ":" + p->label(), p);
    }
  } else {
    list.emplace(list.begin(), "zero", std::make_shared<toric::ZeroPotential>());
  }
  std::vector<functionals::SampledPotential> samples;
  for (const auto& [name, p] : list) samples.push_back(functionals::sample(model, *p, cfg.level));

  CsvTable table({"identity", "phi", "psi", "index", "residual"});
  double worst_expansion = 0.0, worst_difference = 0.0, worst_bracket = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      const auto& a = samples[i];
      const auto& b = samples[j];
      for (int r = 1; r <= n; ++r) {
        const double res = functionals::expansion_residual(a, b, r);
        worst_expansion = std::max(worst_expansion, std::isnan(res) ? kInf : res);
        table.add({"expansion", list[i].first, list[j].first, std::to_string(r), number_text(res)});
      }
      for (int k = 2; k <= n + 1; ++k) {
        const double res = functionals::Ik_difference_residual(a, b, k);
        worst_difference = std::max(worst_difference, std::isnan(res) ? kInf : res);
        table.add({"Ik_difference", list[i].first, list[j].first, std::to_string(k), number_text(res)});
        const double mass = std::abs(functionals::Ik_difference_bracket_mass(a, b, k));
        worst_bracket = std::max(worst_bracket, std::isnan(mass) ? kInf : mass);
        table.add({"bracket_mass", list[i].first, list[j].first, std::to_string(k), number_text(mass)});
      }
      rows += 3 * n;
    }
  Report rep;
  std::vector<std::string> names;
  for (const auto& [name, p] : list) names.push_back(name);
  rep.results = {{"n", n},
                 {"potentials", names},
                 {"pairs", list.size() * (list.size() - 1) / 2},
                 {"max_expansion_residual", number(worst_expansion)},
                 {"max_Ik_difference_residual", number(worst_difference)},
                 {"max_bracket_mass", number(worst_bracket)},
                 {"tolerance", tol},
                 {"exponent_note", "last sum uses exponent n-k+2; with the printed n-r+2 the form is not top degree"}};
  rep.exact = {{"n", n}, {"potentials", names}, {"rows", rows}};
  rep.require("expansion_residual", worst_expansion, "<=", tol);
  rep.require("Ik_difference_residual", worst_difference, "<=", tol);
  rep.require("bracket_mass", worst_bracket, "<=", n <= 2 ? 1e-8 : 1e-6);
  rep.tables["identities.csv"] = std::move(table);
  return rep;
}

void add_functional_library(const RunConfig& cfg, Report& rep) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  const auto list = potential_list(cfg, false);
  CsvTable table({"potential", "quantity", "k", "value"});
  json per = json::array();
  double min_ij = kInf, min_hij = kInf, worst_top = 0.0, worst_shift = 0.0, worst_forms = 0.0;
  const double shift = 0.37;
  for (const auto& [name, p] : list) {
    const auto s = functionals::sample(model, *p, cfg.level);
    const auto r = functionals::functional_report(s);
    const auto shifted = functionals::sample(model, toric::AffinePotential(p, 1.0, shift), cfg.level);
    json j{{"potential", name}, {"I", r.I}, {"J", r.J}, {"I_minus_J", r.ij_slack}, {"sup", s.sup()}, {"inf", s.inf()}};
    json ik = json::object();
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      const int k = r.ks[i];
      if (cfg.k != 0 && k != cfg.k) continue;
      ik[std::to_string(k)] = r.Ik[i];
      table.add({name, "I_k", std::to_string(k), number_text(r.Ik[i])});
      worst_forms = std::max(worst_forms, r.Ik_form_gap[i] / (std::abs(r.Ik[i]) + 1e-12));
      const double moved = std::abs(functionals::energy_Ik(shifted, k) - r.Ik[i]);
      worst_shift = std::max(worst_shift, moved);
    }
    worst_top = std::max(worst_top, std::abs(r.I - r.Ik.back()));
    min_ij = std::min(min_ij, r.ij_slack);
    json hij = json::array();
    for (std::size_t i = 0; i < r.hij_slack.size(); ++i) {
      min_hij = std::min(min_hij, r.hij_slack[i]);
      hij.push_back(r.hij_slack[i]);
      table.add({name, "hij_slack", std::to_string(i + 2), number_text(r.hij_slack[i])});
    }
    const auto ij_shift = functionals::aubin_I_J(shifted);
    worst_shift = std::max({worst_shift, std::abs(ij_shift.I - r.I), std::abs(ij_shift.J - r.J)});
    table.add({name, "I", "", number_text(r.I)});
    table.add({name, "J", "", number_text(r.J)});
    j["I_k"] = ik;
    j["hij_slack"] = hij;
    j["expansion_residuals"] = r.expansion_residuals;
    j["difference_residuals"] = r.difference_residuals;
    per.push_back(std::move(j));
  }
  rep.results["n"] = n;
  rep.results["potentials"] = per;
  rep.results["min_I_minus_J"] = number(min_ij);
  rep.results["min_hij_slack"] = number(min_hij);
  rep.results["max_top_energy_gap"] = worst_top;
  rep.results["max_constant_shift_change"] = worst_shift;
  rep.results["max_Ik_form_relative_gap"] = worst_forms;
  rep.exact["n"] = n;
  rep.exact["potentials"] = list.size();
  rep.require("I_minus_J", min_ij, ">=", -1e-9);
  if (n >= 2) rep.require("hij_slack", min_hij, ">=", -1e-9);
  rep.require("I_equals_I_top", worst_top, "<=", 1e-8);
  rep.require("constant_invariance", worst_shift, "<=", 1e-9);
  rep.require("Ik_forms_agree", worst_forms, "<=", 1e-6);
  rep.tables["functionals.csv"] = std::move(table);
}

void add_stability(const RunConfig& cfg, int pairs, Report& rep) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  std::mt19937_64 rng(cfg.seed);
  double min_stability = kInf;
  CsvTable stab({"pair", "k", "difference", "sup_gap", "bound", "slack"});
  for (int t = 0; t < pairs; ++t) {
    const auto a = functionals::sample(model, *toric::random_potential(n, rng), cfg.level);
    const auto b = functionals::sample(model, *toric::random_potential(n, rng), cfg.level);
    for (int k = 2; k <= n + 1; ++k) {
      if (cfg.k != 0 && k != cfg.k) continue;
      const auto c = functionals::verify_Ik_stability(a, b, k);
      min_stability = std::min(min_stability, c.slack);
      stab.add({std::to_string(t), std::to_string(k), number_text(c.difference), number_text(c.sup_gap),
                number_text(c.bound), number_text(c.slack)});
    }
  }
  json coefficients = json::array();
  bool coefficients_vanish = true;
  for (long long k = 2; k <= 10; ++k) {
    const long long c = functionals::stability_coefficient(k);
    coefficients.push_back(c);
    coefficients_vanish = coefficients_vanish && c == 0;
  }
  rep.results["n"] = n;
  rep.results["stability_pairs"] = pairs;
  rep.results["min_stability_slack"] = number(min_stability);
  rep.exact["n"] = n;
  rep.exact["stability_pairs"] = pairs;
  rep.exact["stability_coefficients_k2_to_10"] = coefficients;
  if (pairs > 0) rep.require("Ik_stability_slack_plus_1e-6", min_stability + 1e-6, ">=", 0.0);
  rep.require("stability_coefficients_vanish", coefficients_vanish);
  rep.tables["stability.csv"] = std::move(stab);
}

Report run_functionals(const RunConfig& cfg) {
  Report rep;
  add_functional_library(cfg, rep);
  add_stability(cfg, default_samples(cfg, 100), rep);
  return rep;
}

Report run_bergman(const RunConfig& cfg) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  const bergman::SectionBasis basis(n, cfg.m);
  const bergman::MonomialGram gram = bergman::monomial_section_norms(model, basis, nullptr, cfg.level);
  const std::size_t big_n = basis.size();
  Report rep;
  rep.results["n"] = n;
  rep.results["m"] = cfg.m;
  rep.results["sections"] = big_n;
  rep.results["gram_condition"] = gram.condition();
  rep.exact = {{"n", n}, {"m", cfg.m}, {"sections", big_n}};

  const auto full = bergman::bergman_kernel(model, basis, bergman::SectionSubspace::full(basis), gram);
  const double full_mass = bergman::kernel_mass(model, full, 0, cfg.level);
  rep.results["full_mass"] = full_mass;
  rep.require("full_space_mass", std::abs(full_mass / static_cast<double>(big_n) - 1.0), "<=", 1e-8);
  if (model.is_fubini_study()) {
    const double expected = static_cast<double>(big_n) / model.analytic_volume();
    double worst = 0.0;
    for (const auto& node : model.nodes(cfg.level))
      worst = std::max(worst, std::abs(full.value(node.pt) / expected - 1.0));
    rep.results["fs_density_constant"] = expected;
    rep.results["fs_density_max_relative_deviation"] = worst;
    rep.require("fs_density_is_N_over_V", worst, "<=", 1e-8);
  }

  std::mt19937_64 rng(cfg.seed);
  const int subspaces = default_samples(cfg, 50);
  CsvTable masses({"subspace", "kind", "dim", "mass", "relative_error"});
  double worst_mass = 0.0;
  std::normal_distribution<double> gauss;
  for (int i = 0; i < subspaces; ++i) {
    const int k = std::uniform_int_distribution<int>(1, static_cast<int>(big_n))(rng);
    const bool monomial = i % 2 == 0;
    std::vector<std::size_t> idx(big_n);
    for (std::size_t j = 0; j < big_n; ++j) idx[j] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(big_n), k);
    for (Eigen::Index r = 0; r < c.rows(); ++r)
      for (Eigen::Index col = 0; col < c.cols(); ++col) c(r, col) = {gauss(rng), gauss(rng)};
    const auto v = monomial ? bergman::SectionSubspace::monomials(basis, idx) : bergman::SectionSubspace(basis, c);
    const auto kernel = bergman::bergman_kernel(model, basis, v, gram);
    const double mass = bergman::kernel_mass(model, kernel, 0, cfg.level);
    const double err = std::abs(mass / k - 1.0);
    worst_mass = std::max(worst_mass, std::isnan(err) ? kInf : err);
    masses.add({std::to_string(i), monomial ? "monomial" : "random", std::to_string(k), number_text(mass),
                number_text(err)});
  }
  rep.results["subspaces"] = subspaces;
  rep.results["max_subspace_mass_relative_error"] = worst_mass;
  rep.exact["subspaces"] = subspaces;
  if (subspaces > 0) rep.require("subspace_mass_equals_dim", worst_mass, "<=", 1e-8);
  rep.tables["bergman_mass.csv"] = std::move(masses);

  if (!cfg.potential.empty()) {
    const auto phi = named_potential(n, cfg.potential);
    const auto ap = bergman::bergman_approximation(model, cfg.m, *phi, cfg.level);
    rep.results["approximation"] = {{"potential", cfg.potential},
                                    {"gap", ap.gap},
                                    {"lambda", ap.lambda},
                                    {"condition", ap.condition}};
    rep.require("approximation_gap_finite", std::isfinite(ap.gap));
  }

  if (cfg.probe >= 2) {
    auto rays = cfg.rays.empty() ? bergman::default_probe_rays(basis, cfg.random_rays, static_cast<unsigned>(cfg.seed))
                                 : read_rays(cfg.rays, big_n);
    std::vector<double> s_grid;
    const int steps = static_cast<int>(std::floor(cfg.s_max / cfg.s_step + 1e-9));
    for (int i = 0; i <= steps; ++i) s_grid.push_back(i * cfg.s_step);
    if (s_grid.back() < cfg.s_max - 1e-12) s_grid.push_back(cfg.s_max);
    const auto pr = bergman::eigenvalue_control_probe(model, cfg.m, cfg.probe, rays, s_grid, NAN, NAN, cfg.level);
    CsvTable scatter({"s", "logratio", "I", "ray"});
    double origin = 0.0;
    bool finite = true;
    for (const auto& smp : pr.samples) {
      scatter.add({number_text(smp.s), number_text(smp.log_ratio), number_text(smp.I), std::to_string(smp.ray)});
      if (smp.s == 0.0) origin = std::max({origin, std::abs(smp.log_ratio), std::abs(smp.I)});
      finite = finite && std::isfinite(smp.log_ratio) && std::isfinite(smp.I);
    }
    CsvTable fit({"k", "rays", "samples", "fitted_lambda", "fitted_C"});
    fit.add({std::to_string(cfg.probe), std::to_string(rays.size()), std::to_string(pr.samples.size()),
             number_text(pr.fitted_lambda), number_text(pr.fitted_c)});
    rep.results["probe"] = {{"k", cfg.probe},
                            {"rays", rays.size()},
                            {"s_max", s_grid.back()},
                            {"samples", pr.samples.size()},
                            {"fitted_lambda", number(pr.fitted_lambda)},
                            {"fitted_C", number(pr.fitted_c)},
                            {"origin_max_abs", origin}};
    rep.exact["probe"] = {{"k", cfg.probe}, {"rays", rays.size()}, {"samples", pr.samples.size()}};
    rep.require("probe_origin_is_zero", origin, "<=", 1e-12);
    rep.require("probe_samples_finite", finite);
    rep.require("probe_lambda_finite", std::isfinite(pr.fitted_lambda));
    rep.tables["probe_scatter.csv"] = std::move(scatter);
    rep.tables["probe_fit.csv"] = std::move(fit);
  }
  return rep;
}

Report run_alpha(const RunConfig& cfg) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  const int k = cfg.k == 0 ? 1 : cfg.k;
  alpha::SearchBudget budget;
  budget.max_subspaces = static_cast<std::size_t>(cfg.budget);
  budget.probes = cfg.probes;
  budget.seed = cfg.seed;
  const auto est = alpha::alpha_mk_estimate(model, cfg.m, k, budget);
  CsvTable table({"kind", "subspace", "status", "value", "lo", "hi", "certified", "evaluations"});
  std::size_t unresolved = 0;
  json statuses = json::array();
  const auto add = [&](const char* kind, const alpha::Threshold& t) {
    table.add({kind, t.subspace, alpha::to_string(t.status), number_text(t.value), number_text(t.lo), number_text(t.hi),
               t.certified ? "1" : "0", std::to_string(t.evaluations)});
    statuses.push_back(std::string(kind) + ":" + alpha::to_string(t.status) + (t.certified ? "" : ":uncertified"));
  };
  for (const auto& t : est.monomial) {
    add("monomial", t);
    unresolved += t.status == alpha::ThresholdStatus::kUnresolved ? 1 : 0;
  }
  for (const auto& t : est.probes) add("probe", t);
  Report rep;
  rep.results = {{"n", n},
                 {"m", cfg.m},
                 {"k", k},
                 {"estimate", number(est.estimate)},
                 {"lo", number(est.lo)},
                 {"hi", number(est.hi)},
                 {"extremal", est.extremal},
                 {"bound", est.bound},
                 {"monomial_total", est.monomial_total},
                 {"monomial_orbits", est.monomial_orbits},
                 {"monomial_tested", est.monomial.size()},
                 {"probes", est.probes.size()},
                 {"partial", est.partial}};
  rep.exact = {{"n", n},
               {"m", cfg.m},
               {"k", k},
               {"extremal", est.extremal},
               {"monomial_total", est.monomial_total},
               {"monomial_orbits", est.monomial_orbits},
               {"partial", est.partial},
               {"statuses", statuses}};
  rep.require("monomial_thresholds_resolved", unresolved == 0);
  rep.require("estimate_positive", est.estimate, ">", 0.0);
  rep.tables["alpha_thresholds.csv"] = std::move(table);
  return rep;
}

Report run_continuity(const RunConfig& cfg) {
  const int n = cfg.dim();
  const ToricFanoModel model = make_model(cfg);
  const auto data = continuity::ricci_potential(model, 1);
  continuity::PathOptions po;
  po.dt = cfg.dt;
  po.delta = cfg.delta;
  po.m = cfg.m;
  po.quadrature_level = cfg.level;
  po.solver.degree = cfg.degree;
  po.solver.tolerance = cfg.tolerance;
  const auto path = continuity::run_path(data, po);

  std::vector<std::string> header{"t", "sup_phi"};
  std::vector<std::string> ik_header{"t"};
  for (int k = 2; k <= n + 1; ++k) {
    header.push_back("I_" + std::to_string(k));
    ik_header.push_back("I_" + std::to_string(k));
  }
  for (const char* h : {"I", "J", "mean_self", "mean_reference", "int_I_minus_J", "newton_residual",
                        "pointwise_residual", "normalization_residual", "min_rho", "identity_residual"})
    header.emplace_back(h);
  CsvTable series(header), supphi({"t", "sup_phi"}), iks(ik_header), minrho({"t", "min_rho"});
  const auto identity = path.states.size() >= 3 ? continuity::verify_path_identity(path.states)
                                                : std::vector<continuity::PathIdentityPoint>{};
  double worst_newton = 0.0, worst_pointwise = 0.0, worst_norm = 0.0, worst_identity = 0.0, min_rho = kInf;
  double min_ij = kInf, worst_abs_phi = 0.0;
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const auto& s = path.states[i];
    double id_res = 0.0;
    for (const auto& p : identity)
      if (p.t == s.t) id_res = p.residual;
    std::vector<double> row{s.t, s.sup_phi};
    for (double v : s.Ik) row.push_back(v);
    for (double v : {s.I, s.J, s.mean_self, s.mean_reference, s.integral_I_minus_J, s.newton_residual,
                     s.pointwise_residual, s.normalization_residual, s.min_rho, id_res})
      row.push_back(v);
    series.add_numbers(row);
    supphi.add_numbers({s.t, s.sup_phi});
    std::vector<double> ik_row{s.t};
    for (double v : s.Ik) ik_row.push_back(v);
    iks.add_numbers(ik_row);
    if (cfg.m > 0) minrho.add_numbers({s.t, s.min_rho});
    worst_newton = std::max(worst_newton, s.newton_residual);
    worst_pointwise = std::max(worst_pointwise, s.pointwise_residual);
    worst_norm = std::max(worst_norm, s.normalization_residual);
    worst_identity = std::max(worst_identity, id_res);
    min_rho = std::min(min_rho, s.min_rho);
    min_ij = std::min(min_ij, s.I - s.J);
    if (model.is_fubini_study()) {
      const auto sampled = functionals::sample(model, *s.solution.phi, cfg.level);
      worst_abs_phi = std::max({worst_abs_phi, std::abs(sampled.sup()), std::abs(sampled.inf())});
    }
  }
  Report rep;
  rep.results = {{"n", n},
                 {"perturbation", cfg.perturbation.empty() ? "fs" : cfg.perturbation},
                 {"complete", path.complete},
                 {"last_good_t", path.last_good_t},
                 {"failure", path.failure},
                 {"states", path.states.size()},
                 {"ricci_constant", data.constant()},
                 {"ricci_sup_abs", data.sup_abs(cfg.level)},
                 {"max_newton_residual", worst_newton},
                 {"max_pointwise_residual", worst_pointwise},
                 {"max_normalization_residual", worst_norm},
                 {"max_identity_residual", worst_identity},
                 {"min_I_minus_J", number(min_ij)},
                 {"final_sup_phi", path.states.empty() ? 0.0 : path.states.back().sup_phi}};
  if (!identity.empty()) rep.results["full_interval_identity_residual_at_end"] = identity.back().full_interval_residual;
  rep.exact = {{"n", n}, {"states", path.states.size()}, {"complete", path.complete}};
  rep.require("path_complete", path.complete);
  rep.require("newton_residual", worst_newton, "<=", cfg.tolerance);
  rep.require("pointwise_residual", worst_pointwise, "<=", n == 1 ? cfg.tolerance : 1e-8);
  rep.require("normalization_residual", worst_norm, "<=", 1e-8);
  rep.require("path_identity_residual", worst_identity, "<=", 1e-3);
  rep.require("I_minus_J_nonnegative", min_ij, ">=", -1e-12);
  if (cfg.m > 0) {
    rep.results["min_rho"] = min_rho;
    rep.require("min_rho_positive", min_rho, ">", 0.0);
  }
  if (model.is_fubini_study()) {
    rep.results["max_abs_phi"] = worst_abs_phi;
    rep.require("trivial_path_vanishes", worst_abs_phi, "<=", 1e-10);
  }
  if (cfg.k >= 2) {
    const double a1 = static_cast<double>(parse_or(cfg.alpha1, Rational(1)));
    const double ak = static_cast<double>(parse_or(cfg.alphak, Rational(1)));
    const double lam = static_cast<double>(parse_or(cfg.lambda, Rational(1)));
    const auto prof = continuity::verify_apriori_estimates(data, path.states, cfg.k, a1, ak, lam, 0.0, cfg.level);
    CsvTable ap({"t", "corollary_slack", "bound_k", "bound_1", "jensen_slack_1", "jensen_slack_k"});
    for (const auto& p : prof.points)
      ap.add_numbers({p.t, p.corollary_slack, p.bound_k, p.bound_1, p.jensen_slack_1, p.jensen_slack_k});
    rep.results["apriori"] = {{"k", cfg.k},
                              {"alpha1", a1},
                              {"alphak", ak},
                              {"lambda", lam},
                              {"min_corollary_slack", prof.min_corollary_slack},
                              {"max_bound_k", prof.max_bound_k},
                              {"max_bound_1", prof.max_bound_1},
                              {"min_jensen_slack", prof.min_jensen_slack}};
    rep.require("corollary_slack", prof.min_corollary_slack, ">=", -1e-6);
    rep.require("jensen_slack", prof.min_jensen_slack, ">=", -1e-12);
    rep.tables["apriori.csv"] = std::move(ap);
  }
  rep.tables["continuity.csv"] = std::move(series);
  rep.tables["t_vs_supphi.csv"] = std::move(supphi);
  rep.tables["t_vs_Ik.csv"] = std::move(iks);
  rep.tables["t_vs_minrho.csv"] = std::move(minrho);
  return rep;
}

Report run_criterion(const RunConfig& cfg) {
  const int n = cfg.n != 0 ? cfg.n : cfg.dim();
  const int k = cfg.k;
  const Rational a1 = criterion::parse_rational(cfg.alpha1), ak = criterion::parse_rational(cfg.alphak);
  std::optional<Rational> lambda;
  if (!cfg.lambda.empty()) lambda = criterion::parse_rational(cfg.lambda);
  const auto v = criterion::check_alpha_criterion(n, k, a1, ak, lambda);
  Report rep;
  json verdict{{"n", n},
               {"k", k},
               {"alpha1", rational_text(a1)},
               {"alphak", rational_text(ak)},
               {"alphak_above_critical", v.alphak_above},
               {"two_term", v.two_term},
               {"rearranged", v.rearranged},
               {"rearranged_lhs", rational_text(v.rearranged_lhs)},
               {"rearranged_rhs", n + 1},
               {"feasibility", criterion::to_string(v.feasibility)}};
  if (v.lambda) {
    verdict["lambda"] = rational_text(*v.lambda);
    verdict["lambda_form"] = *v.lambda_form;
  }
  rep.results["verdict"] = verdict;
  const auto eps = criterion::epsilon_margin(n, k, ak);
  rep.results["epsilon_margin"] = eps ? json(rational_text(*eps)) : json(nullptr);
  rep.require("forms_agree", v.two_term == v.rearranged);
  const auto choice = criterion::choose_parameters(n, k, a1, ak);
  if (choice.parameters) {
    const auto& p = *choice.parameters;
    const auto lc = criterion::verify_linear_combination(n, k, p.beta1, p.betak, p.lambda);
    rep.results["parameters"] = {{"beta1", rational_text(p.beta1)},
                                 {"betak", rational_text(p.betak)},
                                 {"lambda", rational_text(p.lambda)},
                                 {"epsilon", rational_text(p.epsilon)}};
    rep.results["linear_combination"] = {{"weight_c", rational_text(lc.weight_c)},
                                         {"weight_a", rational_text(lc.weight_a)},
                                         {"weight_b", rational_text(lc.weight_b)},
                                         {"coeff_Ik", rational_text(lc.coeff_ik)},
                                         {"coeff_mean", rational_text(lc.coeff_mean)},
                                         {"coeff_sup", rational_text(lc.coeff_sup)},
                                         {"coeff_sup_closed_form", rational_text(lc.coeff_sup_closed)}};
    rep.require("parameters_admissible", criterion::admissible(p));
    rep.require("coefficients_cancel", lc.cancels());
    rep.require("sup_coefficient_positive", lc.coeff_sup > 0);
    rep.require("sup_coefficient_closed_form", lc.coeff_sup == lc.coeff_sup_closed);
    rep.require("weights_nonnegative", lc.weights_nonnegative());
  } else {
    rep.results["parameters"] = nullptr;
  }
  rep.exact = rep.results;
  return rep;
}

Report dispatch(const RunConfig& cfg) {
  validate(cfg);
  const std::string& c = cfg.command;
  if (c == "identities") return run_identities(cfg);
  if (c == "functionals") return run_functionals(cfg);
  if (c == "bergman") return run_bergman(cfg);
  if (c == "alpha") return run_alpha(cfg);
  if (c == "continuity") return run_continuity(cfg);
  if (c == "criterion") return run_criterion(cfg);
  if (c == "suite") return run_suite(cfg);
  throw UsageError("command", "unknown command '" + c + "'");
}

}  // namespace kahlerlab::app
