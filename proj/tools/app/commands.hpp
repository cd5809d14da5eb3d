#pragma once

#include "app/report.hpp"
#include "app/run_config.hpp"
#include "kahlerlab/toric/model.hpp"

namespace kahlerlab::app {

/// Reference perturbation: null for "", "fs" and "zero".
toric::PotentialPtr reference_perturbation(int n, const std::string& spec);
/// Potential argument: library name or csv:PATH.
toric::PotentialPtr named_potential(int n, const std::string& spec);
toric::ToricFanoModel make_model(const RunConfig& cfg);

/// Library functionals, inequality slacks, constant invariance and form agreement.
void add_functional_library(const RunConfig& cfg, Report& rep);
/// I_k stability on `pairs` seeded random potential pairs and the integer bracket identity.
void add_stability(const RunConfig& cfg, int pairs, Report& rep);

Report run_identities(const RunConfig& cfg);
Report run_functionals(const RunConfig& cfg);
Report run_bergman(const RunConfig& cfg);
Report run_alpha(const RunConfig& cfg);
Report run_continuity(const RunConfig& cfg);
Report run_criterion(const RunConfig& cfg);
/// The acceptance battery; criterion 10 repeats criteria 1-9 and compares exact-field hashes.
Report run_suite(const RunConfig& cfg);

/// Validates, then runs the configured command.
Report dispatch(const RunConfig& cfg);

}  // namespace kahlerlab::app
