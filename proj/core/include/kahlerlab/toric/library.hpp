#pragma once

#include <random>
#include <string>
#include <vector>

#include "kahlerlab/toric/potential.hpp"

namespace kahlerlab::toric {

/// Names of the closed-form test potentials available on CP^n (same names for every n).
std::vector<std::string> library_names();

/// The named library potential on CP^n; throws InvalidArgument for unknown names.
/// Every entry except "zero" satisfies ‖φ‖∞ ≤ 1 and keeps D²(F+φ) ≥ 0.1·D²F.
PotentialPtr library_potential(int n, const std::string& name);

/// All non-zero library entries on CP^n.
std::vector<PotentialPtr> library(int n);

/// A seeded random Kähler potential: a random log-sum-exp tilt, or a random sub-convex
/// combination of library entries, plus a random constant in [-0.5, 0.5].
PotentialPtr random_potential(int n, std::mt19937_64& rng);

}  // namespace kahlerlab::toric
