#pragma once

#include <string>
#include <vector>

#include "kahlerlab/toric/model.hpp"

namespace kahlerlab::functionals {

using toric::InvariantPotential;
using toric::ToricFanoModel;

/// One quadrature node: measure weight for (2π)^n dt, the density matrix of ω there,
/// and the jet of the sampled potential.
struct FieldSample {
  double weight = 0.0;
  Mat ref;
  double phi = 0.0;
  Vec grad;
  Mat hess;
};

/// A potential sampled on a node set, the form every functional consumes. Closed-form
/// potentials are sampled on the model's quadrature nodes; the continuity solver builds
/// these directly from its collocation mesh.
struct SampledPotential {
  int n = 1;
  std::string label;
  std::vector<FieldSample> samples;

  double volume() const;
  double sup() const;
  double inf() const;
  /// ⨍ g·ω^n for a per-node quantity g.
  double average(const std::vector<double>& g) const;
  /// ⨍ φ ω^n and ⨍ φ ω_φ^n.
  double mean_against_reference() const;
  double mean_against_self() const;
  /// Smallest generalized eigenvalue of D²(F+φ) against D²F over the nodes (Kähler margin).
  double kahler_margin() const;
};

/// Samples φ at the model's quadrature nodes of refinement `level`.
/// Throws NotKahler if D²(F+χ+φ) fails to be positive definite at a node.
SampledPotential sample(const ToricFanoModel& model, const InvariantPotential& phi, int level = 0);

/// The three evaluations of I_k(φ): the potential form ⨍φ[ω^{k-1} - ω_φ^{k-1}]∧ω^{n-k+1},
/// the sum form with each summand turned into ⨍φ(ω - ω_φ)∧ω_φ^r∧ω^{n-r-1} by one Stokes step,
/// and the same sum computed directly from gradients (independent oracle).
struct IkForms {
  double potential_form = 0.0;
  double stokes_sum = 0.0;
  double gradient_sum = 0.0;
};

IkForms energy_Ik_forms(const SampledPotential& phi, int k);

/// I_k(φ), 2 ≤ k ≤ n+1. Throws QuadratureError when the potential and Stokes forms disagree
/// beyond 1e-6 relative.
double energy_Ik(const SampledPotential& phi, int k);
double energy_Ik(const ToricFanoModel& model, const InvariantPotential& phi, int k, int level = 0);

/// ⨍ i∂φ∧∂̄φ∧ω_φ^r∧ω^{n-r-1} for r = 0..n-1, both via Stokes and via gradients.
struct Summands {
  std::vector<double> stokes;
  std::vector<double> gradient;
};
Summands dirichlet_summands(const SampledPotential& phi);

struct AubinIJ {
  double I = 0.0;
  double J = 0.0;
};

/// I from ⨍φ(ω^n - ω_φ^n); J from its weighted summands. Throws QuadratureError if
/// I ≥ J ≥ I/(n+1) fails beyond tolerance.
AubinIJ aubin_I_J(const SampledPotential& phi);
AubinIJ aubin_I_J(const ToricFanoModel& model, const InvariantPotential& phi, int level = 0);

/// Residual |LHS - RHS| / (1 + |LHS|) of the expansion of ⨍(φω_φ^r - ψω_ψ^r)∧ω^{n-r}, 1 ≤ r ≤ n.
double expansion_residual(const SampledPotential& phi, const SampledPotential& psi, int r);

/// Residual of the I_k(φ) - I_k(ψ) expansion, 2 ≤ k ≤ n+1, using the top-degree exponent n-k+2
/// on the last sum.
double Ik_difference_residual(const SampledPotential& phi, const SampledPotential& psi, int k);

/// Total mass of the bracketed form in the I_k difference expansion, averaged; must be
/// 1 - (k-1) + (k-2) = 0.
double Ik_difference_bracket_mass(const SampledPotential& phi, const SampledPotential& psi, int k);

/// The integer identity 1 - (k-1) + (k-2) = 0 behind constant invariance of that bracket.
long long stability_coefficient(long long k);

struct StabilityCheck {
  double difference = 0.0;  ///< |I_k(φ) - I_k(ψ)|
  double sup_gap = 0.0;     ///< c = max over nodes |φ - ψ|
  double bound = 0.0;       ///< 2(k-1)c
  double slack = 0.0;       ///< bound - difference
};
StabilityCheck verify_Ik_stability(const SampledPotential& phi, const SampledPotential& psi, int k);

struct FunctionalReport {
  std::string label;
  int n = 1;
  std::vector<int> ks;
  std::vector<double> Ik;                  ///< I_k for k in ks (2..n+1)
  std::vector<double> Ik_form_gap;         ///< |potential form - gradient form| per k
  double I = 0.0;
  double J = 0.0;
  std::vector<double> expansion_residuals;  ///< against ψ = 0, per r = 1..n
  std::vector<double> difference_residuals; ///< against ψ = 0, per k = 2..n+1
  std::vector<double> hij_slack;            ///< (n+1)J - I - (n-k+1)I_k for k = 2..n
  double ij_slack = 0.0;                    ///< I - J
};

FunctionalReport functional_report(const SampledPotential& phi);

}  // namespace kahlerlab::functionals
