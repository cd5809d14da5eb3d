#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kahlerlab/toric/potential.hpp"
#include "kahlerlab/toric/quadrature.hpp"

namespace kahlerlab::toric {

struct QuadratureSpec {
  int nodes_per_axis = 0;  ///< 0 selects the default: 64 for n <= 2, 32 for n = 3.
  /// If positive, axes use the dyadic-graded rule with this many cells per end and
  /// `cell_order` Gauss nodes per cell (doubled per level) instead of plain Gauss-Legendre.
  int graded_depth = 0;
  int cell_order = 8;
};

/// CP^n with the Fubini-Study potential F(t) = (n+1) log(1 + Σ e^{t_i}) and an optional
/// torus-invariant reference perturbation χ, so ω = ω_FS + i∂∂̄χ stays in 2πc_1 and
/// h = h_FS e^{-χ}. Immutable after construction; node sets are cached and shared.
class ToricFanoModel {
 public:
  explicit ToricFanoModel(int n, PotentialPtr perturbation = nullptr, QuadratureSpec spec = {});

  int dim() const { return n_; }
  const PotentialPtr& perturbation() const { return perturbation_; }
  bool is_fubini_study() const { return perturbation_ == nullptr; }
  int nodes_per_axis(int level = 0) const;
  const QuadratureSpec& quadrature() const { return spec_; }
  /// Same geometry with another quadrature (fresh node cache).
  ToricFanoModel with_quadrature(QuadratureSpec spec) const { return ToricFanoModel(n_, perturbation_, spec); }

  /// (2π)^n c_1(CP^n)^n = (2π)^n (n+1)^n.
  double analytic_volume() const;

  static Jet fubini_study_jet(const Point& p);
  /// Jet of F + χ; its Hessian is the density matrix of ω.
  Jet reference_jet(const Point& p) const;
  double perturbation_value(const Point& p) const;

  Vec moment_map(std::span<const double> t) const;
  Vec inverse_moment_map(std::span<const double> x) const;

  /// Collapsed Gauss-Legendre nodes; `level` doubles nodes per axis each step.
  const std::vector<QuadNode>& nodes(int level = 0) const;

  /// (2π)^n ∫_{R^n} density(t) dt. Throws QuadratureError naming the node on a non-finite value.
  double integrate_invariant(const std::function<double(const Point&)>& density, int level = 0) const;

  /// V = ∫ ω^n with ω^n = n!·det D²(F+χ) dt dθ.
  double volume(int level = 0) const;

 private:
  int n_;
  PotentialPtr perturbation_;
  QuadratureSpec spec_;
  struct NodeCache;
  std::shared_ptr<NodeCache> cache_;
};

double factorial(int k);

}  // namespace kahlerlab::toric
