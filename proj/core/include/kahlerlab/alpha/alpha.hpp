#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kahlerlab/bergman/bergman.hpp"

namespace kahlerlab::alpha {

using bergman::SectionBasis;
using bergman::SectionSubspace;
using toric::ToricFanoModel;

/// Quadrature and classification settings for the divergence test on ∫ρ^{-α/m}ω^n.
struct AlphaOptions {
  int depth = 56;            ///< dyadic shells per end of each collapsed axis (invariant subspaces)
  int cell_order = 6;        ///< Gauss nodes per shell cell
  int probe_depth = 20;      ///< shells used for non-invariant (angle-dependent) subspaces
  int probe_cell_order = 4;
  int probe_angles = 0;      ///< trapezoid points per angle; 0 selects 4d + 4
  double alpha_max = 3.0;
  double bracket = 0.02;     ///< bisection stops at this width
  double dead_zone = 0.003;  ///< |fitted shell growth exponent| below this is inconclusive
  int fit_stride = 8;        ///< layer spacing of the three-shell growth fit
  double interior_floor = 1e-2;  ///< interior min of ρ/max ρ below this marks a probe uncertified
};

enum class Verdict { kConvergent, kDivergent, kInconclusive };

/// Shell-by-shell masses of ∫ρ^{-α/m}ω^n on a dyadic-graded rule. Shell L collects the
/// nodes whose largest axis layer is L; the innermost cells (layer = depth) are excluded
/// from every truncated value.
struct ShellProfile {
  double alpha = 0.0;
  std::vector<double> log_shells;  ///< log of the mass in shell L, L = 0..depth-1
  double growth = 0.0;             ///< fitted γ in S_L ≈ c L^q 2^{γL}
  Verdict verdict = Verdict::kInconclusive;
  /// Truncated integral Σ_{L < level} S_L.
  double value(int level) const;
};

/// ρ for one subspace, tabulated once on the graded nodes so that many α can be tested.
class ThresholdProblem {
 public:
  /// If `model` already carries the graded rule requested by `options` its node cache is
  /// reused; `gram` (reference monomial norms) may be passed to skip recomputing it.
  ThresholdProblem(const ToricFanoModel& model, int m, const SectionSubspace& subspace, const AlphaOptions& options = {},
                   const bergman::MonomialGram* gram = nullptr);

  ShellProfile profile(double alpha) const;
  int depth() const { return depth_; }
  bool invariant() const { return invariant_; }
  /// min ρ / max ρ over interior nodes (layer ≤ 1); small values mean a base point off the
  /// boundary that the shell test does not resolve.
  double interior_min_ratio() const { return interior_min_ratio_; }

 private:
  int m_;
  int depth_;
  bool invariant_;
  AlphaOptions options_;
  std::vector<float> log_rho_;     // per evaluation point (node × angle), shifted by max
  std::vector<double> log_weight_; // per node
  std::vector<int> layer_;         // per node
  int angles_total_ = 1;
  double interior_min_ratio_ = 1.0;
};

/// ∫ρ_{ω,m,V}^{-α/m} ω^n truncated at graded level L (shells 0..L-1). Returns +∞ on overflow.
double integral_vs_alpha(const ToricFanoModel& model, int m, const SectionSubspace& subspace, double alpha,
                         int level, const AlphaOptions& options = {});

enum class ThresholdStatus { kResolved, kAboveMax, kUnresolved };

struct Threshold {
  std::string subspace;
  ThresholdStatus status = ThresholdStatus::kUnresolved;
  double value = 0.0;  ///< midpoint of [lo, hi], or +∞ when above α_max
  double lo = 0.0, hi = 0.0;
  bool certified = true;  ///< false for probes with unresolved interior base points
  int evaluations = 0;
};

/// α*(V) = sup{α : ∫ρ^{-α/m}ω^n < ∞} by bisection on the shell verdict.
Threshold lct_threshold(const ToricFanoModel& model, int m, const SectionSubspace& subspace,
                        const AlphaOptions& options = {});
Threshold lct_threshold(const ThresholdProblem& problem, const std::string& label, const AlphaOptions& options = {});

struct SearchBudget {
  std::size_t max_subspaces = 5000;  ///< monomial subspaces (orbit representatives) to test
  int probes = 4;                    ///< random-coefficient subspaces
  std::uint64_t seed = 7;
};

struct AlphaEstimate {
  int m = 1, k = 1, n = 1;
  double estimate = std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;
  std::string extremal;
  std::string bound = "upper";  ///< minimum over a subset of the Grassmannian
  std::vector<Threshold> monomial;
  std::vector<Threshold> probes;
  std::size_t monomial_total = 0;     ///< k-subsets of monomials
  std::size_t monomial_orbits = 0;    ///< after coordinate-permutation symmetry (FS only)
  bool partial = false;               ///< budget exhausted
};

/// Minimum threshold over monomial k-subspaces (one per symmetry orbit when the reference is
/// Fubini-Study) and certified random probes.
AlphaEstimate alpha_mk_estimate(const ToricFanoModel& model, int m, int k, const SearchBudget& budget = {},
                                const AlphaOptions& options = {});

const char* to_string(Verdict v);
const char* to_string(ThresholdStatus s);

}  // namespace kahlerlab::alpha
