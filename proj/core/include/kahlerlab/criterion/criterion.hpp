#pragma once

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace kahlerlab::criterion {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a finite decimal ("0.8", "-1.25e-1") into an exact rational.
/// Throws InvalidArgument on anything else.
Rational parse_rational(const std::string& text);

/// Exact binary value of a finite double.
Rational from_double(double x);

/// "p/q" (or "p" when q = 1).
std::string to_string(const Rational& q);

enum class Feasibility { kFeasible, kInfeasible, kBoundary };
std::string to_string(Feasibility f);

/// Outcome of the alpha-invariants criterion for (n, k, α₁, α_k).
struct CriterionVerdict {
  int n = 0;
  int k = 0;
  Rational alpha1, alphak;
  bool alphak_above = false;   ///< α_k > n/(n+1)
  bool two_term = false;       ///< (k−1)[1/α₁ − (n+1)/n] < (n−k+1)[(n+1)/n − 1/α_k]
  bool rearranged = false;     ///< (k−1)/α₁ + (n−k+1)/α_k < n+1
  Rational rearranged_lhs;     ///< (k−1)/α₁ + (n−k+1)/α_k
  std::optional<Rational> lambda;
  std::optional<bool> lambda_form;  ///< Λ-dependent variant when Λ is supplied
  Feasibility feasibility = Feasibility::kInfeasible;
  bool feasible() const { return feasibility == Feasibility::kFeasible; }
};

/// Largest α accepted as input.
inline constexpr int kAlphaMax = 3;

/// Evaluates both forms of the criterion (and the Λ-dependent one when `lambda` is given).
/// Requires 2 ≤ k ≤ n and 0 < α ≤ kAlphaMax; throws InvalidArgument otherwise, and
/// throws Error if the two forms disagree. kBoundary marks an equality in either inequality.
CriterionVerdict check_alpha_criterion(int n, int k, const Rational& alpha1, const Rational& alphak,
                                       const std::optional<Rational>& lambda = std::nullopt);

/// Admissible proof parameters β₁, β_k, Λ = 1 + ε.
struct CriterionParameters {
  int n = 0;
  int k = 0;
  Rational alpha1, alphak;
  Rational beta1, betak, lambda;
  Rational epsilon;  ///< ε-margin on α₁ implied by α_k (see epsilon_margin)
};

struct ParameterChoice {
  Feasibility feasibility = Feasibility::kInfeasible;
  std::optional<CriterionParameters> parameters;
};

/// Deterministic choice: β_k at the midpoint of its open interval (upper end clipped so a β₁
/// exists), β₁ at the midpoint of its interval given β_k, then Λ = 1 + ε with ε at 90% of the
/// largest value keeping the parameter inequality strict, capped at 1. Every constraint is
/// re-verified exactly; a failure throws Error.
ParameterChoice choose_parameters(int n, int k, const Rational& alpha1, const Rational& alphak);

/// True iff (β₁, β_k, Λ) meet every admissibility inequality for (α₁, α_k).
bool admissible(const CriterionParameters& p);

/// Coefficients of the combination β₁Λ(C) + [Λ−(n−k+1)β_k](A) + (n−k+1)β₁(B) after moving
/// every term to the left.
struct LinearCombination {
  Rational weight_c, weight_a, weight_b;
  Rational coeff_ik;        ///< coefficient of I_k(φ)
  Rational coeff_mean;      ///< coefficient of ⨍(−φ)ω_φ^n
  Rational coeff_sup;       ///< coefficient of sup φ
  Rational coeff_sup_closed;  ///< (nΛ−n+k−1)(1/n−β₁) + (n−k+1)(1/n−β_k)
  bool weights_nonnegative() const { return weight_c >= 0 && weight_a >= 0 && weight_b >= 0; }
  bool cancels() const { return coeff_ik == 0 && coeff_mean == 0; }
};

/// Requires 2 ≤ k ≤ n; the parameters are not checked for admissibility.
LinearCombination verify_linear_combination(int n, int k, const Rational& beta1, const Rational& betak,
                                            const Rational& lambda);

/// ε = n/(n+1) − (k−1)/[(n+1) − (n−k+1)/α_k]: any α₁ > n/(n+1) − ε satisfies the criterion.
/// Returns 0 at α_k = n/(n+1) and nullopt below it. Requires 2 ≤ k ≤ n and α_k > 0.
std::optional<Rational> epsilon_margin(int n, int k, const Rational& alphak);

}  // namespace kahlerlab::criterion
