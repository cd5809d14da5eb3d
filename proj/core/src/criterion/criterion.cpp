#include "kahlerlab/criterion/criterion.hpp"

#include <cmath>
#include <regex>

#include "kahlerlab/error.hpp"

namespace kahlerlab::criterion {

namespace {

using boost::multiprecision::cpp_int;

Rational pow10(int e) {
  cpp_int p = 1;
  for (int i = 0; i < std::abs(e); ++i) p *= 10;
  return e >= 0 ? Rational(p) : Rational(cpp_int(1), p);
}

// Decimal digit string to integer; cpp_int reads a leading zero as octal.
cpp_int decimal(std::string digits) {
  bool negative = false;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    negative = digits[0] == '-';
    digits.erase(0, 1);
  }
  const auto first = digits.find_first_not_of('0');
  const cpp_int v = first == std::string::npos ? cpp_int(0) : cpp_int(digits.substr(first));
  return negative ? cpp_int(-v) : v;
}

void check_dims(int n, int k) {
  if (n < 2 || k < 2 || k > n)
    throw InvalidArgument("criterion needs 2 <= k <= n (got n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                          ")");
}

void check_alpha(const Rational& a, const char* name) {
  if (a <= 0 || a > kAlphaMax)
    throw InvalidArgument(std::string(name) + " must lie in (0, " + std::to_string(kAlphaMax) + "], got " +
                          to_string(a));
}

Rational inv(const Rational& q) { return Rational(1) / q; }

// 1/α − 1, the β whose 1/(1+β) equals α.
Rational beta_of(const Rational& alpha) { return inv(alpha) - 1; }

// The strict parameter inequality (n[Λ−1]+k−1)(β₁−1/n) < (n−k+1)(1/n−β_k) as lhs, rhs.
std::pair<Rational, Rational> parameter_sides(int n, int k, const Rational& beta1, const Rational& betak,
                                              const Rational& lambda) {
  const Rational in = Rational(1, n);
  return {(n * (lambda - 1) + (k - 1)) * (beta1 - in), Rational(n - k + 1) * (in - betak)};
}

}  // namespace

Rational parse_rational(const std::string& text) {
  static const std::regex frac(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex dec(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch mt;
  if (std::regex_match(text, mt, frac)) {
    const cpp_int den = decimal(mt[2].str());
    if (den == 0) throw InvalidArgument("zero denominator in rational '" + text + "'");
    return Rational(decimal(mt[1].str()), den);
  }
  if (std::regex_match(text, mt, dec) && (mt[2].length() + mt[3].length()) > 0) {
    const std::string digits = mt[2].str() + mt[3].str();
    int exponent = -static_cast<int>(mt[3].length());
    if (mt[4].matched) {
      const long e = std::stol(mt[4].str());
      if (std::abs(e) > 4000) throw InvalidArgument("exponent out of range in '" + text + "'");
      exponent += static_cast<int>(e);
    }
    Rational q = Rational(decimal(digits)) * pow10(exponent);
    return mt[1].str() == "-" ? Rational(-q) : q;
  }
  throw InvalidArgument("not a rational number: '" + text + "'");
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("cannot convert a non-finite value to a rational");
  int e = 0;
  const double mant = std::frexp(x, &e);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational q(scaled);
  e -= 53;
  cpp_int p = 1;
  p <<= std::abs(e);
  return e >= 0 ? Rational(q * p) : Rational(q / p);
}

std::string to_string(const Rational& q) {
  const cpp_int num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::kFeasible: return "feasible";
    case Feasibility::kInfeasible: return "infeasible";
    case Feasibility::kBoundary: return "infeasible-boundary";
  }
  return "?";
}

CriterionVerdict check_alpha_criterion(int n, int k, const Rational& alpha1, const Rational& alphak,
                                       const std::optional<Rational>& lambda) {
  check_dims(n, k);
  check_alpha(alpha1, "alpha1");
  check_alpha(alphak, "alphak");
  CriterionVerdict v;
  v.n = n;
  v.k = k;
  v.alpha1 = alpha1;
  v.alphak = alphak;
  const Rational crit(n, n + 1), c(n + 1, n);
  v.alphak_above = alphak > crit;
  const Rational lhs = (k - 1) * (inv(alpha1) - c), rhs = (n - k + 1) * (c - inv(alphak));
  v.two_term = lhs < rhs;
  v.rearranged_lhs = (k - 1) * inv(alpha1) + (n - k + 1) * inv(alphak);
  v.rearranged = v.rearranged_lhs < n + 1;
  if (v.two_term != v.rearranged) throw Error("criterion forms disagree on " + to_string(alpha1) + ", " + to_string(alphak));
  if (lambda) {
    if (*lambda < 1) throw InvalidArgument("lambda must be >= 1, got " + to_string(*lambda));
    v.lambda = lambda;
    v.lambda_form = (n * (*lambda - 1) + (k - 1)) * (inv(alpha1) - c) < rhs;
  }
  const bool strict = v.alphak_above && v.two_term && v.lambda_form.value_or(true);
  const bool equality = alphak == crit || lhs == rhs ||
                        (lambda && (n * (*lambda - 1) + (k - 1)) * (inv(alpha1) - c) == rhs);
  v.feasibility = strict ? Feasibility::kFeasible : (equality ? Feasibility::kBoundary : Feasibility::kInfeasible);
  // An equality only counts as the boundary if every other inequality holds strictly or with equality.
  if (v.feasibility == Feasibility::kBoundary) {
    const bool weak = alphak >= crit && lhs <= rhs &&
                      (!lambda || (n * (*lambda - 1) + (k - 1)) * (inv(alpha1) - c) <= rhs);
    if (!weak) v.feasibility = Feasibility::kInfeasible;
  }
  return v;
}

bool admissible(const CriterionParameters& p) {
  const int n = p.n, k = p.k;
  const Rational in(1, n);
  const auto [lhs, rhs] = parameter_sides(n, k, p.beta1, p.betak, p.lambda);
  return p.beta1 >= 0 && p.beta1 > beta_of(p.alpha1) && p.betak > -1 && p.betak > beta_of(p.alphak) &&
         p.betak < in && p.lambda > 1 && lhs < rhs;
}

ParameterChoice choose_parameters(int n, int k, const Rational& alpha1, const Rational& alphak) {
  const CriterionVerdict v = check_alpha_criterion(n, k, alpha1, alphak);
  ParameterChoice out;
  out.feasibility = v.feasibility;
  if (!v.feasible()) return out;
  const Rational in(1, n);
  const Rational b1 = beta_of(alpha1), bk = beta_of(alphak);
  const Rational low1 = b1 > 0 ? b1 : Rational(0);
  // β_k must leave room for β₁ > low1 under the parameter inequality at Λ = 1.
  Rational hik = in - (k - 1) * (low1 - in) / (n - k + 1);
  if (hik > in) hik = in;
  const Rational lowk = bk > -1 ? bk : Rational(-1);
  CriterionParameters p;
  p.n = n;
  p.k = k;
  p.alpha1 = alpha1;
  p.alphak = alphak;
  p.betak = (lowk + hik) / 2;
  const Rational hi1 = in + (n - k + 1) * (in - p.betak) / (k - 1);
  p.beta1 = (low1 + hi1) / 2;
  Rational eps = 1;
  if (p.beta1 > in) {
    const Rational eps_max = ((n - k + 1) * (in - p.betak) / (p.beta1 - in) - (k - 1)) / n;
    const Rational e = eps_max * Rational(9, 10);
    if (e < eps) eps = e;
  }
  p.lambda = 1 + eps;
  p.epsilon = *epsilon_margin(n, k, alphak);
  if (!admissible(p)) throw Error("parameter choice failed exact re-verification");
  out.parameters = p;
  return out;
}

LinearCombination verify_linear_combination(int n, int k, const Rational& beta1, const Rational& betak,
                                            const Rational& lambda) {
  check_dims(n, k);
  const int r = n - k + 1;
  LinearCombination lc;
  lc.weight_c = beta1 * lambda;
  lc.weight_a = lambda - r * betak;
  lc.weight_b = r * beta1;
  // (C): ⨍(−φ) + r I_k − n sup ≤ 0; (A): sup − β₁⨍(−φ) ≤ C; (B): sup − β_k⨍(−φ) − Λ I_k ≤ C.
  lc.coeff_ik = lc.weight_c * r + lc.weight_b * (-lambda);
  lc.coeff_mean = lc.weight_c * 1 + lc.weight_a * (-beta1) + lc.weight_b * (-betak);
  lc.coeff_sup = lc.weight_c * (-n) + lc.weight_a + lc.weight_b;
  const Rational in(1, n);
  lc.coeff_sup_closed = (n * lambda - n + k - 1) * (in - beta1) + r * (in - betak);
  return lc;
}

std::optional<Rational> epsilon_margin(int n, int k, const Rational& alphak) {
  check_dims(n, k);
  if (alphak <= 0) throw InvalidArgument("alphak must be positive");
  const Rational crit(n, n + 1);
  if (alphak < crit) return std::nullopt;
  if (alphak == crit) return Rational(0);
  return crit - Rational(k - 1) / (Rational(n + 1) - Rational(n - k + 1) / alphak);
}

}  // namespace kahlerlab::criterion
