#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "kahlerlab/toric/model.hpp"
#include "kahlerlab/toric/potential.hpp"

namespace kahlerlab::bergman {

using toric::InvariantPotential;
using toric::Point;
using toric::PotentialPtr;
using toric::ToricFanoModel;
using Exponent = std::array<int, 3>;

/// dim H⁰(CP^n, K^{-m}) = C(m(n+1)+n, n).
std::size_t section_count(int n, int m);

/// Monomial basis z^J, |J| ≤ m(n+1), of H⁰(CP^n, K^{-m}) = H⁰(O(m(n+1))).
class SectionBasis {
 public:
  SectionBasis(int n, int m);

  int dim() const { return n_; }
  int power() const { return m_; }
  int degree() const { return m_ * (n_ + 1); }
  std::size_t size() const { return exponents_.size(); }
  const std::vector<Exponent>& exponents() const { return exponents_; }
  /// Throws InvalidArgument if J is not a monomial of this basis.
  std::size_t index_of(const Exponent& j) const;
  /// log|z^J|² for the Fubini-Study metric on O(d): Σ J_i log p_i + (d - |J|) log p_0.
  double log_norm_fs(std::size_t j, const Point& p) const;
  std::string label(std::size_t j) const;

 private:
  int n_, m_;
  std::vector<Exponent> exponents_;
};

/// Diagonal Gram matrix of the raw monomials (distinct monomials are orthogonal for
/// torus-invariant data), stored as logarithms.
struct MonomialGram {
  std::vector<double> log_entries;
  double condition() const;
};

/// ‖z^J‖² = ∫ |z^J|²_{h^m} e^{-mφ} ω_φ^n with h = h_FS e^{-χ}; phi may be null (φ = 0).
/// Accumulated in log-space. Throws IllConditioned past 1e12.
MonomialGram monomial_section_norms(const ToricFanoModel& model, const SectionBasis& basis,
                                    const InvariantPotential* phi = nullptr, int level = 0);

/// Closed form for the Fubini-Study model: (2π)^n n! (n+1)^n J! J_0! / (d+n)!.
MonomialGram fubini_study_gram(const SectionBasis& basis);

/// A k-dimensional subspace of H⁰ given by an N×k coefficient matrix in the monomial basis.
class SectionSubspace {
 public:
  SectionSubspace(const SectionBasis& basis, Eigen::MatrixXcd coefficients, std::string label = "");
  static SectionSubspace monomials(const SectionBasis& basis, std::vector<std::size_t> indices);
  static SectionSubspace full(const SectionBasis& basis);

  int dim() const { return static_cast<int>(coefficients_.cols()); }
  const Eigen::MatrixXcd& coefficients() const { return coefficients_; }
  bool is_monomial() const { return !monomial_indices_.empty(); }
  const std::vector<std::size_t>& monomial_indices() const { return monomial_indices_; }
  const std::string& label() const { return label_; }

 private:
  Eigen::MatrixXcd coefficients_;
  std::vector<std::size_t> monomial_indices_;
  std::string label_;
};

/// ρ_{ω,m,V} = Σ |s̃_i|²_{h^m} over a basis of V orthonormalised (Cholesky) against a Gram.
/// Monomial subspaces give torus-invariant kernels; others depend on the angles θ.
class BergmanKernel {
 public:
  BergmanKernel(const ToricFanoModel& model, const SectionBasis& basis, const SectionSubspace& subspace,
                const MonomialGram& gram);

  bool invariant() const { return invariant_; }
  int dim() const { return k_; }
  /// log ρ at p; θ (size n) is required for non-invariant kernels.
  double log_value(const Point& p, std::span<const double> theta = {}) const;
  double value(const Point& p, std::span<const double> theta = {}) const;
  /// Monomials carrying V, in the order used by `log_values`.
  const std::vector<Exponent>& exponents() const { return exponents_; }
  /// log ρ at p for many angle tuples at once: phases[a·R + r] = e^{i⟨J_r, θ_a⟩} with
  /// R = exponents().size(); one output per angle tuple.
  void log_values(const Point& p, std::span<const std::complex<double>> phases, std::span<double> out) const;
  /// (1/m) log ρ as a potential with respect to ω (invariant kernels only).
  PotentialPtr potential() const;

 private:
  int n_, m_, k_;
  bool invariant_;
  PotentialPtr chi_;
  std::vector<Exponent> exponents_;  // monomials carrying nonzero coefficients
  std::vector<double> log_weights_;  // invariant case: log(1/G_J)
  Eigen::MatrixXcd orthonormal_;     // general case: rows = exponents_, columns = basis of V
};

BergmanKernel bergman_kernel(const ToricFanoModel& model, const SectionBasis& basis,
                             const SectionSubspace& subspace, const MonomialGram& gram);

/// ∮ρ ω^n. Non-invariant kernels are averaged over an angular trapezoid grid of `angles` points
/// per axis (exact for the trigonometric polynomial ρ once angles exceeds the largest exponent);
/// 0 selects that minimum.
double kernel_mass(const ToricFanoModel& model, const BergmanKernel& kernel, int angles = 0, int level = 0);

/// A Hermitian positive-definite form on H⁰ written in the reference-orthonormal monomial
/// basis, with μ_1 ≥ ... ≥ μ_N the inverse eigenvalues (so μ_j^{1/2} s_j is a-orthonormal).
class InnerProductMatrix {
 public:
  explicit InnerProductMatrix(Eigen::MatrixXcd a);
  static InnerProductMatrix diagonal(const std::vector<double>& entries);
  static InnerProductMatrix reference(std::size_t n);

  const Eigen::MatrixXcd& matrix() const { return a_; }
  const std::vector<double>& mu() const { return mu_; }
  bool is_diagonal(double tol = 1e-12) const;
  /// max |U diag(1/μ) U^H - a|, i.e. how well the simultaneous diagonalisation reproduces a.
  double reconstruction_error() const { return reconstruction_error_; }

 private:
  Eigen::MatrixXcd a_;
  std::vector<double> mu_;
  double reconstruction_error_ = 0.0;
};

struct BergmanPotential {
  PotentialPtr psi_over_m;  ///< ψ_a / m relative to ω (ψ_a is relative to mω)
  std::vector<double> mu;   ///< sorted descending; may over- or underflow far along a ray
  std::vector<double> log_mu;  ///< log μ_j, sorted descending
  int power = 1;
  std::vector<Exponent> exponents;
  std::vector<double> log_coefficients;  ///< F + χ + ψ_a/m = (1/m) log Σ_J e^{c_J + <J,t>}
  double log_mu_ratio(int k) const;  ///< log(μ_1/μ_k)
};

/// ψ_a = log Σ μ_j |s_j|²_{h^m} for diagonal a. Throws InvalidArgument for non-diagonal a and
/// NotKahler if ω + i∂∂̄ψ_a/m fails at a quadrature node.
BergmanPotential bergman_potential(const ToricFanoModel& model, const SectionBasis& basis,
                                   const InnerProductMatrix& a);
/// Same for a = diag(e^{log_entries}), built without exponentiating the entries. ω_a is the
/// pullback of a Fubini-Study metric, so no positivity check is made.
BergmanPotential bergman_potential_log(const ToricFanoModel& model, const SectionBasis& basis,
                                       const std::vector<double>& log_entries);

/// I(ψ_a) measured against mω, i.e. m·I_ω(ψ_a/m). The density of ω_ψ is taken from the
/// covariance form of the log-sum-exp, so it stays accurate where ω_ψ ≪ ω. Throws
/// QuadratureError if the node set misses part of the ω_ψ mass.
double bergman_I(const ToricFanoModel& model, const BergmanPotential& psi, int m, int level = 0);

struct ApproximationResult {
  int m = 1;
  std::vector<double> lambda;  ///< λ_1 = 1 ≥ λ_2 ≥ ...
  std::vector<std::size_t> order;  ///< monomial index of each λ_j
  PotentialPtr psi;            ///< (1/m) log Σ λ_j |s_j|²_{h^m}
  double gap = 0.0;            ///< sup |φ - sup φ - ψ| over quadrature nodes
  double condition = 0.0;      ///< of the weighted Gram against the reference
};

/// Builds the weighted product ∫⟨·,·⟩_{h^m} e^{-mφ} ω_φ^n, diagonalises it against the
/// reference, normalises λ_1 = 1 and measures the sup gap. Throws IllConditioned past 1e12.
ApproximationResult bergman_approximation(const ToricFanoModel& model, int m, const InvariantPotential& phi,
                                          int level = 0);

struct ProbeSample {
  std::size_t ray = 0;
  double s = 0.0;
  double log_ratio = 0.0;
  double I = 0.0;
};

struct ProbeResult {
  int m = 1, k = 2;
  std::vector<ProbeSample> samples;
  std::vector<double> ray_slopes;  ///< tail slope d log-ratio / dI per ray (NaN if I is flat)
  double fitted_lambda = 0.0;      ///< max tail slope
  double fitted_c = 0.0;           ///< max(log-ratio - Λ·I) over samples
  std::vector<std::size_t> violations;  ///< samples violating a supplied (Λ, C)
};

/// Sweeps geodesic rays a(s) = diag(e^{s σ}) over the s grid. `sigmas` are per-ray exponent
/// vectors (size N). If `test_lambda` is finite, samples with log-ratio > Λ I + C are listed.
ProbeResult eigenvalue_control_probe(const ToricFanoModel& model, int m, int k,
                                     const std::vector<std::vector<double>>& sigmas,
                                     const std::vector<double>& s_grid, double test_lambda = NAN,
                                     double test_c = NAN, int level = 0);

/// Rays σ = -e_J (one monomial boosted) for every J, plus `random` seeded Gaussian rays.
std::vector<std::vector<double>> default_probe_rays(const SectionBasis& basis, int random, unsigned seed);

}  // namespace kahlerlab::bergman
