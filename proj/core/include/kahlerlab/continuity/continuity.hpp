#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/model.hpp"

namespace kahlerlab::continuity {

using toric::InvariantPotential;
using toric::Point;
using toric::PotentialPtr;
using toric::ToricFanoModel;

/// Tensor Legendre polynomials L_a(2p_1 − 1)·L_b(2p_2 − 1) of total degree ≤ N in the
/// barycentric coordinates p_1..p_n (n = 1 or 2). Smooth torus-invariant functions on CP^n
/// are smooth functions of p on the closed simplex, so this basis needs no boundary conditions.
class SimplexBasis {
 public:
  SimplexBasis(int n, int degree);
  int dim() const { return n_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(index_.size()); }
  /// Values, p-gradients and p-Hessians of every basis function at p (p_1..p_n).
  /// Hessians are stored as the upper triangle: (11) for n = 1, (11, 12, 22) for n = 2.
  void evaluate(const Vec& p, Eigen::Ref<Eigen::VectorXd> value, Eigen::Ref<Eigen::MatrixXd> grad,
                Eigen::Ref<Eigen::MatrixXd> hess) const;
  /// Index of the constant function.
  int constant_index() const { return 0; }

 private:
  int n_;
  int degree_;
  std::vector<std::array<int, 2>> index_;
};

/// Barycentric coordinates p_1..p_n of a point.
Vec barycentric(const Point& p);

/// Log-coordinate gradient A g and Hessian A H A + B of a function with p-gradient g and
/// p-Hessian H, where A = ∂p/∂t = diag(p) − p pᵀ.
void p_to_log_jet(const Point& pt, const Vec& g, const Mat& h, Vec& grad_t, Mat& hess_t);

/// ψ = Σ c_b L_b(p), a potential relative to Fubini-Study.
class SimplexPolynomialPotential final : public InvariantPotential {
 public:
  SimplexPolynomialPotential(std::shared_ptr<const SimplexBasis> basis, Eigen::VectorXd coefficients,
                             std::string label);
  toric::Jet jet(const Point& p) const override;
  std::string label() const override { return label_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const SimplexBasis& basis() const { return *basis_; }

 private:
  std::shared_ptr<const SimplexBasis> basis_;
  Eigen::VectorXd coefficients_;
  std::string label_;
};

/// f with i∂∂̄f = Ric(ω) − ω and ∮e^f ω^n = V, for ω = ω_FS + i∂∂̄χ:
/// f = −log[det D²(F+χ)/det D²F] − χ + c.
class RicciPotentialData {
 public:
  double value(const Point& p) const;
  const ToricFanoModel& model() const { return model_; }
  double constant() const { return constant_; }
  double volume() const { return volume_; }
  /// |∮e^f ω^n − V| / V on the rule used to fix c.
  double normalization_residual() const { return normalization_residual_; }
  double sup_abs(int level = 0) const;

 private:
  friend RicciPotentialData ricci_potential(const ToricFanoModel& model, int level);
  explicit RicciPotentialData(const ToricFanoModel& model) : model_(model) {}
  ToricFanoModel model_;
  double constant_ = 0.0;
  double volume_ = 0.0;
  double normalization_residual_ = 0.0;
};

/// Throws NotKahler if the reference is not Kähler at a quadrature node.
RicciPotentialData ricci_potential(const ToricFanoModel& model, int level = 1);

/// max over interior sample points of |D²_t f + D²_t log det D²(F+χ) + D²(F+χ)|, all second
/// derivatives by central differences with step h.
double ricci_identity_residual(const RicciPotentialData& data, double h = 1e-3);

struct SolverOptions {
  int degree = 0;            ///< polynomial degree; 0 selects 40 for n = 1 and 30 for n = 2
  double tolerance = 1e-10;  ///< max relative Monge-Ampère residual at the collocation nodes
  int max_iterations = 40;
};

/// φ_t solving det D²(F+χ+φ) = e^{f−tφ} det D²(F+χ), carried as ψ = χ + φ.
struct MASolution {
  double t = 0.0;
  std::shared_ptr<const SimplexPolynomialPotential> psi;
  PotentialPtr phi;        ///< ψ − χ, relative to the reference
  double residual = 0.0;   ///< max |det ratio / e^{f−tφ} − 1| over the collocation nodes
  double compatibility = 0.0;  ///< t = 0 only: constant κ absorbed by the discrete solvability condition
  int iterations = 0;
};

/// Collocation nodes of a solve: collapsed Gauss points with weights in moment coordinates.
class Discretization {
 public:
  Discretization(const RicciPotentialData& data, const SolverOptions& options);
  const SimplexBasis& basis() const { return *basis_; }
  std::shared_ptr<const SimplexBasis> basis_ptr() const { return basis_; }
  int nodes() const { return static_cast<int>(points_.size()); }
  const RicciPotentialData& data() const { return *data_; }
  const SolverOptions& options() const { return options_; }

 private:
  friend MASolution solve_ma(const Discretization&, double, const MASolution*);
  const RicciPotentialData* data_;
  SolverOptions options_;
  std::shared_ptr<const SimplexBasis> basis_;
  std::vector<Point> points_;
  std::vector<Vec> p_;
  std::vector<double> weight_;  ///< moment-coordinate weight times e^{−χ}, for the t = 0 normalisation
  std::vector<double> chi_;
  Eigen::MatrixXd value_;
  std::vector<Eigen::MatrixXd> grad_;  ///< per axis
  std::vector<Eigen::MatrixXd> hess_;  ///< per upper-triangle entry
};

/// Newton (n = 1, square collocation) or Gauss-Newton (n = 2, least squares) from `guess`
/// (ψ = 0 when null). At t = 0 the constant of ψ is fixed by ∮φ e^f ω^n = 0.
/// Throws NotKahler when a step cannot be kept inside the Kähler cone and Error on divergence.
MASolution solve_ma(const Discretization& disc, double t, const MASolution* guess = nullptr);

struct ContinuityState {
  double t = 0.0;
  MASolution solution;
  double newton_residual = 0.0;
  double sup_phi = 0.0;
  double mean_self = 0.0;      ///< ⨍ φ ω_φ^n
  double mean_reference = 0.0; ///< ⨍ φ ω^n
  std::vector<double> Ik;      ///< I_k for k = 2..n+1
  double I = 0.0;
  double J = 0.0;
  double min_rho = 0.0;              ///< min over nodes of ρ_{ω_φ, m} for the full section space
  double integral_I_minus_J = 0.0;   ///< ∫_0^t [I − J] ds by the trapezoid rule
  double normalization_residual = 0.0;  ///< |∮e^{tφ}ω_φ^n − V| / V
  double pointwise_residual = 0.0;      ///< max |e^{tφ}ω_φ^n / e^f ω^n − 1| over quadrature nodes
  double Ik_at(int k) const { return Ik.at(k - 2); }
};

struct PathOptions {
  double dt = 0.01;
  double delta = 0.05;
  int m = 1;               ///< Bergman power for min ρ; 0 skips it
  int quadrature_level = 0;
  int max_halvings = 6;    ///< step halvings allowed after a failed continuation step
  SolverOptions solver;
  std::vector<double> t_grid;  ///< overrides dt/delta when non-empty (must start at 0)
};

struct PathResult {
  std::vector<ContinuityState> states;
  bool complete = false;
  double last_good_t = 0.0;
  std::string failure;  ///< empty when complete
};

/// sup φ: the best quadrature node refined by coordinate-wise Brent maximisation in the
/// collapsed simplex coordinates.
double polished_sup(const InvariantPotential& phi, const std::vector<toric::QuadNode>& nodes,
                    const functionals::SampledPotential& sampled);

/// Evaluates every tracked quantity of a solution on the reference quadrature.
ContinuityState make_state(const RicciPotentialData& data, const MASolution& sol, int m, int level);

/// Warm-started continuation over the t grid; each step retried with halved Δt on failure.
PathResult run_path(const RicciPotentialData& data, const PathOptions& options = {});

struct PathIdentityPoint {
  double t = 0.0;
  double lhs = 0.0;  ///< −(1/t)∫_0^t [I − J] ds
  double rhs = 0.0;  ///< J(φ_t) − ⨍φ_t ω^n
  double residual = 0.0;  ///< |lhs − rhs| / max(|lhs|, |rhs|), 0 when both vanish
  double full_interval_residual = 0.0;  ///< same with ∫ over the whole computed path
};

/// Requires ≥ 3 states starting at t = 0; t = 0 itself is skipped.
std::vector<PathIdentityPoint> verify_path_identity(const std::vector<ContinuityState>& states);

struct AprioriPoint {
  double t = 0.0;
  double corollary_slack = 0.0;  ///< n sup φ − [⨍(−φ)ω_φ^n + (n−k+1) I_k]
  double bound_k = 0.0;          ///< sup φ − (1−α_k)/α_k ⨍(−φ)ω_φ^n − Λ I_k
  double bound_1 = 0.0;          ///< sup φ − (1−α_1)/α_1 ⨍(−φ)ω_φ^n
  double jensen_slack_1 = 0.0;   ///< log⨍e^{αt sup φ + (1−α)tφ}ω_φ^n − αt sup φ − (1−α)t⨍φω_φ^n at α = α_1
  double jensen_slack_k = 0.0;   ///< same at α = α_k
};

struct AprioriProfile {
  std::vector<AprioriPoint> points;
  double min_corollary_slack = 0.0;
  double max_bound_k = 0.0;
  double max_bound_1 = 0.0;
  double min_jensen_slack = 0.0;
};

/// Requires 2 ≤ k ≤ n and α_1, α_k > 0; only states with t ≥ t_min enter.
AprioriProfile verify_apriori_estimates(const RicciPotentialData& data, const std::vector<ContinuityState>& states,
                                        int k, double alpha1, double alphak, double lambda, double t_min = 0.0,
                                        int level = 0);

}  // namespace kahlerlab::continuity
