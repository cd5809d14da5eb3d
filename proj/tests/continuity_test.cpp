#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/continuity/continuity.hpp"
#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/library.hpp"

using namespace kahlerlab;
using namespace kahlerlab::continuity;
using toric::library_potential;

namespace {

PotentialPtr scaled(int n, const std::string& name, double eps) {
  return std::make_shared<toric::AffinePotential>(library_potential(n, name), eps, 0.0);
}

Point cp1_point(double x) {
  const double lp[2] = {std::log1p(-x / 2.0), std::log(x / 2.0)};
  return toric::point_from_barycentric_logs(1, lp);
}

// Regression value of sup φ_{1/2} on CP^1 with reference perturbation bump_gauss, frozen
// after degree 20, 40 and 80 solves agreed to 1e-12.
constexpr double kSupPhiHalf = 0.086854856990;

}  // namespace

TEST(RicciPotential, FubiniStudyIsZero) {
  for (int n : {1, 2}) {
    const ToricFanoModel model(n);
    const auto d = ricci_potential(model);
    EXPECT_LT(d.sup_abs(), 1e-13);
    EXPECT_LT(d.normalization_residual(), 1e-12);
  }
}

TEST(RicciPotential, NormalizedAndSolvesRicciIdentity) {
  for (int n : {1, 2})
    for (const auto& name : {"lse_tilt", "lse_quadratic", "bump_gauss"}) {
      const ToricFanoModel model(n, library_potential(n, name));
      const auto d = ricci_potential(model);
      EXPECT_LT(d.normalization_residual(), 1e-10) << name;
      EXPECT_LT(ricci_identity_residual(d), 1e-5) << name;
    }
}

TEST(RicciPotential, LinearInSmallPerturbation) {
  const auto big = ricci_potential(ToricFanoModel(1, scaled(1, "bump_gauss", 0.02)));
  const auto small = ricci_potential(ToricFanoModel(1, scaled(1, "bump_gauss", 0.01)));
  EXPECT_NEAR(small.sup_abs() / big.sup_abs(), 0.5, 0.1);
}

TEST(SimplexBasis, LogJetMatchesFiniteDifferences) {
  auto basis = std::make_shared<SimplexBasis>(2, 6);
  Eigen::VectorXd c(basis->size());
  for (int i = 0; i < c.size(); ++i) c(i) = std::sin(1.0 + i) / (1.0 + i);
  const SimplexPolynomialPotential psi(basis, c, "psi");
  const double t[2] = {0.3, -0.7};
  const auto j = psi.jet(toric::point_from_log_coordinates(2, t));
  const double h = 1e-4;
  for (int i = 0; i < 2; ++i) {
    double tp[2] = {t[0], t[1]}, tm[2] = {t[0], t[1]};
    tp[i] += h;
    tm[i] -= h;
    const auto jp = psi.jet(toric::point_from_log_coordinates(2, tp));
    const auto jm = psi.jet(toric::point_from_log_coordinates(2, tm));
    EXPECT_NEAR((jp.value - jm.value) / (2 * h), j.grad(i), 1e-7);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR((jp.grad(k) - jm.grad(k)) / (2 * h), j.hess(k, i), 1e-7);
  }
}

TEST(SolveMA, TrivialPathVanishes) {
  for (int n : {1, 2}) {
    const auto d = ricci_potential(ToricFanoModel(n));
    PathOptions po;
    po.dt = n == 1 ? 0.01 : 0.1;
    po.m = 2;
    const auto path = run_path(d, po);
    ASSERT_TRUE(path.complete) << path.failure;
    const bergman::SectionBasis basis(n, 2);
    const double rho = basis.size() / d.volume();
    for (const auto& s : path.states) {
      const auto sp = functionals::sample(d.model(), *s.solution.phi);
      EXPECT_LE(std::max(std::abs(sp.sup()), std::abs(sp.inf())), 1e-10);
      EXPECT_LE(std::abs(s.I) + std::abs(s.J) + std::abs(s.mean_self), 1e-10);
      EXPECT_NEAR(s.min_rho, rho, 1e-10 * rho);
    }
    const auto id = verify_path_identity(path.states);
    for (const auto& p : id) EXPECT_LE(std::abs(p.lhs) + std::abs(p.rhs), 1e-10);
  }
}

TEST(SolveMA, LinearizedOracleAtTimeZero) {
  // At t = 0 and to first order, Δ_ω φ_0 = f̃ (f minus its mean). On CP^1 with x = F'(t) ∈ (0, 2)
  // this integrates to φ_0'(t) = G(x) := ∫_0^x f̃ dx', independent of the solver. The error
  // should be quadratic in the perturbation size.
  std::vector<double> errs;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto d = ricci_potential(ToricFanoModel(1, scaled(1, "bump_gauss", eps)));
    const Discretization disc(d, {});
    const auto sol = solve_ma(disc, 0.0);
    auto f = [&](double x) { return d.value(cp1_point(x)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double mean = GK::integrate(f, 0.0, 2.0, 10, 1e-14) / 2.0;
    double worst = 0.0;
    for (double x : {0.1, 0.4, 0.7, 1.0, 1.3, 1.6, 1.9}) {
      const double g = GK::integrate([&](double y) { return f(y) - mean; }, 0.0, x, 10, 1e-14);
      worst = std::max(worst, std::abs(sol.phi->jet(cp1_point(x)).grad(0) - g));
    }
    errs.push_back(worst);
  }
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.8);
  EXPECT_NEAR(errs[1] / errs[2], 4.0, 0.8);
}

TEST(SolveMA, ResidualAndNormalization) {
  const auto d = ricci_potential(ToricFanoModel(1, library_potential(1, "bump_gauss")));
  const Discretization disc(d, {});
  const auto s0 = solve_ma(disc, 0.0);
  EXPECT_LE(s0.residual, 1e-10);
  EXPECT_LT(std::abs(s0.compatibility), 1e-10);
  const auto st0 = make_state(d, s0, 0, 0);
  // ∮φ_0 e^f ω^n = 0 ⇔ ⨍φ_0 ω_{φ_0}^n = 0.
  EXPECT_LT(std::abs(st0.mean_self), 1e-10);
  const auto s = solve_ma(disc, 0.5, &s0);
  const auto st = make_state(d, s, 0, 0);
  EXPECT_LE(st.newton_residual, 1e-10);
  EXPECT_LT(st.normalization_residual, 1e-8);
  EXPECT_LT(st.pointwise_residual, 1e-10);
}

TEST(SolveMA, RegressionAndMeshRefinement) {
  const auto d = ricci_potential(ToricFanoModel(1, library_potential(1, "bump_gauss")));
  std::vector<ContinuityState> at_half;
  for (int degree : {40, 80}) {
    SolverOptions so;
    so.degree = degree;
    const Discretization disc(d, so);
    at_half.push_back(make_state(d, solve_ma(disc, 0.5), 1, 0));
  }
  EXPECT_NEAR(at_half[0].sup_phi, kSupPhiHalf, 1e-9);
  EXPECT_NEAR(at_half[1].sup_phi, at_half[0].sup_phi, 1e-5 * std::abs(at_half[0].sup_phi));
  EXPECT_NEAR(at_half[1].I, at_half[0].I, 1e-5 * at_half[0].I);
  EXPECT_NEAR(at_half[1].J, at_half[0].J, 1e-5 * at_half[0].J);
  EXPECT_NEAR(at_half[1].mean_self, at_half[0].mean_self, 1e-5 * std::abs(at_half[0].mean_self));
  // Quadrature doubling on the same solution.
  SolverOptions so;
  const Discretization disc(d, so);
  const auto sol = solve_ma(disc, 0.5);
  const auto fine = make_state(d, sol, 1, 1);
  EXPECT_NEAR(fine.sup_phi, at_half[0].sup_phi, 1e-5 * std::abs(fine.sup_phi));
  EXPECT_NEAR(fine.I, at_half[0].I, 1e-5 * fine.I);
}

TEST(SolveMA, WarmStartMatchesDirectSolve) {
  const auto d = ricci_potential(ToricFanoModel(1, library_potential(1, "lse_aniso")));
  PathOptions po;
  po.dt = 0.1;
  po.delta = 0.3;
  const auto path = run_path(d, po);
  ASSERT_TRUE(path.complete);
  const Discretization disc(d, {});
  const auto direct = make_state(d, solve_ma(disc, path.states.back().t), 0, 0);
  EXPECT_NEAR(direct.sup_phi, path.states.back().sup_phi, 1e-8);
  EXPECT_NEAR(direct.I, path.states.back().I, 1e-8);
}

TEST(RunPath, PerturbedCP1Path) {
  const auto d = ricci_potential(ToricFanoModel(1, library_potential(1, "bump_gauss")));
  PathOptions po;
  po.dt = 0.01;
  const auto path = run_path(d, po);
  ASSERT_TRUE(path.complete) << path.failure;
  EXPECT_NEAR(path.states.back().t, 0.95, 1e-12);
  double rho_lo = 1e300;
  for (const auto& s : path.states) {
    EXPECT_LE(s.newton_residual, 1e-10);
    EXPECT_LE(s.pointwise_residual, 1e-10);
    EXPECT_LE(s.normalization_residual, 1e-8);
    EXPECT_GE(s.I - s.J, 0.0);
    EXPECT_GT(s.min_rho, 0.0);
    rho_lo = std::min(rho_lo, s.min_rho);
  }
  EXPECT_GT(rho_lo, 0.0);
  const auto id = verify_path_identity(path.states);
  double worst = 0.0;
  for (const auto& p : id) worst = std::max(worst, p.residual);
  EXPECT_LE(worst, 1e-3);

  PathOptions half = po;
  half.dt = 0.005;
  const auto fine = run_path(d, half);
  ASSERT_TRUE(fine.complete);
  double worst_fine = 0.0;
  for (const auto& p : verify_path_identity(fine.states)) worst_fine = std::max(worst_fine, p.residual);
  EXPECT_GE(worst / worst_fine, 3.0);

  // min ρ under quadrature doubling.
  PathOptions dense = po;
  dense.dt = 0.05;
  dense.quadrature_level = 1;
  const auto refined = run_path(d, dense);
  ASSERT_TRUE(refined.complete);
  for (const auto& s : refined.states) {
    const auto it = std::find_if(path.states.begin(), path.states.end(),
                                 [&](const ContinuityState& c) { return std::abs(c.t - s.t) < 1e-9; });
    ASSERT_NE(it, path.states.end());
    EXPECT_NEAR(s.min_rho, it->min_rho, 0.05 * it->min_rho);
  }
}

TEST(RunPath, AprioriEstimatesOnCP2) {
  const auto d = ricci_potential(ToricFanoModel(2, library_potential(2, "bump_gauss")));
  PathOptions po;
  po.dt = 0.05;
  po.m = 0;
  const auto path = run_path(d, po);
  ASSERT_TRUE(path.complete) << path.failure;
  const auto prof = verify_apriori_estimates(d, path.states, 2, 0.5, 0.8, 1.1, po.delta);
  EXPECT_GE(prof.min_corollary_slack, -1e-6);
  EXPECT_GE(prof.min_jensen_slack, -1e-12);
  EXPECT_TRUE(std::isfinite(prof.max_bound_k));
  EXPECT_TRUE(std::isfinite(prof.max_bound_1));
  for (const auto& s : path.states) {
    EXPECT_GE(s.I - s.J, 0.0);
    EXPECT_LE(s.pointwise_residual, 1e-8);
  }
}

TEST(RunPath, TrivialProfilesVanish) {
  const auto d = ricci_potential(ToricFanoModel(2));
  PathOptions po;
  po.dt = 0.25;
  po.m = 0;
  const auto path = run_path(d, po);
  ASSERT_TRUE(path.complete);
  const auto prof = verify_apriori_estimates(d, path.states, 2, 0.5, 0.8, 1.1);
  for (const auto& p : prof.points) {
    EXPECT_NEAR(p.corollary_slack, 0.0, 1e-10);
    EXPECT_NEAR(p.bound_k, 0.0, 1e-10);
    EXPECT_NEAR(p.jensen_slack_k, 0.0, 1e-10);
  }
}

TEST(RunPath, RejectsBadGrids) {
  const auto d = ricci_potential(ToricFanoModel(1));
  PathOptions po;
  po.t_grid = {0.1, 0.2};
  EXPECT_THROW(run_path(d, po), InvalidArgument);
  po.t_grid = {0.0, 0.5, 0.4};
  EXPECT_THROW(run_path(d, po), InvalidArgument);
  po.t_grid = {0.0, 1.0};
  EXPECT_THROW(run_path(d, po), InvalidArgument);
  const auto d3 = ricci_potential(ToricFanoModel(3));
  EXPECT_THROW(Discretization(d3, {}), InvalidArgument);
}

TEST(RunPath, EdgeNotEarlierOnFinerMesh) {
  const auto d = ricci_potential(ToricFanoModel(1, library_potential(1, "lse_aniso")));
  PathOptions po;
  po.dt = 0.05;
  po.delta = 0.001;
  po.m = 0;
  po.solver.degree = 20;
  const auto coarse = run_path(d, po);
  po.solver.degree = 40;
  const auto fine = run_path(d, po);
  EXPECT_GE(fine.last_good_t, coarse.last_good_t - po.dt);
  EXPECT_EQ(fine.complete, fine.failure.empty());
}
