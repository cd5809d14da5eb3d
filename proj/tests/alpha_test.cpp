#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kahlerlab/alpha/alpha.hpp"
#include "kahlerlab/toric/library.hpp"

using namespace kahlerlab::alpha;
using kahlerlab::bergman::Exponent;
using kahlerlab::toric::library_potential;

namespace {

SectionSubspace mono(const SectionBasis& b, std::vector<Exponent> js) {
  std::vector<std::size_t> idx;
  for (const auto& j : js) idx.push_back(b.index_of(j));
  return SectionSubspace::monomials(b, idx);
}

}  // namespace

// Oracles. On CP^1 with m = 1 the sections are z^0, z^1, z^2 of O(2). Near z = 0 one has
// ρ ~ |z|^{2c} for the lowest vanishing order c of V there, and ω^n is a smooth area form,
// so ∫ρ^{-α}ω converges iff 2cα < 2, i.e. α < 1/c. span{z^2}: c = 2 at z = 0 → 1/2.
// span{z}: simple zeros at 0 and ∞ → 1. span{1, z}: simple zero at ∞ only → 1.
// On CP^2, span{z_1^3} vanishes to order 3 along the line z_1 = 0; the transverse integrand
// is |w|^{-6α} → 1/3. Any 1-dimensional monomial subspace z^J of O(3) has threshold
// 1/max(J_0, J_1, J_2) ≥ 1/3, so α_{1,1}(CP^2) over monomials is 1/3 (attained by the cubes).

TEST(IntegralVsAlpha, BasePointFreeIsStable) {
  ToricFanoModel cp1(1);
  const SectionBasis b(1, 1);
  const auto full = SectionSubspace::full(b);
  for (double a : {0.5, 1.5, 3.0}) {
    const double v30 = integral_vs_alpha(cp1, 1, full, a, 30), v50 = integral_vs_alpha(cp1, 1, full, a, 50);
    EXPECT_TRUE(std::isfinite(v50));
    EXPECT_NEAR(v30 / v50, 1.0, 1e-8);
  }
}

TEST(IntegralVsAlpha, SquareMonomialConvergentAndDivergentSides) {
  ToricFanoModel cp1(1);
  const SectionBasis b(1, 1);
  const auto v = mono(b, {{2, 0, 0}});
  const double c20 = integral_vs_alpha(cp1, 1, v, 0.25, 20), c40 = integral_vs_alpha(cp1, 1, v, 0.25, 40),
               c50 = integral_vs_alpha(cp1, 1, v, 0.25, 50);
  EXPECT_NEAR(c40 / c50, 1.0, 1e-6);
  EXPECT_NEAR(c20 / c50, 1.0, 1e-3);
  double prev = 0.0;
  for (int level : {10, 20, 30, 40, 50}) {
    const double d = integral_vs_alpha(cp1, 1, v, 0.6, level);
    if (prev > 0.0) EXPECT_GT(d / prev, 3.0);  // shells grow like 2^{0.2 L}
    prev = d;
  }
}

TEST(LctThreshold, CP1Monomials) {
  ToricFanoModel cp1(1);
  const SectionBasis b(1, 1);
  const Threshold sq = lct_threshold(cp1, 1, mono(b, {{2, 0, 0}}));
  EXPECT_EQ(sq.status, ThresholdStatus::kResolved);
  EXPECT_NEAR(sq.value, 0.5, 0.02);
  EXPECT_LE(sq.hi - sq.lo, 0.02 + 1e-12);
  EXPECT_LE(sq.lo, 0.5);
  EXPECT_GE(sq.hi, 0.5);
  const Threshold lin = lct_threshold(cp1, 1, mono(b, {{1, 0, 0}}));
  EXPECT_NEAR(lin.value, 1.0, 0.02);
  const Threshold full = lct_threshold(cp1, 1, SectionSubspace::full(b));
  EXPECT_EQ(full.status, ThresholdStatus::kAboveMax);
  EXPECT_TRUE(std::isinf(full.value));
}

TEST(LctThreshold, HigherPowerAndCorners) {
  // m = 2 on CP^1: span{z^4} → ρ^{-α/2} ~ |z|^{-4α} → 1/2. CP^2: z_0 z_1 z_2 has simple
  // zeros on three lines meeting in corners → 1.
  ToricFanoModel cp1(1), cp2(2);
  EXPECT_NEAR(lct_threshold(cp1, 2, mono(SectionBasis(1, 2), {{4, 0, 0}})).value, 0.5, 0.02);
  EXPECT_NEAR(lct_threshold(cp2, 1, mono(SectionBasis(2, 1), {{1, 1, 0}})).value, 1.0, 0.03);
}

TEST(LctThreshold, BasisInvariance) {
  ToricFanoModel cp1(1);
  const SectionBasis b(1, 1);
  // span{z, z^2} written in a rotated, rescaled basis is recognised as the same subspace.
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(3, 2);
  c(1, 0) = 2.0;
  c(2, 0) = std::complex<double>(0.0, 1.0);
  c(1, 1) = -0.5;
  c(2, 1) = 3.0;
  const SectionSubspace rotated(b, c);
  EXPECT_TRUE(rotated.is_monomial());
  EXPECT_NEAR(lct_threshold(cp1, 1, rotated).value, lct_threshold(cp1, 1, mono(b, {{1, 0, 0}, {2, 0, 0}})).value,
              1e-12);
  // A generic 2-dimensional subspace (no common zeros) through the angle-dependent path.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd r(3, 2);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) r(i, j) = {g(rng), g(rng)};
  Eigen::MatrixXcd mix(2, 2);
  mix << 0.3, std::complex<double>(1.0, -2.0), 4.0, 0.5;
  const Threshold t1 = lct_threshold(cp1, 1, SectionSubspace(b, r));
  const Threshold t2 = lct_threshold(cp1, 1, SectionSubspace(b, r * mix));
  EXPECT_EQ(t1.status, t2.status);
  EXPECT_TRUE(t1.certified);
  EXPECT_TRUE(t2.certified);
  EXPECT_TRUE(std::isinf(t1.value));
}

TEST(AlphaEstimate, GoldenValuesCP1) {
  ToricFanoModel cp1(1);
  const AlphaEstimate a1 = alpha_mk_estimate(cp1, 1, 1);
  EXPECT_NEAR(a1.estimate, 0.5, 0.02);
  EXPECT_EQ(a1.bound, "upper");
  EXPECT_FALSE(a1.partial);
  EXPECT_EQ(a1.monomial_total, 3u);
  EXPECT_EQ(a1.monomial_orbits, 2u);  // {1, z^2} and {z}
  const AlphaEstimate a2 = alpha_mk_estimate(cp1, 1, 2);
  EXPECT_NEAR(a2.estimate, 1.0, 0.05);
  const AlphaEstimate a3 = alpha_mk_estimate(cp1, 1, 3);
  EXPECT_TRUE(std::isinf(a3.estimate));
  // Monotone in k.
  EXPECT_GE(a2.estimate, a1.estimate - 0.02);
  EXPECT_GE(a3.estimate, a2.estimate - 0.02);
}

TEST(AlphaEstimate, GoldenValueCP2) {
  ToricFanoModel cp2(2);
  SearchBudget budget;
  budget.probes = 1;
  const AlphaEstimate a = alpha_mk_estimate(cp2, 1, 1, budget);
  EXPECT_NEAR(a.estimate, 1.0 / 3.0, 0.02);
  EXPECT_EQ(a.monomial_total, 10u);
  EXPECT_EQ(a.monomial_orbits, 3u);  // cubes, z_i^2 z_j, z_0 z_1 z_2
  for (const auto& t : a.monomial) EXPECT_GE(t.value, a.estimate);
  const AlphaEstimate b = alpha_mk_estimate(cp2, 1, 2, budget);
  EXPECT_GE(b.estimate, a.estimate - 0.02);
}

TEST(AlphaEstimate, IndependentOfReferenceInClass) {
  ToricFanoModel perturbed(1, library_potential(1, "lse_tilt"));
  const AlphaEstimate a = alpha_mk_estimate(perturbed, 1, 1, {100, 0, 1});
  EXPECT_NEAR(a.estimate, 0.5, 0.02);
  EXPECT_EQ(a.monomial_orbits, 3u);  // no symmetry reduction off the Fubini-Study reference
}

TEST(AlphaEstimate, BudgetExhaustionIsPartial) {
  ToricFanoModel cp2(2);
  const AlphaEstimate a = alpha_mk_estimate(cp2, 1, 1, {1, 0, 1});
  EXPECT_TRUE(a.partial);
  EXPECT_EQ(a.monomial.size(), 1u);
}
