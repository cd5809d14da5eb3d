#include <gtest/gtest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/error.hpp"
#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/library.hpp"
#include "kahlerlab/toric/mixed_det.hpp"

namespace kl = kahlerlab;
using namespace kahlerlab::bergman;
using kahlerlab::Mat;
using kahlerlab::toric::library;
using kahlerlab::toric::library_potential;
using kahlerlab::toric::point_from_log_coordinates;
using kahlerlab::toric::QuadratureSpec;

namespace {

constexpr double kPi = std::numbers::pi;

// ∫ρ ω^n with an angular trapezoid rule (exact for the trigonometric polynomial ρ).
double trapezoid_mass(const ToricFanoModel& model, const BergmanKernel& rho, int angles) {
  const int n = model.dim();
  if (rho.invariant()) return model.integrate_invariant([&](const Point& p) {
      return rho.value(p) * kl::toric::factorial(n) * kl::toric::small_det(model.reference_jet(p).hess);
    });
  const int total = static_cast<int>(std::pow(angles, n));
  double s = 0.0;
  for (int a = 0; a < total; ++a) {
    std::array<double, 3> th{};
    int rem = a;
    for (int i = 0; i < n; ++i) {
      th[i] = 2.0 * kPi * (rem % angles) / angles;
      rem /= angles;
    }
    s += model.integrate_invariant([&](const Point& p) {
      return rho.value(p, std::span<const double>(th.data(), n)) * kl::toric::factorial(n) *
             kl::toric::small_det(model.reference_jet(p).hess);
    });
  }
  return s / total;
}

Eigen::MatrixXcd random_coefficients(std::size_t rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd c(rows, cols);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = {g(rng), g(rng)};
  return c;
}

}  // namespace

TEST(SectionBasis, Counts) {
  EXPECT_EQ(section_count(1, 1), 3u);
  EXPECT_EQ(section_count(1, 4), 9u);
  EXPECT_EQ(section_count(2, 1), 10u);
  EXPECT_EQ(section_count(2, 2), 28u);
  EXPECT_EQ(section_count(3, 1), 35u);
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) EXPECT_EQ(SectionBasis(n, m).size(), section_count(n, m));
}

TEST(Gram, CP1SymmetricAndMatchesOneDimensionalOracle) {
  ToricFanoModel cp1(1);
  const SectionBasis basis(1, 1);
  const MonomialGram g = monomial_section_norms(cp1, basis);
  EXPECT_NEAR(g.log_entries[0], g.log_entries[2], 1e-12);
  boost::math::quadrature::sinh_sinh<double> integrator;
  for (int j = 0; j <= 2; ++j) {
    // 2 e^{(j+1)t} / (1+e^t)^4 = 2 p^{j+1} (1-p)^{3-j} with p = e^t/(1+e^t).
    const double raw = integrator.integrate([j](double t) {
      const double p = t > 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
      const double q = t > 0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
      return 2.0 * std::pow(p, j + 1) * std::pow(q, 3 - j);
    });
    EXPECT_NEAR(std::exp(g.log_entries[j]) / (2.0 * kPi * raw), 1.0, 1e-10) << j;
  }
}

TEST(Gram, MatchesClosedFormAndStaysPositive) {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= (n == 3 ? 1 : 3); ++m) {
      const SectionBasis basis(n, m);
      const MonomialGram q = monomial_section_norms(ToricFanoModel(n), basis);
      const MonomialGram exact = fubini_study_gram(basis);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        EXPECT_NEAR(q.log_entries[j], exact.log_entries[j], 1e-11) << "n=" << n << " m=" << m;
        EXPECT_GT(std::exp(q.log_entries[j]), 0.0);
      }
      const MonomialGram w = monomial_section_norms(ToricFanoModel(n, library_potential(n, "bump_cos")), basis,
                                                    library_potential(n, "lse_tilt").get());
      for (double v : w.log_entries) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Kernel, FullSpaceIsConstantForFubiniStudy) {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      ToricFanoModel model(n);
      const SectionBasis basis(n, m);
      const BergmanKernel rho = bergman_kernel(model, basis, SectionSubspace::full(basis),
                                               monomial_section_norms(model, basis));
      const double expected = static_cast<double>(basis.size()) / model.analytic_volume();
      for (double s : {-9.0, -1.0, 0.0, 0.4, 3.0}) {
        std::vector<double> t(n);
        for (int i = 0; i < n; ++i) t[i] = s + 0.8 * i;
        EXPECT_NEAR(rho.value(point_from_log_coordinates(n, t)) / expected, 1.0, 1e-11);
      }
    }
}

TEST(Kernel, MassEqualsDimension) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 2; ++n) {
    ToricFanoModel model(n, library_potential(n, "lse_aniso"), QuadratureSpec{32});
    const SectionBasis basis(n, 1);
    const MonomialGram gram = monomial_section_norms(model, basis);
    for (int k = 1; k <= 3; ++k) {
      std::vector<std::size_t> idx;
      for (int i = 0; i < k; ++i) idx.push_back((2 * i + n) % basis.size());
      const BergmanKernel mono = bergman_kernel(model, basis, SectionSubspace::monomials(basis, idx), gram);
      EXPECT_NEAR(trapezoid_mass(model, mono, 1), k, 1e-8);
      const BergmanKernel general =
          bergman_kernel(model, basis, SectionSubspace(basis, random_coefficients(basis.size(), k, rng)), gram);
      EXPECT_NEAR(trapezoid_mass(model, general, 2 * basis.degree() + 2), k, 1e-8);
      EXPECT_NEAR(kernel_mass(model, general), trapezoid_mass(model, general, 2 * basis.degree() + 2), 1e-10);
      EXPECT_NEAR(kernel_mass(model, mono), k, 1e-10);
    }
  }
}

TEST(Kernel, VanishingOrderOfSquareMonomial) {
  ToricFanoModel cp1(1);
  const SectionBasis basis(1, 1);
  const MonomialGram gram = monomial_section_norms(cp1, basis);
  const BergmanKernel rho = bergman_kernel(cp1, basis, SectionSubspace::monomials(basis, {2}), gram);
  for (double t : {-30.0, -2.0, 0.0, 5.0}) {
    const double e = std::exp(t);
    const double expected = e * e / ((1.0 + e) * (1.0 + e)) / std::exp(gram.log_entries[2]);
    EXPECT_NEAR(rho.value(point_from_log_coordinates(1, std::vector<double>{t})) / expected, 1.0, 1e-12);
  }
  // log ρ ~ 2t = log|z|^4 as t → -∞.
  const double a = rho.log_value(point_from_log_coordinates(1, std::vector<double>{-40.0}));
  const double b = rho.log_value(point_from_log_coordinates(1, std::vector<double>{-50.0}));
  EXPECT_NEAR((a - b) / 10.0, 2.0, 1e-12);
}

TEST(Kernel, LogKernelIsAKahlerPotential) {
  for (int n = 1; n <= 2; ++n) {
    ToricFanoModel model(n, library_potential(n, "bump_gauss"), QuadratureSpec{24});
    for (int m = 1; m <= 2; ++m) {
      const SectionBasis basis(n, m);
      const MonomialGram gram = monomial_section_norms(model, basis);
      for (std::vector<std::size_t> idx : {std::vector<std::size_t>{0}, {1, 2}, {0, basis.size() - 1}}) {
        const auto pot = bergman_kernel(model, basis, SectionSubspace::monomials(basis, idx), gram).potential();
        for (const auto& q : model.nodes()) {
          const Mat h = model.reference_jet(q.pt).hess + pot->jet(q.pt).hess;
          Eigen::SelfAdjointEigenSolver<Mat> es(h);
          EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
        }
      }
    }
  }
}

TEST(Kernel, RankDeficientSubspaceRejected) {
  const SectionBasis basis(1, 1);
  ToricFanoModel cp1(1);
  Eigen::MatrixXcd c(3, 2);
  c << 1.0, 2.0, 1.0, 2.0, 0.0, 0.0;
  EXPECT_THROW(bergman_kernel(cp1, basis, SectionSubspace(basis, c), monomial_section_norms(cp1, basis)),
               kl::InvalidArgument);
  EXPECT_THROW(SectionSubspace::monomials(basis, {1, 1}), kl::InvalidArgument);
}

TEST(InnerProduct, SimultaneousDiagonalisation) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXcd b = random_coefficients(10, 10, rng);
  const InnerProductMatrix a(b * b.adjoint() + Eigen::MatrixXcd::Identity(10, 10));
  EXPECT_LE(a.reconstruction_error(), 1e-10);
  EXPECT_TRUE(std::is_sorted(a.mu().rbegin(), a.mu().rend()));
  EXPECT_FALSE(a.is_diagonal());
  EXPECT_THROW(InnerProductMatrix(Eigen::MatrixXcd::Identity(3, 3) * -1.0), kl::InvalidArgument);
}

TEST(BergmanPotential, ReferenceProductGivesConstant) {
  for (int n = 1; n <= 2; ++n) {
    ToricFanoModel model(n);
    const SectionBasis basis(n, 1);
    const auto psi = bergman_potential(model, basis, InnerProductMatrix::reference(basis.size()));
    for (double mu : psi.mu) EXPECT_NEAR(mu, 1.0, 1e-15);
    const double expected = std::log(basis.size() / model.analytic_volume());
    for (const auto& q : model.nodes()) ASSERT_NEAR(psi.psi_over_m->value(q.pt), expected, 1e-11);
    EXPECT_NEAR(bergman_I(model, psi, 1), 0.0, 1e-12);
  }
}

TEST(BergmanPotential, ScalingActsByConstantShift) {
  ToricFanoModel model(2, library_potential(2, "lse_tilt"));
  const SectionBasis basis(2, 1);
  std::vector<double> d(basis.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::exp(0.3 * j - 1.0);
  const double lambda = 3.7;
  std::vector<double> scaled = d;
  for (double& v : scaled) v *= lambda;
  const auto a = bergman_potential(model, basis, InnerProductMatrix::diagonal(d));
  const auto b = bergman_potential(model, basis, InnerProductMatrix::diagonal(scaled));
  for (std::size_t j = 0; j < d.size(); ++j) EXPECT_NEAR(b.mu[j], a.mu[j] / lambda, 1e-12 * a.mu[j]);
  for (const auto& q : model.nodes(0)) ASSERT_NEAR(b.psi_over_m->value(q.pt), a.psi_over_m->value(q.pt) - std::log(lambda), 1e-12);
  EXPECT_NEAR(bergman_I(model, a, 1), bergman_I(model, b, 1), 1e-10);
  EXPECT_NEAR(a.log_mu_ratio(2), b.log_mu_ratio(2), 1e-12);
}

TEST(BergmanPotential, EnergyGrowsAlongRay) {
  ToricFanoModel cp1(1);
  const SectionBasis basis(1, 1);
  double prev = -1.0;
  for (double s : {0.0, 1.0, 2.0, 4.0}) {
    // μ = (1, e^{-s}, e^{-2s}), i.e. a = diag(1, e^{s}, e^{2s}).
    const auto psi = bergman_potential(cp1, basis, InnerProductMatrix::diagonal({1.0, std::exp(s), std::exp(2 * s)}));
    const double I = bergman_I(cp1, psi, 1);
    EXPECT_GT(I, prev);
    prev = I;
  }
}

TEST(BergmanPotential, CovarianceEnergyMatchesHessianForm) {
  // Moderate rays, where the Hessian form of I through ω_ψ^n is still well conditioned.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      ToricFanoModel model(n, library_potential(n, "lse_tilt"));
      const SectionBasis basis(n, m);
      std::vector<double> logs(basis.size());
      for (double& v : logs) v = 1.5 * g(rng);
      const auto psi = bergman_potential_log(model, basis, logs);
      const double hessian_form = m * kl::functionals::aubin_I_J(model, *psi.psi_over_m).I;
      EXPECT_NEAR(bergman_I(model, psi, m), hessian_form, 1e-9 * (1.0 + std::abs(hessian_form))) << n << " " << m;
    }
}

TEST(BergmanPotential, FarAlongRayStaysFiniteAndConverges) {
  const SectionBasis basis(1, 2);
  const auto rays = default_probe_rays(basis, 6, 3);
  for (const auto& sigma : rays) {
    const auto [lo, hi] = std::minmax_element(sigma.begin(), sigma.end());
    const int depth = static_cast<int>(std::ceil(40.0 * (*hi - *lo) / std::log(2.0))) + 14;
    const ToricFanoModel coarse(1, nullptr, QuadratureSpec{0, depth, 16});
    const ToricFanoModel fine(1, nullptr, QuadratureSpec{0, depth + 10, 24});
    std::vector<double> logs(sigma.size());
    for (std::size_t j = 0; j < logs.size(); ++j) logs[j] = 40.0 * sigma[j];
    const auto a = bergman_potential_log(coarse, basis, logs);
    const auto b = bergman_potential_log(fine, basis, logs);
    const double ia = bergman_I(coarse, a, 2), ib = bergman_I(fine, b, 2);
    ASSERT_TRUE(std::isfinite(ia));
    EXPECT_GT(ia, 0.0);
    EXPECT_NEAR(ia, ib, 1e-9 * ib);
    EXPECT_TRUE(std::isfinite(a.log_mu_ratio(2)));
  }
}

TEST(BergmanPotential, NonDiagonalRejected) {
  ToricFanoModel cp1(1);
  const SectionBasis basis(1, 1);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(3, 3);
  a(0, 1) = a(1, 0) = 0.2;
  EXPECT_THROW(bergman_potential(cp1, basis, InnerProductMatrix(a)), kl::InvalidArgument);
}

TEST(Approximation, ZeroPotentialGap) {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= (n == 1 ? 4 : 2); ++m) {
      ToricFanoModel model(n);
      const auto r = bergman_approximation(model, m, kl::toric::ZeroPotential());
      const double expected = std::abs(std::log(section_count(n, m) / model.analytic_volume())) / m;
      EXPECT_NEAR(r.gap, expected, 1e-10);
      EXPECT_DOUBLE_EQ(r.lambda.front(), 1.0);
      for (double l : r.lambda) EXPECT_NEAR(l, 1.0, 1e-10);
    }
}

TEST(Approximation, ConstantInvarianceAndOrdering) {
  ToricFanoModel cp2(2);
  for (const auto& phi : library(2)) {
    const auto a = bergman_approximation(cp2, 2, *phi);
    const kl::toric::AffinePotential shifted(phi, 1.0, 0.83);
    const auto b = bergman_approximation(cp2, 2, shifted);
    EXPECT_NEAR(a.gap, b.gap, 1e-10) << phi->label();
    EXPECT_DOUBLE_EQ(a.lambda.front(), 1.0);
    EXPECT_TRUE(std::is_sorted(a.lambda.rbegin(), a.lambda.rend()));
  }
}

TEST(Approximation, GapShrinksWithPowerOnCP1) {
  // Frozen regression values of the sup gap at m = 1 and m = 4.
  struct Row {
    const char* name;
    double gap1, gap4;
  };
  const Row rows[] = {
#include "bergman_gap_regression.inc"
  };
  ToricFanoModel cp1(1);
  for (const auto& row : rows) {
    const auto phi = library_potential(1, row.name);
    const double g1 = bergman_approximation(cp1, 1, *phi).gap;
    const double g4 = bergman_approximation(cp1, 4, *phi).gap;
    EXPECT_LT(g4, g1) << row.name;
    EXPECT_NEAR(g1, row.gap1, 1e-9) << row.name;
    EXPECT_NEAR(g4, row.gap4, 1e-9) << row.name;
  }
}

TEST(Probe, ReferencePointAndLinearRays) {
  ToricFanoModel cp1(1, nullptr, QuadratureSpec{48});
  const SectionBasis basis(1, 1);
  const std::vector<double> s_grid{0.0, 4.0, 8.0, 12.0, 16.0};
  const auto rays = default_probe_rays(basis, 2, 17);
  ASSERT_EQ(rays.size(), basis.size() + 2);
  const ProbeResult r = eigenvalue_control_probe(cp1, 1, 2, rays, s_grid);
  for (const auto& smp : r.samples)
    if (smp.s == 0.0) {
      EXPECT_NEAR(smp.log_ratio, 0.0, 1e-14);
      EXPECT_NEAR(smp.I, 0.0, 1e-12);
    }
  // One-monomial rays: log-ratio = s exactly, I grows with asymptotically constant slope.
  for (std::size_t ray = 0; ray < basis.size(); ++ray) {
    std::vector<double> inc;
    for (std::size_t i = 1; i < s_grid.size(); ++i) {
      const auto& a = r.samples[ray * s_grid.size() + i - 1];
      const auto& b = r.samples[ray * s_grid.size() + i];
      EXPECT_NEAR(b.log_ratio, b.s, 1e-12);
      EXPECT_GT(b.I, a.I);
      inc.push_back(b.I - a.I);
    }
    EXPECT_NEAR(inc.back() / inc[inc.size() - 2], 1.0, 0.03);
    EXPECT_LE(r.ray_slopes[ray], r.fitted_lambda + 1e-15);
  }
  EXPECT_TRUE(std::isfinite(r.fitted_lambda));
  EXPECT_TRUE(std::isfinite(r.fitted_c));
  for (const auto& smp : r.samples) EXPECT_LE(smp.log_ratio, r.fitted_lambda * smp.I + r.fitted_c + 1e-12);
  // A deliberately small (Λ, C) is violated and the violations are reported.
  const ProbeResult v = eigenvalue_control_probe(cp1, 1, 2, rays, s_grid, 0.1, 0.0);
  EXPECT_FALSE(v.violations.empty());
}

TEST(Probe, ScalingInvariance) {
  ToricFanoModel cp1(1);
  const SectionBasis basis(1, 1);
  std::vector<double> sigma{0.5, -1.0, 0.2};
  std::vector<double> shifted = sigma;
  for (double& v : shifted) v += 0.7;  // a ↦ e^{0.7 s} a
  const auto a = eigenvalue_control_probe(cp1, 1, 2, {sigma}, {1.0, 3.0});
  const auto b = eigenvalue_control_probe(cp1, 1, 2, {shifted}, {1.0, 3.0});
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_NEAR(a.samples[i].log_ratio, b.samples[i].log_ratio, 1e-12);
    EXPECT_NEAR(a.samples[i].I, b.samples[i].I, 1e-10);
  }
}
