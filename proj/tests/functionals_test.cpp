#include <gtest/gtest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "kahlerlab/error.hpp"
#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/library.hpp"

namespace kl = kahlerlab;
using kl::Mat;
using kl::Vec;
using namespace kahlerlab::functionals;
using namespace kahlerlab::toric;

namespace {

constexpr double kPi = std::numbers::pi;

PotentialPtr shifted(const PotentialPtr& p, double c) { return std::make_shared<AffinePotential>(p, 1.0, c); }

// ε log((1 + 2e^{t1} + e^{t2}) / (1 + e^{t1} + e^{t2})), bounded by ε log 2.
PotentialPtr bounded_log_ratio(double eps) {
  return std::make_shared<LogSumExpPotential>(2, eps, 1, std::vector<std::array<int, 3>>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                              std::vector<double>{0.0, std::log(2.0), 0.0}, "log_ratio");
}

// Composite Gauss-Legendre on [-L, L]^2, independent of the collapsed simplex rule.
template <class F>
double box_integral(double half_width, int panels, F&& f) {
  static const double x[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                             0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double w[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                             0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  const double h = 2.0 * half_width / panels;
  std::vector<double> t, wt;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 8; ++i) {
      t.push_back(-half_width + h * (p + 0.5 * (x[i] + 1.0)));
      wt.push_back(0.5 * h * w[i]);
    }
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) s += wt[i] * wt[j] * f(t[i], t[j]);
  return s;
}

double mixed2(const Mat& a, const Mat& b) {
  return 0.5 * (a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1));
}

}  // namespace

TEST(Functionals, VanishOnZeroPotential) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n);
    const auto s = sample(model, ZeroPotential());
    for (int k = 2; k <= n + 1; ++k) EXPECT_EQ(energy_Ik(s, k), 0.0);
    const auto ij = aubin_I_J(s);
    EXPECT_EQ(ij.I, 0.0);
    EXPECT_EQ(ij.J, 0.0);
  }
}

TEST(Functionals, ConstantShiftInvariance) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n);
    for (const auto& phi : library(n)) {
      for (double c : {-0.8, 0.35, 2.0}) {
        const auto a = sample(model, *phi), b = sample(model, *shifted(phi, c));
        for (int k = 2; k <= n + 1; ++k) EXPECT_NEAR(energy_Ik(a, k), energy_Ik(b, k), 1e-9) << phi->label();
        const auto ia = aubin_I_J(a), ib = aubin_I_J(b);
        EXPECT_NEAR(ia.I, ib.I, 1e-9);
        EXPECT_NEAR(ia.J, ib.J, 1e-9);
      }
    }
  }
}

TEST(Functionals, TopEnergyIsAubinI) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n, library_potential(n, "bump_cos"));
    for (const auto& phi : library(n)) {
      const auto s = sample(model, *phi);
      EXPECT_NEAR(energy_Ik(s, n + 1), aubin_I_J(s).I, 1e-8) << phi->label() << " n=" << n;
    }
  }
}

TEST(Functionals, PositivityAndAubinBounds) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = sample(model, *random_potential(n, rng));
      for (int k = 2; k <= n + 1; ++k) EXPECT_GE(energy_Ik(s, k), -1e-12);
      const auto ij = aubin_I_J(s);
      EXPECT_GE(ij.I, ij.J - 1e-12);
      EXPECT_GE(ij.J, ij.I / (n + 1) - 1e-12);
      const auto rep = functional_report(s);
      for (double h : rep.hij_slack) EXPECT_GE(h, -1e-10);
    }
  }
}

TEST(Functionals, ThreeFormsAgree) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n, library_potential(n, "lse_tilt"));
    for (const auto& phi : library(n)) {
      const auto s = sample(model, *phi);
      for (int k = 2; k <= n + 1; ++k) {
        const auto f = energy_Ik_forms(s, k);
        const double scale = 1.0 + std::abs(f.potential_form);
        EXPECT_LE(std::abs(f.potential_form - f.stokes_sum) / scale, 1e-6) << phi->label();
        EXPECT_LE(std::abs(f.potential_form - f.gradient_sum) / scale, 1e-6) << phi->label();
      }
      const auto d = dirichlet_summands(s);
      for (int r = 0; r < n; ++r) EXPECT_NEAR(d.stokes[r], d.gradient[r], 1e-6 * (1.0 + std::abs(d.gradient[r])));
    }
  }
}

TEST(Functionals, CP2AgainstBoxQuadrature) {
  // On the t-plane: ω^2 = 2 det H dt dθ, ω∧ω' = 2 D(H, H') dt dθ, and V = 36π².
  const auto phi = bounded_log_ratio(0.5);
  ToricFanoModel model(2);
  const auto s = sample(model, *phi);
  const double volume = 36.0 * kPi * kPi;
  const double scale = 2.0 * 4.0 * kPi * kPi / volume;

  auto jets = [&](double a, double b, Jet& h, Jet& f) {
    const Point p = point_from_log_coordinates(2, std::vector<double>{a, b});
    h = ToricFanoModel::fubini_study_jet(p);
    f = phi->jet(p);
  };
  const double i2 = scale * box_integral(40.0, 160, [&](double a, double b) {
    Jet h, f;
    jets(a, b, h, f);
    return -f.value * mixed2(f.hess, h.hess);
  });
  const double i3 = scale * box_integral(40.0, 160, [&](double a, double b) {
    Jet h, f;
    jets(a, b, h, f);
    return f.value * (h.hess.determinant() - Mat(h.hess + f.hess).determinant());
  });
  const double j = scale * box_integral(40.0, 160, [&](double a, double b) {
    Jet h, f;
    jets(a, b, h, f);
    const Mat g = f.grad * f.grad.transpose();
    return (2.0 / 3.0) * mixed2(g, h.hess) + (1.0 / 3.0) * mixed2(g, Mat(h.hess + f.hess));
  });
  EXPECT_NEAR(energy_Ik(s, 2), i2, 1e-6);
  EXPECT_NEAR(energy_Ik(s, 3), i3, 1e-6);
  EXPECT_NEAR(aubin_I_J(s).J, j, 1e-6);
  EXPECT_GT(i2, 1e-3);
}

TEST(Functionals, CP1AgainstOneDimensionalIntegral) {
  // n = 1: I_2 = I = (2π/V) ∫ φ'(t)^2 dt and J = I/2.
  boost::math::quadrature::sinh_sinh<double> integrator;
  for (const std::string name : {"bump_gauss", "lse_tilt", "bump_cos"}) {
    const auto phi = library_potential(1, name);
    const double raw = integrator.integrate([&](double t) {
      const double g = phi->jet(point_from_log_coordinates(1, std::vector<double>{t})).grad(0);
      return g * g;
    });
    const double expected = raw / 2.0;  // 2π / 4π
    const auto s = sample(ToricFanoModel(1), *phi);
    EXPECT_NEAR(energy_Ik(s, 2), expected, 1e-8) << name;
    EXPECT_NEAR(aubin_I_J(s).J, expected / 2.0, 1e-8) << name;
  }
}

TEST(Identities, ExpansionResiduals) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n);
    const auto zero = sample(model, ZeroPotential());
    for (const auto& phi : library(n)) {
      const auto s = sample(model, *phi);
      for (int r = 1; r <= n; ++r) {
        EXPECT_LE(expansion_residual(s, s, r), 1e-12);
        EXPECT_LE(expansion_residual(s, zero, r), 1e-8);
      }
    }
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = sample(model, *random_potential(n, rng)), b = sample(model, *random_potential(n, rng));
      for (int r = 1; r <= n; ++r) EXPECT_LE(expansion_residual(a, b, r), 1e-6);
      for (int k = 2; k <= n + 1; ++k) {
        EXPECT_LE(Ik_difference_residual(a, b, k), 1e-6);
        EXPECT_NEAR(Ik_difference_bracket_mass(a, b, k), 0.0, 1e-8);
      }
    }
  }
}

TEST(Identities, StabilityOverRandomPairs) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    ToricFanoModel model(n, nullptr, QuadratureSpec{n == 3 ? 16 : 32});
    const auto a = sample(model, *random_potential(n, rng)), b = sample(model, *random_potential(n, rng));
    for (int k = 2; k <= n + 1; ++k) {
      const auto c = verify_Ik_stability(a, b, k);
      EXPECT_GE(c.slack, -1e-10) << "trial " << trial << " k=" << k;
      EXPECT_NEAR(c.bound, 2.0 * (k - 1) * c.sup_gap, 1e-14);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 34 * 1 + 33 * 2 + 33 * 3);
}

TEST(Identities, BracketCoefficientVanishes) {
  for (long long k = 2; k <= 10; ++k) EXPECT_EQ(stability_coefficient(k), 0);
}

TEST(Functionals, NonKahlerPotentialRejected) {
  auto phi = std::make_shared<AffinePotential>(library_potential(1, "lse_aniso"), -5.0, 0.0);
  EXPECT_THROW(sample(ToricFanoModel(1), *phi), kl::NotKahler);
}
