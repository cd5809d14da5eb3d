#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/grid_potential.hpp"
#include "kahlerlab/toric/library.hpp"
#include "kahlerlab/toric/mixed_det.hpp"
#include "kahlerlab/toric/model.hpp"

namespace kl = kahlerlab;
using kl::Mat;
using kl::Vec;
using namespace kahlerlab::toric;

namespace {

constexpr double kPi = std::numbers::pi;

Mat random_symmetric(int n, std::mt19937_64& rng, bool psd = false) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  if (psd) return a * a.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST(MomentMap, SymmetryMidpoints) {
  ToricFanoModel cp1(1), cp2(2);
  const double t0[] = {0.0};
  EXPECT_NEAR(cp1.moment_map(t0)(0), 1.0, 1e-15);
  const double t00[] = {0.0, 0.0};
  const Vec x = cp2.moment_map(t00);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_NEAR(x(1), 1.0, 1e-15);
}

TEST(MomentMap, ClosedFormValue) {
  ToricFanoModel cp1(1);
  const double t[] = {3.0};
  const double e3 = std::exp(3.0);
  EXPECT_NEAR(cp1.moment_map(t)(0), 2.0 * e3 / (1.0 + e3), 1e-14);
  EXPECT_NEAR(cp1.moment_map(t)(0), 1.90515, 1e-5);
}

TEST(MomentMap, RoundTripOnGrid) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n);
    std::vector<double> t(n);
    for (double a = -6.0; a <= 6.0; a += 0.75) {
      for (int i = 0; i < n; ++i) t[i] = a * (i + 1) / n - 0.3 * i;
      const Vec x = model.moment_map(t);
      const Vec back = model.inverse_moment_map(std::span<const double>(x.data(), n));
      for (int i = 0; i < n; ++i) EXPECT_NEAR(back(i), t[i], 1e-12) << "n=" << n << " a=" << a;
    }
  }
}

TEST(MomentMap, OutsidePolytopeRejected) {
  ToricFanoModel cp2(2);
  const double x[] = {2.0, 1.5};
  EXPECT_THROW(cp2.inverse_moment_map(x), kl::InvalidArgument);
}

TEST(MixedDeterminant, CollapsesToDeterminant) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 3; ++n) {
    const Mat a = random_symmetric(n, rng);
    EXPECT_NEAR(mixed_determinant({{a, n}}), small_det(a), 1e-12);
    EXPECT_NEAR(small_det(a), a.determinant(), 1e-12);
  }
}

TEST(MixedDeterminant, PolarizationByHand) {
  Mat id = Mat::Identity(2, 2);
  Mat d(2, 2);
  d << 2, 0, 0, 3;
  EXPECT_DOUBLE_EQ(mixed_determinant({{id, 1}, {d, 1}}), 2.5);
}

TEST(MixedDeterminant, SymmetricAndMultilinear) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    for (int n = 2; n <= 3; ++n) {
      std::vector<Mat> m;
      for (int i = 0; i < n; ++i) m.push_back(random_symmetric(n, rng));
      std::vector<Mat> swapped = m;
      std::swap(swapped[0], swapped[1]);
      EXPECT_NEAR(mixed_determinant(m), mixed_determinant(swapped), 1e-12);

      const Mat other = random_symmetric(n, rng);
      const double alpha = u(rng), beta = u(rng);
      std::vector<Mat> combo = m, alt = m;
      combo[0] = alpha * m[0] + beta * other;
      alt[0] = other;
      EXPECT_NEAR(mixed_determinant(combo), alpha * mixed_determinant(m) + beta * mixed_determinant(alt), 1e-12);
    }
  }
}

TEST(MixedDeterminant, NonnegativeOnPsd) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<Mat> m;
    for (int i = 0; i < n; ++i) m.push_back(random_symmetric(n, rng, true));
    EXPECT_GE(mixed_determinant(m), -1e-12);
  }
}

TEST(MixedDeterminant, DimensionMismatch) {
  std::vector<Mat> m{Mat::Identity(2, 2), Mat::Identity(3, 3)};
  EXPECT_THROW(mixed_determinant(m), kl::InvalidArgument);
  EXPECT_THROW(mixed_determinant({{Mat::Identity(2, 2), 3}}), kl::InvalidArgument);
}

TEST(Integration, SecondDerivativeOfFOnCP1) {
  // ∫ F'' dt = F'(+∞) - F'(-∞) = 2, times 2π.
  ToricFanoModel cp1(1);
  const double v = cp1.integrate_invariant([](const Point& p) { return ToricFanoModel::fubini_study_jet(p).hess(0, 0); });
  EXPECT_NEAR(v, 4.0 * kPi, 1e-12);
}

TEST(Integration, ZeroDensity) {
  ToricFanoModel cp2(2);
  EXPECT_EQ(cp2.integrate_invariant([](const Point&) { return 0.0; }), 0.0);
}

TEST(Integration, NonFiniteDensityReportsNode) {
  ToricFanoModel cp1(1);
  try {
    cp1.integrate_invariant([](const Point& p) { return p.t[0] > 0.0 ? NAN : 1.0; });
    FAIL() << "expected QuadratureError";
  } catch (const kl::QuadratureError& e) {
    EXPECT_NE(std::string(e.what()).find("t = ("), std::string::npos);
  }
}

TEST(Volume, MatchesAnalyticToricValue) {
  // (2π)^n c_1^n with c_1(CP^n)^n = (n+1)^n: 4π, 36π², 512π³.
  EXPECT_NEAR(ToricFanoModel(1).volume(), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(ToricFanoModel(2).volume() / (36.0 * kPi * kPi), 1.0, 1e-12);
  EXPECT_NEAR(ToricFanoModel(3).volume() / (512.0 * kPi * kPi * kPi), 1.0, 1e-12);
}

TEST(Volume, RefinementLevelsAgree) {
  for (int n = 1; n <= 2; ++n) {
    ToricFanoModel model(n, library_potential(n, "bump_cos"), QuadratureSpec{16});
    const double v0 = model.volume(0), v1 = model.volume(1);
    EXPECT_NEAR(v0 / v1, 1.0, 1e-10);
    EXPECT_NEAR(v1 / model.analytic_volume(), 1.0, 1e-10);
  }
}

TEST(Volume, PerturbedReferenceKeepsClass) {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& chi : library(n)) {
      ToricFanoModel model(n, chi);
      EXPECT_NEAR(model.volume() / model.analytic_volume(), 1.0, 1e-9) << chi->label() << " n=" << n;
    }
  }
}

TEST(Quadrature, AlgebraicOrderAtLeastFour) {
  // Smooth bounded density against the finest level: successive errors shrink >= 16x.
  for (int n = 1; n <= 2; ++n) {
    auto density = [](const Point& p) {
      return small_det(ToricFanoModel::fubini_study_jet(p).hess) * std::cos(1.3 * p.x[0] + 0.4) /
             (1.0 + 0.2 * p.x[p.n - 1]);
    };
    const double exact = ToricFanoModel(n, nullptr, QuadratureSpec{64}).integrate_invariant(density);
    double prev = -1.0;
    for (int q : {2, 4, 8}) {
      const double err = std::abs(ToricFanoModel(n, nullptr, QuadratureSpec{q}).integrate_invariant(density) - exact);
      if (prev > 0.0 && prev > 1e-12) EXPECT_LT(err, prev / 16.0 + 1e-13) << "n=" << n << " q=" << q;
      prev = err;
    }
  }
}

TEST(Library, BoundedAndKahlerWithMargin) {
  for (int n = 1; n <= 3; ++n) {
    ToricFanoModel model(n, nullptr, QuadratureSpec{n == 3 ? 12 : 40});
    const auto names = library_names();
    EXPECT_GE(names.size(), 7u);
    for (const auto& name : names) {
      const auto phi = library_potential(n, name);
      for (const auto& q : model.nodes()) {
        const Jet j = phi->jet(q.pt);
        EXPECT_LE(std::abs(j.value), 1.0);
        const Mat h = ToricFanoModel::fubini_study_jet(q.pt).hess;
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(h + j.hess), h, Eigen::EigenvaluesOnly);
        ASSERT_GE(es.eigenvalues().minCoeff(), 0.1) << name << " n=" << n;
      }
    }
  }
  EXPECT_THROW(library_potential(2, "nope"), kl::InvalidArgument);
}

TEST(Potentials, JetsMatchFiniteDifferences) {
  for (int n = 1; n <= 3; ++n) {
    std::vector<PotentialPtr> all = library(n);
    std::mt19937_64 rng(11);
    all.push_back(random_potential(n, rng));
    for (const auto& phi : all) {
      for (double s : {-2.0, 0.3, 1.7}) {
        std::vector<double> t(n);
        for (int i = 0; i < n; ++i) t[i] = s - 0.7 * i;
        const Point p = point_from_log_coordinates(n, t);
        const Jet j = phi->jet(p);
        const double h = 1e-4;
        for (int i = 0; i < n; ++i) {
          auto tp = t, tm = t;
          tp[i] += h;
          tm[i] -= h;
          const Jet jp = phi->jet(point_from_log_coordinates(n, tp));
          const Jet jm = phi->jet(point_from_log_coordinates(n, tm));
          EXPECT_NEAR(j.grad(i), (jp.value - jm.value) / (2 * h), 1e-7) << phi->label();
          for (int k = 0; k < n; ++k)
            EXPECT_NEAR(j.hess(i, k), (jp.grad(k) - jm.grad(k)) / (2 * h), 1e-7) << phi->label();
        }
      }
    }
  }
}

TEST(GridPotential, InterpolatesSampledData) {
  auto phi = library_potential(1, "bump_gauss");
  std::ostringstream csv;
  csv << "t1,phi\n";
  for (int i = 0; i <= 800; ++i) {
    const double t = -40.0 + 0.1 * i;
    csv << t << "," << phi->value(point_from_log_coordinates(1, std::vector<double>{t})) << "\n";
  }
  std::istringstream in(csv.str());
  const GridPotential grid = GridPotential::from_csv(1, in, "grid");
  for (double t : {-3.0, -0.25, 0.8, 5.0}) {
    const Point p = point_from_log_coordinates(1, std::vector<double>{t});
    const Jet a = grid.jet(p), b = phi->jet(p);
    EXPECT_NEAR(a.value, b.value, 1e-5);
    EXPECT_NEAR(a.grad(0), b.grad(0), 1e-4);
    EXPECT_NEAR(a.hess(0, 0), b.hess(0, 0), 1e-3);
  }
}

TEST(GridPotential, TwoDimensionalTensorSpline) {
  std::ostringstream csv;
  auto f = [](double a, double b) { return 0.1 * std::sin(0.5 * a) * std::cos(0.3 * b); };
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 60; ++j) {
      const double a = -6.0 + 0.2 * i, b = -6.0 + 0.2 * j;
      csv << a << " " << b << " " << f(a, b) << "\n";
    }
  std::istringstream in(csv.str());
  const GridPotential grid = GridPotential::from_csv(2, in, "grid2");
  const Point p = point_from_log_coordinates(2, std::vector<double>{0.37, -1.21});
  const Jet j = grid.jet(p);
  EXPECT_NEAR(j.value, f(0.37, -1.21), 1e-5);
  EXPECT_NEAR(j.grad(0), 0.05 * std::cos(0.5 * 0.37) * std::cos(0.3 * -1.21), 1e-4);
  EXPECT_NEAR(j.hess(0, 1), -0.015 * std::cos(0.5 * 0.37) * std::sin(0.3 * -1.21), 1e-3);
}

TEST(GridPotential, RejectsIncompleteGrid) {
  std::istringstream in("0 0 1\n0 1 1\n1 0 1\n");
  EXPECT_THROW(GridPotential::from_csv(2, in, "bad"), kl::InvalidArgument);
  std::istringstream short_rows("0 1\n1 2\n");
  EXPECT_THROW(GridPotential::from_csv(1, short_rows, "short"), kl::InvalidArgument);
}
