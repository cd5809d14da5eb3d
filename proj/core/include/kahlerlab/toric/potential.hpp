#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kahlerlab/toric/point.hpp"
#include "kahlerlab/types.hpp"

namespace kahlerlab::toric {

/// Value, log-coordinate gradient, and log-coordinate Hessian of a potential at a point.
struct Jet {
  double value = 0.0;
  Vec grad;
  Mat hess;

  static Jet zero(int n);
};

/// A torus-invariant function on CP^n viewed through its log-coordinate jets.
class InvariantPotential {
 public:
  virtual ~InvariantPotential() = default;
  virtual Jet jet(const Point& p) const = 0;
  virtual std::string label() const = 0;
  double value(const Point& p) const { return jet(p).value; }
};

using PotentialPtr = std::shared_ptr<const InvariantPotential>;

class ZeroPotential final : public InvariantPotential {
 public:
  Jet jet(const Point& p) const override { return Jet::zero(p.n); }
  std::string label() const override { return "zero"; }
};

/// c·φ + shift, used for scaling sweeps and constant-invariance checks.
class AffinePotential final : public InvariantPotential {
 public:
  AffinePotential(PotentialPtr base, double scale, double shift);
  Jet jet(const Point& p) const override;
  std::string label() const override;

 private:
  PotentialPtr base_;
  double scale_;
  double shift_;
};

/// φ + ψ.
class SumPotential final : public InvariantPotential {
 public:
  SumPotential(PotentialPtr a, PotentialPtr b);
  Jet jet(const Point& p) const override;
  std::string label() const override;

 private:
  PotentialPtr a_, b_;
};

/// weight · [ log Σ_J c_J e^{<J,t>} - degree · log(1 + Σ e^{t_i}) ].
///
/// With every vertex coefficient (J = 0 and J = degree·e_i) present the bracket is a
/// bounded smooth function on CP^n. Bergman potentials (weight 1/m, degree m(n+1)) are
/// of exactly this form. Coefficients are passed as logarithms so spreads of e^{±40} stay exact.
class LogSumExpPotential final : public InvariantPotential {
 public:
  LogSumExpPotential(int n, double weight, int degree, std::vector<std::array<int, 3>> exponents,
                     std::vector<double> log_coefficients, std::string label);
  Jet jet(const Point& p) const override;
  std::string label() const override { return label_; }

  int degree() const { return degree_; }
  double weight() const { return weight_; }
  const std::vector<std::array<int, 3>>& exponents() const { return exponents_; }
  const std::vector<double>& log_coefficients() const { return log_coefficients_; }

 private:
  int n_;
  double weight_;
  int degree_;
  std::vector<std::array<int, 3>> exponents_;
  std::vector<double> log_coefficients_;
  std::string label_;
};

/// A polynomial-like function of the moment coordinates, φ(t) = g(∇F(t)).
struct MomentFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

class MomentPotential final : public InvariantPotential {
 public:
  MomentPotential(MomentFunction g, std::string label);
  Jet jet(const Point& p) const override;
  std::string label() const override { return label_; }

 private:
  MomentFunction g_;
  std::string label_;
};

/// Converts x-derivatives of g into log-coordinate derivatives of g∘∇F at p.
Jet moment_to_log_jet(const Point& p, double g, const Vec& grad_x, const Mat& hess_x);

}  // namespace kahlerlab::toric
