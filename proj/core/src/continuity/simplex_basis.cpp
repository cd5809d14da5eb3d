#include <cmath>

#include "kahlerlab/continuity/continuity.hpp"
#include "kahlerlab/error.hpp"

namespace kahlerlab::continuity {

namespace {

// P_k(x), P_k'(x), P_k''(x) for k = 0..N at x = 2p − 1, then scaled to p-derivatives.
void legendre_unit(int degree, double p, std::vector<double>& v, std::vector<double>& d1, std::vector<double>& d2) {
  v.assign(degree + 1, 0.0);
  d1.assign(degree + 1, 0.0);
  d2.assign(degree + 1, 0.0);
  const double x = 2.0 * p - 1.0;
  v[0] = 1.0;
  if (degree >= 1) {
    v[1] = x;
    d1[1] = 1.0;
  }
  for (int k = 1; k < degree; ++k) {
    v[k + 1] = ((2 * k + 1) * x * v[k] - k * v[k - 1]) / (k + 1);
    d1[k + 1] = d1[k - 1] + (2 * k + 1) * v[k];
    d2[k + 1] = d2[k - 1] + (2 * k + 1) * d1[k];
  }
  for (int k = 0; k <= degree; ++k) {
    d1[k] *= 2.0;
    d2[k] *= 4.0;
  }
}

}  // namespace

SimplexBasis::SimplexBasis(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1 || n > 2) throw InvalidArgument("simplex polynomial basis supports n = 1 or 2");
  if (degree < 1) throw InvalidArgument("simplex polynomial degree must be positive");
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) {
      const int b = total - a;
      if (n == 1 && b > 0) continue;
      index_.push_back({a, b});
    }
}

void SimplexBasis::evaluate(const Vec& p, Eigen::Ref<Eigen::VectorXd> value, Eigen::Ref<Eigen::MatrixXd> grad,
                            Eigen::Ref<Eigen::MatrixXd> hess) const {
  thread_local std::vector<double> v0, d10, d20, v1, d11, d21;
  legendre_unit(degree_, p(0), v0, d10, d20);
  if (n_ == 2) legendre_unit(degree_, p(1), v1, d11, d21);
  for (int b = 0; b < size(); ++b) {
    const auto [i, j] = index_[b];
    if (n_ == 1) {
      value(b) = v0[i];
      grad(0, b) = d10[i];
      hess(0, b) = d20[i];
    } else {
      value(b) = v0[i] * v1[j];
      grad(0, b) = d10[i] * v1[j];
      grad(1, b) = v0[i] * d11[j];
      hess(0, b) = d20[i] * v1[j];
      hess(1, b) = d10[i] * d11[j];
      hess(2, b) = v0[i] * d21[j];
    }
  }
}

Vec barycentric(const Point& pt) {
  Vec p(pt.n);
  for (int i = 0; i < pt.n; ++i) p(i) = pt.p(i + 1);
  return p;
}

void p_to_log_jet(const Point& pt, const Vec& g, const Mat& h, Vec& grad_t, Mat& hess_t) {
  const int n = pt.n;
  const Vec p = barycentric(pt);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        double rest = pt.p(0);
        for (int l = 0; l < n; ++l)
          if (l != i) rest += p(l);
        a(i, i) = p(i) * rest;
      } else {
        a(i, j) = -p(i) * p(j);
      }
    }
  grad_t = a * g;
  const double s = p.dot(g);
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = (g(i) - s) * a(i, j) - p(i) * p(j) * (g(j) - s);
  hess_t = a * h * a + b;
}

SimplexPolynomialPotential::SimplexPolynomialPotential(std::shared_ptr<const SimplexBasis> basis,
                                                       Eigen::VectorXd coefficients, std::string label)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)), label_(std::move(label)) {
  if (coefficients_.size() != basis_->size()) throw InvalidArgument("coefficient count does not match the basis");
}

toric::Jet SimplexPolynomialPotential::jet(const Point& pt) const {
  const int n = basis_->dim();
  if (pt.n != n) throw InvalidArgument("point dimension does not match the polynomial");
  const int nb = basis_->size();
  thread_local Eigen::VectorXd v;
  thread_local Eigen::MatrixXd g, h;
  v.resize(nb);
  g.resize(n, nb);
  h.resize(n == 1 ? 1 : 3, nb);
  basis_->evaluate(barycentric(pt), v, g, h);
  toric::Jet j;
  j.value = v.dot(coefficients_);
  Vec gp = g * coefficients_;
  const Eigen::VectorXd hv = h * coefficients_;
  Mat hp(n, n);
  if (n == 1) {
    hp(0, 0) = hv(0);
  } else {
    hp << hv(0), hv(1), hv(1), hv(2);
  }
  p_to_log_jet(pt, gp, hp, j.grad, j.hess);
  return j;
}

}  // namespace kahlerlab::continuity
