#include "kahlerlab/toric/potential.hpp"

#include <algorithm>
#include <cmath>

#include "kahlerlab/error.hpp"

namespace kahlerlab::toric {

Jet Jet::zero(int n) {
  Jet j;
  j.value = 0.0;
  j.grad = Vec::Zero(n);
  j.hess = Mat::Zero(n, n);
  return j;
}

AffinePotential::AffinePotential(PotentialPtr base, double scale, double shift)
    : base_(std::move(base)), scale_(scale), shift_(shift) {
  if (!base_) throw InvalidArgument("affine potential needs a base");
}

Jet AffinePotential::jet(const Point& p) const {
  Jet j = base_->jet(p);
  j.value = scale_ * j.value + shift_;
  j.grad *= scale_;
  j.hess *= scale_;
  return j;
}

std::string AffinePotential::label() const {
  return std::to_string(scale_) + "*" + base_->label() + "+" + std::to_string(shift_);
}

SumPotential::SumPotential(PotentialPtr a, PotentialPtr b) : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw InvalidArgument("sum potential needs two terms");
}

Jet SumPotential::jet(const Point& p) const {
  Jet j = a_->jet(p);
  const Jet k = b_->jet(p);
  j.value += k.value;
  j.grad += k.grad;
  j.hess += k.hess;
  return j;
}

std::string SumPotential::label() const { return a_->label() + "+" + b_->label(); }

LogSumExpPotential::LogSumExpPotential(int n, double weight, int degree,
                                       std::vector<std::array<int, 3>> exponents,
                                       std::vector<double> log_coefficients, std::string label)
    : n_(n),
      weight_(weight),
      degree_(degree),
      exponents_(std::move(exponents)),
      log_coefficients_(std::move(log_coefficients)),
      label_(std::move(label)) {
  if (exponents_.empty() || exponents_.size() != log_coefficients_.size())
    throw InvalidArgument("log-sum-exp potential needs one coefficient per exponent");
  for (const auto& e : exponents_) {
    int total = 0;
    for (int i = 0; i < n_; ++i) {
      if (e[i] < 0) throw InvalidArgument("negative exponent");
      total += e[i];
    }
    if (total > degree_) throw InvalidArgument("exponent exceeds degree");
  }
}

Jet LogSumExpPotential::jet(const Point& p) const {
  const std::size_t count = exponents_.size();
  thread_local std::vector<double> logs;
  logs.resize(count);
  double top = -INFINITY;
  for (std::size_t a = 0; a < count; ++a) {
    const auto& e = exponents_[a];
    int total = 0;
    double v = log_coefficients_[a];
    for (int i = 0; i < n_; ++i) {
      if (e[i] != 0) v += e[i] * p.log_p[i + 1];
      total += e[i];
    }
    if (degree_ - total != 0) v += (degree_ - total) * p.log_p[0];
    logs[a] = v;
    top = std::max(top, v);
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < count; ++a) {
    logs[a] = std::exp(logs[a] - top);
    sum += logs[a];
  }
  Vec mean = Vec::Zero(n_);
  for (std::size_t a = 0; a < count; ++a) {
    const double w = logs[a] / sum;
    for (int i = 0; i < n_; ++i) mean(i) += w * exponents_[a][i];
  }
  // Covariance from exact pairwise differences: near a vertex the weights concentrate and
  // E[JJ^T] - E[J]E[J]^T would cancel catastrophically.
  Mat cov = Mat::Zero(n_, n_);
  for (std::size_t a = 0; a < count; ++a) {
    Vec dev = Vec::Zero(n_);
    for (std::size_t b = 0; b < count; ++b) {
      if (b == a) continue;
      for (int i = 0; i < n_; ++i) dev(i) += logs[b] * (exponents_[a][i] - exponents_[b][i]);
    }
    dev /= sum;
    cov += (logs[a] / sum) * dev * dev.transpose();
  }
  Vec pv(n_);
  for (int i = 0; i < n_; ++i) pv(i) = std::exp(p.log_p[i + 1]);
  Mat fs = -pv * pv.transpose();
  for (int i = 0; i < n_; ++i) {
    double rest = std::exp(p.log_p[0]);
    for (int k = 0; k < n_; ++k)
      if (k != i) rest += pv(k);
    fs(i, i) = pv(i) * rest;
  }

  Jet j;
  j.value = weight_ * (top + std::log(sum));
  j.grad = weight_ * (mean - degree_ * pv);
  j.hess = weight_ * (cov - degree_ * fs);
  return j;
}

MomentPotential::MomentPotential(MomentFunction g, std::string label) : g_(std::move(g)), label_(std::move(label)) {}

Jet MomentPotential::jet(const Point& p) const {
  Vec x(p.n);
  for (int i = 0; i < p.n; ++i) x(i) = p.x[i];
  return moment_to_log_jet(p, g_.value(x), g_.gradient(x), g_.hessian(x));
}

Jet moment_to_log_jet(const Point& p, double g, const Vec& grad_x, const Mat& hess_x) {
  const int n = p.n;
  const double np1 = n + 1.0;
  Vec x(n), pv(n);
  for (int i = 0; i < n; ++i) {
    x(i) = p.x[i];
    pv(i) = std::exp(p.log_p[i + 1]);
  }
  const double p0 = std::exp(p.log_p[0]);
  // D²F in moment coordinates: H_ij = x_i δ_ij - x_i x_j / (n+1), with the diagonal written
  // as x_i (p_0 + Σ_{j≠i} p_j) so it stays accurate near every vertex.
  Mat h = -x * x.transpose() / np1;
  // dev_i = g_i - x·g/(n+1) = g_i p_0 + Σ_{j≠i} p_j (g_i - g_j), free of cancellation.
  Vec dev(n);
  for (int i = 0; i < n; ++i) {
    double rest = p0;
    double d = grad_x(i) * p0;
    for (int k = 0; k < n; ++k)
      if (k != i) {
        rest += pv(k);
        d += pv(k) * (grad_x(i) - grad_x(k));
      }
    h(i, i) = x(i) * rest;
    dev(i) = d;
  }

  Jet j;
  j.value = g;
  j.grad = h * grad_x;
  Mat third(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) third(i, k) = -x(i) * x(k) * (dev(i) + dev(k)) / np1;
    third(i, i) += x(i) * dev(i);
  }
  j.hess = h * hess_x * h + third;
  return j;
}

}  // namespace kahlerlab::toric
