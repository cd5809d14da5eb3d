#include "kahlerlab/functionals/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/mixed_det.hpp"

namespace kahlerlab::functionals {

using toric::factorial;
using toric::mixed_determinant;
using toric::small_det;

namespace {

constexpr double kFormTolerance = 1e-6;
constexpr double kInequalityTolerance = 1e-9;

void check_k(int n, int k) {
  if (k < 2 || k > n + 1) throw InvalidArgument("k must satisfy 2 <= k <= n+1");
}

void check_pair(const SampledPotential& a, const SampledPotential& b) {
  if (a.n != b.n || a.samples.size() != b.samples.size())
    throw InvalidArgument("potentials must be sampled on the same node set");
}

// n!·D(A^i, B^j, C^l) with i + j + l = n.
double form(int n, const Mat& a, int i, const Mat& b, int j, const Mat& c, int l) {
  return factorial(n) * mixed_determinant({{a, i}, {b, j}, {c, l}});
}

double relative_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

}  // namespace

double SampledPotential::volume() const {
  const double nf = factorial(n);
  double v = 0.0;
  for (const auto& s : samples) v += s.weight * nf * small_det(s.ref);
  return v;
}

double SampledPotential::sup() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::max(m, s.phi);
  return m;
}

double SampledPotential::inf() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.phi);
  return m;
}

double SampledPotential::average(const std::vector<double>& g) const {
  if (g.size() != samples.size()) throw InvalidArgument("per-node vector has wrong size");
  const double nf = factorial(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = samples[i].weight * nf * small_det(samples[i].ref);
    num += w * g[i];
    den += w;
  }
  return num / den;
}

double SampledPotential::mean_against_reference() const {
  const double nf = factorial(n);
  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    const double w = s.weight * nf * small_det(s.ref);
    num += w * s.phi;
    den += w;
  }
  return num / den;
}

double SampledPotential::mean_against_self() const {
  const double nf = factorial(n);
  double num = 0.0;
  for (const auto& s : samples) num += s.weight * nf * small_det(Mat(s.ref + s.hess)) * s.phi;
  return num / volume();
}

double SampledPotential::kahler_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(s.ref + s.hess), s.ref, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

SampledPotential sample(const ToricFanoModel& model, const InvariantPotential& phi, int level) {
  SampledPotential out;
  out.n = model.dim();
  out.label = phi.label();
  const auto& nodes = model.nodes(level);
  out.samples.reserve(nodes.size());
  for (const auto& q : nodes) {
    FieldSample s;
    s.weight = q.weight_t;
    s.ref = model.reference_jet(q.pt).hess;
    const auto j = phi.jet(q.pt);
    s.phi = j.value;
    s.grad = j.grad;
    s.hess = j.hess;
    if (!std::isfinite(s.phi)) throw QuadratureError("non-finite potential value at a quadrature node");
    Eigen::LLT<Mat> llt(Mat(s.ref + s.hess));
    if (llt.info() != Eigen::Success) throw NotKahler(phi.label() + " leaves the Kähler cone at a quadrature node");
    out.samples.push_back(std::move(s));
  }
  return out;
}

IkForms energy_Ik_forms(const SampledPotential& phi, int k) {
  const int n = phi.n;
  check_k(n, k);
  IkForms f;
  double vol = 0.0;
  const double nf = factorial(n);
  for (const auto& s : phi.samples) {
    const Mat h1 = s.ref + s.hess;
    const Mat g = s.grad * s.grad.transpose();
    const double dv = s.weight * nf * small_det(s.ref);
    vol += dv;
    f.potential_form += s.weight * s.phi * (nf * small_det(s.ref) - form(n, h1, k - 1, s.ref, n - k + 1, s.ref, 0));
    for (int r = 0; r <= k - 2; ++r) {
      const double low = form(n, h1, r, s.ref, n - r, s.ref, 0);
      const double high = form(n, h1, r + 1, s.ref, n - r - 1, s.ref, 0);
      f.stokes_sum += s.weight * s.phi * (low - high);
      f.gradient_sum += s.weight * nf * mixed_determinant({{g, 1}, {h1, r}, {s.ref, n - r - 1}});
    }
  }
  f.potential_form /= vol;
  f.stokes_sum /= vol;
  f.gradient_sum /= vol;
  return f;
}

double energy_Ik(const SampledPotential& phi, int k) {
  const IkForms f = energy_Ik_forms(phi, k);
  const double scale = std::abs(f.potential_form) + std::abs(f.stokes_sum) + 1e-12;
  if (std::abs(f.potential_form - f.stokes_sum) > kFormTolerance * scale)
    throw QuadratureError("I_k expressions disagree for " + phi.label + ": quadrature resolution too low");
  return f.potential_form;
}

double energy_Ik(const ToricFanoModel& model, const InvariantPotential& phi, int k, int level) {
  return energy_Ik(sample(model, phi, level), k);
}

Summands dirichlet_summands(const SampledPotential& phi) {
  const int n = phi.n;
  Summands out;
  out.stokes.assign(n, 0.0);
  out.gradient.assign(n, 0.0);
  const double nf = factorial(n);
  double vol = 0.0;
  for (const auto& s : phi.samples) {
    const Mat h1 = s.ref + s.hess;
    const Mat g = s.grad * s.grad.transpose();
    vol += s.weight * nf * small_det(s.ref);
    for (int r = 0; r < n; ++r) {
      out.stokes[r] += s.weight * s.phi *
                       (form(n, h1, r, s.ref, n - r, s.ref, 0) - form(n, h1, r + 1, s.ref, n - r - 1, s.ref, 0));
      out.gradient[r] += s.weight * nf * mixed_determinant({{g, 1}, {h1, r}, {s.ref, n - r - 1}});
    }
  }
  for (int r = 0; r < n; ++r) {
    out.stokes[r] /= vol;
    out.gradient[r] /= vol;
  }
  return out;
}

AubinIJ aubin_I_J(const SampledPotential& phi) {
  const int n = phi.n;
  const double nf = factorial(n);
  double vol = 0.0, idiff = 0.0;
  for (const auto& s : phi.samples) {
    const double ref = nf * small_det(s.ref);
    vol += s.weight * ref;
    idiff += s.weight * s.phi * (ref - nf * small_det(Mat(s.ref + s.hess)));
  }
  AubinIJ out;
  out.I = idiff / vol;
  const Summands sm = dirichlet_summands(phi);
  for (int r = 0; r < n; ++r) out.J += (n - r) / (n + 1.0) * sm.stokes[r];
  const double tol = kInequalityTolerance * (1.0 + std::abs(out.I));
  if (out.J < -tol || out.I - out.J < -tol || out.J - out.I / (n + 1.0) < -tol)
    throw QuadratureError("I >= J >= I/(n+1) violated for " + phi.label);
  return out;
}

AubinIJ aubin_I_J(const ToricFanoModel& model, const InvariantPotential& phi, int level) {
  return aubin_I_J(sample(model, phi, level));
}

double expansion_residual(const SampledPotential& phi, const SampledPotential& psi, int r) {
  check_pair(phi, psi);
  const int n = phi.n;
  if (r < 1 || r > n) throw InvalidArgument("r must satisfy 1 <= r <= n");
  const double nf = factorial(n);
  double vol = 0.0, lhs = 0.0, rhs = 0.0;
  for (std::size_t q = 0; q < phi.samples.size(); ++q) {
    const auto& a = phi.samples[q];
    const auto& b = psi.samples[q];
    const Mat& h0 = a.ref;
    const Mat h1 = h0 + a.hess;
    const Mat h2 = h0 + b.hess;
    vol += a.weight * nf * small_det(h0);
    lhs += a.weight * (a.phi * form(n, h1, r, h0, n - r, h0, 0) - b.phi * form(n, h2, r, h0, n - r, h0, 0));
    double bracket = 0.0;
    for (int i = 0; i <= r; ++i) bracket += form(n, h1, i, h2, r - i, h0, n - r);
    for (int i = 0; i <= r - 1; ++i) bracket -= form(n, h1, i, h2, r - i - 1, h0, n - r + 1);
    rhs += a.weight * (a.phi - b.phi) * bracket;
  }
  return relative_gap(lhs / vol, rhs / vol);
}

namespace {

// Per-node density of ω^n - Σ_{i<k} ω_φ^iω_ψ^{k-1-i}ω^{n-k+1} + Σ_{i<k-1} ω_φ^iω_ψ^{k-2-i}ω^{n-k+2}.
double difference_bracket(int n, int k, const Mat& h0, const Mat& h1, const Mat& h2) {
  double bracket = factorial(n) * small_det(h0);
  for (int i = 0; i <= k - 1; ++i) bracket -= form(n, h1, i, h2, k - 1 - i, h0, n - k + 1);
  for (int i = 0; i <= k - 2; ++i) bracket += form(n, h1, i, h2, k - 2 - i, h0, n - k + 2);
  return bracket;
}

}  // namespace

double Ik_difference_residual(const SampledPotential& phi, const SampledPotential& psi, int k) {
  check_pair(phi, psi);
  check_k(phi.n, k);
  const int n = phi.n;
  const double nf = factorial(n);
  double vol = 0.0, rhs = 0.0, lhs = 0.0;
  for (std::size_t q = 0; q < phi.samples.size(); ++q) {
    const auto& a = phi.samples[q];
    const auto& b = psi.samples[q];
    const Mat h1 = a.ref + a.hess;
    const Mat h2 = a.ref + b.hess;
    const double ref = nf * small_det(a.ref);
    vol += a.weight * ref;
    rhs += a.weight * (a.phi - b.phi) * difference_bracket(n, k, a.ref, h1, h2);
    lhs += a.weight * (a.phi * (ref - form(n, h1, k - 1, a.ref, n - k + 1, a.ref, 0)) -
                       b.phi * (ref - form(n, h2, k - 1, a.ref, n - k + 1, a.ref, 0)));
  }
  return relative_gap(lhs / vol, rhs / vol);
}

double Ik_difference_bracket_mass(const SampledPotential& phi, const SampledPotential& psi, int k) {
  check_pair(phi, psi);
  check_k(phi.n, k);
  const int n = phi.n;
  const double nf = factorial(n);
  double vol = 0.0, mass = 0.0;
  for (std::size_t q = 0; q < phi.samples.size(); ++q) {
    const auto& a = phi.samples[q];
    const auto& b = psi.samples[q];
    vol += a.weight * nf * small_det(a.ref);
    mass += a.weight * difference_bracket(n, k, a.ref, Mat(a.ref + a.hess), Mat(a.ref + b.hess));
  }
  return mass / vol;
}

long long stability_coefficient(long long k) { return 1 - (k - 1) + (k - 2); }

StabilityCheck verify_Ik_stability(const SampledPotential& phi, const SampledPotential& psi, int k) {
  check_pair(phi, psi);
  StabilityCheck c;
  c.difference = std::abs(energy_Ik(phi, k) - energy_Ik(psi, k));
  for (std::size_t q = 0; q < phi.samples.size(); ++q)
    c.sup_gap = std::max(c.sup_gap, std::abs(phi.samples[q].phi - psi.samples[q].phi));
  c.bound = 2.0 * (k - 1) * c.sup_gap;
  c.slack = c.bound - c.difference;
  return c;
}

FunctionalReport functional_report(const SampledPotential& phi) {
  const int n = phi.n;
  FunctionalReport rep;
  rep.label = phi.label;
  rep.n = n;
  SampledPotential zero = phi;
  for (auto& s : zero.samples) {
    s.phi = 0.0;
    s.grad.setZero();
    s.hess.setZero();
  }
  for (int k = 2; k <= n + 1; ++k) {
    rep.ks.push_back(k);
    const IkForms f = energy_Ik_forms(phi, k);
    rep.Ik.push_back(energy_Ik(phi, k));
    rep.Ik_form_gap.push_back(std::abs(f.potential_form - f.gradient_sum));
    rep.difference_residuals.push_back(Ik_difference_residual(phi, zero, k));
  }
  const AubinIJ ij = aubin_I_J(phi);
  rep.I = ij.I;
  rep.J = ij.J;
  for (int r = 1; r <= n; ++r) rep.expansion_residuals.push_back(expansion_residual(phi, zero, r));
  for (int k = 2; k <= n; ++k) rep.hij_slack.push_back((n + 1) * ij.J - ij.I - (n - k + 1) * rep.Ik[k - 2]);
  rep.ij_slack = ij.I - ij.J;
  return rep;
}

}  // namespace kahlerlab::functionals
