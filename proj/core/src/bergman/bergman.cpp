#include "kahlerlab/bergman/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "kahlerlab/error.hpp"
#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/mixed_det.hpp"

namespace kahlerlab::bergman {

namespace {

constexpr double kMaxCondition = 1e12;

double log_sum_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

PotentialPtr minus_chi(const ToricFanoModel& model, PotentialPtr base) {
  if (model.is_fubini_study()) return base;
  return std::make_shared<toric::SumPotential>(
      std::move(base), std::make_shared<toric::AffinePotential>(model.perturbation(), -1.0, 0.0));
}

}  // namespace

std::size_t section_count(int n, int m) {
  const int d = m * (n + 1);
  std::size_t c = 1;
  for (int i = 1; i <= n; ++i) c = c * (d + i) / i;
  return c;
}

SectionBasis::SectionBasis(int n, int m) : n_(n), m_(m) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("section basis needs 1 <= n <= 3");
  if (m < 1) throw InvalidArgument("tensor power m must be positive");
  const int d = degree();
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= (n >= 2 ? d - a : 0); ++b)
      for (int c = 0; c <= (n >= 3 ? d - a - b : 0); ++c) exponents_.push_back({a, b, c});
}

std::size_t SectionBasis::index_of(const Exponent& j) const {
  auto it = std::find(exponents_.begin(), exponents_.end(), j);
  if (it == exponents_.end()) throw InvalidArgument("exponent is not a section of K^{-m}");
  return static_cast<std::size_t>(it - exponents_.begin());
}

double SectionBasis::log_norm_fs(std::size_t j, const Point& p) const {
  const Exponent& e = exponents_[j];
  double v = 0.0;
  int total = 0;
  for (int i = 0; i < n_; ++i) {
    if (e[i] != 0) v += e[i] * p.log_p[i + 1];
    total += e[i];
  }
  if (degree() != total) v += (degree() - total) * p.log_p[0];
  return v;
}

std::string SectionBasis::label(std::size_t j) const {
  std::ostringstream os;
  os << "z^(";
  for (int i = 0; i < n_; ++i) os << (i ? "," : "") << exponents_[j][i];
  os << ")";
  return os.str();
}

double MonomialGram::condition() const {
  const auto [lo, hi] = std::minmax_element(log_entries.begin(), log_entries.end());
  return std::exp(*hi - *lo);
}

MonomialGram monomial_section_norms(const ToricFanoModel& model, const SectionBasis& basis,
                                    const InvariantPotential* phi, int level) {
  const int n = model.dim();
  if (basis.dim() != n) throw InvalidArgument("section basis dimension does not match the model");
  const int m = basis.power();
  const auto& nodes = model.nodes(level);
  const double log_nfact = std::log(toric::factorial(n));
  // Per node: log of the measure n! det D²(F+χ+φ) weight_t, minus mχ and mφ.
  std::vector<double> base(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const auto& node = nodes[q];
    const toric::Jet ref = model.reference_jet(node.pt);
    Mat h = ref.hess;
    double shift = -m * ref.value + m * ToricFanoModel::fubini_study_jet(node.pt).value;  // -mχ
    if (phi) {
      const toric::Jet j = phi->jet(node.pt);
      h += j.hess;
      shift -= m * j.value;
    }
    double log_det = 0.0;
    if (!phi && model.is_fubini_study()) {
      log_det = toric::log_det_fubini_study_hessian(node.pt);
    } else {
      const double det = toric::small_det(h);
      if (!(det > 0.0)) throw NotKahler("weight potential is not Kähler at a quadrature node");
      log_det = std::log(det);
    }
    base[q] = std::log(node.weight_t) + log_nfact + log_det + shift;
  }
  MonomialGram g;
  g.log_entries.resize(basis.size());
  std::vector<double> terms(nodes.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t q = 0; q < nodes.size(); ++q) terms[q] = base[q] + basis.log_norm_fs(j, nodes[q].pt);
    g.log_entries[j] = log_sum_exp(terms);
    if (!std::isfinite(g.log_entries[j])) throw QuadratureError("non-finite Gram entry for " + basis.label(j));
  }
  const double cond = g.condition();
  if (cond > kMaxCondition) throw IllConditioned("monomial Gram matrix is ill-conditioned", cond);
  return g;
}

MonomialGram fubini_study_gram(const SectionBasis& basis) {
  const int n = basis.dim();
  const int d = basis.degree();
  const double common = n * std::log(kTwoPi) + std::lgamma(n + 1.0) + n * std::log(n + 1.0) - std::lgamma(d + n + 1.0);
  MonomialGram g;
  for (const auto& e : basis.exponents()) {
    int total = 0;
    double v = common;
    for (int i = 0; i < n; ++i) {
      v += std::lgamma(e[i] + 1.0);
      total += e[i];
    }
    g.log_entries.push_back(v + std::lgamma(d - total + 1.0));
  }
  return g;
}

SectionSubspace::SectionSubspace(const SectionBasis& basis, Eigen::MatrixXcd coefficients, std::string label)
    : coefficients_(std::move(coefficients)), label_(std::move(label)) {
  if (coefficients_.rows() != static_cast<Eigen::Index>(basis.size()) || coefficients_.cols() < 1)
    throw InvalidArgument("subspace coefficients must be N x k with k >= 1");
  if (label_.empty()) label_ = "subspace(k=" + std::to_string(coefficients_.cols()) + ")";
  // A basis supported on exactly k monomials spans that monomial subspace.
  std::vector<std::size_t> rows;
  for (Eigen::Index j = 0; j < coefficients_.rows(); ++j)
    if (coefficients_.row(j).norm() > 0.0) rows.push_back(static_cast<std::size_t>(j));
  if (static_cast<Eigen::Index>(rows.size()) == coefficients_.cols()) {
    Eigen::MatrixXcd square(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) square.row(r) = coefficients_.row(rows[r]);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(square);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-12 * sv(0)) monomial_indices_ = std::move(rows);
  }
}

SectionSubspace SectionSubspace::monomials(const SectionBasis& basis, std::vector<std::size_t> indices) {
  if (indices.empty()) throw InvalidArgument("monomial subspace needs at least one monomial");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw InvalidArgument("repeated monomial: subspace would be rank-deficient");
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(basis.size(), indices.size());
  std::string label = "span{";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= basis.size()) throw InvalidArgument("monomial index out of range");
    c(indices[i], i) = 1.0;
    label += (i ? "," : "") + basis.label(indices[i]);
  }
  SectionSubspace v(basis, std::move(c), label + "}");
  v.monomial_indices_ = std::move(indices);
  return v;
}

SectionSubspace SectionSubspace::full(const SectionBasis& basis) {
  std::vector<std::size_t> all(basis.size());
  std::iota(all.begin(), all.end(), 0);
  auto v = monomials(basis, std::move(all));
  v.label_ = "H0";
  return v;
}

BergmanKernel::BergmanKernel(const ToricFanoModel& model, const SectionBasis& basis, const SectionSubspace& subspace,
                             const MonomialGram& gram)
    : n_(basis.dim()), m_(basis.power()), k_(subspace.dim()), invariant_(subspace.is_monomial()),
      chi_(model.perturbation()) {
  if (model.dim() != n_) throw InvalidArgument("section basis dimension does not match the model");
  if (gram.log_entries.size() != basis.size()) throw InvalidArgument("Gram size does not match the basis");
  if (invariant_) {
    for (std::size_t j : subspace.monomial_indices()) {
      exponents_.push_back(basis.exponents()[j]);
      log_weights_.push_back(-gram.log_entries[j]);
    }
    return;
  }
  const Eigen::MatrixXcd& c = subspace.coefficients();
  std::vector<std::size_t> rows;
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    if (c.row(j).norm() > 0.0) rows.push_back(static_cast<std::size_t>(j));
  // Scale to unit-norm monomials, then QR: V's orthonormal basis is Q in those coordinates.
  Eigen::MatrixXcd scaled(rows.size(), c.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    scaled.row(r) = c.row(rows[r]) * std::exp(0.5 * gram.log_entries[rows[r]]);
    exponents_.push_back(basis.exponents()[rows[r]]);
    log_weights_.push_back(-gram.log_entries[rows[r]]);
  }
  if (static_cast<Eigen::Index>(rows.size()) < c.cols()) throw InvalidArgument("subspace is rank-deficient");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(scaled);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(c.cols()).triangularView<Eigen::Upper>();
  double rmax = 0.0, rmin = INFINITY;
  for (Eigen::Index i = 0; i < c.cols(); ++i) {
    rmax = std::max(rmax, std::abs(r(i, i)));
    rmin = std::min(rmin, std::abs(r(i, i)));
  }
  if (!(rmin > 1e-10 * rmax)) throw InvalidArgument("subspace is rank-deficient");
  orthonormal_ = qr.householderQ() * Eigen::MatrixXcd::Identity(rows.size(), c.cols());
}

double BergmanKernel::log_value(const Point& p, std::span<const double> theta) const {
  const int d = m_ * (n_ + 1);
  thread_local std::vector<double> logs;
  logs.resize(exponents_.size());
  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    const auto& e = exponents_[a];
    double v = log_weights_[a];
    int total = 0;
    for (int i = 0; i < n_; ++i) {
      if (e[i] != 0) v += e[i] * p.log_p[i + 1];
      total += e[i];
    }
    if (d != total) v += (d - total) * p.log_p[0];
    logs[a] = v;
  }
  double chi = 0.0;
  if (chi_) chi = m_ * chi_->value(p);
  if (invariant_) return log_sum_exp(logs) - chi;
  if (static_cast<int>(theta.size()) != n_) throw InvalidArgument("non-invariant kernel needs angles");
  const double top = *std::max_element(logs.begin(), logs.end());
  thread_local std::vector<std::complex<double>> u;
  u.resize(exponents_.size());
  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) phase += exponents_[a][i] * theta[i];
    u[a] = std::polar(std::exp(0.5 * (logs[a] - top)), phase);
  }
  double sq = 0.0;
  for (Eigen::Index c = 0; c < orthonormal_.cols(); ++c) {
    std::complex<double> acc = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a) acc += orthonormal_(static_cast<Eigen::Index>(a), c) * u[a];
    sq += std::norm(acc);
  }
  return top + std::log(sq) - chi;
}

void BergmanKernel::log_values(const Point& p, std::span<const std::complex<double>> phases,
                               std::span<double> out) const {
  const std::size_t rows = exponents_.size();
  if (phases.size() != rows * out.size()) throw InvalidArgument("phase table does not match the output size");
  if (invariant_) {
    std::fill(out.begin(), out.end(), log_value(p));
    return;
  }
  const int d = m_ * (n_ + 1);
  thread_local std::vector<double> logs;
  thread_local std::vector<std::complex<double>> mag;
  logs.resize(rows);
  mag.resize(rows * orthonormal_.cols());
  for (std::size_t a = 0; a < rows; ++a) {
    const auto& e = exponents_[a];
    double v = log_weights_[a];
    int total = 0;
    for (int i = 0; i < n_; ++i) {
      if (e[i] != 0) v += e[i] * p.log_p[i + 1];
      total += e[i];
    }
    if (d != total) v += (d - total) * p.log_p[0];
    logs[a] = v;
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  for (std::size_t a = 0; a < rows; ++a) {
    const double r = std::exp(0.5 * (logs[a] - top));
    for (Eigen::Index c = 0; c < orthonormal_.cols(); ++c)
      mag[c * rows + a] = orthonormal_(static_cast<Eigen::Index>(a), c) * r;
  }
  const double chi = chi_ ? m_ * chi_->value(p) : 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const std::complex<double>* ph = phases.data() + t * rows;
    double sq = 0.0;
    for (Eigen::Index c = 0; c < orthonormal_.cols(); ++c) {
      std::complex<double> acc = 0.0;
      const std::complex<double>* col = mag.data() + c * rows;
      for (std::size_t a = 0; a < rows; ++a) acc += col[a] * ph[a];
      sq += std::norm(acc);
    }
    out[t] = top + std::log(sq) - chi;
  }
}

double BergmanKernel::value(const Point& p, std::span<const double> theta) const {
  return std::exp(log_value(p, theta));
}

PotentialPtr BergmanKernel::potential() const {
  if (!invariant_) throw InvalidArgument("only torus-invariant kernels define invariant potentials");
  PotentialPtr lse = std::make_shared<toric::LogSumExpPotential>(n_, 1.0 / m_, m_ * (n_ + 1), exponents_,
                                                                  log_weights_, "log_rho/m");
  if (!chi_) return lse;
  return std::make_shared<toric::SumPotential>(lse, std::make_shared<toric::AffinePotential>(chi_, -1.0, 0.0));
}

BergmanKernel bergman_kernel(const ToricFanoModel& model, const SectionBasis& basis, const SectionSubspace& subspace,
                             const MonomialGram& gram) {
  return BergmanKernel(model, basis, subspace, gram);
}

double kernel_mass(const ToricFanoModel& model, const BergmanKernel& kernel, int angles, int level) {
  const int n = model.dim();
  const double nf = toric::factorial(n);
  const auto density = [&](const Point& p) { return nf * toric::small_det(model.reference_jet(p).hess); };
  if (kernel.invariant())
    return model.integrate_invariant([&](const Point& p) { return kernel.value(p) * density(p); }, level);
  const auto& ex = kernel.exponents();
  int top = 0;
  for (const auto& j : ex)
    for (int i = 0; i < n; ++i) top = std::max(top, j[i]);
  if (angles <= 0) angles = top + 1;
  if (angles <= top) throw InvalidArgument("angular grid too coarse for the kernel's exponents");
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(angles);
  const std::size_t rows = ex.size();
  std::vector<std::complex<double>> phases(total * rows);
  for (std::size_t a = 0; a < total; ++a) {
    std::size_t rem = a;
    std::array<double, 3> th{};
    for (int i = 0; i < n; ++i) {
      th[i] = 2.0 * std::numbers::pi * static_cast<double>(rem % angles) / angles;
      rem /= angles;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double arg = 0.0;
      for (int i = 0; i < n; ++i) arg += ex[r][i] * th[i];
      phases[a * rows + r] = std::polar(1.0, arg);
    }
  }
  std::vector<double> out(total);
  return model.integrate_invariant(
      [&](const Point& p) {
        kernel.log_values(p, phases, out);
        double s = 0.0;
        for (double v : out) s += std::exp(v);
        return s / static_cast<double>(total) * density(p);
      },
      level);
}

InnerProductMatrix::InnerProductMatrix(Eigen::MatrixXcd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) throw InvalidArgument("inner product must be square");
  if ((a_ - a_.adjoint()).norm() > 1e-12 * a_.norm()) throw InvalidArgument("inner product must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a_);
  const Eigen::VectorXd nu = es.eigenvalues();
  if (!(nu.minCoeff() > 0.0)) throw InvalidArgument("inner product must be positive definite");
  const Eigen::MatrixXcd back = es.eigenvectors() * nu.cast<std::complex<double>>().asDiagonal() *
                                es.eigenvectors().adjoint();
  reconstruction_error_ = (back - a_).cwiseAbs().maxCoeff() / a_.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < nu.size(); ++i) mu_.push_back(1.0 / nu(i));
  std::sort(mu_.begin(), mu_.end(), std::greater<>());
}

InnerProductMatrix InnerProductMatrix::diagonal(const std::vector<double>& entries) {
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(entries.data(), static_cast<Eigen::Index>(entries.size()));
  return InnerProductMatrix(d.cast<std::complex<double>>().asDiagonal());
}

InnerProductMatrix InnerProductMatrix::reference(std::size_t n) {
  return InnerProductMatrix(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

bool InnerProductMatrix::is_diagonal(double tol) const {
  Eigen::MatrixXcd off = a_;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= tol * a_.diagonal().cwiseAbs().maxCoeff();
}

double BergmanPotential::log_mu_ratio(int k) const {
  if (k < 1 || k > static_cast<int>(log_mu.size())) throw InvalidArgument("eigenvalue index out of range");
  return log_mu.front() - log_mu[k - 1];
}

BergmanPotential bergman_potential_log(const ToricFanoModel& model, const SectionBasis& basis,
                                       const std::vector<double>& log_entries) {
  if (log_entries.size() != basis.size()) throw InvalidArgument("inner product size does not match the section basis");
  for (double v : log_entries)
    if (!std::isfinite(v)) throw InvalidArgument("inner product entries must be positive and finite");
  const MonomialGram ref = monomial_section_norms(model, basis);
  BergmanPotential out;
  out.power = basis.power();
  out.exponents = basis.exponents();
  out.log_coefficients.resize(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) out.log_coefficients[j] = -log_entries[j] - ref.log_entries[j];
  out.psi_over_m = minus_chi(model, std::make_shared<toric::LogSumExpPotential>(
                                        model.dim(), 1.0 / out.power, basis.degree(), basis.exponents(),
                                        out.log_coefficients, "psi_a/m"));
  for (double v : log_entries) out.log_mu.push_back(-v);
  std::sort(out.log_mu.begin(), out.log_mu.end(), std::greater<>());
  for (double v : out.log_mu) out.mu.push_back(std::exp(v));
  return out;
}

BergmanPotential bergman_potential(const ToricFanoModel& model, const SectionBasis& basis,
                                   const InnerProductMatrix& a) {
  if (a.matrix().rows() != static_cast<Eigen::Index>(basis.size()))
    throw InvalidArgument("inner product size does not match the section basis");
  if (!a.is_diagonal()) throw InvalidArgument("only torus-equivariant (diagonal) inner products are supported");
  std::vector<double> logs(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) logs[j] = std::log(a.matrix()(j, j).real());
  BergmanPotential out = bergman_potential_log(model, basis, logs);
  out.mu = a.mu();
  // Positivity of ω_a at the nodes; throws NotKahler otherwise.
  (void)functionals::sample(model, *out.psi_over_m);
  return out;
}

namespace {

// n! det D²(F + χ + ψ/m) = n! det(Cov_w(J)/m), w_J ∝ e^{c_J + <J,t>}, as a weighted sum of
// outer products of exact exponent differences so it stays nonnegative and accurate where
// ω_ψ ≪ ω.
double bergman_density(const BergmanPotential& psi, const Point& p) {
  const int n = p.n;
  const std::size_t count = psi.exponents.size();
  const int degree = psi.power * (n + 1);
  thread_local std::vector<double> w;
  w.resize(count);
  double top = -INFINITY;
  for (std::size_t a = 0; a < count; ++a) {
    int total = 0;
    double v = psi.log_coefficients[a];
    for (int i = 0; i < n; ++i) {
      v += psi.exponents[a][i] * p.log_p[i + 1];
      total += psi.exponents[a][i];
    }
    w[a] = v + (degree - total) * p.log_p[0];
    top = std::max(top, w[a]);
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < count; ++a) sum += (w[a] = std::exp(w[a] - top));
  for (double& v : w) v /= sum;
  Mat cov = Mat::Zero(n, n);
  for (std::size_t a = 0; a < count; ++a) {
    Vec dev = Vec::Zero(n);
    for (std::size_t c = 0; c < count; ++c)
      for (int i = 0; i < n; ++i) dev(i) += w[c] * (psi.exponents[a][i] - psi.exponents[c][i]);
    cov += w[a] * dev * dev.transpose();
  }
  return toric::factorial(n) * toric::small_det(Mat(cov / psi.power));
}

}  // namespace

double bergman_I(const ToricFanoModel& model, const BergmanPotential& psi, int m, int level) {
  const int n = model.dim();
  const double nf = toric::factorial(n);
  double vol = 0.0, ref_term = 0.0, mass = 0.0, psi_term = 0.0;
  for (const auto& q : model.nodes(level)) {
    const double phi = psi.psi_over_m->value(q.pt);
    const double w = q.weight_t * nf * toric::small_det(model.reference_jet(q.pt).hess);
    const double wp = q.weight_t * bergman_density(psi, q.pt);
    vol += w;
    ref_term += w * phi;
    mass += wp;
    psi_term += wp * phi;
  }
  // ω_ψ and ω are cohomologous; a mass defect means the rule does not reach where ω_ψ lives.
  if (!(std::abs(mass / vol - 1.0) <= 1e-8))
    throw QuadratureError("quadrature resolves only a fraction " + std::to_string(mass / vol) + " of the ω_ψ mass");
  return m * (ref_term / vol - psi_term / mass);
}

ApproximationResult bergman_approximation(const ToricFanoModel& model, int m, const InvariantPotential& phi,
                                          int level) {
  const SectionBasis basis(model.dim(), m);
  const MonomialGram ref = monomial_section_norms(model, basis, nullptr, level);
  const MonomialGram weighted = monomial_section_norms(model, basis, &phi, level);
  const std::size_t n_sec = basis.size();
  std::vector<double> log_ratio(n_sec);  // log(D_J / G_J)
  for (std::size_t j = 0; j < n_sec; ++j) log_ratio[j] = ref.log_entries[j] - weighted.log_entries[j];
  const auto [lo, hi] = std::minmax_element(log_ratio.begin(), log_ratio.end());
  ApproximationResult out;
  out.m = m;
  out.condition = std::exp(*hi - *lo);
  if (out.condition > kMaxCondition)
    throw IllConditioned("weighted Gram is ill-conditioned against the reference", out.condition);
  out.order.resize(n_sec);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return log_ratio[a] > log_ratio[b]; });
  std::vector<double> logc(n_sec);
  for (std::size_t j = 0; j < n_sec; ++j) logc[j] = log_ratio[j] - *hi - ref.log_entries[j];
  for (std::size_t j : out.order) out.lambda.push_back(std::exp(log_ratio[j] - *hi));
  out.psi = minus_chi(model, std::make_shared<toric::LogSumExpPotential>(model.dim(), 1.0 / m, basis.degree(),
                                                                          basis.exponents(), logc, "bergman_approx"));
  const auto& nodes = model.nodes(level);
  std::vector<double> phi_v(nodes.size()), psi_v(nodes.size());
  double sup = -INFINITY;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    phi_v[q] = phi.value(nodes[q].pt);
    psi_v[q] = out.psi->value(nodes[q].pt);
    sup = std::max(sup, phi_v[q]);
  }
  for (std::size_t q = 0; q < nodes.size(); ++q) out.gap = std::max(out.gap, std::abs(phi_v[q] - sup - psi_v[q]));
  return out;
}

ProbeResult eigenvalue_control_probe(const ToricFanoModel& model, int m, int k,
                                     const std::vector<std::vector<double>>& sigmas,
                                     const std::vector<double>& s_grid, double test_lambda, double test_c,
                                     int level) {
  const SectionBasis basis(model.dim(), m);
  if (k < 2 || k > static_cast<int>(basis.size())) throw InvalidArgument("probe needs 2 <= k <= N");
  if (s_grid.empty()) throw InvalidArgument("probe needs a non-empty s grid");
  // Far along a ray ω_ψ lives where two monomial weights cross, at |t| up to s·spread, i.e.
  // p ~ e^{-s·spread}; grade the rule that deep, with cells fine enough for crossings of
  // widely separated exponents. For n ≥ 2 the depth is capped to bound the
  // node count and bergman_I reports an unresolved ω_ψ mass.
  double spread = 0.0, s_max = 0.0;
  for (const auto& sig : sigmas) {
    if (sig.size() != basis.size()) throw InvalidArgument("ray exponent vector must have size N");
    const auto [lo, hi] = std::minmax_element(sig.begin(), sig.end());
    spread = std::max(spread, *hi - *lo);
  }
  for (double s : s_grid) s_max = std::max(s_max, std::abs(s));
  const ToricFanoModel graded =
      model.quadrature().graded_depth > 0
          ? model
          : model.with_quadrature({0, std::clamp(static_cast<int>(std::ceil(s_max * spread / std::log(2.0))) + 14, 16, model.dim() == 1 ? 600 : 16),
                                   model.dim() == 1 ? 16 : 6});
  ProbeResult out;
  out.m = m;
  out.k = k;
  for (std::size_t r = 0; r < sigmas.size(); ++r) {
    std::vector<double> log_entries(basis.size());
    for (double s : s_grid) {
      for (std::size_t j = 0; j < basis.size(); ++j) log_entries[j] = s * sigmas[r][j];
      const BergmanPotential psi = bergman_potential_log(graded, basis, log_entries);
      out.samples.push_back({r, s, psi.log_mu_ratio(k), bergman_I(graded, psi, m, level)});
    }
    const std::size_t last = out.samples.size() - 1;
    double slope = NAN;
    if (s_grid.size() >= 2) {
      const double di = out.samples[last].I - out.samples[last - 1].I;
      if (di > 1e-12) slope = (out.samples[last].log_ratio - out.samples[last - 1].log_ratio) / di;
    }
    out.ray_slopes.push_back(slope);
  }
  out.fitted_lambda = 0.0;
  for (double s : out.ray_slopes)
    if (std::isfinite(s)) out.fitted_lambda = std::max(out.fitted_lambda, s);
  out.fitted_c = -INFINITY;
  for (const auto& smp : out.samples) out.fitted_c = std::max(out.fitted_c, smp.log_ratio - out.fitted_lambda * smp.I);
  if (std::isfinite(test_lambda)) {
    const double c = std::isfinite(test_c) ? test_c : 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      if (out.samples[i].log_ratio > test_lambda * out.samples[i].I + c) out.violations.push_back(i);
  }
  return out;
}

std::vector<std::vector<double>> default_probe_rays(const SectionBasis& basis, int random, unsigned seed) {
  std::vector<std::vector<double>> rays;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    std::vector<double> s(basis.size(), 0.0);
    s[j] = -1.0;
    rays.push_back(std::move(s));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int r = 0; r < random; ++r) {
    std::vector<double> s(basis.size());
    for (double& v : s) v = g(rng);
    rays.push_back(std::move(s));
  }
  return rays;
}

}  // namespace kahlerlab::bergman
