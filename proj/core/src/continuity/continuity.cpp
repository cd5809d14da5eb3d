#include "kahlerlab/continuity/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/mixed_det.hpp"
#include "kahlerlab/toric/quadrature.hpp"

namespace kahlerlab::continuity {

using toric::factorial;
using toric::small_det;

namespace {

double log_det_reference(const ToricFanoModel& model, const Point& p) {
  const Mat h = model.reference_jet(p).hess;
  const double d = small_det(h);
  if (!(d > 0.0)) throw NotKahler("reference potential is not Kähler at a node");
  return std::log(d);
}

double node_chi(const ToricFanoModel& model, const Point& p) { return model.perturbation_value(p); }

int default_degree(int n) { return n == 1 ? 40 : 30; }

// ψ − χ as a potential relative to the reference.
class DifferencePotential final : public InvariantPotential {
 public:
  DifferencePotential(PotentialPtr psi, PotentialPtr chi) : psi_(std::move(psi)), chi_(std::move(chi)) {}
  toric::Jet jet(const Point& p) const override {
    toric::Jet j = psi_->jet(p);
    if (chi_) {
      const toric::Jet c = chi_->jet(p);
      j.value -= c.value;
      j.grad -= c.grad;
      j.hess -= c.hess;
    }
    return j;
  }
  std::string label() const override { return "phi"; }

 private:
  PotentialPtr psi_, chi_;
};

Mat accurate_a(const Point& pt, const Vec& p) {
  const int n = pt.n;
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
  return a;
}

// φ at collapsed coordinates a (p_1 = a_1, p_2 = (1 − a_1) a_2).
double value_at_collapsed(const InvariantPotential& phi, int n, const std::array<double, 2>& a) {
  const double one[2] = {1.0 - a[0], 1.0 - a[1]};
  return phi.value(toric::point_from_collapsed(n, {a.data(), std::size_t(n)}, {one, std::size_t(n)}));
}

struct Layout {
  bool bordered = false;  // t = 0: constant column replaced by κ
  int unknowns = 0;
};

}  // namespace

double RicciPotentialData::value(const Point& p) const {
  if (model_.is_fubini_study()) return constant_;
  return -log_det_reference(model_, p) + toric::log_det_fubini_study_hessian(p) - node_chi(model_, p) + constant_;
}

double RicciPotentialData::sup_abs(int level) const {
  double m = 0.0;
  for (const auto& q : model_.nodes(level)) m = std::max(m, std::abs(value(q.pt)));
  return m;
}

RicciPotentialData ricci_potential(const ToricFanoModel& model, int level) {
  RicciPotentialData d(model);
  const int n = model.dim();
  const double scale = factorial(n) * std::pow(kTwoPi, n);
  d.volume_ = model.analytic_volume();
  double z = 0.0;
  for (const auto& q : model.nodes(level)) {
    log_det_reference(model, q.pt);
    z += q.weight_x * std::exp(-node_chi(model, q.pt));
  }
  z *= scale;
  d.constant_ = std::log(d.volume_ / z);
  // Check ∮e^f ω^n = V on a finer rule: e^f ω^n = e^{c−χ} ω_FS^n.
  double check = 0.0;
  for (const auto& q : model.nodes(level + 1)) check += q.weight_x * std::exp(d.constant_ - node_chi(model, q.pt));
  d.normalization_residual_ = std::abs(check * scale - d.volume_) / d.volume_;
  return d;
}

double ricci_identity_residual(const RicciPotentialData& data, double h) {
  const ToricFanoModel& model = data.model();
  const int n = model.dim();
  auto at = [&](const std::array<double, 3>& t) { return toric::point_from_log_coordinates(n, {t.data(), std::size_t(n)}); };
  auto f = [&](const std::array<double, 3>& t) { return data.value(at(t)); };
  auto l = [&](const std::array<double, 3>& t) { return log_det_reference(model, at(t)); };
  auto hessian = [&](auto&& g, const std::array<double, 3>& t) {
    Mat out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto shift = [&](double di, double dj) {
          auto u = t;
          u[i] += di;
          u[j] += dj;
          return g(u);
        };
        out(i, j) = (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) / (4 * h * h);
      }
    return out;
  };
  double worst = 0.0;
  const std::vector<double> grid{-3.0, -1.0, 0.5, 2.0};
  std::array<double, 3> t{0, 0, 0};
  const int count = n == 1 ? 4 : 16;
  for (int idx = 0; idx < count; ++idx) {
    t[0] = grid[idx % 4];
    if (n == 2) t[1] = grid[idx / 4];
    const Mat r = hessian(f, t) + hessian(l, t) + model.reference_jet(at(t)).hess;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

Discretization::Discretization(const RicciPotentialData& data, const SolverOptions& options)
    : data_(&data), options_(options) {
  const int n = data.model().dim();
  if (n < 1 || n > 2) throw InvalidArgument("the Monge-Ampère solver supports n = 1 or 2");
  const int degree = options.degree > 0 ? options.degree : default_degree(n);
  options_.degree = degree;
  basis_ = std::make_shared<SimplexBasis>(n, degree);
  const int per_axis = n == 1 ? degree + 1 : degree + 2;
  const auto axis = toric::gauss_legendre_unit(per_axis);
  const auto nodes = toric::collapsed_tensor_nodes(n, std::vector<std::vector<toric::AxisNode>>(n, axis));
  const int nb = basis_->size();
  const int nn = static_cast<int>(nodes.size());
  value_.resize(nn, nb);
  grad_.assign(n, Eigen::MatrixXd(nn, nb));
  hess_.assign(n == 1 ? 1 : 3, Eigen::MatrixXd(nn, nb));
  Eigen::VectorXd v(nb);
  Eigen::MatrixXd g(n, nb), h(n == 1 ? 1 : 3, nb);
  for (int j = 0; j < nn; ++j) {
    const Point& pt = nodes[j].pt;
    points_.push_back(pt);
    p_.push_back(barycentric(pt));
    const double chi = node_chi(data.model(), pt);
    chi_.push_back(chi);
    weight_.push_back(nodes[j].weight_x * std::exp(-chi));
    basis_->evaluate(p_.back(), v, g, h);
    value_.row(j) = v.transpose();
    for (int i = 0; i < n; ++i) grad_[i].row(j) = g.row(i);
    for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i].row(j) = h.row(static_cast<Eigen::Index>(i));
  }
}

namespace {

// Residual vector and (optionally) Jacobian of log det K − c − κ + (1−t)χ + tψ at all nodes.
// Returns false if the Kähler condition fails at some node.
bool evaluate(const Discretization& d, const std::vector<Point>& pts, const std::vector<Vec>& ps,
              const std::vector<double>& chi, const Eigen::MatrixXd& val, const std::vector<Eigen::MatrixXd>& grad,
              const std::vector<Eigen::MatrixXd>& hess, const Eigen::VectorXd& c, double kappa, double t,
              const Layout& layout, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  const int n = d.basis().dim();
  const int nn = static_cast<int>(pts.size());
  const int nb = d.basis().size();
  const double c0 = d.data().constant();
  const Eigen::VectorXd psi = val * c;
  std::vector<Eigen::VectorXd> g(n), h(hess.size());
  for (int i = 0; i < n; ++i) g[i] = grad[i] * c;
  for (std::size_t i = 0; i < hess.size(); ++i) h[i] = hess[i] * c;
  r.resize(nn);
  if (jac) jac->resize(nn, layout.unknowns);
  for (int j = 0; j < nn; ++j) {
    const Vec& p = ps[j];
    const Mat a = accurate_a(pts[j], p);
    Vec gj(n);
    Mat hj(n, n);
    for (int i = 0; i < n; ++i) gj(i) = g[i](j);
    if (n == 1) {
      hj(0, 0) = h[0](j);
    } else {
      hj << h[0](j), h[1](j), h[1](j), h[2](j);
    }
    const double s = p.dot(gj);
    Mat gamma = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) gamma(i, i) = gj(i) - s;
    const Mat k = Mat::Identity(n, n) + (a * hj + gamma - p * gj.transpose()) / (n + 1.0);
    // Kähler: D²_t(F + ψ) = (n+1)A + AHA + ΓA − ppᵀΓ positive definite.
    const Mat m = (n + 1.0) * a + a * hj * a + gamma * a - p * p.transpose() * gamma;
    Eigen::LLT<Mat> llt(Mat(0.5 * (m + m.transpose())));
    const double det = small_det(k);
    if (llt.info() != Eigen::Success || !(det > 0.0)) return false;
    r(j) = std::log(det) - c0 - kappa + (1.0 - t) * chi[j] + t * psi(j);
    if (!jac) continue;
    const Mat w = k.inverse() / (n + 1.0);
    const Mat wa = w * a;
    const Vec wp = w * p;
    const double trw = w.trace();
    Eigen::RowVectorXd row = t * val.row(j);
    for (int i = 0; i < n; ++i) row += (w(i, i) - p(i) * trw - wp(i)) * grad[i].row(j);
    if (n == 1) {
      row += wa(0, 0) * hess[0].row(j);
    } else {
      row += wa(0, 0) * hess[0].row(j) + (wa(0, 1) + wa(1, 0)) * hess[1].row(j) + wa(1, 1) * hess[2].row(j);
    }
    if (layout.bordered) {
      int col = 0;
      for (int b = 0; b < nb; ++b)
        if (b != d.basis().constant_index()) (*jac)(j, col++) = row(b);
      (*jac)(j, col) = -1.0;
    } else {
      jac->row(j) = row;
    }
  }
  return true;
}

}  // namespace

MASolution solve_ma(const Discretization& d, double t, const MASolution* guess) {
  if (!(t >= 0.0 && t < 1.0)) throw InvalidArgument("t must lie in [0, 1)");
  const int nb = d.basis().size();
  const int nn = d.nodes();
  const bool square = d.basis().dim() == 1;
  Layout layout;
  layout.bordered = t == 0.0;
  layout.unknowns = nb;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nb);
  if (guess && guess->psi && guess->psi->coefficients().size() == nb) c = guess->psi->coefficients();
  double kappa = 0.0;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  const auto eval = [&](const Eigen::VectorXd& cc, double kk, Eigen::VectorXd& rr, Eigen::MatrixXd* jj) {
    return evaluate(d, d.points_, d.p_, d.chi_, d.value_, d.grad_, d.hess_, cc, kk, t, layout, rr, jj);
  };
  if (!eval(c, kappa, r, &jac)) throw NotKahler("initial guess is not Kähler at a collocation node");
  MASolution sol;
  sol.t = t;
  const double tol = d.options().tolerance;
  int it = 0;
  for (; it < d.options().max_iterations; ++it) {
    if (r.cwiseAbs().maxCoeff() <= 0.1 * tol) break;
    const Eigen::VectorXd step = square ? Eigen::VectorXd(jac.partialPivLu().solve(-r))
                                        : Eigen::VectorXd(jac.colPivHouseholderQr().solve(-r));
    if (!step.allFinite()) throw Error("Newton step is not finite at t = " + std::to_string(t));
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(nb);
    double dk = 0.0;
    if (layout.bordered) {
      int col = 0;
      for (int b = 0; b < nb; ++b)
        if (b != d.basis().constant_index()) dc(b) = step(col++);
      dk = step(col);
    } else {
      dc = step;
    }
    const double rnorm = r.norm();
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd rn;
    for (int ls = 0; ls < 12; ++ls, lambda *= 0.5) {
      if (eval(c + lambda * dc, kappa + lambda * dk, rn, nullptr) && rn.norm() < (1.0 - 1e-4 * lambda) * rnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no further descent: residual floor reached (checked below)
    c += lambda * dc;
    kappa += lambda * dk;
    eval(c, kappa, r, &jac);
  }
  const double rmax = r.cwiseAbs().maxCoeff();
  if (!(rmax <= tol))
    throw Error("Newton did not converge at t = " + std::to_string(t) + " (residual " + [&] { char b[32]; std::snprintf(b, sizeof b, "%.3e", rmax); return std::string(b); }() + ")");
  if (layout.bordered) {
    // ∮φ e^f ω^n = 0 with e^f ω^n ∝ e^{−χ} dx: shift the constant coefficient.
    const Eigen::VectorXd psi = d.value_ * c;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < nn; ++j) {
      num += d.weight_[j] * (psi(j) - d.chi_[j]);
      den += d.weight_[j];
    }
    c(d.basis().constant_index()) -= num / den;
  }
  sol.iterations = it;
  sol.compatibility = kappa;
  sol.residual = 0.0;
  for (int j = 0; j < nn; ++j) sol.residual = std::max(sol.residual, std::abs(std::expm1(r(j))));
  sol.psi = std::make_shared<SimplexPolynomialPotential>(d.basis_ptr(), c, "psi");
  sol.phi = std::make_shared<DifferencePotential>(sol.psi, d.data().model().perturbation());
  return sol;
}

ContinuityState make_state(const RicciPotentialData& data, const MASolution& sol, int m, int level) {
  const ToricFanoModel& model = data.model();
  const int n = model.dim();
  ContinuityState s;
  s.t = sol.t;
  s.solution = sol;
  s.newton_residual = sol.residual;
  const auto sp = functionals::sample(model, *sol.phi, level);
  s.sup_phi = polished_sup(*sol.phi, model.nodes(level), sp);
  s.mean_self = sp.mean_against_self();
  s.mean_reference = sp.mean_against_reference();
  for (int k = 2; k <= n + 1; ++k) s.Ik.push_back(functionals::energy_Ik(sp, k));
  const auto ij = functionals::aubin_I_J(sp);
  s.I = ij.I;
  s.J = ij.J;
  const double nf = factorial(n);
  double total = 0.0, worst = 0.0;
  const auto& nodes = model.nodes(level);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& f = sp.samples[i];
    const double lhs = std::exp(sol.t * f.phi) * small_det(Mat(f.ref + f.hess));
    total += f.weight * nf * lhs;
    const double rhs = std::exp(data.value(nodes[i].pt)) * small_det(f.ref);
    worst = std::max(worst, std::abs(lhs / rhs - 1.0));
  }
  s.normalization_residual = std::abs(total - data.volume()) / data.volume();
  s.pointwise_residual = worst;
  if (m > 0) {
    const ToricFanoModel metric(n, sol.psi, model.quadrature());
    const bergman::SectionBasis basis(n, m);
    const auto gram = bergman::monomial_section_norms(metric, basis, nullptr, level);
    const bergman::BergmanKernel kernel(metric, basis, bergman::SectionSubspace::full(basis), gram);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& q : metric.nodes(level)) lo = std::min(lo, kernel.log_value(q.pt));
    s.min_rho = std::exp(lo);
  }
  return s;
}

double polished_sup(const InvariantPotential& phi, const std::vector<toric::QuadNode>& nodes,
                    const functionals::SampledPotential& sampled) {
  const int n = sampled.n;
  std::size_t best = 0;
  for (std::size_t i = 1; i < sampled.samples.size(); ++i)
    if (sampled.samples[i].phi > sampled.samples[best].phi) best = i;
  const Point& pt = nodes[best].pt;
  std::array<double, 2> a{pt.p(1), 0.0};
  if (n == 2) a[1] = pt.p(2) / (pt.p(0) + pt.p(2));
  double value = sampled.samples[best].phi;
  constexpr double kEdge = 1e-13;
  // Coordinate ascent by Brent's method on shrinking windows around the best node.
  double width = 4.0 / std::sqrt(static_cast<double>(nodes.size()));
  for (int sweep = 0; sweep < (n == 1 ? 1 : 8); ++sweep, width *= 0.5) {
    for (int axis = 0; axis < n; ++axis) {
      const double lo = std::max(kEdge, a[axis] - width), hi = std::min(1.0 - kEdge, a[axis] + width);
      auto neg = [&](double x) {
        auto b = a;
        b[axis] = x;
        return -value_at_collapsed(phi, n, b);
      };
      const auto [x, v] = boost::math::tools::brent_find_minima(neg, lo, hi, 50);
      if (-v > value) {
        value = -v;
        a[axis] = x;
      }
    }
  }
  return value;
}

PathResult run_path(const RicciPotentialData& data, const PathOptions& options) {
  std::vector<double> grid = options.t_grid;
  if (grid.empty()) {
    if (!(options.dt > 0.0) || !(options.delta > 0.0 && options.delta < 1.0))
      throw InvalidArgument("need dt > 0 and 0 < delta < 1");
    const double end = 1.0 - options.delta;
    const int steps = static_cast<int>(std::floor(end / options.dt + 1e-9));
    for (int i = 0; i <= steps; ++i) grid.push_back(i * options.dt);
    if (end - grid.back() > 1e-9) grid.push_back(end);
  }
  if (grid.front() != 0.0) throw InvalidArgument("t grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]) || grid[i] >= 1.0) throw InvalidArgument("t grid must increase inside [0, 1)");

  const Discretization disc(data, options.solver);
  PathResult out;
  auto accept = [&](const MASolution& sol) {
    ContinuityState s = make_state(data, sol, options.m, options.quadrature_level);
    if (!out.states.empty()) {
      const auto& prev = out.states.back();
      s.integral_I_minus_J =
          prev.integral_I_minus_J + 0.5 * (s.t - prev.t) * ((prev.I - prev.J) + (s.I - s.J));
    }
    out.states.push_back(std::move(s));
    out.last_good_t = sol.t;
  };
  try {
    accept(solve_ma(disc, 0.0));
  } catch (const Error& e) {
    out.failure = std::string("t = 0: ") + e.what();
    return out;
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    int halvings = 0;
    while (out.states.back().t < target) {
      const double from = out.states.back().t;
      const double h = (target - from) / std::pow(2.0, halvings);
      const double next = halvings == 0 ? target : from + h;
      try {
        accept(solve_ma(disc, next, &out.states.back().solution));
        halvings = std::max(0, halvings - 1);
      } catch (const Error& e) {
        if (++halvings > options.max_halvings) {
          out.failure = "continuation failed after t = " + std::to_string(from) + ": " + e.what();
          return out;
        }
      }
    }
  }
  out.complete = true;
  return out;
}

std::vector<PathIdentityPoint> verify_path_identity(const std::vector<ContinuityState>& states) {
  if (states.size() < 3) throw InvalidArgument("path identity needs at least 3 states");
  if (states.front().t != 0.0) throw InvalidArgument("path must start at t = 0");
  const double full = states.back().integral_I_minus_J;
  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale < 1e-14 ? 0.0 : std::abs(a - b) / scale;
  };
  std::vector<PathIdentityPoint> out;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const auto& s = states[i];
    PathIdentityPoint p;
    p.t = s.t;
    p.lhs = -s.integral_I_minus_J / s.t;
    p.rhs = s.J - s.mean_reference;
    p.residual = rel(p.lhs, p.rhs);
    p.full_interval_residual = rel(-full / s.t, p.rhs);
    out.push_back(p);
  }
  return out;
}

AprioriProfile verify_apriori_estimates(const RicciPotentialData& data, const std::vector<ContinuityState>& states,
                                        int k, double alpha1, double alphak, double lambda, double t_min,
                                        int level) {
  const ToricFanoModel& model = data.model();
  const int n = model.dim();
  if (k < 2 || k > n + 1) throw InvalidArgument("k must satisfy 2 <= k <= n+1");
  if (!(alpha1 > 0.0) || !(alphak > 0.0)) throw InvalidArgument("alpha values must be positive");
  AprioriProfile out;
  out.min_corollary_slack = std::numeric_limits<double>::infinity();
  out.max_bound_k = out.max_bound_1 = -std::numeric_limits<double>::infinity();
  out.min_jensen_slack = std::numeric_limits<double>::infinity();
  const double nf = factorial(n);
  for (const auto& s : states) {
    if (s.t < t_min) continue;
    AprioriPoint p;
    p.t = s.t;
    const double neg_mean = -s.mean_self;
    const double ik = s.Ik_at(k);
    p.corollary_slack = n * s.sup_phi - (neg_mean + (n - k + 1) * ik);
    p.bound_k = s.sup_phi - (1.0 - alphak) / alphak * neg_mean - lambda * ik;
    p.bound_1 = s.sup_phi - (1.0 - alpha1) / alpha1 * neg_mean;
    const auto sp = functionals::sample(model, *s.solution.phi, level);
    auto jensen = [&](double a) {
      // Both sides against the probability measure ω_φ^n / V on the quadrature nodes.
      const double top = a * s.t * s.sup_phi;
      double mass = 0.0, mean = 0.0, expo = 0.0;
      for (const auto& f : sp.samples) {
        const double w = f.weight * nf * small_det(Mat(f.ref + f.hess));
        mass += w;
        mean += w * f.phi;
        expo += w * std::exp((1.0 - a) * s.t * (f.phi - s.sup_phi));
      }
      mean /= mass;
      expo /= mass;
      // log⨍e^{top + (1−a)tφ} = top + (1−a)t sup φ + log⨍e^{(1−a)t(φ − sup φ)}.
      const double rhs = top + (1.0 - a) * s.t * s.sup_phi + std::log(expo);
      return rhs - (top + (1.0 - a) * s.t * mean);
    };
    p.jensen_slack_1 = jensen(alpha1);
    p.jensen_slack_k = jensen(alphak);
    out.min_corollary_slack = std::min(out.min_corollary_slack, p.corollary_slack);
    out.max_bound_k = std::max(out.max_bound_k, p.bound_k);
    out.max_bound_1 = std::max(out.max_bound_1, p.bound_1);
    out.min_jensen_slack = std::min({out.min_jensen_slack, p.jensen_slack_1, p.jensen_slack_k});
    out.points.push_back(p);
  }
  return out;
}

}  // namespace kahlerlab::continuity
