#include "kahlerlab/toric/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/mixed_det.hpp"

namespace kahlerlab::toric {

struct ToricFanoModel::NodeCache {
  std::mutex mutex;
  std::map<int, std::shared_ptr<const std::vector<QuadNode>>> levels;
};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

ToricFanoModel::ToricFanoModel(int n, PotentialPtr perturbation, QuadratureSpec spec)
    : n_(n), perturbation_(std::move(perturbation)), spec_(spec), cache_(std::make_shared<NodeCache>()) {
  if (n < 1 || n > 3) throw InvalidArgument("ToricFanoModel supports CP^1, CP^2, CP^3");
  if (spec_.nodes_per_axis < 0) throw InvalidArgument("nodes_per_axis must be nonnegative");
  if (spec_.graded_depth < 0 || spec_.cell_order < 1) throw InvalidArgument("invalid graded quadrature");
}

int ToricFanoModel::nodes_per_axis(int level) const {
  if (level < 0) throw InvalidArgument("refinement level must be nonnegative");
  const int base = spec_.nodes_per_axis > 0 ? spec_.nodes_per_axis : (n_ <= 2 ? 64 : 32);
  return base << level;
}

double ToricFanoModel::analytic_volume() const { return std::pow(kTwoPi * (n_ + 1), n_); }

Jet ToricFanoModel::fubini_study_jet(const Point& p) {
  const int n = p.n;
  Vec pv(n);
  for (int i = 0; i < n; ++i) pv(i) = std::exp(p.log_p[i + 1]);
  Jet j;
  j.value = -(n + 1) * p.log_p[0];
  j.grad = (n + 1) * pv;
  j.hess = -(n + 1.0) * pv * pv.transpose();
  // Diagonal as p_i·Σ_{j≠i} p_j (indices 0..n) so that it stays accurate as p_i → 1.
  for (int i = 0; i < n; ++i) {
    double rest = std::exp(p.log_p[0]);
    for (int k = 0; k < n; ++k)
      if (k != i) rest += pv(k);
    j.hess(i, i) = (n + 1) * pv(i) * rest;
  }
  return j;
}

Jet ToricFanoModel::reference_jet(const Point& p) const {
  Jet j = fubini_study_jet(p);
  if (perturbation_) {
    const Jet c = perturbation_->jet(p);
    j.value += c.value;
    j.grad += c.grad;
    j.hess += c.hess;
  }
  return j;
}

double ToricFanoModel::perturbation_value(const Point& p) const {
  return perturbation_ ? perturbation_->value(p) : 0.0;
}

Vec ToricFanoModel::moment_map(std::span<const double> t) const {
  const Point p = point_from_log_coordinates(n_, t);
  Vec x(n_);
  for (int i = 0; i < n_; ++i) x(i) = p.x[i];
  return x;
}

Vec ToricFanoModel::inverse_moment_map(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw InvalidArgument("moment point has wrong size");
  double rest = n_ + 1.0;
  for (double xi : x) rest -= xi;
  Vec t(n_);
  for (int i = 0; i < n_; ++i) {
    if (!(x[i] > 0.0) || !(rest > 0.0)) throw InvalidArgument("point outside the moment polytope");
    t(i) = std::log(x[i] / rest);
  }
  return t;
}

const std::vector<QuadNode>& ToricFanoModel::nodes(int level) const {
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->levels.find(level);
  if (it == cache_->levels.end()) {
    const auto axis = spec_.graded_depth > 0 ? dyadic_graded_unit(spec_.graded_depth, spec_.cell_order << level)
                                             : gauss_legendre_unit(nodes_per_axis(level));
    std::vector<std::vector<AxisNode>> axes(n_, axis);
    auto nodes = std::make_shared<const std::vector<QuadNode>>(collapsed_tensor_nodes(n_, axes));
    it = cache_->levels.emplace(level, std::move(nodes)).first;
  }
  return *it->second;
}

double ToricFanoModel::integrate_invariant(const std::function<double(const Point&)>& density, int level) const {
  double sum = 0.0;
  for (const QuadNode& q : nodes(level)) {
    const double v = density(q.pt);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integration failure: non-finite density at t = (";
      for (int i = 0; i < n_; ++i) msg << (i ? ", " : "") << q.pt.t[i];
      msg << ")";
      throw QuadratureError(msg.str());
    }
    sum += q.weight_t * v;
  }
  return sum;
}

double ToricFanoModel::volume(int level) const {
  const double nf = factorial(n_);
  return integrate_invariant([&](const Point& p) { return nf * small_det(reference_jet(p).hess); }, level);
}

}  // namespace kahlerlab::toric
