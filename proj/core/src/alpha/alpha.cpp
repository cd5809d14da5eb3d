#include "kahlerlab/alpha/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "kahlerlab/error.hpp"
#include "kahlerlab/toric/mixed_det.hpp"

namespace kahlerlab::alpha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

toric::QuadratureSpec graded_spec(int n, int depth, int order) {
  // Tensor rules grow as (2(depth+1)·order)^n; n = 3 runs at reduced resolution.
  if (n == 3) {
    depth = std::min(depth, 24);
    order = std::min(order, 4);
  }
  return {0, depth, order};
}

bool same_rule(const toric::QuadratureSpec& a, const toric::QuadratureSpec& b) {
  return a.graded_depth == b.graded_depth && a.cell_order == b.cell_order;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kConvergent: return "convergent";
    case Verdict::kDivergent: return "divergent";
    default: return "inconclusive";
  }
}

const char* to_string(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::kResolved: return "resolved";
    case ThresholdStatus::kAboveMax: return "above_max";
    default: return "unresolved";
  }
}

double ShellProfile::value(int level) const {
  level = std::clamp(level, 0, static_cast<int>(log_shells.size()));
  if (level == 0) return 0.0;
  const double top = *std::max_element(log_shells.begin(), log_shells.begin() + level);
  if (!std::isfinite(top)) return top > 0 ? kInf : 0.0;
  double s = 0.0;
  for (int l = 0; l < level; ++l) s += std::exp(log_shells[l] - top);
  const double out = top + std::log(s);
  return out > 700.0 ? kInf : std::exp(out);
}

ThresholdProblem::ThresholdProblem(const ToricFanoModel& model, int m, const SectionSubspace& subspace,
                                   const AlphaOptions& options, const bergman::MonomialGram* gram)
    : m_(m), invariant_(subspace.is_monomial()), options_(options) {
  const int n = model.dim();
  const SectionBasis basis(n, m);
  const auto spec = invariant_ ? graded_spec(n, options.depth, options.cell_order)
                               : graded_spec(n, options.probe_depth, options.probe_cell_order);
  const ToricFanoModel graded = same_rule(model.quadrature(), spec) ? model : model.with_quadrature(spec);
  depth_ = spec.graded_depth;
  const bergman::MonomialGram local = gram ? *gram : bergman::monomial_section_norms(graded, basis);
  const bergman::BergmanKernel rho(graded, basis, subspace, local);

  const auto& nodes = graded.nodes();
  const double log_nfact = std::log(toric::factorial(n));
  log_weight_.resize(nodes.size());
  layer_.resize(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const auto& node = nodes[q];
    double log_det = toric::log_det_fubini_study_hessian(node.pt);
    if (!graded.is_fubini_study()) {
      const double det = toric::small_det(graded.reference_jet(node.pt).hess);
      if (!(det > 0.0)) throw NotKahler("reference potential is not Kähler at a graded node");
      log_det = std::log(det);
    }
    log_weight_[q] = std::log(node.weight_t) + log_nfact + log_det;
    layer_[q] = node.layer;
  }

  int angles = 1;
  if (!invariant_) {
    angles = options.probe_angles > 0 ? options.probe_angles : 4 * basis.degree() + 4;
    angles_total_ = static_cast<int>(std::pow(angles, n));
  }
  std::vector<double> raw(nodes.size() * angles_total_);
  if (invariant_) {
    for (std::size_t q = 0; q < nodes.size(); ++q) raw[q] = rho.log_value(nodes[q].pt);
  } else {
    const auto& ex = rho.exponents();
    std::vector<std::complex<double>> phases(static_cast<std::size_t>(angles_total_) * ex.size());
    for (int a = 0; a < angles_total_; ++a) {
      std::array<double, 3> theta{};
      int rem = a;
      for (int i = 0; i < n; ++i) {
        theta[i] = kTwoPi * (rem % angles) / angles;
        rem /= angles;
      }
      for (std::size_t r = 0; r < ex.size(); ++r) {
        double phase = 0.0;
        for (int i = 0; i < n; ++i) phase += ex[r][i] * theta[i];
        phases[a * ex.size() + r] = std::polar(1.0, phase);
      }
    }
    for (std::size_t q = 0; q < nodes.size(); ++q)
      rho.log_values(nodes[q].pt, phases, std::span<double>(raw.data() + q * angles_total_, angles_total_));
  }
  const double top = *std::max_element(raw.begin(), raw.end());
  double interior_min = kInf;
  log_rho_.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    log_rho_[i] = static_cast<float>(raw[i] - top);
    if (layer_[i / angles_total_] <= 1) interior_min = std::min(interior_min, raw[i] - top);
  }
  interior_min_ratio_ = std::exp(interior_min);
  const double log_angles = std::log(static_cast<double>(angles_total_));
  for (double& w : log_weight_) w -= log_angles;
}

ShellProfile ThresholdProblem::profile(double alpha) const {
  const double beta = alpha / m_;
  std::vector<double> mx(depth_, -kInf), sum(depth_, 0.0);
  for (std::size_t q = 0; q < layer_.size(); ++q) {
    const int l = layer_[q];
    if (l >= depth_) continue;
    for (int a = 0; a < angles_total_; ++a) {
      const double v = log_weight_[q] - beta * log_rho_[q * angles_total_ + a];
      if (v > mx[l]) {
        sum[l] = sum[l] * std::exp(mx[l] - v) + 1.0;
        mx[l] = v;
      } else {
        sum[l] += std::exp(v - mx[l]);
      }
    }
  }
  ShellProfile p;
  p.alpha = alpha;
  p.log_shells.resize(depth_);
  for (int l = 0; l < depth_; ++l) p.log_shells[l] = mx[l] + std::log(sum[l]);

  // Fit log S_L = a + q log(L+1) + γ L log 2 through three shells spaced by the stride.
  const int stride = std::max(1, std::min(options_.fit_stride, (depth_ - 1) / 2));
  const int l3 = depth_ - 1, l2 = l3 - stride, l1 = l2 - stride;
  Eigen::Matrix3d a;
  Eigen::Vector3d y;
  int row = 0;
  for (int l : {l1, l2, l3}) {
    a(row, 0) = 1.0;
    a(row, 1) = std::log(l + 1.0);
    a(row, 2) = l * std::log(2.0);
    y(row) = p.log_shells[l];
    ++row;
  }
  if (!y.allFinite()) {
    p.growth = kInf;
    p.verdict = Verdict::kDivergent;
    return p;
  }
  p.growth = a.fullPivLu().solve(y)(2);
  if (p.growth > options_.dead_zone) p.verdict = Verdict::kDivergent;
  else if (p.growth < -options_.dead_zone) p.verdict = Verdict::kConvergent;
  else p.verdict = Verdict::kInconclusive;
  return p;
}

double integral_vs_alpha(const ToricFanoModel& model, int m, const SectionSubspace& subspace, double alpha, int level,
                         const AlphaOptions& options) {
  const ThresholdProblem problem(model, m, subspace, options);
  return problem.profile(alpha).value(level);
}

Threshold lct_threshold(const ThresholdProblem& problem, const std::string& label, const AlphaOptions& options) {
  Threshold t;
  t.subspace = label;
  t.certified = problem.invariant() || problem.interior_min_ratio() >= options.interior_floor;
  auto verdict = [&](double a) {
    ++t.evaluations;
    return problem.profile(a).verdict;
  };
  if (verdict(options.alpha_max) != Verdict::kDivergent) {
    t.status = ThresholdStatus::kAboveMax;
    t.lo = options.alpha_max;
    t.hi = t.value = kInf;
    return t;
  }
  double lo = 0.0, hi = options.alpha_max;
  const double half = 0.5 * options.bracket;
  t.status = ThresholdStatus::kResolved;
  while (hi - lo > options.bracket) {
    const double mid = 0.5 * (lo + hi);
    const Verdict v = verdict(mid);
    if (v == Verdict::kConvergent) {
      lo = mid;
    } else if (v == Verdict::kDivergent) {
      hi = mid;
    } else {
      // Growth exponent within the dead zone: the threshold sits next to mid.
      const Verdict below = verdict(std::max(lo, mid - half));
      const Verdict above = verdict(std::min(hi, mid + half));
      if (below == Verdict::kConvergent) lo = std::max(lo, mid - half);
      if (above == Verdict::kDivergent) hi = std::min(hi, mid + half);
      if (below != Verdict::kConvergent || above != Verdict::kDivergent) {
        if (below == Verdict::kConvergent && above == Verdict::kConvergent) {
          lo = std::min(hi, mid + half);
          continue;
        }
        if (below == Verdict::kDivergent && above == Verdict::kDivergent) {
          hi = std::max(lo, mid - half);
          continue;
        }
        t.status = ThresholdStatus::kUnresolved;
        lo = std::max(lo, mid - half);
        hi = std::min(hi, mid + half);
      }
      break;
    }
  }
  t.lo = lo;
  t.hi = hi;
  t.value = 0.5 * (lo + hi);
  return t;
}

Threshold lct_threshold(const ToricFanoModel& model, int m, const SectionSubspace& subspace,
                        const AlphaOptions& options) {
  return lct_threshold(ThresholdProblem(model, m, subspace, options), subspace.label(), options);
}

AlphaEstimate alpha_mk_estimate(const ToricFanoModel& model, int m, int k, const SearchBudget& budget,
                                const AlphaOptions& options) {
  const int n = model.dim();
  const SectionBasis basis(n, m);
  const std::size_t big_n = basis.size();
  if (k < 1 || k > static_cast<int>(big_n)) throw InvalidArgument("alpha estimate needs 1 <= k <= N");
  AlphaEstimate out;
  out.m = m;
  out.k = k;
  out.n = n;
  out.lo = out.hi = kInf;

  const ToricFanoModel graded = model.with_quadrature(graded_spec(n, options.depth, options.cell_order));
  const bergman::MonomialGram gram = bergman::monomial_section_norms(graded, basis);

  // Full exponent vectors (J_0, J_1, ..., J_n) for the coordinate-permutation symmetry.
  std::vector<std::array<int, 4>> full(big_n);
  for (std::size_t j = 0; j < big_n; ++j) {
    int total = 0;
    for (int i = 0; i < n; ++i) {
      full[j][i + 1] = basis.exponents()[j][i];
      total += basis.exponents()[j][i];
    }
    full[j][0] = basis.degree() - total;
  }
  std::vector<std::array<int, 4>> perms;
  {
    std::array<int, 4> sigma{0, 1, 2, 3};
    do {
      perms.push_back(sigma);
    } while (std::next_permutation(sigma.begin(), sigma.begin() + n + 1));
  }
  const bool symmetric = model.is_fubini_study();

  out.monomial_total = 1;
  for (int i = 0; i < k; ++i) out.monomial_total = out.monomial_total * (big_n - i) / (i + 1);

  std::set<std::vector<std::array<int, 4>>> seen;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t scan_cap = std::max<std::size_t>(50 * budget.max_subspaces, 100000);
  std::size_t scanned = 0;
  auto consider = [&](const Threshold& t) {
    if (!t.certified || !(out.extremal.empty() || t.value < out.estimate)) return;
    out.estimate = t.value;
    out.lo = t.lo;
    out.hi = t.hi;
    out.extremal = t.subspace;
  };
  while (true) {
    if (scanned++ >= scan_cap || out.monomial.size() >= budget.max_subspaces) {
      out.partial = true;
      break;
    }
    bool fresh = true;
    if (symmetric) {
      std::vector<std::array<int, 4>> best;
      for (const auto& sigma : perms) {
        std::vector<std::array<int, 4>> img;
        for (std::size_t j : idx) {
          std::array<int, 4> e{};
          for (int i = 0; i <= n; ++i) e[sigma[i]] = full[j][i];
          img.push_back(e);
        }
        std::sort(img.begin(), img.end());
        if (best.empty() || img < best) best = std::move(img);
      }
      fresh = seen.insert(best).second;
    }
    if (fresh) {
      const SectionSubspace v = SectionSubspace::monomials(basis, idx);
      const Threshold t = lct_threshold(ThresholdProblem(graded, m, v, options, &gram), v.label(), options);
      out.monomial.push_back(t);
      consider(t);
    }
    // Next k-subset in lexicographic order.
    int i = k - 1;
    while (i >= 0 && idx[i] == big_n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  out.monomial_orbits = out.monomial.size();

  std::mt19937_64 rng(budget.seed);
  std::normal_distribution<double> g;
  for (int p = 0; p < budget.probes; ++p) {
    Eigen::MatrixXcd c(big_n, k);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = {g(rng), g(rng)};
    const SectionSubspace v(basis, c, "probe#" + std::to_string(p));
    const Threshold t = lct_threshold(ThresholdProblem(model, m, v, options), v.label(), options);
    out.probes.push_back(t);
    consider(t);
  }
  return out;
}

}  // namespace kahlerlab::alpha
