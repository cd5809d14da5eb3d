#include "kahlerlab/toric/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kahlerlab/error.hpp"
#include "kahlerlab/types.hpp"

namespace kahlerlab::toric {

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = count * (z * p1 - p2) / (z * z - 1.0);
      const double prev = z;
      z = prev - p1 / dp;
      if (std::abs(z - prev) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= count; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = count * (z * p1 - p2) / (z * z - 1.0);
    nodes[i] = -z;
    nodes[count - 1 - i] = z;
    weights[i] = weights[count - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<AxisNode> gauss_legendre_unit(int count) {
  std::vector<double> z, w;
  gauss_legendre(count, z, w);
  std::vector<AxisNode> out(count);
  for (int i = 0; i < count; ++i) {
    out[i].a = 0.5 * (1.0 + z[i]);
    out[i].one_minus_a = 0.5 * (1.0 - z[i]);
    out[i].weight = 0.5 * w[i];
  }
  return out;
}

std::vector<AxisNode> dyadic_graded_unit(int depth, int order) {
  if (depth < 1) throw InvalidArgument("graded rule needs depth >= 1");
  std::vector<double> z, w;
  gauss_legendre(order, z, w);
  std::vector<AxisNode> out;
  out.reserve(2 * (depth + 1) * order);
  for (int j = 0; j < depth; ++j) {
    const double lo = std::ldexp(1.0, -(j + 2));
    const double hi = std::ldexp(1.0, -(j + 1));
    const double len = hi - lo;
    for (int q = 0; q < order; ++q) {
      const double u = 0.5 * (1.0 + z[q]);
      const double v = 0.5 * (1.0 - z[q]);
      AxisNode left{lo + len * u, 0.0, 0.5 * len * w[q], j};
      left.one_minus_a = 1.0 - left.a;
      AxisNode right{0.0, lo + len * v, 0.5 * len * w[q], j};
      right.a = 1.0 - right.one_minus_a;
      out.push_back(left);
      out.push_back(right);
    }
  }
  // Innermost cells [0, 2^{-depth-1}] and mirror, tagged with layer = depth.
  const double len = std::ldexp(1.0, -(depth + 1));
  for (int q = 0; q < order; ++q) {
    const double u = 0.5 * (1.0 + z[q]);
    AxisNode left{len * u, 1.0 - len * u, 0.5 * len * w[q], depth};
    AxisNode right{1.0 - len * u, len * u, 0.5 * len * w[q], depth};
    out.push_back(left);
    out.push_back(right);
  }
  std::sort(out.begin(), out.end(), [](const AxisNode& l, const AxisNode& r) { return l.a < r.a; });
  return out;
}

double log_det_fubini_study_hessian(const Point& p) {
  double s = p.n * std::log(p.n + 1.0);
  for (int i = 0; i <= p.n; ++i) s += p.log_p[i];
  return s;
}

std::vector<QuadNode> collapsed_tensor_nodes(int n, const std::vector<std::vector<AxisNode>>& axes) {
  if (static_cast<int>(axes.size()) != n) throw InvalidArgument("one axis rule per dimension required");
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  std::vector<QuadNode> out;
  out.reserve(total);
  const double scale = std::pow(n + 1.0, n);
  const double angular = std::pow(kTwoPi, n);
  std::array<std::size_t, 3> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int d = n - 1; d >= 0; --d) {
      idx[d] = rem % axes[d].size();
      rem /= axes[d].size();
    }
    std::array<double, 3> a{}, b{};
    double w = scale;
    double rest = 1.0;
    int layer = 0;
    for (int d = 0; d < n; ++d) {
      const AxisNode& node = axes[d][idx[d]];
      a[d] = node.a;
      b[d] = node.one_minus_a;
      w *= node.weight * rest;  // Jacobian Π_{d} r_{d-1}
      rest *= node.one_minus_a;
      layer = std::max(layer, node.layer);
    }
    QuadNode q;
    q.pt = point_from_collapsed(n, std::span<const double>(a.data(), n), std::span<const double>(b.data(), n));
    q.weight_x = w;
    q.weight_t = angular * w * std::exp(-log_det_fubini_study_hessian(q.pt));
    q.layer = layer;
    out.push_back(q);
  }
  return out;
}

}  // namespace kahlerlab::toric
