#pragma once

#include <vector>

#include "kahlerlab/toric/point.hpp"

namespace kahlerlab::toric {

/// One abscissa of a one-dimensional rule on [0,1]; both a and 1-a are stored exactly.
struct AxisNode {
  double a = 0.0;
  double one_minus_a = 0.0;
  double weight = 0.0;
  int layer = 0;
};

/// Gauss-Legendre rule with `count` nodes on [0, 1].
std::vector<AxisNode> gauss_legendre_unit(int count);

/// Gauss-Legendre rule on [-1, 1] (abscissae ascending).
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite rule whose cells are graded dyadically toward both ends of [0,1]:
/// cells [2^{-j-2}, 2^{-j-1}] (and mirror) for j = 0..depth-1, with per-cell Gauss order
/// `order`, plus the innermost cells [0, 2^{-depth-1}] tagged with layer = depth. `layer`
/// records j so callers can accumulate truncated integrals shell by shell.
std::vector<AxisNode> dyadic_graded_unit(int depth, int order);

struct QuadNode {
  Point pt;
  double weight_x = 0.0;  ///< Lebesgue weight in moment coordinates (Σ = vol of dilated simplex).
  double weight_t = 0.0;  ///< (2π)^n times the Lebesgue weight in log-coordinates.
  int layer = 0;          ///< max of the axis layers (graded rules only).
};

/// Tensor product of axis rules pushed through the collapsed map onto the dilated simplex.
std::vector<QuadNode> collapsed_tensor_nodes(int n, const std::vector<std::vector<AxisNode>>& axes);

/// log det D²F for the Fubini-Study potential, from barycentric logs: n log(n+1) + Σ log p_i.
double log_det_fubini_study_hessian(const Point& p);

}  // namespace kahlerlab::toric
