#pragma once

#include <array>
#include <span>

namespace kahlerlab::toric {

/// A point of the open torus orbit of CP^n, carried in three coordinate systems at once.
///
/// `t` are log-coordinates t_i = log|z_i|^2, `x` the Fubini-Study moment coordinates
/// x = ∇F(t) in the dilated simplex {x_i > 0, Σx_i < n+1}, and `log_p` the logarithms of
/// the barycentric coordinates p_i = x_i/(n+1), p_0 = 1 - Σ p_i. Keeping log_p explicit
/// lets section norms and kernels be evaluated without underflow near the boundary.
struct Point {
  int n = 1;
  std::array<double, 3> t{};
  std::array<double, 3> x{};
  std::array<double, 4> log_p{};

  double p(int i) const;
};

Point point_from_log_coordinates(int n, std::span<const double> t);

/// Builds a point from the logarithms of the barycentric coordinates p_0..p_n.
Point point_from_barycentric_logs(int n, std::span<const double> log_p);

/// Collapsed-coordinate parametrisation of the simplex: p_1 = a_1, p_2 = (1-a_1)a_2, ...,
/// p_0 = Π(1-a_i). Both a_i and 1-a_i are passed so cells graded toward either end stay exact.
Point point_from_collapsed(int n, std::span<const double> a, std::span<const double> one_minus_a);

}  // namespace kahlerlab::toric
