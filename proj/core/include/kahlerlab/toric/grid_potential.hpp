#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kahlerlab/toric/potential.hpp"

namespace kahlerlab::toric {

/// Natural cubic spline through (x_i, y_i) with x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  /// Value, first and second derivative; outside [x_0, x_last] the end value is held constant.
  void evaluate(double at, double& value, double& d1, double& d2) const;

 private:
  std::vector<double> x_, y_, m_;
};

/// A potential sampled on a regular log-coordinate grid (n = 1 or 2), interpolated by
/// tensor natural cubic splines and held constant outside the grid box.
///
/// CSV layout: optional header line, then one row per grid point with columns
/// t_1, ..., t_n, phi. Rows may come in any order but must fill the full tensor grid.
class GridPotential final : public InvariantPotential {
 public:
  GridPotential(int n, std::vector<std::vector<double>> axes, std::vector<double> values,
                std::string label);

  static GridPotential from_csv(int n, std::istream& in, std::string label);
  static GridPotential from_csv_file(int n, const std::string& path);

  Jet jet(const Point& p) const override;
  std::string label() const override { return label_; }

 private:
  int n_;
  std::vector<std::vector<double>> axes_;
  std::vector<double> values_;  // row-major: index = i0 * size(axis1) + i1
  std::vector<CubicSpline> rows_;
  CubicSpline line_;
  std::string label_;
};

}  // namespace kahlerlab::toric
