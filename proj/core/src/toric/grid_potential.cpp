#include "kahlerlab/toric/grid_potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kahlerlab/error.hpp"

namespace kahlerlab::toric {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
  const std::size_t k = x_.size();
  if (k < 3 || y_.size() != k) throw InvalidArgument("cubic spline needs at least 3 samples");
  for (std::size_t i = 1; i < k; ++i)
    if (!(x_[i] > x_[i - 1])) throw InvalidArgument("spline abscissae must increase strictly");
  // Thomas algorithm for the natural spline second derivatives.
  std::vector<double> c(k, 0.0), d(k, 0.0);
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
    const double r = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (r - a * d[i - 1]) / denom;
  }
  for (std::size_t i = k - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

void CubicSpline::evaluate(double at, double& value, double& d1, double& d2) const {
  if (at <= x_.front()) {
    value = y_.front();
    d1 = d2 = 0.0;
    return;
  }
  if (at >= x_.back()) {
    value = y_.back();
    d1 = d2 = 0.0;
    return;
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - at) / h, b = (at - x_[i]) / h;
  value = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  d1 = (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h * m_[i] / 6.0 + (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
  d2 = a * m_[i] + b * m_[i + 1];
}

GridPotential::GridPotential(int n, std::vector<std::vector<double>> axes, std::vector<double> values,
                             std::string label)
    : n_(n), axes_(std::move(axes)), values_(std::move(values)), label_(std::move(label)) {
  if (n_ < 1 || n_ > 2) throw InvalidArgument("grid potentials support n = 1 or 2");
  if (static_cast<int>(axes_.size()) != n_) throw InvalidArgument("grid potential needs one axis per dimension");
  std::size_t total = 1;
  for (const auto& ax : axes_) total *= ax.size();
  if (values_.size() != total) throw InvalidArgument("grid potential value count does not match the grid");
  if (n_ == 1) {
    line_ = CubicSpline(axes_[0], values_);
  } else {
    const std::size_t n0 = axes_[0].size(), n1 = axes_[1].size();
    for (std::size_t j = 0; j < n1; ++j) {
      std::vector<double> y(n0);
      for (std::size_t i = 0; i < n0; ++i) y[i] = values_[i * n1 + j];
      rows_.emplace_back(axes_[0], std::move(y));
    }
  }
}

Jet GridPotential::jet(const Point& p) const {
  Jet j = Jet::zero(n_);
  if (n_ == 1) {
    line_.evaluate(p.t[0], j.value, j.grad(0), j.hess(0, 0));
    return j;
  }
  const std::size_t n1 = axes_[1].size();
  std::vector<double> v(n1), d(n1), dd(n1);
  for (std::size_t k = 0; k < n1; ++k) rows_[k].evaluate(p.t[0], v[k], d[k], dd[k]);
  double val, d2, d22, d1, d12, d11, unused1, unused2;
  CubicSpline(axes_[1], v).evaluate(p.t[1], val, d2, d22);
  CubicSpline(axes_[1], d).evaluate(p.t[1], d1, d12, unused1);
  CubicSpline(axes_[1], dd).evaluate(p.t[1], d11, unused1, unused2);
  j.value = val;
  j.grad << d1, d2;
  j.hess << d11, d12, d12, d22;
  return j;
}

GridPotential GridPotential::from_csv(int n, std::istream& in, std::string label) {
  if (n < 1 || n > 2) throw InvalidArgument("grid potentials support n = 1 or 2");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (first && row.empty()) {  // header
      first = false;
      continue;
    }
    first = false;
    if (static_cast<int>(row.size()) != n + 1)
      throw InvalidArgument("grid CSV row must have " + std::to_string(n + 1) + " numeric columns: " + line);
    rows.push_back(std::move(row));
  }
  std::vector<std::vector<double>> axes(n);
  for (int d = 0; d < n; ++d) {
    for (const auto& r : rows) axes[d].push_back(r[d]);
    std::sort(axes[d].begin(), axes[d].end());
    axes[d].erase(std::unique(axes[d].begin(), axes[d].end()), axes[d].end());
  }
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  if (rows.size() != total) throw InvalidArgument("grid CSV does not fill a full tensor grid");
  std::vector<double> values(total, NAN);
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (int d = 0; d < n; ++d) {
      const auto pos = std::lower_bound(axes[d].begin(), axes[d].end(), r[d]) - axes[d].begin();
      flat = flat * axes[d].size() + static_cast<std::size_t>(pos);
    }
    values[flat] = r[n];
  }
  for (double v : values)
    if (std::isnan(v)) throw InvalidArgument("grid CSV has duplicate or missing points");
  return GridPotential(n, std::move(axes), std::move(values), std::move(label));
}

GridPotential GridPotential::from_csv_file(int n, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open grid potential file " + path);
  return from_csv(n, in, path);
}

}  // namespace kahlerlab::toric
