#include "kahlerlab/toric/point.hpp"

#include <algorithm>
#include <cmath>

#include "kahlerlab/error.hpp"

namespace kahlerlab::toric {

namespace {

void check_dim(int n) {
  if (n < 1 || n > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
}

}  // namespace

double Point::p(int i) const { return std::exp(log_p[i]); }

Point point_from_log_coordinates(int n, std::span<const double> t) {
  check_dim(n);
  if (static_cast<int>(t.size()) != n) throw InvalidArgument("log-coordinate point has wrong size");
  double top = 0.0;
  for (int i = 0; i < n; ++i) top = std::max(top, t[i]);
  double sum = std::exp(-top);
  for (int i = 0; i < n; ++i) sum += std::exp(t[i] - top);
  const double lse = top + std::log(sum);  // log(1 + Σ e^{t_i})

  Point p;
  p.n = n;
  p.log_p[0] = -lse;
  for (int i = 0; i < n; ++i) {
    p.t[i] = t[i];
    p.log_p[i + 1] = t[i] - lse;
    p.x[i] = (n + 1) * std::exp(p.log_p[i + 1]);
  }
  return p;
}

Point point_from_barycentric_logs(int n, std::span<const double> log_p) {
  check_dim(n);
  if (static_cast<int>(log_p.size()) != n + 1) throw InvalidArgument("barycentric point has wrong size");
  Point p;
  p.n = n;
  for (int i = 0; i <= n; ++i) p.log_p[i] = log_p[i];
  for (int i = 0; i < n; ++i) {
    p.t[i] = log_p[i + 1] - log_p[0];
    p.x[i] = (n + 1) * std::exp(log_p[i + 1]);
  }
  return p;
}

Point point_from_collapsed(int n, std::span<const double> a, std::span<const double> one_minus_a) {
  check_dim(n);
  std::array<double, 4> lp{};
  double log_rest = 0.0;
  for (int i = 0; i < n; ++i) {
    lp[i + 1] = log_rest + std::log(a[i]);
    log_rest += std::log(one_minus_a[i]);
  }
  lp[0] = log_rest;
  return point_from_barycentric_logs(n, std::span<const double>(lp.data(), n + 1));
}

}  // namespace kahlerlab::toric
