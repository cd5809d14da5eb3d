#include "kahlerlab/toric/library.hpp"

#include <cmath>

#include "kahlerlab/error.hpp"

namespace kahlerlab::toric {

namespace {

double multinomial(int d, const std::array<int, 3>& e, int n) {
  double r = std::tgamma(d + 1.0);
  int used = 0;
  for (int i = 0; i < n; ++i) {
    r /= std::tgamma(e[i] + 1.0);
    used += e[i];
  }
  return r / std::tgamma(d - used + 1.0);
}

std::vector<std::array<int, 3>> exponents_up_to(int n, int d) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= (n >= 2 ? d - a : 0); ++b)
      for (int c = 0; c <= (n >= 3 ? d - a - b : 0); ++c) out.push_back({a, b, c});
  return out;
}

PotentialPtr tilt(int n, double weight, const std::array<double, 3>& tau, const std::string& name) {
  std::vector<std::array<int, 3>> e{{0, 0, 0}};
  std::vector<double> lc{0.0};
  for (int i = 0; i < n; ++i) {
    std::array<int, 3> v{0, 0, 0};
    v[i] = 1;
    e.push_back(v);
    lc.push_back(tau[i]);
  }
  return std::make_shared<LogSumExpPotential>(n, weight, 1, e, lc, name);
}

// Functions of the barycentric coordinates p = x/(n+1), converted to x-derivatives.
PotentialPtr of_p(int n, std::function<double(const Vec&)> g, std::function<Vec(const Vec&)> dg,
                  std::function<Mat(const Vec&)> d2g, const std::string& name) {
  const double s = 1.0 / (n + 1.0);
  MomentFunction f;
  f.value = [g, s](const Vec& x) { return g(x * s); };
  f.gradient = [dg, s](const Vec& x) -> Vec { return dg(x * s) * s; };
  f.hessian = [d2g, s](const Vec& x) -> Mat { return d2g(x * s) * (s * s); };
  return std::make_shared<MomentPotential>(std::move(f), name);
}

}  // namespace

std::vector<std::string> library_names() {
  return {"zero", "lse_tilt", "lse_aniso", "lse_quadratic", "bump_quadratic", "bump_cos", "bump_gauss"};
}

PotentialPtr library_potential(int n, const std::string& name) {
  if (n < 1 || n > 3) throw InvalidArgument("library potentials exist for n = 1..3");
  if (name == "zero") return std::make_shared<ZeroPotential>();
  if (name == "lse_tilt") return tilt(n, 0.5, {0.8, -0.6, 0.4}, name);
  if (name == "lse_aniso") return tilt(n, 0.6, {1.5, -1.0, 0.5}, name);
  if (name == "lse_quadratic") {
    auto e = exponents_up_to(n, 2);
    std::vector<double> lc;
    for (const auto& v : e) {
      const double tau = 0.7 * std::sin(1.0 + 3.0 * v[0] + 5.0 * v[1] + 7.0 * v[2]);
      lc.push_back(std::log(multinomial(2, v, n)) + tau);
    }
    return std::make_shared<LogSumExpPotential>(n, 0.4, 2, e, lc, name);
  }
  if (name == "bump_quadratic") {
    const Vec c = Vec::Constant(n, 0.3);
    const double eps = 0.3;
    return of_p(
        n, [=](const Vec& p) { return eps * (p - c).squaredNorm(); },
        [=](const Vec& p) -> Vec { return 2.0 * eps * (p - c); },
        [=](const Vec&) -> Mat { return 2.0 * eps * Mat::Identity(n, n); }, name);
  }
  if (name == "bump_cos") {
    Vec k(n);
    for (int i = 0; i < n; ++i) k(i) = 2.0 + 1.3 * i;
    const double eps = 0.1;
    return of_p(
        n, [=](const Vec& p) { return eps * std::cos(k.dot(p) + 0.5); },
        [=](const Vec& p) -> Vec { return -eps * std::sin(k.dot(p) + 0.5) * k; },
        [=](const Vec& p) -> Mat { return -eps * std::cos(k.dot(p) + 0.5) * k * k.transpose(); }, name);
  }
  if (name == "bump_gauss") {
    Vec c(n);
    for (int i = 0; i < n; ++i) c(i) = 0.3 - 0.05 * i;
    const double amp = -0.4, width = 0.15;
    return of_p(
        n, [=](const Vec& p) { return amp * std::exp(-(p - c).squaredNorm() / width); },
        [=](const Vec& p) -> Vec {
          return amp * std::exp(-(p - c).squaredNorm() / width) * (-2.0 / width) * (p - c);
        },
        [=](const Vec& p) -> Mat {
          const double e = amp * std::exp(-(p - c).squaredNorm() / width);
          const Vec d = p - c;
          Mat h = (4.0 / (width * width)) * d * d.transpose();
          for (int i = 0; i < n; ++i) h(i, i) -= 2.0 / width;
          return e * h;
        },
        name);
  }
  throw InvalidArgument("unknown library potential '" + name + "'");
}

std::vector<PotentialPtr> library(int n) {
  std::vector<PotentialPtr> out;
  for (const auto& name : library_names())
    if (name != "zero") out.push_back(library_potential(n, name));
  return out;
}

PotentialPtr random_potential(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  PotentialPtr body;
  if (unit(rng) < 0.4) {
    std::array<double, 3> tau{sym(rng), sym(rng), sym(rng)};
    body = tilt(n, 0.2 + 0.6 * unit(rng), tau, "random_tilt");
  } else {
    // Σ c_i φ_i with c_i ≥ 0, Σ c_i ≤ 1 keeps F + φ convex.
    const auto entries = library(n);
    std::vector<double> c(entries.size());
    double total = 0.0;
    for (auto& v : c) total += (v = -std::log(1.0 - unit(rng)));
    const double scale = (0.3 + 0.7 * unit(rng)) / total;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto term = std::make_shared<AffinePotential>(entries[i], c[i] * scale, 0.0);
      body = body ? PotentialPtr(std::make_shared<SumPotential>(body, term)) : PotentialPtr(term);
    }
  }
  return std::make_shared<AffinePotential>(body, 1.0, 0.5 * sym(rng));
}

}  // namespace kahlerlab::toric
