#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kahlerlab/alpha/alpha.hpp"
#include "kahlerlab/bergman/bergman.hpp"
#include "kahlerlab/continuity/continuity.hpp"
#include "kahlerlab/criterion/criterion.hpp"
#include "kahlerlab/functionals/functionals.hpp"
#include "kahlerlab/toric/library.hpp"
#include "kahlerlab/toric/model.hpp"

namespace kl = kahlerlab;
using kl::toric::ToricFanoModel;

namespace {

void BM_QuadratureNodes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ToricFanoModel model(n);
    benchmark::DoNotOptimize(model.nodes().size());
  }
}
BENCHMARK(BM_QuadratureNodes)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_EnergyIk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ToricFanoModel model(n);
  const auto phi = kl::toric::library_potential(n, "lse_tilt");
  const auto sampled = kl::functionals::sample(model, *phi);
  for (auto _ : state) benchmark::DoNotOptimize(kl::functionals::energy_Ik(sampled, n + 1));
}
BENCHMARK(BM_EnergyIk)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_AubinIJ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ToricFanoModel model(n);
  const auto phi = kl::toric::library_potential(n, "lse_tilt");
  for (auto _ : state) benchmark::DoNotOptimize(kl::functionals::aubin_I_J(model, *phi).I);
}
BENCHMARK(BM_AubinIJ)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_BergmanKernelFullSpace(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ToricFanoModel model(2);
  const kl::bergman::SectionBasis basis(2, m);
  for (auto _ : state) {
    const auto gram = kl::bergman::monomial_section_norms(model, basis);
    const auto rho = kl::bergman::bergman_kernel(model, basis, kl::bergman::SectionSubspace::full(basis), gram);
    benchmark::DoNotOptimize(kl::bergman::kernel_mass(model, rho));
  }
}
BENCHMARK(BM_BergmanKernelFullSpace)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

void BM_BergmanEnergyFarRay(benchmark::State& state) {
  const double s = static_cast<double>(state.range(0));
  const kl::bergman::SectionBasis basis(1, 2);
  const int depth = static_cast<int>(std::ceil(2.0 * s / std::log(2.0))) + 14;
  const ToricFanoModel model(1, nullptr, kl::toric::QuadratureSpec{0, depth, 16});
  const std::vector<double> sigma{-1.0, 0.5, 1.0, -0.3, 0.2};
  std::vector<double> logs(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) logs[j] = s * sigma[j];
  for (auto _ : state) {
    const auto psi = kl::bergman::bergman_potential_log(model, basis, logs);
    benchmark::DoNotOptimize(kl::bergman::bergman_I(model, psi, 2));
  }
}
BENCHMARK(BM_BergmanEnergyFarRay)->Arg(8)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_AlphaEstimate(benchmark::State& state) {
  const ToricFanoModel model(1);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kl::alpha::alpha_mk_estimate(model, 1, k).estimate);
}
BENCHMARK(BM_AlphaEstimate)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

void BM_ContinuityPathCP1(benchmark::State& state) {
  const ToricFanoModel model(1, kl::toric::library_potential(1, "bump_gauss"));
  const auto data = kl::continuity::ricci_potential(model);
  kl::continuity::PathOptions options;
  options.dt = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(kl::continuity::run_path(data, options).complete);
}
BENCHMARK(BM_ContinuityPathCP1)->Unit(benchmark::kMillisecond);

void BM_CriterionCheck(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = kl::criterion::parse_rational("4/5");
  for (auto _ : state) {
    const auto v = kl::criterion::check_alpha_criterion(n, 2, a, a, std::nullopt);
    benchmark::DoNotOptimize(v.two_term);
    benchmark::DoNotOptimize(kl::criterion::choose_parameters(n, 2, a, a).parameters.has_value());
  }
}
BENCHMARK(BM_CriterionCheck)->Arg(3)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
