#include <benchmark/benchmark.h>

#include <vector>

#include "vr/divergence.hpp"
#include "vr/estimator.hpp"
#include "vr/gradient.hpp"
#include "vr/models/vae.hpp"
#include "vr/rng.hpp"
#include "vr/trainer.hpp"

namespace {

void BM_McEstimate(benchmark::State& state) {
  const auto k = static_cast<Eigen::Index>(state.range(0));
  vr::Rng rng = vr::make_stream(1, 0);
  const Eigen::MatrixXd draws = vr::standard_normal(rng, 1, k);
  const vr::WeightSet w(std::vector<double>(draws.data(), draws.data() + k));
  for (auto _ : state) benchmark::DoNotOptimize(vr::mc_vr_estimate(w, 0.5).value);
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_McEstimate)->Arg(5)->Arg(50)->Arg(5000);

void BM_RenyiGaussian(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const vr::GaussianDist p(Eigen::VectorXd::Zero(d), Eigen::VectorXd(Eigen::VectorXd::Ones(d)));
  const vr::GaussianDist q(Eigen::VectorXd::Ones(d), Eigen::VectorXd(Eigen::VectorXd::Constant(d, 1.5)));
  for (auto _ : state) benchmark::DoNotOptimize(vr::renyi_gaussian(p, q, 0.5));
}
BENCHMARK(BM_RenyiGaussian)->Arg(2)->Arg(16)->Arg(64);

void BM_VaeGradient(benchmark::State& state) {
  const auto k = static_cast<Eigen::Index>(state.range(0));
  const vr::VAEArch arch{64, 64, 8, vr::Likelihood::Bernoulli};
  const vr::VAEModel model(arch);
  const vr::GaussianEncoder enc(arch);
  const vr::ParamSet params = vr::init_params(model, enc, 0);
  const vr::Dataset data = vr::make_binary_digits(32, 1);
  const vr::Batch batch = vr::make_batch(data);
  const Eigen::MatrixXd eps = vr::draw_noise(enc, batch, k, 2, 0).eps;
  const vr::Problem problem{model, enc, batch, k};
  for (auto _ : state) benchmark::DoNotOptimize(vr::vr_grad(problem, params, eps, 0.0).objective);
  state.SetItemsProcessed(state.iterations() * batch.size() * k);
}
BENCHMARK(BM_VaeGradient)->Arg(1)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
