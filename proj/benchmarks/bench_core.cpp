// Copyright 2026 The isdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <isdim/filter.hpp>
#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/random.hpp>
#include <isdim/sampler.hpp>

namespace {

using namespace isdim;

void BM_StandardNormalMatrix(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(standard_normal_matrix(n, 1, 7));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_StandardNormalMatrix)->Arg(1 << 10)->Arg(1 << 16);

void BM_RhoFromLogWeights(benchmark::State& state) {
  const Eigen::VectorXd lw = standard_normal_matrix(state.range(0), 1, 3).col(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler::rho_from_log_weights(lw));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RhoFromLogWeights)->Arg(1 << 12)->Arg(1 << 18);

void BM_RhoMcGaussianShift(benchmark::State& state) {
  const auto model = sampler::gaussian_shift_model(1.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler::rho_mc(model.draw, model.log_g, static_cast<std::size_t>(state.range(0)), 11));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RhoMcGaussianShift)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_CascadeClosedForm(benchmark::State& state) {
  const inverse::SpectralCascade c(0.5, 1.0, static_cast<std::size_t>(state.range(0)));
  const Eigen::VectorXd y = inverse::generate_data(c, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse::cascade_log_rho(c, y));
  }
}
BENCHMARK(BM_CascadeClosedForm)->Arg(64)->Arg(16384);

void BM_OperatorADense(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd k = standard_normal_matrix(n, n, 1);
  const Eigen::MatrixXd b = standard_normal_matrix(n, n, 2);
  const Eigen::MatrixXd sigma = b * b.transpose() + Eigen::MatrixXd::Identity(n, n);
  const auto ip = inverse::LinearGaussianIP::dense(k, sigma, Eigen::MatrixXd::Identity(n, n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse::operator_a(ip));
  }
}
BENCHMARK(BM_OperatorADense)->Arg(8)->Arg(32)->Arg(128);

void BM_FilterOperators(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
  const auto f = filter::OneStepFilter::dense(0.9 * i, i, i, 0.5 * i, 0.2 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter::a_operators(f));
  }
}
BENCHMARK(BM_FilterOperators)->Arg(8)->Arg(64);

void BM_InfiniteCascadeDims(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse::infinite_cascade_dims(1.1, 1.0));
  }
}
BENCHMARK(BM_InfiniteCascadeDims)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
