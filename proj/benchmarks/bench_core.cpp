// Copyright 2026 The suscept-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "suscept/gibbs.hpp"
#include "suscept/ising.hpp"
#include "suscept/laplace.hpp"
#include "suscept/patterning.hpp"

namespace {

using namespace suscept;

void BM_MetropolisSweep(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  ising::SpinLattice lattice(side, ising::Boundary::kPeriodic);
  Rng rng(1);
  lattice.randomize(rng);
  for (auto _ : state) {
    ising::metropolis_sweep(lattice, ising::kCriticalBeta, rng);
    benchmark::DoNotOptimize(lattice.spins().data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_MetropolisSweep)->Arg(20)->Arg(64)->Arg(256);

void BM_WallSweepPoint(benchmark::State& state) {
  const auto layout = ising::wall_gap_layout();
  ising::IsingChainConfig cfg;
  cfg.samples = 2000;
  cfg.burn_in_sweeps = 200;
  const std::vector<double> betas{0.38};
  for (auto _ : state) {
    auto points = ising::susceptibility_sweep(layout.lattice, layout.probes.probes[0].site,
                                              layout.regions[0], layout.regions[1], betas, cfg);
    benchmark::DoNotOptimize(points.data());
  }
}
BENCHMARK(BM_WallSweepPoint)->Unit(benchmark::kMillisecond);

void BM_SgldSteps(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  GibbsProblem problem;
  problem.loss = make_toy_loss({"polynomial", d, {1.0}, {0.3}, {0.2}, 0.0});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 64; ++i) {
    Vector z(d);
    for (int j = 0; j < d; ++j) z[j] = 0.2 * normal(rng);
    problem.data.push_back(z);
  }
  problem.beta = 10.0;
  problem.gamma = 1.0;
  problem.w_star = Vector::Zero(d);
  SGLDConfig cfg;
  cfg.step_size = 1e-4;
  cfg.steps = 10000;
  cfg.burn_in = 0;
  cfg.thinning = 100;
  for (auto _ : state) {
    auto samples = sgld_run(problem, cfg);
    benchmark::DoNotOptimize(samples.draws.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(BM_SgldSteps)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

void BM_SvdModes(benchmark::State& state) {
  const Matrix X = random_matrix(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(patterning::svd_modes(X).rank);
}
BENCHMARK(BM_SvdModes)->Args({8, 1000})->Args({64, 10000})->Unit(benchmark::kMillisecond);

void BM_BatchReweight(benchmark::State& state) {
  const Matrix X = random_matrix(16, state.range(0));
  const Vector target = random_matrix(16, 1).col(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(patterning::batch_reweight(X, target, 0.1, 1.0).residual_norm);
}
BENCHMARK(BM_BatchReweight)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_IsserlisMoment(benchmark::State& state) {
  const Matrix a = random_matrix(3, 3);
  const Matrix sigma = a * a.transpose() + Matrix::Identity(3, 3);
  std::vector<int> idx;
  for (int k = 0; k < state.range(0); ++k) idx.push_back(k % 3);
  for (auto _ : state) benchmark::DoNotOptimize(laplace::isserlis_moment(sigma, idx));
}
BENCHMARK(BM_IsserlisMoment)->Arg(4)->Arg(6)->Arg(8);

void BM_CovNextOrder(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(d, d);
  const laplace::TaylorData taylor(a * a.transpose() + Matrix::Identity(d, d),
                                   laplace::SymmetricTensor3::random(d, rng));
  auto phi = laplace::ObservableJet::zero(d);
  phi.hessian = Matrix::Identity(d, d);
  phi.third = laplace::SymmetricTensor3::random(d, rng);
  auto psi = laplace::ObservableJet::zero(d);
  psi.gradient = Vector::Ones(d);
  psi.hessian = Matrix::Identity(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(laplace::cov_nlo(phi, psi, taylor, 100.0));
}
BENCHMARK(BM_CovNextOrder)->Arg(3)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
