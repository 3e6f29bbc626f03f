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

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "suscept/errors.hpp"
#include "suscept/gibbs.hpp"
#include "suscept/parallel.hpp"
#include "suscept/rng.hpp"

namespace suscept {
namespace {

std::vector<int> free_indices(const GibbsProblem& problem,
                              const std::optional<ComponentSpec>& restriction) {
  if (restriction) return restriction->indices;
  std::vector<int> all(static_cast<std::size_t>(problem.dimension()));
  for (int j = 0; j < problem.dimension(); ++j) all[static_cast<std::size_t>(j)] = j;
  return all;
}

double max_free_eigenvalue(const Matrix& h, const std::vector<int>& free) {
  const auto k = static_cast<Eigen::Index>(free.size());
  Matrix sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      sub(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
  return Eigen::SelfAdjointEigenSolver<Matrix>(sub, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

double bound_from(const GibbsProblem& problem, double lambda_max) {
  const double k = problem.n_beta() * std::max(lambda_max, 0.0) + problem.gamma;
  return k > 0.0 ? 2.0 / k : std::numeric_limits<double>::infinity();
}

struct ChainResult {
  std::vector<Vector> draws;
};

ChainResult run_one(const GibbsProblem& problem, const SGLDConfig& config,
                    const std::vector<int>& free, std::uint64_t seed,
                    double radius, double suggested) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = problem.n();
  const std::size_t m = config.minibatch_size == 0 ? n : config.minibatch_size;
  const bool full_batch = m == n;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const double eps = config.step_size;
  const double noise = std::sqrt(eps);
  const double nb = problem.n_beta();

  Vector w = problem.w_star;
  Vector grad(problem.dimension());
  ChainResult out;
  out.draws.reserve(static_cast<std::size_t>(config.steps / config.thinning));
  const long total = config.burn_in + config.steps;
  for (long step = 0; step < total; ++step) {
    grad.setZero();
    if (full_batch) {
      for (std::size_t i = 0; i < n; ++i)
        problem.loss->add_gradient(w, problem.data[i],
                                   nb * problem.weight(i) / static_cast<double>(n), grad);
    } else {
      for (std::size_t b = 0; b < m; ++b) {
        const std::size_t i = pick(rng);
        problem.loss->add_gradient(w, problem.data[i],
                                   nb * problem.weight(i) / static_cast<double>(m), grad);
      }
    }
    for (int j : free) {
      const double drift = grad[j] + problem.gamma * (w[j] - problem.w_star[j]);
      w[j] -= 0.5 * eps * drift;
      if (config.inject_noise) w[j] += noise * normal(rng);
    }
    const double dist = (w - problem.w_star).norm();
    if (!std::isfinite(dist) || dist > radius) {
      throw DivergenceError("SGLD diverged at step " + std::to_string(step) +
                                " (|w - w*| = " + std::to_string(dist) +
                                ", step size " + std::to_string(eps) +
                                "); try step_size <= " + std::to_string(suggested),
                            eps, suggested);
    }
    if (step >= config.burn_in && (step - config.burn_in + 1) % config.thinning == 0)
      out.draws.push_back(w);
  }
  return out;
}

}  // namespace

void SGLDConfig::validate(std::size_t n) const {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw InvalidArgument("step_size must be > 0");
  if (minibatch_size > n)
    throw InvalidArgument("minibatch_size must lie in [1, n]");
  if (steps <= 0) throw InvalidArgument("steps must be > 0");
  if (burn_in < 0) throw InvalidArgument("burn_in must be >= 0");
  if (thinning < 1) throw InvalidArgument("thinning must be >= 1");
  if (steps < thinning) throw InvalidArgument("steps must be >= thinning");
  if (chains < 1) throw InvalidArgument("chains must be >= 1");
}

double stability_bound(const GibbsProblem& problem,
                       const std::optional<ComponentSpec>& restriction,
                       std::uint64_t seed) {
  problem.validate();
  if (restriction) restriction->validate(problem.dimension());
  const auto free = free_indices(problem, restriction);
  double lambda_max =
      max_free_eigenvalue(empirical_hessian(problem.w_star, problem), free);
  const double start = bound_from(problem, lambda_max);
  if (!std::isfinite(start)) return start;

  SGLDConfig probe;
  probe.step_size = 0.25 * start;
  probe.burn_in = 0;
  probe.steps = 200;
  probe.thinning = 20;
  probe.seed = derive_seed(seed, "stability-probe");
  const double radius = 1e3 * problem.w_star.norm() + 1e3;
  try {
    const auto run = run_one(problem, probe, free, probe.seed, radius, probe.step_size);
    for (const auto& w : run.draws)
      lambda_max = std::max(lambda_max,
                            max_free_eigenvalue(empirical_hessian(w, problem), free));
  } catch (const NumericalError&) {
    // The probe itself left the basin; the bound at w* is all we have.
  }
  return bound_from(problem, lambda_max);
}

ChainSamples sgld_run(const GibbsProblem& problem, const SGLDConfig& config,
                      const std::optional<ComponentSpec>& restriction) {
  problem.validate();
  config.validate(problem.n());
  if (restriction) restriction->validate(problem.dimension());
  const auto free = free_indices(problem, restriction);
  const double radius = config.divergence_radius > 0.0
                            ? config.divergence_radius
                            : 1e3 * problem.w_star.norm() + 1e3;
  const double bound = bound_from(
      problem, max_free_eigenvalue(empirical_hessian(problem.w_star, problem), free));
  const double suggested =
      std::min(0.1 * config.step_size, std::isfinite(bound) ? 0.5 * bound : config.step_size);

  const std::string stream =
      restriction ? "sgld-restricted/" + restriction->name : std::string("sgld");
  std::vector<ChainResult> results(static_cast<std::size_t>(config.chains));
  parallel_for(results.size(), config.threads, [&](std::size_t c) {
    results[c] = run_one(problem, config, free, derive_seed(config.seed, stream, c),
                         radius, suggested);
  });

  std::size_t total = 0;
  for (const auto& r : results) total += r.draws.size();
  Matrix draws(static_cast<Eigen::Index>(total), problem.dimension());
  Eigen::Index row = 0;
  for (const auto& r : results)
    for (const auto& w : r.draws) draws.row(row++) = w.transpose();
  ChainSamples out = make_chain_samples(problem, std::move(draws), restriction);
  out.chains = config.chains;
  return out;
}

}  // namespace suscept
