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

// Tempered Gibbs posteriors
//
//   p(w) ∝ exp(-n beta L_n(w)) * exp(-gamma/2 |w - w*|^2)
//
// with L_n(w) = (1/n) sum_i rho_i l_{z_i}(w), and an SGLD sampler for them.

#ifndef SUSCEPT_GIBBS_HPP_
#define SUSCEPT_GIBBS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suscept/models.hpp"
#include "suscept/stats.hpp"
#include "suscept/types.hpp"

namespace suscept {

struct GibbsProblem {
  std::shared_ptr<const PerSampleLoss> loss;
  std::vector<Vector> data;
  double beta = 1.0;
  double gamma = 0.0;
  Vector w_star;
  // Per-sample weights rho_i; empty means all ones.
  Vector weights;

  int dimension() const { return loss ? loss->dimension() : 0; }
  std::size_t n() const { return data.size(); }
  double n_beta() const { return static_cast<double>(n()) * beta; }
  double weight(std::size_t i) const {
    return weights.size() == 0 ? 1.0 : weights[static_cast<Eigen::Index>(i)];
  }

  void validate() const;
  // Stable hash of everything that defines the posterior.
  std::string fingerprint() const;
};

// (1/n) sum_i rho_i l_{z_i}(w). Throws NonFiniteError on NaN/inf.
double empirical_loss(const Vector& w, const GibbsProblem& problem);
// Unweighted l_{z_i}(w) for every data point.
Vector per_sample_losses(const Vector& w, const GibbsProblem& problem);
Vector empirical_gradient(const Vector& w, const GibbsProblem& problem);
Matrix empirical_hessian(const Vector& w, const GibbsProblem& problem);

// Damped Newton iteration on L_n from `start` (w* when empty).
Vector minimize_empirical_loss(const GibbsProblem& problem, Vector start = {},
                               double tolerance = 1e-12, int max_iterations = 200);

// Component C of W = U x C. Indices are 0-based; the complement stays at w*.
struct ComponentSpec {
  std::string name;
  std::vector<int> indices;

  void validate(int dimension) const;
  std::vector<int> complement(int dimension) const;
};

struct SGLDConfig {
  double step_size = 1e-4;
  // 0 selects the full dataset. With m == n the gradient is the exact
  // full-batch gradient (no resampling).
  std::size_t minibatch_size = 0;
  // Post-burn-in steps per chain.
  long steps = 100000;
  long burn_in = 10000;
  long thinning = 10;
  int chains = 1;
  std::uint64_t seed = 0;
  // <= 0 selects 1e3 |w*| + 1e3.
  double divergence_radius = 0.0;
  // false turns SGLD into (localized) gradient descent.
  bool inject_noise = true;
  std::size_t threads = 1;

  void validate(std::size_t n) const;
};

struct ChainSamples {
  Matrix draws;              // S x d
  Matrix per_sample_losses;  // S x n, l_{z_i}(w_t)
  Vector full_loss;          // S, L_n(w_t) (weighted)
  double reference_loss = 0.0;  // L_n(w*)
  std::optional<ComponentSpec> restriction;
  std::string fingerprint;
  int chains = 1;

  std::size_t size() const { return static_cast<std::size_t>(draws.rows()); }
  std::span<const double> losses_of(std::size_t i) const;
};

// Wraps externally produced draws (one per row), caching all losses.
ChainSamples make_chain_samples(const GibbsProblem& problem, Matrix draws,
                                std::optional<ComponentSpec> restriction = {});

// 2 / (n beta lambda_max + gamma), lambda_max taken over the Hessian of L_n
// at w* and along a short noisy probe run.
double stability_bound(const GibbsProblem& problem,
                       const std::optional<ComponentSpec>& restriction = {},
                       std::uint64_t seed = 0);

// w <- w - eps/2 [n beta grad L_m(w) + gamma (w - w*)] + N(0, eps I) on the
// free coordinates. Chains run on independent sub-streams of config.seed and
// are concatenated in chain order.
ChainSamples sgld_run(const GibbsProblem& problem, const SGLDConfig& config,
                      const std::optional<ComponentSpec>& restriction = {});

// Mean of per-draw observable values with batch-means standard error.
Estimate posterior_expectation(const ChainSamples& samples,
                               std::span<const double> values);

}  // namespace suscept

#endif  // SUSCEPT_GIBBS_HPP_
