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

// Susceptibility estimators computed from posterior draws.
//
// All covariances use the 1/(S-1) sample normalization and batch-means
// standard errors. L_n below is the (weighted) empirical loss cached with the
// draws.

#ifndef SUSCEPT_ESTIMATORS_HPP_
#define SUSCEPT_ESTIMATORS_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "suscept/gibbs.hpp"
#include "suscept/stats.hpp"
#include "suscept/types.hpp"

namespace suscept {

struct ObservableSpec {
  enum class Kind {
    kPerSampleLoss,  // l_{z'}(w)
    kExcessLoss,     // K(w) = L_n(w) - L_n(w*)
    kComponentLoss,  // L_n(u*, v) - L_n(w*); restricted draws only
    kCustom,
  };
  Kind kind = Kind::kExcessLoss;
  std::string label;
  Vector query;                 // kPerSampleLoss
  ComponentSpec component;      // kComponentLoss
  std::function<double(const Vector&)> function;  // kCustom
};

// Observable value at every draw.
Vector observable_values(const ObservableSpec& spec, const ChainSamples& samples,
                         const GibbsProblem& problem);

enum class Standardization { kRaw, kComponentZScored, kFullyStandardized };

std::string to_string(Standardization s);

// H x D: rows are observables / components, columns are data points.
struct SusceptibilityMatrix {
  Matrix values;
  Matrix standard_errors;  // same shape, or empty
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  Standardization standardization = Standardization::kRaw;
  // Entries carry the unestimated Z_full / Z_C factor.
  bool renormalized = false;
  std::vector<std::string> fingerprints;

  void validate() const;
};

// M x D, entries -Cov[l_{z'_m} - L_n, l_{z_k} - L_n].
struct InfluenceMatrix {
  Matrix values;
  Matrix standard_errors;
  std::vector<std::string> query_labels;
  std::vector<std::string> data_labels;
};

// -Cov[phi, l_{z_i} - L_n] over the draws.
CovarianceEstimate per_sample_susceptibility(const ChainSamples& samples,
                                             std::span<const double> phi,
                                             std::size_t i);

// One row per observable, one column per data point of the problem.
SusceptibilityMatrix susceptibility_matrix(const ChainSamples& samples,
                                           const std::vector<Vector>& observables,
                                           std::vector<std::string> row_labels = {});

// Queries are evaluated on the draws; data columns use the cached losses
// when `data` is empty, otherwise the given points.
InfluenceMatrix influence_matrix(const ChainSamples& samples,
                                 const GibbsProblem& problem,
                                 const std::vector<Vector>& queries,
                                 const std::vector<Vector>& data = {});

// Cov[l_z(w) - l_z(w*), l_{z'}(w) - l_{z'}(w*)].
CovarianceEstimate loss_kernel(const ChainSamples& samples,
                               const GibbsProblem& problem, const Vector& z,
                               const Vector& z_prime);

// Renormalized hybrid estimator: one restricted chain per component plus a
// full chain. Throws FingerprintMismatch when the chains come from
// different problems.
SusceptibilityMatrix structural_susceptibility(
    const std::vector<ChainSamples>& restricted, const ChainSamples& full,
    const GibbsProblem& problem);

// Each component row is z-scored across data points (population 1/D
// variance), then each data column is centred across components. Throws
// ZeroVarianceError naming the first constant row.
SusceptibilityMatrix standardize(const SusceptibilityMatrix& matrix);

// n beta * mean_t [L_n(w_t) - L_n(w*)].
Estimate llc_estimate(const ChainSamples& samples, const GibbsProblem& problem);

// sum_k q'_k chi_k. Weights must be non-negative and sum to 1.
double susceptibility_from_density(std::span<const double> per_sample,
                                   std::span<const double> q_prime);

}  // namespace suscept

#endif  // SUSCEPT_ESTIMATORS_HPP_
