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

// Monte Carlo summary statistics shared by the lattice and the parametric
// samplers. Covariances use the 1/(S-1) normalization throughout; standard
// errors come from non-overlapping batch means with ceil(sqrt(S)) batches.

#ifndef SUSCEPT_STATS_HPP_
#define SUSCEPT_STATS_HPP_

#include <cstddef>
#include <span>

namespace suscept {

struct Estimate {
  double value = 0.0;
  // Batch-means standard error (autocorrelation aware).
  double standard_error = 0.0;
  // Standard error assuming independent draws, sd / sqrt(S).
  double naive_standard_error = 0.0;
  // S * (naive_se / se)^2; equals S for uncorrelated draws.
  double effective_sample_size = 0.0;
};

struct CovarianceEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  // Set when either input sequence is constant. The value is then 0.
  bool degenerate = false;
};

double mean(std::span<const double> x);

// Unbiased sample covariance, 1/(S-1). Requires S >= 2.
double sample_covariance(std::span<const double> x, std::span<const double> y);

std::size_t batch_count(std::size_t samples);

// Batch-means standard error of the mean of `series`. Leading samples that do
// not fill a whole batch are dropped. Returns 0 for constant input.
double batch_means_standard_error(std::span<const double> series);

// Mean with batch-means and naive standard errors.
Estimate mean_estimate(std::span<const double> series);

// Sample covariance with a batch-means standard error computed on the
// centred product series (x_t - xbar)(y_t - ybar).
CovarianceEstimate covariance_estimate(std::span<const double> x,
                                       std::span<const double> y);

}  // namespace suscept

#endif  // SUSCEPT_STATS_HPP_
