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

#include "suscept/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "suscept/errors.hpp"

namespace suscept {
namespace {

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [first = x.front()](double v) { return v == first; });
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean of an empty sequence");
  // Two-pass: shift by the first element to limit cancellation.
  const double shift = x.front();
  double acc = 0.0;
  for (double v : x) acc += v - shift;
  return shift + acc / static_cast<double>(x.size());
}

double sample_covariance(std::span<const double> x,
                         std::span<const double> y) {
  if (x.size() != y.size())
    throw InvalidArgument("covariance of sequences with different lengths");
  if (x.size() < 2) throw InvalidArgument("covariance needs at least 2 draws");
  const double mx = mean(x);
  const double my = mean(y);
  double acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) acc += (x[t] - mx) * (y[t] - my);
  return acc / static_cast<double>(x.size() - 1);
}

std::size_t batch_count(std::size_t samples) {
  return static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(samples))));
}

double batch_means_standard_error(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw InvalidArgument("standard error needs at least 2 draws");
  std::size_t batches = batch_count(n);
  std::size_t size = n / batches;
  if (size == 0) {
    size = 1;
    batches = n;
  }
  const std::size_t skip = n - batches * size;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = mean(series.subspan(skip + b * size, size));
  }
  if (batches < 2) return 0.0;
  const double var = sample_covariance(means, means);
  return std::sqrt(std::max(var, 0.0) / static_cast<double>(batches));
}

Estimate mean_estimate(std::span<const double> series) {
  Estimate e;
  e.value = mean(series);
  if (series.size() < 2) throw InvalidArgument("estimate needs at least 2 draws");
  const double var = sample_covariance(series, series);
  const double s = static_cast<double>(series.size());
  e.naive_standard_error = std::sqrt(std::max(var, 0.0) / s);
  e.standard_error = batch_means_standard_error(series);
  e.effective_sample_size =
      e.standard_error > 0.0
          ? s * (e.naive_standard_error * e.naive_standard_error) /
                (e.standard_error * e.standard_error)
          : s;
  return e;
}

CovarianceEstimate covariance_estimate(std::span<const double> x,
                                       std::span<const double> y) {
  CovarianceEstimate c;
  if (x.size() != y.size())
    throw InvalidArgument("covariance of sequences with different lengths");
  if (x.size() < 2) throw InvalidArgument("covariance needs at least 2 draws");
  if (is_constant(x) || is_constant(y)) {
    c.degenerate = true;
    return c;
  }
  const double mx = mean(x);
  const double my = mean(y);
  std::vector<double> product(x.size());
  for (std::size_t t = 0; t < x.size(); ++t)
    product[t] = (x[t] - mx) * (y[t] - my);
  const double s = static_cast<double>(x.size());
  c.value = mean(product) * s / (s - 1.0);
  c.standard_error = batch_means_standard_error(product) * s / (s - 1.0);
  return c;
}

}  // namespace suscept
