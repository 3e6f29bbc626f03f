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

#include "suscept/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "suscept/errors.hpp"

namespace suscept {
namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// l_{z_i}(w_t) - L_n(w_t) for a cached data index.
Vector centred_cached(const ChainSamples& samples, std::size_t i) {
  const auto l = samples.losses_of(i);
  return Eigen::Map<const Vector>(l.data(), static_cast<Eigen::Index>(l.size())) -
         samples.full_loss;
}

Vector centred_query(const ChainSamples& samples, const GibbsProblem& problem,
                     const Vector& z) {
  Vector out(static_cast<Eigen::Index>(samples.size()));
  for (Eigen::Index t = 0; t < out.size(); ++t)
    out[t] = problem.loss->value(samples.draws.row(t).transpose(), z) -
             samples.full_loss[t];
  if (!out.allFinite()) throw NonFiniteError("query loss is non-finite on the draws");
  return out;
}

void check_draws(const ChainSamples& samples) {
  if (samples.size() < 2) throw InvalidArgument("need at least 2 draws");
  if (samples.per_sample_losses.rows() != static_cast<Eigen::Index>(samples.size()))
    throw InvalidArgument("per-sample losses are not cached for every draw");
}

std::vector<std::string> data_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("z" + std::to_string(k));
  return out;
}

}  // namespace

Vector observable_values(const ObservableSpec& spec, const ChainSamples& samples,
                         const GibbsProblem& problem) {
  const auto S = static_cast<Eigen::Index>(samples.size());
  switch (spec.kind) {
    case ObservableSpec::Kind::kPerSampleLoss: {
      Vector out(S);
      for (Eigen::Index t = 0; t < S; ++t)
        out[t] = problem.loss->value(samples.draws.row(t).transpose(), spec.query);
      return out;
    }
    case ObservableSpec::Kind::kExcessLoss:
      return samples.full_loss.array() - samples.reference_loss;
    case ObservableSpec::Kind::kComponentLoss: {
      if (!samples.restriction)
        throw InvalidArgument("component loss needs component-restricted draws");
      std::vector<int> a = samples.restriction->indices, b = spec.component.indices;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b)
        throw InvalidArgument("draws are restricted to '" + samples.restriction->name +
                              "', not '" + spec.component.name + "'");
      return samples.full_loss.array() - samples.reference_loss;
    }
    case ObservableSpec::Kind::kCustom: {
      if (!spec.function) throw InvalidArgument("custom observable has no function");
      Vector out(S);
      for (Eigen::Index t = 0; t < S; ++t)
        out[t] = spec.function(samples.draws.row(t).transpose());
      if (!out.allFinite()) throw NonFiniteError("observable is non-finite on the draws");
      return out;
    }
  }
  throw InvalidArgument("unknown observable kind");
}

std::string to_string(Standardization s) {
  switch (s) {
    case Standardization::kRaw:
      return "raw";
    case Standardization::kComponentZScored:
      return "component_zscored";
    case Standardization::kFullyStandardized:
      return "fully_standardized";
  }
  return "unknown";
}

void SusceptibilityMatrix::validate() const {
  if (static_cast<Eigen::Index>(row_labels.size()) != values.rows() ||
      static_cast<Eigen::Index>(column_labels.size()) != values.cols())
    throw InvalidArgument("label counts do not match the matrix shape");
  if (standard_errors.size() != 0 &&
      (standard_errors.rows() != values.rows() || standard_errors.cols() != values.cols()))
    throw InvalidArgument("standard errors do not match the matrix shape");
}

CovarianceEstimate per_sample_susceptibility(const ChainSamples& samples,
                                             std::span<const double> phi,
                                             std::size_t i) {
  check_draws(samples);
  if (phi.size() != samples.size())
    throw InvalidArgument("need one observable value per draw");
  const Vector f = centred_cached(samples, i);
  CovarianceEstimate c = covariance_estimate(phi, as_span(f));
  c.value = -c.value;
  return c;
}

SusceptibilityMatrix susceptibility_matrix(const ChainSamples& samples,
                                           const std::vector<Vector>& observables,
                                           std::vector<std::string> row_labels) {
  check_draws(samples);
  const auto H = static_cast<Eigen::Index>(observables.size());
  const auto D = samples.per_sample_losses.cols();
  SusceptibilityMatrix out;
  out.values.resize(H, D);
  out.standard_errors.resize(H, D);
  for (Eigen::Index k = 0; k < D; ++k) {
    const Vector f = centred_cached(samples, static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < H; ++j) {
      const auto& phi = observables[static_cast<std::size_t>(j)];
      if (phi.size() != f.size()) throw InvalidArgument("need one observable value per draw");
      const auto c = covariance_estimate(as_span(phi), as_span(f));
      out.values(j, k) = -c.value;
      out.standard_errors(j, k) = c.standard_error;
    }
  }
  if (row_labels.empty())
    for (Eigen::Index j = 0; j < H; ++j) row_labels.push_back("phi" + std::to_string(j));
  out.row_labels = std::move(row_labels);
  out.column_labels = data_labels(static_cast<std::size_t>(D));
  out.fingerprints = {samples.fingerprint};
  out.validate();
  return out;
}

InfluenceMatrix influence_matrix(const ChainSamples& samples,
                                 const GibbsProblem& problem,
                                 const std::vector<Vector>& queries,
                                 const std::vector<Vector>& data) {
  check_draws(samples);
  if (samples.fingerprint != problem.fingerprint())
    throw FingerprintMismatch("draws were not produced for this problem");
  std::vector<Vector> columns;
  if (data.empty()) {
    for (std::size_t k = 0; k < problem.n(); ++k)
      columns.push_back(centred_cached(samples, k));
  } else {
    for (const auto& z : data) columns.push_back(centred_query(samples, problem, z));
  }
  std::vector<Vector> rows;
  for (const auto& z : queries) rows.push_back(centred_query(samples, problem, z));

  InfluenceMatrix out;
  const auto M = static_cast<Eigen::Index>(rows.size());
  const auto D = static_cast<Eigen::Index>(columns.size());
  out.values.resize(M, D);
  out.standard_errors.resize(M, D);
  for (Eigen::Index m = 0; m < M; ++m)
    for (Eigen::Index k = 0; k < D; ++k) {
      const auto c = covariance_estimate(as_span(rows[static_cast<std::size_t>(m)]),
                                         as_span(columns[static_cast<std::size_t>(k)]));
      out.values(m, k) = -c.value;
      out.standard_errors(m, k) = c.standard_error;
    }
  for (Eigen::Index m = 0; m < M; ++m) out.query_labels.push_back("q" + std::to_string(m));
  out.data_labels = data_labels(static_cast<std::size_t>(D));
  return out;
}

CovarianceEstimate loss_kernel(const ChainSamples& samples,
                               const GibbsProblem& problem, const Vector& z,
                               const Vector& z_prime) {
  check_draws(samples);
  const double a0 = problem.loss->value(problem.w_star, z);
  const double b0 = problem.loss->value(problem.w_star, z_prime);
  const auto S = static_cast<Eigen::Index>(samples.size());
  Vector a(S), b(S);
  for (Eigen::Index t = 0; t < S; ++t) {
    const Vector w = samples.draws.row(t).transpose();
    a[t] = problem.loss->value(w, z) - a0;
    b[t] = problem.loss->value(w, z_prime) - b0;
  }
  if (!a.allFinite() || !b.allFinite())
    throw NonFiniteError("loss is non-finite on the draws");
  return covariance_estimate(as_span(a), as_span(b));
}

SusceptibilityMatrix structural_susceptibility(
    const std::vector<ChainSamples>& restricted, const ChainSamples& full,
    const GibbsProblem& problem) {
  const std::string fp = problem.fingerprint();
  check_draws(full);
  if (full.fingerprint != fp)
    throw FingerprintMismatch("full chain fingerprint " + full.fingerprint +
                              " does not match problem " + fp);
  if (full.restriction)
    throw InvalidArgument("the full chain must not be component-restricted");
  const auto H = static_cast<Eigen::Index>(restricted.size());
  const auto D = static_cast<Eigen::Index>(problem.n());

  std::vector<Vector> baseline_series;
  Vector baseline(D), baseline_se(D);
  for (Eigen::Index k = 0; k < D; ++k) {
    baseline_series.push_back(centred_cached(full, static_cast<std::size_t>(k)));
    baseline[k] = mean(as_span(baseline_series.back()));
    baseline_se[k] = batch_means_standard_error(as_span(baseline_series.back()));
  }

  SusceptibilityMatrix out;
  out.values.resize(H, D);
  out.standard_errors.resize(H, D);
  out.fingerprints = {full.fingerprint};
  for (Eigen::Index j = 0; j < H; ++j) {
    const ChainSamples& r = restricted[static_cast<std::size_t>(j)];
    check_draws(r);
    if (r.fingerprint != fp)
      throw FingerprintMismatch("restricted chain " + std::to_string(j) + " fingerprint " +
                                r.fingerprint + " does not match problem " + fp);
    if (!r.restriction)
      throw InvalidArgument("chain " + std::to_string(j) + " is not component-restricted");
    const Vector K = r.full_loss.array() - r.reference_loss;
    const double k_bar = mean(as_span(K));
    for (Eigen::Index k = 0; k < D; ++k) {
      const Vector g = centred_cached(r, static_cast<std::size_t>(k));
      const Vector product = K.cwiseProduct(g);
      out.values(j, k) = -mean(as_span(product)) + k_bar * baseline[k];
      const Vector linear = -product + baseline[k] * K;
      const double se_r = batch_means_standard_error(as_span(linear));
      out.standard_errors(j, k) =
          std::sqrt(se_r * se_r + k_bar * k_bar * baseline_se[k] * baseline_se[k]);
    }
    out.row_labels.push_back(r.restriction->name);
    out.fingerprints.push_back(r.fingerprint);
  }
  out.column_labels = data_labels(static_cast<std::size_t>(D));
  out.renormalized = true;
  out.validate();
  return out;
}

SusceptibilityMatrix standardize(const SusceptibilityMatrix& matrix) {
  matrix.validate();
  if (matrix.standardization != Standardization::kRaw)
    throw InvalidArgument("standardize expects a raw matrix (it is applied once)");
  if (!matrix.values.allFinite()) throw NonFiniteError("matrix has non-finite entries");
  SusceptibilityMatrix out = matrix;
  Matrix& x = out.values;
  const double D = static_cast<double>(x.cols());
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const double m = x.row(j).mean();
    const double var = (x.row(j).array() - m).square().sum() / D;
    const double scale = x.row(j).cwiseAbs().maxCoeff();
    if (!(var > 0.0) || std::sqrt(var) <= 1e-14 * scale) {
      const std::string name =
          j < static_cast<Eigen::Index>(matrix.row_labels.size())
              ? matrix.row_labels[static_cast<std::size_t>(j)]
              : std::to_string(j);
      throw ZeroVarianceError("component '" + name + "' has zero variance across data",
                              static_cast<std::size_t>(j));
    }
    x.row(j) = (x.row(j).array() - m) / std::sqrt(var);
  }
  x.rowwise() -= x.colwise().mean();
  out.standard_errors.resize(0, 0);
  out.standardization = Standardization::kFullyStandardized;
  return out;
}

Estimate llc_estimate(const ChainSamples& samples, const GibbsProblem& problem) {
  check_draws(samples);
  const Vector k = problem.n_beta() * (samples.full_loss.array() - samples.reference_loss);
  return mean_estimate(as_span(k));
}

double susceptibility_from_density(std::span<const double> per_sample,
                                   std::span<const double> q_prime) {
  if (per_sample.size() != q_prime.size())
    throw InvalidArgument("weights and susceptibilities differ in length");
  double sum = 0.0, total = 0.0;
  for (std::size_t k = 0; k < q_prime.size(); ++k) {
    if (!(q_prime[k] >= 0.0)) throw InvalidArgument("density weights must be non-negative");
    total += q_prime[k];
    sum += q_prime[k] * per_sample[k];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("density weights sum to " + std::to_string(total) + ", not 1");
  return sum;
}

}  // namespace suscept
