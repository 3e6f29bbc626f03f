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

#include "suscept/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Eigenvalues>

#include "suscept/errors.hpp"
#include "suscept/rng.hpp"

namespace suscept {
namespace {

void append_hex(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a,", x);
  out += buf;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw NonFiniteError(std::string(what) + " evaluated to a non-finite value");
}

}  // namespace

void GibbsProblem::validate() const {
  if (!loss) throw InvalidArgument("problem has no loss");
  const int d = loss->dimension();
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  if (data.empty()) throw InvalidArgument("dataset must be non-empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != loss->data_dimension())
      throw InvalidArgument("data point " + std::to_string(i) +
                            " has the wrong length");
  }
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidArgument("beta must be positive, got " + std::to_string(beta));
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("gamma must be >= 0, got " + std::to_string(gamma));
  if (w_star.size() != d) throw InvalidArgument("w_star has the wrong length");
  if (!w_star.allFinite()) throw InvalidArgument("w_star must be finite");
  if (weights.size() != 0) {
    if (static_cast<std::size_t>(weights.size()) != data.size())
      throw InvalidArgument("weights must have one entry per data point");
    if (!weights.allFinite()) throw InvalidArgument("weights must be finite");
  }
}

std::string GibbsProblem::fingerprint() const {
  std::string s = loss ? loss->describe() : "none";
  s += "|data:";
  for (const auto& z : data) {
    for (Eigen::Index j = 0; j < z.size(); ++j) append_hex(s, z[j]);
    s += ';';
  }
  s += "|beta:";
  append_hex(s, beta);
  s += "|gamma:";
  append_hex(s, gamma);
  s += "|w*:";
  for (Eigen::Index j = 0; j < w_star.size(); ++j) append_hex(s, w_star[j]);
  s += "|rho:";
  for (Eigen::Index j = 0; j < weights.size(); ++j) append_hex(s, weights[j]);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

double empirical_loss(const Vector& w, const GibbsProblem& problem) {
  if (w.size() != problem.dimension())
    throw InvalidArgument("parameter vector has the wrong length");
  double total = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const double v = problem.loss->value(w, problem.data[i]);
    check_finite(v, "per-sample loss");
    total += problem.weight(i) * v;
  }
  return total / static_cast<double>(problem.n());
}

Vector per_sample_losses(const Vector& w, const GibbsProblem& problem) {
  Vector out(static_cast<Eigen::Index>(problem.n()));
  for (std::size_t i = 0; i < problem.n(); ++i) {
    out[static_cast<Eigen::Index>(i)] = problem.loss->value(w, problem.data[i]);
    check_finite(out[static_cast<Eigen::Index>(i)], "per-sample loss");
  }
  return out;
}

Vector empirical_gradient(const Vector& w, const GibbsProblem& problem) {
  Vector g = Vector::Zero(problem.dimension());
  const double inv_n = 1.0 / static_cast<double>(problem.n());
  for (std::size_t i = 0; i < problem.n(); ++i)
    problem.loss->add_gradient(w, problem.data[i], problem.weight(i) * inv_n, g);
  if (!g.allFinite()) throw NonFiniteError("gradient is non-finite");
  return g;
}

Matrix empirical_hessian(const Vector& w, const GibbsProblem& problem) {
  const int d = problem.dimension();
  Matrix h = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < problem.n(); ++i)
    h += problem.weight(i) * problem.loss->hessian(w, problem.data[i]);
  h /= static_cast<double>(problem.n());
  if (!h.allFinite()) throw NonFiniteError("Hessian is non-finite");
  return h;
}

Vector minimize_empirical_loss(const GibbsProblem& problem, Vector start,
                               double tolerance, int max_iterations) {
  problem.validate();
  Vector w = start.size() == 0 ? problem.w_star : std::move(start);
  double f = empirical_loss(w, problem);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector g = empirical_gradient(w, problem);
    if (g.norm() <= tolerance) break;
    const Matrix h = empirical_hessian(w, problem);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    const double floor = 1e-8 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    const Vector inv = eig.eigenvalues().cwiseAbs().cwiseMax(floor).cwiseInverse();
    const Vector step = eig.eigenvectors() * inv.asDiagonal() *
                        eig.eigenvectors().transpose() * g;
    bool accepted = false;
    for (double a = 1.0; a > 1e-12; a *= 0.5) {
      const Vector trial = w - a * step;
      const double ft = empirical_loss(trial, problem);
      if (ft <= f - 1e-4 * a * g.dot(step)) {
        w = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return w;
}

void ComponentSpec::validate(int dimension) const {
  if (indices.empty())
    throw InvalidArgument("component '" + name + "' has no indices");
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] < 0 || sorted[k] >= dimension)
      throw InvalidArgument("component '" + name + "' index " +
                            std::to_string(sorted[k]) + " is out of range [0, " +
                            std::to_string(dimension) + ")");
    if (k > 0 && sorted[k] == sorted[k - 1])
      throw InvalidArgument("component '" + name + "' repeats index " +
                            std::to_string(sorted[k]));
  }
}

std::vector<int> ComponentSpec::complement(int dimension) const {
  std::vector<int> out;
  for (int j = 0; j < dimension; ++j)
    if (std::find(indices.begin(), indices.end(), j) == indices.end())
      out.push_back(j);
  return out;
}

std::span<const double> ChainSamples::losses_of(std::size_t i) const {
  if (i >= static_cast<std::size_t>(per_sample_losses.cols()))
    throw InvalidArgument("data index " + std::to_string(i) + " out of range");
  return {per_sample_losses.data() + i * size(), size()};
}

ChainSamples make_chain_samples(const GibbsProblem& problem, Matrix draws,
                                std::optional<ComponentSpec> restriction) {
  problem.validate();
  if (draws.cols() != problem.dimension())
    throw InvalidArgument("draws must have one column per parameter");
  if (restriction) restriction->validate(problem.dimension());
  ChainSamples out;
  const auto S = draws.rows();
  const auto n = static_cast<Eigen::Index>(problem.n());
  out.per_sample_losses.resize(S, n);
  out.full_loss.resize(S);
  const Vector rho = problem.weights.size() == 0 ? Vector::Ones(n) : problem.weights;
  for (Eigen::Index t = 0; t < S; ++t) {
    const Vector w = draws.row(t).transpose();
    const Vector l = per_sample_losses(w, problem);
    out.per_sample_losses.row(t) = l.transpose();
    out.full_loss[t] = rho.dot(l) / static_cast<double>(n);
  }
  out.reference_loss = empirical_loss(problem.w_star, problem);
  out.draws = std::move(draws);
  out.restriction = std::move(restriction);
  out.fingerprint = problem.fingerprint();
  return out;
}

Estimate posterior_expectation(const ChainSamples& samples,
                               std::span<const double> values) {
  if (values.size() != samples.size())
    throw InvalidArgument("need one observable value per draw");
  if (values.size() < 2) throw InvalidArgument("need at least 2 draws");
  return mean_estimate(values);
}

}  // namespace suscept
