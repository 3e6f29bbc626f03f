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

#include "suscept/patterning.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "suscept/errors.hpp"

namespace suscept::patterning {
namespace {

void check_finite(const Matrix& X) {
  if (!X.allFinite()) throw NonFiniteError("matrix has non-finite entries");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("ridge lambda must be > 0, got " + std::to_string(lambda));
}

}  // namespace

ModeDecomposition svd_modes(const Matrix& X, double rank_tolerance) {
  check_finite(X);
  if (!(rank_tolerance >= 0.0)) throw InvalidArgument("rank tolerance must be >= 0");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ModeDecomposition out;
  out.singular_values = svd.singularValues();
  out.left_modes = svd.matrixU();
  out.right_modes = svd.matrixV();
  out.rank_tolerance = rank_tolerance;
  const double cutoff =
      out.singular_values.size() ? rank_tolerance * out.singular_values[0] : 0.0;
  for (Eigen::Index a = 0; a < out.singular_values.size(); ++a)
    if (out.singular_values[a] > cutoff) out.rank = a + 1;
  return out;
}

Matrix pseudo_inverse(const ModeDecomposition& m) {
  const Eigen::Index r = m.rank;
  const Vector inv = m.singular_values.head(r).cwiseInverse();
  return m.right_modes.leftCols(r) * inv.asDiagonal() * m.left_modes.leftCols(r).transpose();
}

Matrix pseudo_inverse(const Matrix& X, double rank_tolerance) {
  return pseudo_inverse(svd_modes(X, rank_tolerance));
}

Vector pseudo_inverse_solve(const Matrix& X, const Vector& d_mu, double n_beta,
                            double rank_tolerance) {
  if (d_mu.size() != X.rows())
    throw InvalidArgument("d_mu has length " + std::to_string(d_mu.size()) +
                          " but X has " + std::to_string(X.rows()) + " rows");
  if (!(n_beta > 0.0)) throw InvalidArgument("n beta must be positive");
  const ModeDecomposition m = svd_modes(X, rank_tolerance);
  Vector dq = Vector::Zero(X.cols());
  for (Eigen::Index a = 0; a < m.rank; ++a)
    dq += (m.left_modes.col(a).dot(d_mu) / m.singular_values[a]) * m.right_modes.col(a);
  return dq / n_beta;
}

Matrix ridge_inverse(const Matrix& X, double lambda) {
  check_lambda(lambda);
  check_finite(X);
  const Matrix gram = X * X.transpose() + lambda * Matrix::Identity(X.rows(), X.rows());
  // R = X^T G^-1 = (G^-1 X)^T since G is symmetric.
  return Eigen::LLT<Matrix>(gram).solve(X).transpose();
}

Matrix ridge_inverse_svd(const Matrix& X, double lambda) {
  check_lambda(lambda);
  const ModeDecomposition m = svd_modes(X, 0.0);
  const Vector damped =
      m.singular_values.array() / (m.singular_values.array().square() + lambda);
  return m.right_modes * damped.asDiagonal() * m.left_modes.transpose();
}

Vector forward_predict(const Matrix& X, const Vector& dq, double n_beta) {
  if (dq.size() != X.cols())
    throw InvalidArgument("dq has length " + std::to_string(dq.size()) + " but X has " +
                          std::to_string(X.cols()) + " columns");
  return n_beta * (X * dq);
}

ReweightPlan batch_reweight(const Matrix& X_hat, const Vector& d_mu_star, double epsilon,
                            double beta, std::optional<double> ridge_lambda,
                            double rank_tolerance) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be > 0, got " + std::to_string(epsilon));
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  if (d_mu_star.size() != X_hat.rows())
    throw InvalidArgument("target has length " + std::to_string(d_mu_star.size()) +
                          " but X has " + std::to_string(X_hat.rows()) + " rows");
  const Matrix inv = ridge_lambda ? ridge_inverse(X_hat, *ridge_lambda)
                                  : pseudo_inverse(X_hat, rank_tolerance);
  const Vector raw = inv * d_mu_star / (epsilon * beta);
  ReweightPlan plan;
  plan.direction = raw.array() - raw.mean();
  plan.projection_residual = (raw - plan.direction).norm();
  plan.epsilon = epsilon;
  plan.beta = beta;
  plan.weights = (1.0 + epsilon * plan.direction.array()).matrix();
  plan.negative_weights = (plan.weights.array() < 0.0).any();
  plan.target = d_mu_star;
  plan.achieved = epsilon * beta * (X_hat * plan.direction);
  plan.residual_norm = (plan.achieved - d_mu_star).norm();
  plan.ridge_lambda = ridge_lambda;
  return plan;
}

}  // namespace suscept::patterning
