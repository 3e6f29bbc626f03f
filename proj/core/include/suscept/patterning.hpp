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

// Linear response inversion: given a susceptibility matrix X (observables x
// data) and a desired change d_mu of the structural coordinates, find the
// data perturbation that produces it.

#ifndef SUSCEPT_PATTERNING_HPP_
#define SUSCEPT_PATTERNING_HPP_

#include <optional>

#include "suscept/types.hpp"

namespace suscept::patterning {

inline constexpr double kDefaultRankTolerance = 1e-10;

struct ModeDecomposition {
  Vector singular_values;  // descending, all min(H, D) of them
  Matrix left_modes;       // H x min(H, D), columns u_a
  Matrix right_modes;      // D x min(H, D), columns v_a
  Eigen::Index rank = 0;   // count of sigma_a > tolerance * sigma_max
  double rank_tolerance = kDefaultRankTolerance;
};

// Thin SVD. Throws NonFiniteError on NaN/inf entries.
ModeDecomposition svd_modes(const Matrix& X,
                            double rank_tolerance = kDefaultRankTolerance);

// Moore-Penrose pseudo-inverse from the retained modes.
Matrix pseudo_inverse(const Matrix& X, double rank_tolerance = kDefaultRankTolerance);
Matrix pseudo_inverse(const ModeDecomposition& modes);

// (1/(n beta)) X^+ d_mu.
Vector pseudo_inverse_solve(const Matrix& X, const Vector& d_mu, double n_beta,
                            double rank_tolerance = kDefaultRankTolerance);

// R = X^T (X X^T + lambda I)^-1, lambda > 0.
Matrix ridge_inverse(const Matrix& X, double lambda);
// Same operator built from the SVD with 1/sigma -> sigma / (sigma^2 + lambda).
Matrix ridge_inverse_svd(const Matrix& X, double lambda);

// n beta X dq.
Vector forward_predict(const Matrix& X, const Vector& dq, double n_beta);

struct ReweightPlan {
  Vector direction;        // s, projected to sum(s) = 0
  double epsilon = 0.0;
  double beta = 0.0;
  Vector weights;          // rho = 1 + epsilon s
  Vector target;           // d_mu*
  Vector achieved;         // epsilon beta X s
  double residual_norm = 0.0;       // |achieved - target|
  double projection_residual = 0.0; // |s_raw - s|
  bool negative_weights = false;
  std::optional<double> ridge_lambda;
};

// s = (1/(epsilon beta)) Inv(X) d_mu*, Inv the pseudo-inverse or, when
// ridge_lambda is set, the ridge inverse; then projected onto sum(s) = 0.
ReweightPlan batch_reweight(const Matrix& X_hat, const Vector& d_mu_star, double epsilon,
                            double beta, std::optional<double> ridge_lambda = {},
                            double rank_tolerance = kDefaultRankTolerance);

}  // namespace suscept::patterning

#endif  // SUSCEPT_PATTERNING_HPP_
