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

// Large-t (t = n beta) expansions of posterior expectations and covariances
// around a nondegenerate minimum w* of L, flat prior:
//
//   H = D^2 L(w*), Sigma = H^-1, T = D^3 L(w*), (K:M)_i = sum_jk K_ijk M_jk.
//
// Also a Gaussian moment engine (Isserlis pairings) used as an independent
// evaluation path for the order t^-2 covariance.

#ifndef SUSCEPT_LAPLACE_HPP_
#define SUSCEPT_LAPLACE_HPP_

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "suscept/rng.hpp"
#include "suscept/types.hpp"

namespace suscept::laplace {

// Dense d x d x d tensor; symmetry is checked, not enforced by storage.
class SymmetricTensor3 {
 public:
  SymmetricTensor3() = default;
  explicit SymmetricTensor3(int dimension);

  int dimension() const { return d_; }
  double operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }
  // Writes `value` to all six permutations of (i, j, k).
  void set(int i, int j, int k, double value);
  bool is_symmetric(double tolerance = 1e-12) const;
  bool is_zero() const;

  // Average over the six index permutations.
  static SymmetricTensor3 symmetrize(const std::vector<double>& dense, int dimension);
  static SymmetricTensor3 random(int dimension, Rng& rng, double scale = 1.0);

 private:
  std::size_t offset(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d_ + j) * d_ + k;
  }
  int d_ = 0;
  std::vector<double> data_;
};

// (K:M)_i = sum_{j,k} K_ijk M_jk.
Vector contract3(const SymmetricTensor3& K, const Matrix& M);

struct QuarticCoefficients {
  double lambda = 1.0;
  double alpha = 0.0;
  double gamma = 1.0;  // quartic coefficient
};

class TaylorData {
 public:
  // Throws InvalidArgument unless H is symmetric positive definite and T is
  // symmetric with matching dimension.
  TaylorData(Matrix hessian, SymmetricTensor3 cubic);

  // L = lambda x^2/2 + alpha x^3/6 + gamma x^4/24; needs lambda, gamma > 0
  // and alpha^2 < 3 lambda gamma.
  static TaylorData quartic_1d(const QuarticCoefficients& q);

  int dimension() const { return static_cast<int>(hessian_.rows()); }
  const Matrix& hessian() const { return hessian_; }
  const Matrix& sigma() const { return sigma_; }
  const SymmetricTensor3& cubic() const { return cubic_; }
  const std::optional<QuarticCoefficients>& quartic() const { return quartic_; }
  // Ascending eigenvalues of H and matching orthonormal eigenvectors.
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  // (T:Sigma), used by several formulas.
  const Vector& t_sigma() const { return t_sigma_; }

 private:
  Matrix hessian_;
  Matrix sigma_;
  SymmetricTensor3 cubic_;
  std::optional<QuarticCoefficients> quartic_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Vector t_sigma_;
};

// Taylor jet of an observable at w*.
struct ObservableJet {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  SymmetricTensor3 third;

  static ObservableJet zero(int dimension);
  void validate(int dimension) const;
};

// (1/2t)[tr(D^2 phi Sigma) - D phi^T Sigma (T:Sigma)]; phi.value must be 0.
double expectation_leading(const ObservableJet& phi, const TaylorData& taylor, double t);

// (1/t) D phi^T Sigma D psi; both values must be 0.
double cov_leading(const ObservableJet& phi, const ObservableJet& psi,
                   const TaylorData& taylor, double t);
// Same quantity evaluated in the eigenbasis of H.
double cov_leading_eigenbasis(const ObservableJet& phi, const ObservableJet& psi,
                              const TaylorData& taylor, double t);

// Order t^-2 covariance for D phi(w*) = 0. psi's value is treated as an
// additive constant and ignored.
double cov_nlo(const ObservableJet& phi, const ObservableJet& psi,
               const TaylorData& taylor, double t);

// Cov_t[K, f_z] at order t^-2 from the gradient and Hessian of l_z at w*.
double llc_suscept_leading(const Vector& grad_ell, const Matrix& hess_ell,
                           const TaylorData& taylor, double t);

// -D phi^T Sigma D(Delta L).
double influence_function(const Vector& phi_grad, const Vector& delta_l_grad,
                          const TaylorData& taylor);

// ---------------------------------------------------------------------------
// Gaussian moments

using Pairing = std::vector<std::pair<int, int>>;

// All perfect pairings of positions 0..count-1 (count even, <= 8), in a fixed
// lexicographic order.
std::vector<Pairing> perfect_pairings(int count);

// E[X_{i1} ... X_{ik}] for X ~ N(0, Sigma); 0 for odd k. k <= 8.
double isserlis_moment(const Matrix& sigma, std::span<const int> indices);

// Degree-6 pairings of the legs (A, A, b, T, T, T) of E[phi2 psi1 V3],
// classified by where the two A legs go.
struct PairingClassCounts {
  int a_with_a = 0;
  int a_with_b = 0;
  int a_with_t = 0;
  int total() const { return a_with_a + a_with_b + a_with_t; }
};
PairingClassCounts degree6_pairing_classes();

struct GaussianTerms {
  double phi2_psi2 = 0.0;       // E[phi2 psi2]
  double phi3_psi1 = 0.0;       // E[phi3 psi1]
  double phi2_psi1_v3 = 0.0;    // E[phi2 psi1 V3]
  double mean_phi = 0.0;        // E[phi2] - E[phi1 V3]
  double mean_psi = 0.0;        // E[psi2] - E[psi1 V3]

  // t^2 Cov_t[phi, psi] at order t^-2.
  double covariance_coefficient() const {
    return phi2_psi2 + phi3_psi1 - phi2_psi1_v3 - mean_phi * mean_psi;
  }
};

// Every expectation above by explicit index sums over isserlis_moment, with
// X ~ N(0, Sigma).
GaussianTerms gaussian_term_oracle(const ObservableJet& phi, const ObservableJet& psi,
                                   const TaylorData& taylor);

}  // namespace suscept::laplace

#endif  // SUSCEPT_LAPLACE_HPP_
