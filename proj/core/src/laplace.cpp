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

#include "suscept/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "suscept/errors.hpp"

namespace suscept::laplace {
namespace {

constexpr double kZeroTolerance = 1e-12;

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be positive");
}

void check_vanishes(double value, const char* what) {
  if (std::abs(value) > kZeroTolerance)
    throw InvalidArgument(std::string(what) + " must vanish at w*, got " +
                          std::to_string(value));
}

void check_vector(const Vector& v, int d, const char* what) {
  if (v.size() != d)
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(v.size()) +
                          ", expected " + std::to_string(d));
}

}  // namespace

SymmetricTensor3::SymmetricTensor3(int dimension)
    : d_(dimension),
      data_(static_cast<std::size_t>(dimension) * dimension * dimension, 0.0) {
  if (dimension < 0) throw InvalidArgument("tensor dimension must be >= 0");
}

void SymmetricTensor3::set(int i, int j, int k, double value) {
  if (i < 0 || j < 0 || k < 0 || i >= d_ || j >= d_ || k >= d_)
    throw InvalidArgument("tensor index out of range");
  const std::array<std::array<int, 3>, 6> perms = {{{i, j, k}, {i, k, j}, {j, i, k},
                                                    {j, k, i}, {k, i, j}, {k, j, i}}};
  for (const auto& p : perms) data_[offset(p[0], p[1], p[2])] = value;
}

bool SymmetricTensor3::is_symmetric(double tolerance) const {
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k) {
        const double v = (*this)(i, j, k);
        if (std::abs(v - (*this)(j, i, k)) > tolerance ||
            std::abs(v - (*this)(i, k, j)) > tolerance ||
            std::abs(v - (*this)(k, j, i)) > tolerance)
          return false;
      }
  return true;
}

bool SymmetricTensor3::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

SymmetricTensor3 SymmetricTensor3::symmetrize(const std::vector<double>& dense,
                                              int dimension) {
  SymmetricTensor3 out(dimension);
  if (dense.size() != out.data_.size())
    throw InvalidArgument("dense tensor has the wrong size");
  auto at = [&](int i, int j, int k) { return dense[out.offset(i, j, k)]; };
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j)
      for (int k = 0; k < dimension; ++k)
        out.data_[out.offset(i, j, k)] = (at(i, j, k) + at(i, k, j) + at(j, i, k) +
                                          at(j, k, i) + at(k, i, j) + at(k, j, i)) /
                                         6.0;
  return out;
}

SymmetricTensor3 SymmetricTensor3::random(int dimension, Rng& rng, double scale) {
  SymmetricTensor3 out(dimension);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (int i = 0; i < dimension; ++i)
    for (int j = i; j < dimension; ++j)
      for (int k = j; k < dimension; ++k) out.set(i, j, k, u(rng));
  return out;
}

Vector contract3(const SymmetricTensor3& K, const Matrix& M) {
  const int d = K.dimension();
  if (M.rows() != d || M.cols() != d)
    throw InvalidArgument("contract3: matrix is " + std::to_string(M.rows()) + "x" +
                          std::to_string(M.cols()) + ", tensor dimension " +
                          std::to_string(d));
  Vector out = Vector::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out[i] += K(i, j, k) * M(j, k);
  return out;
}

TaylorData::TaylorData(Matrix hessian, SymmetricTensor3 cubic)
    : hessian_(std::move(hessian)), cubic_(std::move(cubic)) {
  const auto d = hessian_.rows();
  if (d < 1 || hessian_.cols() != d) throw InvalidArgument("Hessian must be square");
  if (!hessian_.allFinite()) throw InvalidArgument("Hessian must be finite");
  if ((hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, hessian_.cwiseAbs().maxCoeff()))
    throw InvalidArgument("Hessian must be symmetric");
  if (cubic_.dimension() != d)
    throw InvalidArgument("cubic tensor dimension does not match the Hessian");
  if (!cubic_.is_symmetric()) throw InvalidArgument("cubic tensor must be symmetric");
  Eigen::LLT<Matrix> llt(hessian_);
  if (llt.info() != Eigen::Success)
    throw InvalidArgument("Hessian must be positive definite");
  sigma_ = llt.solve(Matrix::Identity(d, d));
  sigma_ = 0.5 * (sigma_ + sigma_.transpose()).eval();
  if ((sigma_ * hessian_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericalError("Hessian is too ill-conditioned: Sigma H != I");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian_);
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  t_sigma_ = contract3(cubic_, sigma_);
}

TaylorData TaylorData::quartic_1d(const QuarticCoefficients& q) {
  if (!(q.lambda > 0.0) || !(q.gamma > 0.0))
    throw InvalidArgument("quartic instance needs lambda > 0 and gamma > 0");
  if (!(q.alpha * q.alpha < 3.0 * q.lambda * q.gamma))
    throw InvalidArgument("quartic instance needs alpha^2 < 3 lambda gamma");
  SymmetricTensor3 t(1);
  t.set(0, 0, 0, q.alpha);
  TaylorData out(Matrix::Constant(1, 1, q.lambda), std::move(t));
  out.quartic_ = q;
  return out;
}

ObservableJet ObservableJet::zero(int dimension) {
  return {0.0, Vector::Zero(dimension), Matrix::Zero(dimension, dimension),
          SymmetricTensor3(dimension)};
}

void ObservableJet::validate(int d) const {
  check_vector(gradient, d, "observable gradient");
  if (hessian.rows() != d || hessian.cols() != d)
    throw InvalidArgument("observable Hessian has the wrong shape");
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("observable Hessian must be symmetric");
  if (third.dimension() != d) throw InvalidArgument("observable third derivative has the wrong shape");
  if (!third.is_symmetric()) throw InvalidArgument("observable third derivative must be symmetric");
}

double expectation_leading(const ObservableJet& phi, const TaylorData& taylor, double t) {
  check_t(t);
  phi.validate(taylor.dimension());
  check_vanishes(phi.value, "phi");
  const Matrix& s = taylor.sigma();
  return ((phi.hessian * s).trace() - phi.gradient.dot(s * taylor.t_sigma())) / (2.0 * t);
}

double cov_leading(const ObservableJet& phi, const ObservableJet& psi,
                   const TaylorData& taylor, double t) {
  check_t(t);
  phi.validate(taylor.dimension());
  psi.validate(taylor.dimension());
  check_vanishes(phi.value, "phi");
  check_vanishes(psi.value, "psi");
  return phi.gradient.dot(taylor.sigma() * psi.gradient) / t;
}

double cov_leading_eigenbasis(const ObservableJet& phi, const ObservableJet& psi,
                              const TaylorData& taylor, double t) {
  check_t(t);
  phi.validate(taylor.dimension());
  psi.validate(taylor.dimension());
  check_vanishes(phi.value, "phi");
  check_vanishes(psi.value, "psi");
  const Vector gu = taylor.eigenvectors().transpose() * phi.gradient;
  const Vector hu = taylor.eigenvectors().transpose() * psi.gradient;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < gu.size(); ++i)
    sum += gu[i] * hu[i] / taylor.eigenvalues()[i];
  return sum / t;
}

double cov_nlo(const ObservableJet& phi, const ObservableJet& psi,
               const TaylorData& taylor, double t) {
  check_t(t);
  phi.validate(taylor.dimension());
  psi.validate(taylor.dimension());
  check_vanishes(phi.value, "phi");
  check_vanishes(phi.gradient.cwiseAbs().maxCoeff(), "D phi");
  const Matrix& s = taylor.sigma();
  const Matrix& A = phi.hessian;
  const Matrix& B = psi.hessian;
  const Vector& b = psi.gradient;
  const Vector sb = s * b;
  const Matrix sas = s * A * s;
  const double value = 0.5 * (A * s * B * s).trace() +
                       0.5 * sb.dot(contract3(phi.third, s)) -
                       0.5 * b.dot(sas * taylor.t_sigma()) -
                       0.5 * sb.dot(contract3(taylor.cubic(), sas));
  return value / (t * t);
}

double llc_suscept_leading(const Vector& grad_ell, const Matrix& hess_ell,
                           const TaylorData& taylor, double t) {
  check_t(t);
  const int d = taylor.dimension();
  check_vector(grad_ell, d, "loss gradient");
  if (hess_ell.rows() != d || hess_ell.cols() != d)
    throw InvalidArgument("loss Hessian has the wrong shape");
  const Matrix& s = taylor.sigma();
  const double first = (hess_ell * s - Matrix::Identity(d, d)).trace();
  const double second = (s * grad_ell).dot(taylor.t_sigma());
  return (first - second) / (2.0 * t * t);
}

double influence_function(const Vector& phi_grad, const Vector& delta_l_grad,
                          const TaylorData& taylor) {
  check_vector(phi_grad, taylor.dimension(), "observable gradient");
  check_vector(delta_l_grad, taylor.dimension(), "perturbation gradient");
  return -phi_grad.dot(taylor.sigma() * delta_l_grad);
}

}  // namespace suscept::laplace
