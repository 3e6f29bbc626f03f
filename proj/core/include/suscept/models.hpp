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

// Per-sample losses l_z(w) and the small toy models used by the experiments.

#ifndef SUSCEPT_MODELS_HPP_
#define SUSCEPT_MODELS_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "suscept/types.hpp"

namespace suscept {

class PerSampleLoss {
 public:
  virtual ~PerSampleLoss() = default;

  virtual std::string name() const = 0;
  // Parameter dimension d.
  virtual int dimension() const = 0;
  // Length of a data point z.
  virtual int data_dimension() const = 0;

  virtual double value(const Vector& w, const Vector& z) const = 0;
  // grad += scale * d/dw l_z(w).
  virtual void add_gradient(const Vector& w, const Vector& z, double scale,
                            Vector& grad) const = 0;
  // d^2/dw^2 l_z(w).
  virtual Matrix hessian(const Vector& w, const Vector& z) const = 0;

  // Canonical description of the model parameters; part of fingerprints.
  virtual std::string describe() const = 0;

  Vector gradient(const Vector& w, const Vector& z) const {
    Vector g = Vector::Zero(dimension());
    add_gradient(w, z, 1.0, g);
    return g;
  }
};

// l_z(w) = 1/2 sum_j c_j (w_j - z_j)^2. With unit curvature this is the
// Gaussian location model.
class GaussianLocationLoss final : public PerSampleLoss {
 public:
  explicit GaussianLocationLoss(Vector curvature);
  static std::shared_ptr<GaussianLocationLoss> unit(int dimension);

  std::string name() const override { return "gaussian_location"; }
  int dimension() const override { return static_cast<int>(curvature_.size()); }
  int data_dimension() const override { return dimension(); }
  double value(const Vector& w, const Vector& z) const override;
  void add_gradient(const Vector& w, const Vector& z, double scale,
                    Vector& grad) const override;
  Matrix hessian(const Vector& w, const Vector& z) const override;
  std::string describe() const override;

  const Vector& curvature() const { return curvature_; }

 private:
  Vector curvature_;
};

// Separable anharmonic loss in x = w - z:
//   l_z(w) = sum_j [ lambda_j x_j^2 / 2 + alpha_j x_j^3 / 6 + gamma_j x_j^4 / 24 ]
//            + kappa * x_0 * x_1            (d = 2 only)
class PolynomialLoss final : public PerSampleLoss {
 public:
  struct Coefficients {
    Vector quadratic;  // lambda_j
    Vector cubic;      // alpha_j
    Vector quartic;    // gamma_j
    double coupling = 0.0;
  };
  explicit PolynomialLoss(Coefficients c);

  std::string name() const override { return "polynomial"; }
  int dimension() const override { return static_cast<int>(c_.quadratic.size()); }
  int data_dimension() const override { return dimension(); }
  double value(const Vector& w, const Vector& z) const override;
  void add_gradient(const Vector& w, const Vector& z, double scale,
                    Vector& grad) const override;
  Matrix hessian(const Vector& w, const Vector& z) const override;
  std::string describe() const override;

  const Coefficients& coefficients() const { return c_; }

 private:
  Coefficients c_;
};

// Least squares regression: z = (x_1..x_d, y), l_z(w) = 1/2 (y - x.w)^2.
class LinearRegressionLoss final : public PerSampleLoss {
 public:
  explicit LinearRegressionLoss(int dimension);

  std::string name() const override { return "linear_regression"; }
  int dimension() const override { return d_; }
  int data_dimension() const override { return d_ + 1; }
  double value(const Vector& w, const Vector& z) const override;
  void add_gradient(const Vector& w, const Vector& z, double scale,
                    Vector& grad) const override;
  Matrix hessian(const Vector& w, const Vector& z) const override;
  std::string describe() const override;

 private:
  int d_;
};

// Description of a named toy model, as it appears in experiment configs.
struct ToyModelSpec {
  std::string name;         // gaussian_location | polynomial | linear_regression
  int dimension = 1;
  std::vector<double> quadratic;  // curvature / lambda_j (default 1)
  std::vector<double> cubic;      // alpha_j (default 0)
  std::vector<double> quartic;    // gamma_j (default 0)
  double coupling = 0.0;
};

std::vector<std::string> toy_model_names();

// Throws InvalidArgument for unknown names or inconsistent coefficient sizes.
std::shared_ptr<const PerSampleLoss> make_toy_loss(const ToyModelSpec& spec);

}  // namespace suscept

#endif  // SUSCEPT_MODELS_HPP_
