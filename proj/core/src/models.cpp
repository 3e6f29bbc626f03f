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

#include "suscept/models.hpp"

#include <cmath>
#include <sstream>

#include "suscept/errors.hpp"

namespace suscept {
namespace {

void check_shapes(const PerSampleLoss& loss, const Vector& w, const Vector& z) {
  if (w.size() != loss.dimension() || z.size() != loss.data_dimension())
    throw InvalidArgument(loss.name() + ": expected |w| = " +
                          std::to_string(loss.dimension()) + " and |z| = " +
                          std::to_string(loss.data_dimension()));
}

std::string join(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

Vector from_list(const std::vector<double>& values, int d, double fallback,
                 const char* what) {
  if (values.empty()) return Vector::Constant(d, fallback);
  if (values.size() == 1) return Vector::Constant(d, values.front());
  if (static_cast<int>(values.size()) != d)
    throw InvalidArgument(std::string(what) + " has " +
                          std::to_string(values.size()) +
                          " entries for dimension " + std::to_string(d));
  return Eigen::Map<const Vector>(values.data(), d);
}

}  // namespace

GaussianLocationLoss::GaussianLocationLoss(Vector curvature)
    : curvature_(std::move(curvature)) {
  if (curvature_.size() < 1) throw InvalidArgument("dimension must be >= 1");
  if ((curvature_.array() <= 0.0).any())
    throw InvalidArgument("gaussian_location curvature must be positive");
}

std::shared_ptr<GaussianLocationLoss> GaussianLocationLoss::unit(int dimension) {
  return std::make_shared<GaussianLocationLoss>(Vector::Ones(dimension));
}

double GaussianLocationLoss::value(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  return 0.5 * (curvature_.array() * (w - z).array().square()).sum();
}

void GaussianLocationLoss::add_gradient(const Vector& w, const Vector& z,
                                        double scale, Vector& grad) const {
  grad.array() += scale * curvature_.array() * (w - z).array();
}

Matrix GaussianLocationLoss::hessian(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  return curvature_.asDiagonal();
}

std::string GaussianLocationLoss::describe() const {
  return "gaussian_location(curvature=" + join(curvature_) + ")";
}

PolynomialLoss::PolynomialLoss(Coefficients c) : c_(std::move(c)) {
  const auto d = c_.quadratic.size();
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  if (c_.cubic.size() != d || c_.quartic.size() != d)
    throw InvalidArgument("polynomial coefficient vectors differ in length");
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
    const double lam = c_.quadratic[j], a = c_.cubic[j], g = c_.quartic[j];
    if (!(lam > 0.0)) throw InvalidArgument("polynomial: lambda must be > 0");
    if (g < 0.0) throw InvalidArgument("polynomial: quartic must be >= 0");
    if (a != 0.0 && !(a * a < 3.0 * lam * g))
      throw InvalidArgument(
          "polynomial: need alpha^2 < 3 lambda gamma for a unique minimum");
  }
  if (c_.coupling != 0.0) {
    if (d != 2) throw InvalidArgument("polynomial: coupling needs d = 2");
    if (!(c_.coupling * c_.coupling < c_.quadratic[0] * c_.quadratic[1]))
      throw InvalidArgument("polynomial: coupling too strong for convexity");
  }
}

double PolynomialLoss::value(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  const Eigen::ArrayXd x = (w - z).array();
  const Eigen::ArrayXd x2 = x.square();
  double v = (c_.quadratic.array() * x2 / 2.0 + c_.cubic.array() * x2 * x / 6.0 +
              c_.quartic.array() * x2.square() / 24.0)
                 .sum();
  if (c_.coupling != 0.0) v += c_.coupling * x[0] * x[1];
  return v;
}

void PolynomialLoss::add_gradient(const Vector& w, const Vector& z,
                                  double scale, Vector& grad) const {
  const Eigen::ArrayXd x = (w - z).array();
  const Eigen::ArrayXd x2 = x.square();
  grad.array() += scale * (c_.quadratic.array() * x + c_.cubic.array() * x2 / 2.0 +
                           c_.quartic.array() * x2 * x / 6.0);
  if (c_.coupling != 0.0) {
    grad[0] += scale * c_.coupling * x[1];
    grad[1] += scale * c_.coupling * x[0];
  }
}

Matrix PolynomialLoss::hessian(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  const Eigen::ArrayXd x = (w - z).array();
  Vector diag = c_.quadratic.array() + c_.cubic.array() * x +
                c_.quartic.array() * x.square() / 2.0;
  Matrix h = diag.asDiagonal();
  if (c_.coupling != 0.0) h(0, 1) = h(1, 0) = c_.coupling;
  return h;
}

std::string PolynomialLoss::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "polynomial(quadratic=" << join(c_.quadratic)
     << ";cubic=" << join(c_.cubic) << ";quartic=" << join(c_.quartic)
     << ";coupling=" << c_.coupling << ")";
  return os.str();
}

LinearRegressionLoss::LinearRegressionLoss(int dimension) : d_(dimension) {
  if (d_ < 1) throw InvalidArgument("dimension must be >= 1");
}

double LinearRegressionLoss::value(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  const double r = z[d_] - z.head(d_).dot(w);
  return 0.5 * r * r;
}

void LinearRegressionLoss::add_gradient(const Vector& w, const Vector& z,
                                        double scale, Vector& grad) const {
  const double r = z[d_] - z.head(d_).dot(w);
  grad -= scale * r * z.head(d_);
}

Matrix LinearRegressionLoss::hessian(const Vector& w, const Vector& z) const {
  check_shapes(*this, w, z);
  return z.head(d_) * z.head(d_).transpose();
}

std::string LinearRegressionLoss::describe() const {
  return "linear_regression(d=" + std::to_string(d_) + ")";
}

std::vector<std::string> toy_model_names() {
  return {"gaussian_location", "polynomial", "linear_regression"};
}

std::shared_ptr<const PerSampleLoss> make_toy_loss(const ToyModelSpec& spec) {
  const int d = spec.dimension;
  if (d < 1) throw InvalidArgument("model dimension must be >= 1");
  if (spec.name == "gaussian_location") {
    return std::make_shared<GaussianLocationLoss>(
        from_list(spec.quadratic, d, 1.0, "quadratic"));
  }
  if (spec.name == "polynomial") {
    PolynomialLoss::Coefficients c;
    c.quadratic = from_list(spec.quadratic, d, 1.0, "quadratic");
    c.cubic = from_list(spec.cubic, d, 0.0, "cubic");
    c.quartic = from_list(spec.quartic, d, 0.0, "quartic");
    c.coupling = spec.coupling;
    return std::make_shared<PolynomialLoss>(std::move(c));
  }
  if (spec.name == "linear_regression") {
    return std::make_shared<LinearRegressionLoss>(d);
  }
  throw InvalidArgument("unknown toy model '" + spec.name + "'");
}

}  // namespace suscept
