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

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "suscept/errors.hpp"
#include "suscept/estimators.hpp"
#include "suscept/gibbs.hpp"
#include "suscept/rng.hpp"

namespace suscept {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

GibbsProblem problem_2d() {
  GibbsProblem p;
  p.loss = make_toy_loss({"polynomial", 2, {1.0, 2.0}, {0.5, -0.4}, {0.3, 0.3}, 0.4});
  p.data = {vec({-0.5, 0.3}), vec({0.1, -0.2}), vec({0.6, 0.4}), vec({-0.1, 0.9})};
  p.beta = 2.0;
  p.gamma = 1.0;
  p.w_star = vec({0.05, 0.1});
  return p;
}

Matrix gaussian_draws(std::size_t S, int d, std::uint64_t seed, double scale = 0.3) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(static_cast<Eigen::Index>(S), d);
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (int j = 0; j < d; ++j) m(t, j) = normal(rng);
  return m;
}

double plain_covariance(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t t = 0; t < a.size(); ++t) ma += a[t], mb += b[t];
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double s = 0;
  for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - ma) * (b[t] - mb);
  return s / static_cast<double>(a.size() - 1);
}

TEST(SusceptibilityMatrix, MatchesDirectCovarianceAndCentres) {
  const auto p = problem_2d();
  const auto s = make_chain_samples(p, gaussian_draws(500, 2, 1));
  std::vector<Vector> obs;
  obs.push_back(s.draws.col(0));
  obs.push_back(s.draws.col(1).array().square().matrix());
  const auto chi = susceptibility_matrix(s, obs, {"w0", "w1sq"});
  ASSERT_EQ(chi.values.rows(), 2);
  ASSERT_EQ(chi.values.cols(), 4);
  for (Eigen::Index k = 0; k < 4; ++k) {
    std::vector<double> f;
    for (std::size_t t = 0; t < s.size(); ++t) {
      const Vector w = s.draws.row(static_cast<Eigen::Index>(t)).transpose();
      f.push_back(p.loss->value(w, p.data[static_cast<std::size_t>(k)]) - empirical_loss(w, p));
    }
    for (Eigen::Index j = 0; j < 2; ++j) {
      const std::vector<double> phi(obs[static_cast<std::size_t>(j)].data(),
                                    obs[static_cast<std::size_t>(j)].data() + s.size());
      EXPECT_NEAR(chi.values(j, k), -plain_covariance(phi, f), 1e-13);
    }
  }
  // Unit weights: the centred losses sum to zero over the data.
  EXPECT_LT(chi.values.rowwise().sum().cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(chi.fingerprints.front(), p.fingerprint());
}

TEST(SusceptibilityMatrix, BilinearAndBlindToConstants) {
  const auto p = problem_2d();
  const auto s = make_chain_samples(p, gaussian_draws(400, 2, 2));
  const Vector a = s.draws.col(0);
  const Vector b = s.draws.col(0).cwiseProduct(s.draws.col(1));
  const Vector combo = (2.5 * a - 0.75 * b).array() + 11.0;
  const Vector constant = Vector::Constant(a.size(), 3.0);
  const auto chi = susceptibility_matrix(s, {a, b, combo, constant});
  for (Eigen::Index k = 0; k < chi.values.cols(); ++k) {
    EXPECT_NEAR(chi.values(2, k), 2.5 * chi.values(0, k) - 0.75 * chi.values(1, k), 1e-13);
    EXPECT_EQ(chi.values(3, k), 0.0);
  }
  const auto single = per_sample_susceptibility(
      s, std::span<const double>(a.data(), s.size()), 1);
  EXPECT_DOUBLE_EQ(single.value, chi.values(0, 1));
}

TEST(SusceptibilityMatrix, DuplicatedDataGiveEqualColumns) {
  auto p = problem_2d();
  p.data.push_back(p.data[1]);
  const auto s = make_chain_samples(p, gaussian_draws(300, 2, 3));
  const auto chi = susceptibility_matrix(s, {Vector(s.draws.col(1))});
  EXPECT_EQ(chi.values(0, 1), chi.values(0, 4));
}

TEST(InfluenceMatrix, SymmetricNegativeSemidefiniteWithZeroRowSums) {
  const auto p = problem_2d();
  const auto s = make_chain_samples(p, gaussian_draws(600, 2, 4));
  const auto inf = influence_matrix(s, p, p.data, p.data);
  const Matrix& m = inf.values;
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues();
  EXPECT_LT(ev.maxCoeff(), 1e-12);
  EXPECT_LT(m.rowwise().sum().cwiseAbs().maxCoeff(), 1e-13);
  const auto cached = influence_matrix(s, p, p.data);
  EXPECT_LT((cached.values - m).cwiseAbs().maxCoeff(), 1e-14);
  auto other = p;
  other.beta = 3.0;
  EXPECT_THROW(influence_matrix(s, other, p.data), FingerprintMismatch);
}

TEST(LossKernel, IndependentOfReferencePoint) {
  auto p = problem_2d();
  const auto s = make_chain_samples(p, gaussian_draws(300, 2, 5));
  const auto k1 = loss_kernel(s, p, p.data[0], p.data[2]);
  std::vector<double> a, b;
  for (std::size_t t = 0; t < s.size(); ++t) {
    const Vector w = s.draws.row(static_cast<Eigen::Index>(t)).transpose();
    a.push_back(p.loss->value(w, p.data[0]));
    b.push_back(p.loss->value(w, p.data[2]));
  }
  EXPECT_NEAR(k1.value, plain_covariance(a, b), 1e-13);
  p.w_star = vec({0.7, -0.4});
  EXPECT_NEAR(loss_kernel(s, p, p.data[0], p.data[2]).value, k1.value, 1e-13);
}

TEST(ObservableValues, Kinds) {
  const auto p = problem_2d();
  const auto s = make_chain_samples(p, gaussian_draws(50, 2, 6));
  ObservableSpec excess;
  const Vector k = observable_values(excess, s, p);
  EXPECT_NEAR(k[3], empirical_loss(s.draws.row(3).transpose(), p) - empirical_loss(p.w_star, p),
              1e-14);
  ObservableSpec per{ObservableSpec::Kind::kPerSampleLoss, "q", vec({0.2, 0.2}), {}, {}};
  EXPECT_DOUBLE_EQ(observable_values(per, s, p)[7],
                   p.loss->value(s.draws.row(7).transpose(), vec({0.2, 0.2})));
  ObservableSpec comp{ObservableSpec::Kind::kComponentLoss, "c", {}, {"c", {1}}, {}};
  EXPECT_THROW(observable_values(comp, s, p), InvalidArgument);
  ObservableSpec custom{ObservableSpec::Kind::kCustom, "f", {}, {}, {}};
  EXPECT_THROW(observable_values(custom, s, p), InvalidArgument);
}

TEST(StructuralSusceptibility, WholeParameterComponentIsScaledCovariance) {
  const auto p = problem_2d();
  const Matrix draws = gaussian_draws(400, 2, 7);
  const auto full = make_chain_samples(p, draws);
  const auto restricted = make_chain_samples(p, draws, ComponentSpec{"all", {0, 1}});
  const auto chi = structural_susceptibility({restricted}, full, p);
  EXPECT_TRUE(chi.renormalized);
  EXPECT_EQ(chi.row_labels.front(), "all");
  const auto S = static_cast<double>(full.size());
  const Vector K = full.full_loss.array() - full.reference_loss;
  const auto direct = susceptibility_matrix(full, {K});
  for (Eigen::Index k = 0; k < chi.values.cols(); ++k)
    EXPECT_NEAR(chi.values(0, k), direct.values(0, k) * (S - 1) / S, 1e-14);
}

TEST(StructuralSusceptibility, RejectsForeignOrUnrestrictedChains) {
  const auto p = problem_2d();
  const Matrix draws = gaussian_draws(100, 2, 8);
  const auto full = make_chain_samples(p, draws);
  auto other = p;
  other.gamma = 2.0;
  const auto foreign = make_chain_samples(other, draws, ComponentSpec{"c", {1}});
  EXPECT_THROW(structural_susceptibility({foreign}, full, p), FingerprintMismatch);
  EXPECT_THROW(structural_susceptibility({full}, full, p), InvalidArgument);
  EXPECT_THROW(structural_susceptibility({}, foreign, p), FingerprintMismatch);
}

SusceptibilityMatrix labelled(const Matrix& v) {
  SusceptibilityMatrix m;
  m.values = v;
  for (Eigen::Index j = 0; j < v.rows(); ++j) m.row_labels.push_back("c" + std::to_string(j));
  for (Eigen::Index k = 0; k < v.cols(); ++k) m.column_labels.push_back("z" + std::to_string(k));
  return m;
}

TEST(Standardize, Examples) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  const auto sa = standardize(labelled(a));
  EXPECT_LT(sa.values.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(sa.standardization, Standardization::kFullyStandardized);
  Matrix b(2, 2);
  b << 1, 2, 4, 3;
  Matrix expected(2, 2);
  expected << -1, 1, 1, -1;
  EXPECT_LT((standardize(labelled(b)).values - expected).cwiseAbs().maxCoeff(), 1e-15);
  Matrix c(2, 3);
  c << 0, 0, 3, 1, 2, 3;
  // Row z-scores: [-1/sqrt2, -1/sqrt2, sqrt2] and [-sqrt(3/2), 0, sqrt(3/2)].
  const double r = std::sqrt(2.0), q = std::sqrt(1.5);
  Matrix zc(2, 3);
  zc << -1 / r, -1 / r, r, -q, 0, q;
  zc.rowwise() -= zc.colwise().mean();
  EXPECT_LT((standardize(labelled(c)).values - zc).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Standardize, InvariantUnderRowAffineMaps) {
  Rng rng(9);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x(4, 7);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    Matrix y = x;
    for (Eigen::Index j = 0; j < y.rows(); ++j)
      y.row(j) = (std::exp(normal(rng)) * y.row(j)).array() + 5.0 * normal(rng);
    const Matrix sx = standardize(labelled(x)).values;
    EXPECT_LT((sx - standardize(labelled(y)).values).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(sx.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Standardize, RejectsConstantRowAndSecondPass) {
  Matrix x(3, 3);
  x << 1, 2, 3, 4, 4, 4, 0, 1, 0;
  try {
    standardize(labelled(x));
    FAIL();
  } catch (const ZeroVarianceError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
  x(1, 0) = 0;
  const auto once = standardize(labelled(x));
  EXPECT_THROW(standardize(once), InvalidArgument);
}

TEST(LlcEstimate, ZeroAtReferenceAndScaledExcessLoss) {
  const auto p = problem_2d();
  Matrix at_star(10, 2);
  at_star.rowwise() = p.w_star.transpose();
  EXPECT_EQ(llc_estimate(make_chain_samples(p, at_star), p).value, 0.0);
  const auto s = make_chain_samples(p, gaussian_draws(200, 2, 10));
  double total = 0;
  for (Eigen::Index t = 0; t < s.draws.rows(); ++t)
    total += empirical_loss(s.draws.row(t).transpose(), p) - empirical_loss(p.w_star, p);
  EXPECT_NEAR(llc_estimate(s, p).value, p.n_beta() * total / 200.0, 1e-12);
}

TEST(SusceptibilityFromDensity, WeightedSum) {
  const std::vector<double> chi{1.0, 2.0, 3.0};
  EXPECT_NEAR(susceptibility_from_density(chi, std::vector<double>{0.2, 0.3, 0.5}), 2.3, 1e-15);
  EXPECT_EQ(susceptibility_from_density(chi, std::vector<double>{0.0, 1.0, 0.0}), 2.0);
  EXPECT_THROW(susceptibility_from_density(chi, std::vector<double>{0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(susceptibility_from_density(chi, std::vector<double>{0.5, 0.6, -0.1}),
               InvalidArgument);
  EXPECT_THROW(susceptibility_from_density(chi, std::vector<double>{0.5, 0.6, 0.1}),
               InvalidArgument);
}

TEST(Standardization, Names) {
  EXPECT_EQ(to_string(Standardization::kRaw), "raw");
  EXPECT_EQ(to_string(Standardization::kComponentZScored), "component_zscored");
  EXPECT_EQ(to_string(Standardization::kFullyStandardized), "fully_standardized");
}

}  // namespace
}  // namespace suscept
