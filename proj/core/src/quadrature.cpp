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

#include "suscept/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <boost/math/quadrature/gauss.hpp>

#include "suscept/errors.hpp"

namespace suscept {
namespace {

using Rule = boost::math::quadrature::gauss<double, QuadratureGrid::kPointsPerCell>;

// Nodes and weights of the rule on [-1, 1], ascending.
void reference_rule(std::vector<double>& x, std::vector<double>& w) {
  const auto& a = Rule::abscissa();
  const auto& wt = Rule::weights();
  x.clear();
  w.clear();
  for (std::size_t k = a.size(); k-- > 0;) {
    x.push_back(-a[k]);
    w.push_back(wt[k]);
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    x.push_back(a[k]);
    w.push_back(wt[k]);
  }
}

Vector lift(const Vector& base, const std::vector<int>& free, const Vector& u) {
  Vector w = base;
  for (std::size_t a = 0; a < free.size(); ++a) w[free[a]] = u[static_cast<Eigen::Index>(a)];
  return w;
}

struct LocalQuadratic {
  Vector minimum;
  Matrix hessian;
};

// Newton iteration with central-difference derivatives, in the free coordinates.
LocalQuadratic local_quadratic(const ScalarFunction& energy, const Vector& base,
                               const std::vector<int>& free) {
  const auto k = static_cast<Eigen::Index>(free.size());
  Vector u(k);
  for (Eigen::Index a = 0; a < k; ++a) u[a] = base[free[static_cast<std::size_t>(a)]];
  auto f = [&](const Vector& x) { return energy(lift(base, free, x)); };
  Vector step = Vector::Constant(k, 1e-4);
  Matrix h(k, k);
  Vector g(k);
  auto derivatives = [&](const Vector& x) {
    const double f0 = f(x);
    for (Eigen::Index a = 0; a < k; ++a) {
      Vector xp = x, xm = x;
      xp[a] += step[a];
      xm[a] -= step[a];
      const double fp = f(xp), fm = f(xm);
      g[a] = (fp - fm) / (2 * step[a]);
      h(a, a) = (fp - 2 * f0 + fm) / (step[a] * step[a]);
      for (Eigen::Index b = 0; b < a; ++b) {
        Vector pp = x, pm = x, mp = x, mm = x;
        pp[a] += step[a], pp[b] += step[b];
        pm[a] += step[a], pm[b] -= step[b];
        mp[a] -= step[a], mp[b] += step[b];
        mm[a] -= step[a], mm[b] -= step[b];
        h(a, b) = h(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * step[a] * step[b]);
      }
    }
  };
  double fu = f(u);
  if (!std::isfinite(fu)) throw NonFiniteError("energy is non-finite at the start point");
  for (int it = 0; it < 100; ++it) {
    derivatives(u);
    Eigen::LLT<Matrix> llt(h);
    Vector dir = llt.info() == Eigen::Success
                     ? Vector(llt.solve(g))
                     : Vector(g.array() / h.diagonal().array().abs().max(1e-12));
    bool moved = false;
    for (double a = 1.0; a > 1e-10; a *= 0.5) {
      const Vector trial = u - a * dir;
      const double ft = f(trial);
      if (std::isfinite(ft) && ft < fu) {
        u = trial;
        fu = ft;
        moved = true;
        break;
      }
    }
    for (Eigen::Index a = 0; a < k; ++a)
      if (h(a, a) > 0) step[a] = 1e-3 / std::sqrt(h(a, a));
    if (!moved || (dir.array().abs() < 1e-3 * step.array()).all()) break;
  }
  derivatives(u);
  return {u, h};
}

struct Moments {
  Vector mean;
  Vector second;
};

Moments moments_of(const QuadraturePosterior& post, const std::vector<int>& free) {
  const auto k = static_cast<Eigen::Index>(free.size());
  Moments m{Vector(k), Vector(k)};
  for (Eigen::Index a = 0; a < k; ++a) {
    const Vector x = post.points().col(free[static_cast<std::size_t>(a)]);
    m.mean[a] = post.expectation(x);
    m.second[a] = post.covariance(x, x);
  }
  return m;
}

}  // namespace

void GridSpec::validate() const {
  if (lower.empty() || lower.size() > 2)
    throw InvalidArgument("quadrature supports 1 or 2 free coordinates");
  if (lower.size() != upper.size())
    throw InvalidArgument("grid lower/upper lengths differ");
  for (std::size_t a = 0; a < lower.size(); ++a)
    if (!(lower[a] < upper[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
      throw InvalidArgument("grid axis " + std::to_string(a) + " is empty or infinite");
  if (cells < 1) throw InvalidArgument("grid cells must be >= 1");
}

QuadratureGrid::QuadratureGrid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::vector<double> rx, rw;
  reference_rule(rx, rw);
  const int d = dimension();
  const int per_axis = spec_.cells * kPointsPerCell;
  std::vector<std::vector<double>> ax(d), aw(d);
  std::vector<std::vector<bool>> edge(d);
  for (int a = 0; a < d; ++a) {
    const double width = (spec_.upper[a] - spec_.lower[a]) / spec_.cells;
    for (int c = 0; c < spec_.cells; ++c) {
      const double mid = spec_.lower[a] + (c + 0.5) * width;
      for (std::size_t q = 0; q < rx.size(); ++q) {
        ax[a].push_back(mid + 0.5 * width * rx[q]);
        aw[a].push_back(0.5 * width * rw[q]);
        edge[a].push_back(c == 0 || c == spec_.cells - 1);
      }
    }
  }
  const std::size_t total =
      d == 1 ? static_cast<std::size_t>(per_axis)
             : static_cast<std::size_t>(per_axis) * static_cast<std::size_t>(per_axis);
  nodes_.resize(static_cast<Eigen::Index>(total), d);
  weights_.resize(static_cast<Eigen::Index>(total));
  boundary_.resize(total);
  std::size_t k = 0;
  if (d == 1) {
    for (int i = 0; i < per_axis; ++i, ++k) {
      nodes_(static_cast<Eigen::Index>(k), 0) = ax[0][i];
      weights_[static_cast<Eigen::Index>(k)] = aw[0][i];
      boundary_[k] = edge[0][i];
    }
  } else {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j, ++k) {
        nodes_(static_cast<Eigen::Index>(k), 0) = ax[0][i];
        nodes_(static_cast<Eigen::Index>(k), 1) = ax[1][j];
        weights_[static_cast<Eigen::Index>(k)] = aw[0][i] * aw[1][j];
        boundary_[k] = edge[0][i] || edge[1][j];
      }
  }
}

QuadraturePosterior::QuadraturePosterior(std::shared_ptr<const QuadratureGrid> grid,
                                         const ScalarFunction& energy, Vector base,
                                         std::vector<int> free,
                                         double boundary_tolerance)
    : grid_(std::move(grid)) {
  if (static_cast<int>(free.size()) != grid_->dimension())
    throw InvalidArgument("grid dimension does not match the free coordinates");
  const auto N = static_cast<Eigen::Index>(grid_->size());
  points_.resize(N, base.size());
  Vector e(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const Vector w = lift(base, free, grid_->nodes().row(k).transpose());
    points_.row(k) = w.transpose();
    e[k] = energy(w);
    if (std::isnan(e[k])) throw NonFiniteError("energy is NaN on the grid");
  }
  const double e_min = e.minCoeff();
  if (!std::isfinite(e_min)) throw NonFiniteError("energy has no finite minimum on the grid");
  probabilities_.resize(N);
  double total = 0.0, edge = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    const double m = grid_->weights()[k] * std::exp(-(e[k] - e_min));
    probabilities_[k] = m;
    total += m;
    if (grid_->on_boundary(static_cast<std::size_t>(k))) edge += m;
  }
  probabilities_ /= total;
  boundary_fraction_ = edge / total;
  if (boundary_fraction_ > boundary_tolerance)
    throw BoundaryMassError("posterior mass " + std::to_string(boundary_fraction_) +
                                " in the outermost grid cells exceeds " +
                                std::to_string(boundary_tolerance),
                            boundary_fraction_);
}

Vector QuadraturePosterior::evaluate(const ScalarFunction& f) const {
  Vector out(points_.rows());
  for (Eigen::Index k = 0; k < points_.rows(); ++k) {
    out[k] = f(points_.row(k).transpose());
    if (!std::isfinite(out[k])) throw NonFiniteError("observable is non-finite on the grid");
  }
  return out;
}

double QuadraturePosterior::expectation(const Vector& values) const {
  if (values.size() != probabilities_.size())
    throw InvalidArgument("need one value per quadrature node");
  return probabilities_.dot(values);
}

double QuadraturePosterior::expectation(const ScalarFunction& f) const {
  return expectation(evaluate(f));
}

double QuadraturePosterior::covariance(const Vector& a, const Vector& b) const {
  const double ma = expectation(a), mb = expectation(b);
  return probabilities_.dot(((a.array() - ma) * (b.array() - mb)).matrix());
}

double QuadraturePosterior::covariance(const ScalarFunction& f,
                                       const ScalarFunction& g) const {
  return covariance(evaluate(f), evaluate(g));
}

ScalarFunction gibbs_energy(const GibbsProblem& problem,
                            const QuadratureOptions& options) {
  problem.validate();
  if (options.h != 0.0 && !options.probe_loss)
    throw InvalidArgument("h != 0 needs a probe loss");
  const double nb = problem.n_beta();
  return [&problem, h = options.h, probe = options.probe_loss, nb](const Vector& w) {
    double l = empirical_loss(w, problem);
    if (h != 0.0) l = (1.0 - h) * l + h * probe(w);
    return nb * l + 0.5 * problem.gamma * (w - problem.w_star).squaredNorm();
  };
}

GridSpec auto_grid(const ScalarFunction& energy, const Vector& base,
                   const std::vector<int>& free, double tolerance, double width) {
  const LocalQuadratic q = local_quadratic(energy, base, free);
  Eigen::LLT<Matrix> llt(q.hessian);
  if (llt.info() != Eigen::Success)
    throw NumericalError("energy Hessian at the minimum is not positive definite");
  const Matrix sigma = llt.solve(Matrix::Identity(q.hessian.rows(), q.hessian.cols()));
  GridSpec spec;
  for (std::size_t a = 0; a < free.size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    const double sd = std::sqrt(sigma(i, i));
    spec.lower.push_back(q.minimum[i] - width * sd);
    spec.upper.push_back(q.minimum[i] + width * sd);
  }
  const int max_cells = free.size() == 1 ? 512 : 32;
  spec.cells = 4;
  QuadraturePosterior prev(std::make_shared<QuadratureGrid>(spec), energy, base, free,
                           std::numeric_limits<double>::infinity());
  Moments mp = moments_of(prev, free);
  while (spec.cells < max_cells) {
    GridSpec next = spec;
    next.cells *= 2;
    QuadraturePosterior cur(std::make_shared<QuadratureGrid>(next), energy, base, free,
                            std::numeric_limits<double>::infinity());
    const Moments mc = moments_of(cur, free);
    const Vector sd = mc.second.cwiseSqrt();
    const double dm = ((mc.mean - mp.mean).array() / sd.array()).abs().maxCoeff();
    const double dv = ((mc.second - mp.second).array() / mc.second.array()).abs().maxCoeff();
    spec = next;
    if (std::max(dm, dv) < tolerance) break;
    mp = mc;
  }
  return spec;
}

QuadraturePosterior gibbs_quadrature(const GibbsProblem& problem,
                                     const QuadratureOptions& options) {
  problem.validate();
  std::vector<int> free;
  if (options.restriction) {
    options.restriction->validate(problem.dimension());
    free = options.restriction->indices;
  } else {
    for (int j = 0; j < problem.dimension(); ++j) free.push_back(j);
  }
  if (free.size() > 2)
    throw InvalidArgument("quadrature needs at most 2 free coordinates, got " +
                          std::to_string(free.size()));
  const ScalarFunction energy = gibbs_energy(problem, options);
  if (options.grid) {
    return QuadraturePosterior(std::make_shared<QuadratureGrid>(*options.grid), energy,
                               problem.w_star, free, options.boundary_tolerance);
  }
  double width = 12.0;
  for (int attempt = 0;; ++attempt, width *= 1.5) {
    try {
      const GridSpec spec = auto_grid(energy, problem.w_star, free, options.tolerance, width);
      return QuadraturePosterior(std::make_shared<QuadratureGrid>(spec), energy,
                                 problem.w_star, free, options.boundary_tolerance);
    } catch (const BoundaryMassError&) {
      if (attempt == 4) throw;
    }
  }
}

double quadrature_expectation(const GibbsProblem& problem,
                              const ScalarFunction& observable,
                              const QuadratureOptions& options) {
  return gibbs_quadrature(problem, options).expectation(observable);
}

QuadraturePosterior flat_prior_quadrature(const ScalarFunction& loss, double t,
                                          const Vector& center,
                                          std::optional<GridSpec> grid,
                                          double tolerance) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  if (center.size() < 1 || center.size() > 2)
    throw InvalidArgument("quadrature supports 1 or 2 coordinates");
  std::vector<int> free;
  for (int j = 0; j < center.size(); ++j) free.push_back(j);
  const ScalarFunction energy = [&loss, t](const Vector& w) { return t * loss(w); };
  if (grid)
    return QuadraturePosterior(std::make_shared<QuadratureGrid>(*grid), energy, center, free);
  double width = 12.0;
  for (int attempt = 0;; ++attempt, width *= 1.5) {
    try {
      const GridSpec spec = auto_grid(energy, center, free, tolerance, width);
      return QuadraturePosterior(std::make_shared<QuadratureGrid>(spec), energy, center, free);
    } catch (const BoundaryMassError&) {
      if (attempt == 4) throw;
    }
  }
}

}  // namespace suscept
