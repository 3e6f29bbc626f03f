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

// Deterministic quadrature for posteriors in one or two free coordinates.
// Used as the exact reference for everything the samplers estimate.

#ifndef SUSCEPT_QUADRATURE_HPP_
#define SUSCEPT_QUADRATURE_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "suscept/gibbs.hpp"
#include "suscept/types.hpp"

namespace suscept {

using ScalarFunction = std::function<double(const Vector&)>;

// Tensor-product composite Gauss-Legendre rule (20 points per cell per axis)
// on the box [lower, upper].
struct GridSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  int cells = 16;  // per axis

  void validate() const;
};

class QuadratureGrid {
 public:
  static constexpr int kPointsPerCell = 20;

  explicit QuadratureGrid(GridSpec spec);

  int dimension() const { return static_cast<int>(spec_.lower.size()); }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  const GridSpec& spec() const { return spec_; }
  const Matrix& nodes() const { return nodes_; }  // size() x dimension()
  const Vector& weights() const { return weights_; }
  // Node lies in a cell touching the edge of the box.
  bool on_boundary(std::size_t k) const { return boundary_[k]; }

 private:
  GridSpec spec_;
  Matrix nodes_;
  Vector weights_;
  std::vector<bool> boundary_;
};

// Probability weights proportional to exp(-energy) on the grid nodes. Grid
// coordinates are the free coordinates `free` of a full parameter vector
// whose other entries stay at `base`.
class QuadraturePosterior {
 public:
  QuadraturePosterior(std::shared_ptr<const QuadratureGrid> grid,
                      const ScalarFunction& energy, Vector base,
                      std::vector<int> free, double boundary_tolerance = 1e-8);

  const QuadratureGrid& grid() const { return *grid_; }
  std::size_t size() const { return grid_->size(); }
  // Full parameter vectors, one row per node.
  const Matrix& points() const { return points_; }
  const Vector& probabilities() const { return probabilities_; }
  // Share of the unnormalized mass in the outermost cells.
  double boundary_fraction() const { return boundary_fraction_; }

  Vector evaluate(const ScalarFunction& f) const;
  double expectation(const Vector& values) const;
  double expectation(const ScalarFunction& f) const;
  double covariance(const Vector& a, const Vector& b) const;
  double covariance(const ScalarFunction& f, const ScalarFunction& g) const;

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  Matrix points_;
  Vector probabilities_;
  double boundary_fraction_ = 0.0;
};

struct QuadratureOptions {
  // Mixture weight of the probe loss: L^h = (1 - h) L_n + h L^{q'}.
  double h = 0.0;
  ScalarFunction probe_loss;
  // Integrate over the component only, complement fixed at w*.
  std::optional<ComponentSpec> restriction;
  // Explicit grid; chosen and refined automatically when empty.
  std::optional<GridSpec> grid;
  double tolerance = 1e-11;
  double boundary_tolerance = 1e-8;
};

// n beta L^h(w) + gamma/2 |w - w*|^2 as a function of the full parameter.
ScalarFunction gibbs_energy(const GibbsProblem& problem,
                            const QuadratureOptions& options);

// Box of +-`width` standard deviations (from the energy Hessian) around the
// energy minimum in the free coordinates, refined by doubling the cell count
// until the first two moments move by less than `tolerance` (relative).
GridSpec auto_grid(const ScalarFunction& energy, const Vector& base,
                   const std::vector<int>& free, double tolerance = 1e-11,
                   double width = 12.0);

QuadraturePosterior gibbs_quadrature(const GibbsProblem& problem,
                                     const QuadratureOptions& options = {});

double quadrature_expectation(const GibbsProblem& problem,
                              const ScalarFunction& observable,
                              const QuadratureOptions& options = {});

// Posterior of exp(-t * loss(w)) with a flat prior, all coordinates free.
QuadraturePosterior flat_prior_quadrature(const ScalarFunction& loss, double t,
                                          const Vector& center,
                                          std::optional<GridSpec> grid = {},
                                          double tolerance = 1e-11);

}  // namespace suscept

#endif  // SUSCEPT_QUADRATURE_HPP_
