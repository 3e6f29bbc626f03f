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

// Parameter blocks shared by several experiment kinds. Each reader records
// diagnostics and returns its best-effort value.

#ifndef SUSCEPT_LAB_BLOCKS_HPP_
#define SUSCEPT_LAB_BLOCKS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "lab/schema.hpp"
#include "suscept/estimators.hpp"
#include "suscept/gibbs.hpp"
#include "suscept/ising.hpp"

namespace suscept::lab {

struct BetaRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

// "betas": [...], or "beta_range": {start, stop, step} plus "extra_betas".
// Sorted ascending, duplicates dropped.
std::vector<double> read_betas(Reader& r, const BetaRange& fallback,
                               const std::vector<double>& fallback_extra = {});

// "chain": {samples, burn_in, thinning, init, order}.
ising::IsingChainConfig read_chain(Reader& r, const ising::IsingChainConfig& fallback);

// "layout": "wall-gap" | "three-rooms" | {side, boundary, masked, regions, probes}.
std::optional<ising::IsingLayout> read_layout(Reader& r, const std::string& fallback);

// "problem": {model, data, beta, gamma, w_star, weights}. w_star is left empty
// when not given.
std::optional<GibbsProblem> read_problem(Reader& r);

// "components": [{name, indices}].
std::vector<ComponentSpec> read_components(Reader& r, int dimension);

// Observable expressions: "w0", "w0^2", "w0*w1", "cos w0", "sin w0",
// "exp w0", "excess_loss".
struct Observable {
  std::string label;
  ObservableSpec spec;
};
std::optional<Observable> parse_observable(const std::string& text, int dimension);
std::vector<Observable> read_observables(Reader& r, const std::string& key, int dimension);

Vector to_vector(const std::vector<double>& values);

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_BLOCKS_HPP_
