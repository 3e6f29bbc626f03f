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

#include <algorithm>
#include <cmath>
#include <vector>

#include "suscept/errors.hpp"
#include "suscept/ising.hpp"
#include "suscept/parallel.hpp"

namespace suscept::ising {
namespace {

void check_betas(std::span<const double> betas) {
  for (std::size_t k = 0; k < betas.size(); ++k) {
    if (!(betas[k] > 0.0)) throw InvalidArgument("betas must be positive");
    if (k > 0 && betas[k] < betas[k - 1])
      throw InvalidArgument("betas must be sorted");
  }
}

IsingChainConfig chain_for(const IsingChainConfig& base, double beta,
                           std::string_view stream, std::size_t index) {
  IsingChainConfig c = base;
  c.beta = beta;
  c.seed = derive_seed(base.seed, stream, index);
  return c;
}

}  // namespace

std::vector<PhasePoint> order_parameter_curve(std::span<const double> betas,
                                              const SpinLattice& lattice,
                                              const IsingChainConfig& config,
                                              std::size_t threads) {
  check_betas(betas);
  const double n_active = static_cast<double>(lattice.active_sites().size());
  std::vector<PhasePoint> out(betas.size());
  parallel_for(betas.size(), threads, [&](std::size_t k) {
    std::vector<double> abs_m;
    abs_m.reserve(static_cast<std::size_t>(config.samples));
    run_chain(lattice, chain_for(config, betas[k], "ising-phase", k),
              [&](const SpinLattice& s) {
                abs_m.push_back(std::abs(magnetization(s)) / n_active);
              });
    const Estimate e = mean_estimate(abs_m);
    out[k] = {betas[k], e.value, e.standard_error};
  });
  return out;
}

std::vector<SweepPoint> susceptibility_sweep(const SpinLattice& lattice,
                                             std::size_t probe,
                                             const RegionSpec& left,
                                             const RegionSpec& right,
                                             std::span<const double> betas,
                                             const IsingChainConfig& config,
                                             const SweepOptions& options) {
  check_betas(betas);
  const RegionSpec both[] = {left, right};
  validate_disjoint(lattice, both);
  validate_probes(lattice, ProbeSet{{{"probe", probe}}});
  if (std::find(left.sites.begin(), left.sites.end(), probe) == left.sites.end())
    throw InvalidArgument("the probe must lie in the left region");

  std::vector<SweepPoint> out(betas.size());
  parallel_for(betas.size(), options.threads, [&](std::size_t k) {
    const auto n = static_cast<std::size_t>(config.samples);
    std::vector<double> sp, ml, mr;
    sp.reserve(n);
    ml.reserve(n);
    mr.reserve(n);
    run_chain(lattice, chain_for(config, betas[k], "ising-sweep", k),
              [&](const SpinLattice& s) {
                sp.push_back(s.spin(probe));
                ml.push_back(magnetization(s, left));
                mr.push_back(magnetization(s, right));
              });
    SweepPoint& p = out[k];
    p.beta = betas[k];
    p.chi_left = covariance_estimate(ml, sp);
    p.chi_right = covariance_estimate(mr, sp);
    if (!p.chi_right.degenerate &&
        std::abs(p.chi_right.value) >
            options.noise_floor_sigmas * p.chi_right.standard_error) {
      p.ratio = p.chi_left.value / p.chi_right.value;
    }
  });
  return out;
}

ResponseMatrix response_matrix(const SpinLattice& lattice,
                               const ProbeSet& probes,
                               std::span<const RegionSpec> regions,
                               const IsingChainConfig& config) {
  validate_disjoint(lattice, regions);
  validate_probes(lattice, probes);
  const std::size_t P = probes.probes.size();
  const std::size_t R = regions.size();
  std::vector<std::vector<double>> spins(P), mags(R);
  run_chain(lattice, chain_for(config, config.beta, "ising-response", 0),
            [&](const SpinLattice& s) {
              for (std::size_t p = 0; p < P; ++p)
                spins[p].push_back(s.spin(probes.probes[p].site));
              for (std::size_t r = 0; r < R; ++r)
                mags[r].push_back(magnetization(s, regions[r]));
            });
  ResponseMatrix out;
  out.values.resize(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(R));
  out.standard_errors.resizeLike(out.values);
  for (std::size_t p = 0; p < P; ++p) {
    out.probe_labels.push_back(probes.probes[p].name);
    for (std::size_t r = 0; r < R; ++r) {
      const auto c = covariance_estimate(spins[p], mags[r]);
      out.values(p, r) = c.value;
      out.standard_errors(p, r) = c.standard_error;
      out.any_degenerate = out.any_degenerate || c.degenerate;
    }
  }
  for (const auto& r : regions) out.region_labels.push_back(r.name);
  return out;
}

}  // namespace suscept::ising
