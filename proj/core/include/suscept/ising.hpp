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

// Masked square-lattice Ising model, H(s) = -J sum_<ij> s_i s_j with J = 1,
// sampled by single-spin-flip Metropolis-Hastings.
//
// Sites are indexed in row-major order, site = row * L + col. Masked sites
// carry no spin dynamics and no couplings: they never appear in a neighbour
// list, are never flipped, and are excluded from every magnetization.
//
// Bonds are the edges of the square grid (one "right" and one "down" bond per
// site, wrapped under periodic boundaries). For L <= 2 with periodic
// boundaries the wrap produces parallel edges between the same pair of sites;
// they are kept, so that energy() and the sweep agree on the torus graph.

#ifndef SUSCEPT_ISING_HPP_
#define SUSCEPT_ISING_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suscept/rng.hpp"
#include "suscept/stats.hpp"
#include "suscept/types.hpp"

namespace suscept::ising {

inline constexpr double kCriticalBeta = 0.44068679350977147;  // ln(1+sqrt2)/2

enum class Boundary { kPeriodic, kOpen };

class SpinLattice {
 public:
  // All unmasked spins start at +1. `mask` is either empty or has L*L
  // entries (true = masked).
  SpinLattice(int side, Boundary boundary, std::vector<bool> mask = {});

  int side() const { return topology_->side; }
  std::size_t site_count() const { return spins_.size(); }
  Boundary boundary() const { return topology_->boundary; }
  double coupling() const { return 1.0; }

  std::size_t index(int row, int col) const;
  bool masked(std::size_t site) const { return topology_->mask[site]; }
  // Unmasked sites in raster order.
  std::span<const std::uint32_t> active_sites() const {
    return topology_->active;
  }
  // Unmasked neighbours of `site`, with multiplicity (see header comment).
  std::span<const std::uint32_t> neighbors(std::size_t site) const;

  std::int8_t spin(std::size_t site) const { return spins_[site]; }
  void set_spin(std::size_t site, int value);
  void flip(std::size_t site) { spins_[site] = static_cast<std::int8_t>(-spins_[site]); }
  std::span<const std::int8_t> spins() const { return spins_; }

  // Sum of neighbouring spins seen by `site`.
  int local_field(std::size_t site) const;

  void fill(int value);
  void randomize(Rng& rng);

  // Same topology and spin values. Masked entries are always stored as 0.
  bool operator==(const SpinLattice& other) const;

 private:
  struct Topology {
    int side = 0;
    Boundary boundary = Boundary::kPeriodic;
    std::vector<bool> mask;
    std::vector<std::uint32_t> active;
    std::vector<std::uint32_t> offsets;  // CSR row pointers, size N + 1
    std::vector<std::uint32_t> adjacency;
  };
  std::shared_ptr<const Topology> topology_;
  std::vector<std::int8_t> spins_;
};

struct RegionSpec {
  std::string name;
  std::vector<std::size_t> sites;
};

struct Probe {
  std::string name;
  std::size_t site = 0;
};

struct ProbeSet {
  std::vector<Probe> probes;
};

enum class ChainInit {
  kRandom,
  kAllUp,
  // All-up when beta > kCriticalBeta, uniform random otherwise.
  kAuto,
  // Start from the lattice state passed in.
  kKeep,
};

enum class SweepOrder {
  // Every unmasked site once, in raster order.
  kRaster,
  // As many proposals as unmasked sites, each at a uniformly drawn site.
  kRandomSite,
};

struct IsingChainConfig {
  double beta = 0.44;
  int burn_in_sweeps = 2000;
  int samples = 20000;
  int thinning_sweeps = 5;
  std::uint64_t seed = 0;
  ChainInit init = ChainInit::kAuto;
  SweepOrder order = SweepOrder::kRaster;

  void validate() const;
};

// H = -J * sum over bonds of s_i s_j.
double energy(const SpinLattice& lattice);

// H(after flipping `site`) - H(before).
double flip_energy_delta(const SpinLattice& lattice, std::size_t site);

// One pass of single-spin Metropolis proposals over the unmasked sites. A
// uniform acceptance variate is drawn only when the proposal raises the
// energy. The raster order can lock into a cycle of zero-cost flips on very
// small lattices and at beta = 0; kRandomSite does not.
void metropolis_sweep(SpinLattice& lattice, double beta, Rng& rng,
                      SweepOrder order = SweepOrder::kRaster);

// Applies config.init, burns in, then calls on_sample(lattice) for each of the
// `samples` snapshots taken every `thinning_sweeps` sweeps.
void run_chain(SpinLattice lattice, const IsingChainConfig& config,
               const std::function<void(const SpinLattice&)>& on_sample);

std::vector<SpinLattice> sample_chain(const SpinLattice& lattice,
                                      const IsingChainConfig& config);

double magnetization(const SpinLattice& lattice);
double magnetization(const SpinLattice& lattice, const RegionSpec& region);

// Checks region sites are in range, unmasked, and duplicate-free.
void validate_region(const SpinLattice& lattice, const RegionSpec& region);
void validate_disjoint(const SpinLattice& lattice,
                       std::span<const RegionSpec> regions);
void validate_probes(const SpinLattice& lattice, const ProbeSet& probes);

// ---------------------------------------------------------------------------
// Experiments

struct PhasePoint {
  double beta = 0.0;
  double order_parameter = 0.0;  // <|M|>/N
  double standard_error = 0.0;
};

// Independent chain per beta (seeded from config.seed via named
// sub-streams), merged in beta order.
std::vector<PhasePoint> order_parameter_curve(std::span<const double> betas,
                                              const SpinLattice& lattice,
                                              const IsingChainConfig& config,
                                              std::size_t threads = 1);

struct SweepPoint {
  double beta = 0.0;
  CovarianceEstimate chi_left;
  CovarianceEstimate chi_right;
  // Reported only where |chi_R| > noise_floor_sigmas * SE(chi_R).
  std::optional<double> ratio;
};

struct SweepOptions {
  double noise_floor_sigmas = 3.0;
  std::size_t threads = 1;
};

std::vector<SweepPoint> susceptibility_sweep(const SpinLattice& lattice,
                                             std::size_t probe,
                                             const RegionSpec& left,
                                             const RegionSpec& right,
                                             std::span<const double> betas,
                                             const IsingChainConfig& config,
                                             const SweepOptions& options = {});

struct ResponseMatrix {
  std::vector<std::string> probe_labels;
  std::vector<std::string> region_labels;
  Matrix values;           // probes x regions, Cov[s_p, M_alpha]
  Matrix standard_errors;  // same shape
  bool any_degenerate = false;
};

ResponseMatrix response_matrix(const SpinLattice& lattice,
                               const ProbeSet& probes,
                               std::span<const RegionSpec> regions,
                               const IsingChainConfig& config);

// ---------------------------------------------------------------------------
// Standard layouts

struct IsingLayout {
  SpinLattice lattice;
  std::vector<RegionSpec> regions;
  ProbeSet probes;
};

// Region made of the unmasked sites in rows [r0, r1] x cols [c0, c1].
RegionSpec rectangle_region(const SpinLattice& lattice, std::string name,
                            int r0, int r1, int c0, int c1);

// 20x20 periodic lattice, column 10 masked except for one gap site; regions
// L (cols 0-9) and R (cols 11-19); a single probe in L.
IsingLayout wall_gap_layout();

// 20x20 lattice with every edge site masked and a horizontal wall on row 10,
// cols 10-18. Regions A (cols 1-9), B (rows 1-9, cols 10-18) and
// C (rows 11-18, cols 10-18); probes A1, A2, B1, B2, C1, C2.
IsingLayout three_rooms_layout();

}  // namespace suscept::ising

#endif  // SUSCEPT_ISING_HPP_
