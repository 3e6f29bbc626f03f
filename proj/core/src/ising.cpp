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

#include "suscept/ising.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_set>

#include "suscept/errors.hpp"

namespace suscept::ising {

SpinLattice::SpinLattice(int side, Boundary boundary, std::vector<bool> mask) {
  if (side < 2) throw InvalidArgument("lattice side must be at least 2");
  const auto n = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  if (mask.empty()) mask.assign(n, false);
  if (mask.size() != n)
    throw InvalidArgument("mask has " + std::to_string(mask.size()) +
                          " entries, expected " + std::to_string(n));

  auto topo = std::make_shared<Topology>();
  topo->side = side;
  topo->boundary = boundary;
  topo->mask = std::move(mask);
  topo->offsets.reserve(n + 1);
  topo->offsets.push_back(0);

  auto push_if_active = [&](int r, int c) {
    if (boundary == Boundary::kPeriodic) {
      r = (r + side) % side;
      c = (c + side) % side;
    } else if (r < 0 || r >= side || c < 0 || c >= side) {
      return;
    }
    const auto j = static_cast<std::uint32_t>(r * side + c);
    if (!topo->mask[j]) topo->adjacency.push_back(j);
  };

  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const auto i = static_cast<std::uint32_t>(r * side + c);
      if (!topo->mask[i]) {
        topo->active.push_back(i);
        push_if_active(r - 1, c);
        push_if_active(r + 1, c);
        push_if_active(r, c - 1);
        push_if_active(r, c + 1);
      }
      topo->offsets.push_back(static_cast<std::uint32_t>(topo->adjacency.size()));
    }
  }
  topology_ = std::move(topo);

  spins_.assign(n, 0);
  for (auto i : topology_->active) spins_[i] = 1;
}

std::size_t SpinLattice::index(int row, int col) const {
  const int L = side();
  if (row < 0 || row >= L || col < 0 || col >= L)
    throw InvalidArgument("site (" + std::to_string(row) + ", " +
                          std::to_string(col) + ") outside a " +
                          std::to_string(L) + "x" + std::to_string(L) +
                          " lattice");
  return static_cast<std::size_t>(row * L + col);
}

std::span<const std::uint32_t> SpinLattice::neighbors(std::size_t site) const {
  const auto& t = *topology_;
  return std::span<const std::uint32_t>(t.adjacency)
      .subspan(t.offsets[site], t.offsets[site + 1] - t.offsets[site]);
}

void SpinLattice::set_spin(std::size_t site, int value) {
  if (site >= spins_.size()) throw InvalidArgument("site index out of range");
  if (masked(site)) throw InvalidArgument("cannot set the spin of a masked site");
  if (value != 1 && value != -1) throw InvalidArgument("spins are +1 or -1");
  spins_[site] = static_cast<std::int8_t>(value);
}

int SpinLattice::local_field(std::size_t site) const {
  int h = 0;
  for (auto j : neighbors(site)) h += spins_[j];
  return h;
}

void SpinLattice::fill(int value) {
  if (value != 1 && value != -1) throw InvalidArgument("spins are +1 or -1");
  for (auto i : active_sites()) spins_[i] = static_cast<std::int8_t>(value);
}

void SpinLattice::randomize(Rng& rng) {
  for (auto i : active_sites())
    spins_[i] = (rng() >> 63) ? std::int8_t{1} : std::int8_t{-1};
}

bool SpinLattice::operator==(const SpinLattice& other) const {
  return side() == other.side() && boundary() == other.boundary() &&
         topology_->mask == other.topology_->mask && spins_ == other.spins_;
}

void IsingChainConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InvalidArgument("beta must be positive");
  if (burn_in_sweeps < 0) throw InvalidArgument("burn_in_sweeps must be >= 0");
  if (samples <= 0) throw InvalidArgument("samples must be > 0");
  if (thinning_sweeps < 1) throw InvalidArgument("thinning_sweeps must be >= 1");
}

double energy(const SpinLattice& lattice) {
  // Walk the right and down bonds of every active site so each grid edge is
  // visited exactly once.
  const int L = lattice.side();
  const bool periodic = lattice.boundary() == Boundary::kPeriodic;
  long long sum = 0;
  for (auto i : lattice.active_sites()) {
    const int r = static_cast<int>(i) / L;
    const int c = static_cast<int>(i) % L;
    const int s = lattice.spin(i);
    if (c + 1 < L || periodic) {
      const auto j = static_cast<std::size_t>(r * L + (c + 1) % L);
      if (!lattice.masked(j)) sum += s * lattice.spin(j);
    }
    if (r + 1 < L || periodic) {
      const auto j = static_cast<std::size_t>(((r + 1) % L) * L + c);
      if (!lattice.masked(j)) sum += s * lattice.spin(j);
    }
  }
  return -lattice.coupling() * static_cast<double>(sum);
}

double flip_energy_delta(const SpinLattice& lattice, std::size_t site) {
  return 2.0 * lattice.coupling() * lattice.spin(site) *
         lattice.local_field(site);
}

void metropolis_sweep(SpinLattice& lattice, double beta, Rng& rng, SweepOrder order) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
  // delta H = 2 J s h takes values in {-8, -6, ..., 8}; cache exp(-beta dH)
  // for the positive ones, indexed by dH / 2.
  std::array<double, 5> accept{};
  for (int k = 0; k < 5; ++k)
    accept[k] = std::exp(-beta * 2.0 * lattice.coupling() * k);
  auto propose = [&](std::size_t i) {
    const int half_delta = lattice.spin(i) * lattice.local_field(i);
    if (half_delta <= 0 || uniform01(rng) < accept[half_delta]) lattice.flip(i);
  };
  const auto sites = lattice.active_sites();
  if (order == SweepOrder::kRaster) {
    for (auto i : sites) propose(i);
    return;
  }
  const std::size_t n = sites.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto pick = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
    propose(sites[pick]);
  }
}

void run_chain(SpinLattice lattice, const IsingChainConfig& config,
               const std::function<void(const SpinLattice&)>& on_sample) {
  config.validate();
  Rng rng(config.seed);
  switch (config.init) {
    case ChainInit::kRandom:
      lattice.randomize(rng);
      break;
    case ChainInit::kAllUp:
      lattice.fill(1);
      break;
    case ChainInit::kAuto:
      if (config.beta > kCriticalBeta) {
        lattice.fill(1);
      } else {
        lattice.randomize(rng);
      }
      break;
    case ChainInit::kKeep:
      break;
  }
  for (int s = 0; s < config.burn_in_sweeps; ++s)
    metropolis_sweep(lattice, config.beta, rng, config.order);
  for (int k = 0; k < config.samples; ++k) {
    for (int s = 0; s < config.thinning_sweeps; ++s)
      metropolis_sweep(lattice, config.beta, rng, config.order);
    on_sample(lattice);
  }
}

std::vector<SpinLattice> sample_chain(const SpinLattice& lattice,
                                      const IsingChainConfig& config) {
  std::vector<SpinLattice> out;
  out.reserve(static_cast<std::size_t>(std::max(config.samples, 0)));
  run_chain(lattice, config,
            [&](const SpinLattice& snapshot) { out.push_back(snapshot); });
  return out;
}

double magnetization(const SpinLattice& lattice) {
  long long m = 0;
  for (auto i : lattice.active_sites()) m += lattice.spin(i);
  return static_cast<double>(m);
}

double magnetization(const SpinLattice& lattice, const RegionSpec& region) {
  long long m = 0;
  for (auto i : region.sites) m += lattice.spin(i);
  return static_cast<double>(m);
}

void validate_region(const SpinLattice& lattice, const RegionSpec& region) {
  std::unordered_set<std::size_t> seen;
  for (auto i : region.sites) {
    if (i >= lattice.site_count())
      throw InvalidArgument("region " + region.name + ": site " +
                            std::to_string(i) + " out of range");
    if (lattice.masked(i))
      throw InvalidArgument("region " + region.name + ": site " +
                            std::to_string(i) + " is masked");
    if (!seen.insert(i).second)
      throw InvalidArgument("region " + region.name + ": duplicate site " +
                            std::to_string(i));
  }
}

void validate_disjoint(const SpinLattice& lattice,
                       std::span<const RegionSpec> regions) {
  std::vector<int> owner(lattice.site_count(), -1);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    validate_region(lattice, regions[r]);
    for (auto i : regions[r].sites) {
      if (owner[i] >= 0)
        throw InvalidArgument("regions " + regions[owner[i]].name + " and " +
                              regions[r].name + " share site " +
                              std::to_string(i));
      owner[i] = static_cast<int>(r);
    }
  }
}

void validate_probes(const SpinLattice& lattice, const ProbeSet& probes) {
  std::unordered_set<std::size_t> seen;
  for (const auto& p : probes.probes) {
    if (p.site >= lattice.site_count())
      throw InvalidArgument("probe " + p.name + " out of range");
    if (lattice.masked(p.site))
      throw InvalidArgument("probe " + p.name + " sits on a masked site");
    if (!seen.insert(p.site).second)
      throw InvalidArgument("probe " + p.name + " duplicates another probe");
  }
}

RegionSpec rectangle_region(const SpinLattice& lattice, std::string name,
                            int r0, int r1, int c0, int c1) {
  RegionSpec region{std::move(name), {}};
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const auto i = lattice.index(r, c);
      if (!lattice.masked(i)) region.sites.push_back(i);
    }
  return region;
}

IsingLayout wall_gap_layout() {
  constexpr int kSide = 20;
  constexpr int kWallCol = 10;
  constexpr int kGapRow = 0;
  std::vector<bool> mask(kSide * kSide, false);
  for (int r = 0; r < kSide; ++r)
    if (r != kGapRow) mask[r * kSide + kWallCol] = true;
  SpinLattice lattice(kSide, Boundary::kPeriodic, std::move(mask));
  IsingLayout layout{lattice, {}, {}};
  layout.regions.push_back(rectangle_region(lattice, "L", 0, kSide - 1, 0, 9));
  layout.regions.push_back(
      rectangle_region(lattice, "R", 0, kSide - 1, 11, kSide - 1));
  // Half a lattice away from the gap, midway between wall and wrap edge.
  layout.probes.probes.push_back({"p", lattice.index(10, 4)});
  return layout;
}

IsingLayout three_rooms_layout() {
  constexpr int kSide = 20;
  std::vector<bool> mask(kSide * kSide, false);
  for (int k = 0; k < kSide; ++k) {
    mask[0 * kSide + k] = true;
    mask[(kSide - 1) * kSide + k] = true;
    mask[k * kSide + 0] = true;
    mask[k * kSide + kSide - 1] = true;
  }
  for (int c = 10; c <= 18; ++c) mask[10 * kSide + c] = true;
  SpinLattice lattice(kSide, Boundary::kOpen, std::move(mask));
  IsingLayout layout{lattice, {}, {}};
  layout.regions.push_back(rectangle_region(lattice, "A", 1, 18, 1, 9));
  layout.regions.push_back(rectangle_region(lattice, "B", 1, 9, 10, 18));
  layout.regions.push_back(rectangle_region(lattice, "C", 11, 18, 10, 18));
  auto& p = layout.probes.probes;
  p.push_back({"A1", lattice.index(4, 8)});
  p.push_back({"A2", lattice.index(15, 8)});
  p.push_back({"B1", lattice.index(3, 17)});
  p.push_back({"B2", lattice.index(7, 17)});
  p.push_back({"C1", lattice.index(13, 17)});
  p.push_back({"C2", lattice.index(16, 17)});
  return layout;
}

}  // namespace suscept::ising
