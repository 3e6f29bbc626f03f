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

#include "lab/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "suscept/errors.hpp"
#include "suscept/models.hpp"

namespace suscept::lab {
namespace {

double tidy(double x) { return std::round(x * 1e12) / 1e12; }

// [first, last] as a 2-element integer array, or a single integer.
std::optional<std::pair<int, int>> read_span(Reader& r, const std::string& key, int side) {
  const json* v = r.raw(key);
  if (!v) {
    r.fail(key, "is required");
    return std::nullopt;
  }
  std::vector<long> ends;
  if (v->is_number_integer()) {
    ends = {v->get<long>(), v->get<long>()};
  } else if (v->is_array() && v->size() == 2 && (*v)[0].is_number_integer() &&
             (*v)[1].is_number_integer()) {
    ends = {(*v)[0].get<long>(), (*v)[1].get<long>()};
  } else {
    r.fail(key, "must be an integer or [first, last]", show(*v));
    return std::nullopt;
  }
  if (ends[0] < 0 || ends[1] >= side || ends[0] > ends[1]) {
    r.fail(key, "must satisfy 0 <= first <= last < " + std::to_string(side), show(*v));
    return std::nullopt;
  }
  return std::pair<int, int>(static_cast<int>(ends[0]), static_cast<int>(ends[1]));
}

std::optional<ising::IsingLayout> custom_layout(Reader& r) {
  const long side = r.integer("side", 20, 2);
  const std::string boundary = r.choice("boundary", "periodic", {"periodic", "open"});
  if (side < 2 || side > 4096) {
    if (side > 4096) r.fail("side", "must be <= 4096", std::to_string(side));
    for (const char* k : {"masked", "regions", "probes"}) r.raw(k);
    r.finish();
    return std::nullopt;
  }
  const int L = static_cast<int>(side);
  std::vector<bool> mask(static_cast<std::size_t>(L) * L, false);
  bool ok = true;
  for (auto& m : r.children("masked")) {
    const auto rows = read_span(m, "rows", L);
    const auto cols = read_span(m, "cols", L);
    m.finish();
    if (!rows || !cols) {
      ok = false;
      continue;
    }
    for (int i = rows->first; i <= rows->second; ++i)
      for (int j = cols->first; j <= cols->second; ++j)
        mask[static_cast<std::size_t>(i) * L + j] = true;
  }
  ising::SpinLattice lattice(L, boundary == "open" ? ising::Boundary::kOpen
                                                   : ising::Boundary::kPeriodic,
                             mask);
  std::vector<ising::RegionSpec> regions;
  std::set<std::string> names;
  auto region_readers = r.children("regions");
  if (r.has("regions") && region_readers.empty() && r.raw("regions")->is_array())
    r.fail("regions", "must not be empty");
  for (auto& g : region_readers) {
    const std::string name = g.text("name", "");
    if (name.empty()) g.fail("name", "is required");
    if (!names.insert(name).second) g.fail("name", "must be unique", show(json(name)));
    const auto rows = read_span(g, "rows", L);
    const auto cols = read_span(g, "cols", L);
    g.finish();
    if (!rows || !cols) {
      ok = false;
      continue;
    }
    auto region = ising::rectangle_region(lattice, name, rows->first, rows->second,
                                          cols->first, cols->second);
    if (region.sites.empty()) {
      g.fail("rows", "region has no unmasked sites");
      ok = false;
    }
    regions.push_back(std::move(region));
  }
  ising::ProbeSet probes;
  for (auto& p : r.children("probes")) {
    const std::string name = p.text("name", "");
    if (name.empty()) p.fail("name", "is required");
    const long row = p.integer("row", -1, 0);
    const long col = p.integer("col", -1, 0);
    if (!p.has("row")) p.fail("row", "is required");
    if (!p.has("col")) p.fail("col", "is required");
    p.finish();
    if (row < 0 || col < 0) {
      ok = false;
      continue;
    }
    if (row >= L || col >= L) {
      p.fail(row >= L ? "row" : "col", "must be < " + std::to_string(L),
             std::to_string(row >= L ? row : col));
      ok = false;
      continue;
    }
    const std::size_t site = lattice.index(static_cast<int>(row), static_cast<int>(col));
    if (lattice.masked(site)) {
      p.fail("row", "probe must sit on an unmasked site",
             "(" + std::to_string(row) + ", " + std::to_string(col) + ")");
      ok = false;
      continue;
    }
    probes.probes.push_back({name, site});
  }
  r.finish();
  if (!ok) return std::nullopt;
  try {
    ising::validate_disjoint(lattice, regions);
  } catch (const InvalidArgument& e) {
    r.fail("regions", e.what());
    return std::nullopt;
  }
  return ising::IsingLayout{std::move(lattice), std::move(regions), std::move(probes)};
}

std::optional<int> coordinate(const std::string& digits, int dimension) {
  if (digits.size() > 6) return std::nullopt;
  const int k = std::stoi(digits);
  if (k >= dimension) return std::nullopt;
  return k;
}

}  // namespace

Vector to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> read_betas(Reader& r, const BetaRange& fallback,
                               const std::vector<double>& fallback_extra) {
  std::vector<double> betas;
  std::vector<double> extra = fallback_extra;
  if (r.has("betas")) {
    betas = r.reals("betas", {});
    if (r.has("beta_range")) r.fail("beta_range", "cannot be combined with betas");
    if (r.has("extra_betas")) r.fail("extra_betas", "cannot be combined with betas");
    r.raw("beta_range");
    r.raw("extra_betas");
    extra.clear();
    if (betas.empty()) r.fail("betas", "must not be empty");
  } else {
    BetaRange range = fallback;
    if (auto c = r.child("beta_range")) {
      range.start = c->positive("start", fallback.start);
      range.stop = c->positive("stop", fallback.stop);
      range.step = c->positive("step", fallback.step);
      if (!c->has("start")) c->fail("start", "is required");
      if (!c->has("stop")) c->fail("stop", "is required");
      if (!c->has("step")) c->fail("step", "is required");
      if (range.stop < range.start)
        c->fail("stop", "must be >= start", std::to_string(range.stop));
      c->finish();
    }
    extra = r.reals("extra_betas", fallback_extra);
    if (range.step > 0.0 && range.stop >= range.start && range.start > 0.0) {
      const double count = std::floor((range.stop - range.start) / range.step + 1e-9);
      if (count > 1e5) {
        r.fail("beta_range", "must produce at most 100000 values");
      } else {
        for (long k = 0; k <= static_cast<long>(count); ++k)
          betas.push_back(tidy(range.start + static_cast<double>(k) * range.step));
      }
    }
  }
  betas.insert(betas.end(), extra.begin(), extra.end());
  for (double b : betas)
    if (!(b > 0.0)) {
      r.fail(r.has("betas") ? "betas" : "extra_betas", "values must be > 0", std::to_string(b));
      break;
    }
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              betas.end());
  return betas;
}

ising::IsingChainConfig read_chain(Reader& r, const ising::IsingChainConfig& fallback) {
  ising::IsingChainConfig out = fallback;
  auto c = r.child("chain");
  if (!c) return out;
  out.samples = static_cast<int>(c->integer("samples", fallback.samples, 2));
  out.burn_in_sweeps = static_cast<int>(c->integer("burn_in", fallback.burn_in_sweeps, 0));
  out.thinning_sweeps = static_cast<int>(c->integer("thinning", fallback.thinning_sweeps, 1));
  const std::string init = c->choice("init", "auto", {"auto", "random", "all-up"});
  out.init = init == "random"   ? ising::ChainInit::kRandom
             : init == "all-up" ? ising::ChainInit::kAllUp
                                : ising::ChainInit::kAuto;
  const std::string order = c->choice("order", "raster", {"raster", "random-site"});
  out.order = order == "random-site" ? ising::SweepOrder::kRandomSite : ising::SweepOrder::kRaster;
  c->finish();
  return out;
}

std::optional<ising::IsingLayout> read_layout(Reader& r, const std::string& fallback) {
  const json* v = r.raw("layout");
  if (!v || v->is_string()) {
    const std::string name = v ? v->get<std::string>() : fallback;
    if (name == "wall-gap") return ising::wall_gap_layout();
    if (name == "three-rooms") return ising::three_rooms_layout();
    r.fail("layout", "must be wall-gap, three-rooms or a layout object", show(*v));
    return std::nullopt;
  }
  if (!v->is_object()) {
    r.fail("layout", "must be wall-gap, three-rooms or a layout object", show(*v));
    return std::nullopt;
  }
  auto c = r.child("layout");
  return custom_layout(*c);
}

std::optional<GibbsProblem> read_problem(Reader& r) {
  auto p = r.child("problem");
  if (!p) {
    if (!r.has("problem")) r.fail("problem", "is required");
    return std::nullopt;
  }
  GibbsProblem problem;
  bool ok = true;
  if (auto m = p->child("model")) {
    ToyModelSpec spec;
    spec.name = m->choice("name", "gaussian_location", toy_model_names());
    spec.dimension = static_cast<int>(m->integer("dimension", 1, 1));
    spec.quadratic = m->reals("quadratic", {});
    spec.cubic = m->reals("cubic", {});
    spec.quartic = m->reals("quartic", {});
    spec.coupling = m->real("coupling", 0.0);
    m->finish();
    try {
      problem.loss = make_toy_loss(spec);
    } catch (const InvalidArgument& e) {
      p->fail("model", e.what());
      ok = false;
    }
  } else {
    if (!p->has("model")) p->fail("model", "is required");
    ok = false;
  }
  const auto rows = p->rows("data");
  if (rows.empty()) p->fail("data", "must hold at least one data point");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (problem.loss && static_cast<int>(rows[i].size()) != problem.loss->data_dimension()) {
      p->fail("data[" + std::to_string(i) + "]",
              "must have length " + std::to_string(problem.loss->data_dimension()),
              std::to_string(rows[i].size()) + " values");
      ok = false;
    }
    problem.data.push_back(to_vector(rows[i]));
  }
  problem.beta = p->positive("beta", 1.0);
  problem.gamma = p->non_negative("gamma", 0.0);
  const auto w_star = p->reals("w_star", {});
  if (p->has("w_star") && problem.loss &&
      static_cast<int>(w_star.size()) != problem.loss->dimension()) {
    p->fail("w_star", "must have length " + std::to_string(problem.loss->dimension()),
            std::to_string(w_star.size()) + " values");
    ok = false;
  }
  problem.w_star = to_vector(w_star);
  const auto weights = p->reals("weights", {});
  if (p->has("weights") && weights.size() != rows.size()) {
    p->fail("weights", "must have one entry per data point",
            std::to_string(weights.size()) + " values");
    ok = false;
  }
  problem.weights = to_vector(weights);
  p->finish();
  if (!ok || rows.empty()) return std::nullopt;
  return problem;
}

std::vector<ComponentSpec> read_components(Reader& r, int dimension) {
  std::vector<ComponentSpec> out;
  std::set<std::string> names;
  auto items = r.children("components");
  if (!r.has("components")) r.fail("components", "is required");
  for (auto& c : items) {
    ComponentSpec spec;
    spec.name = c.text("name", "");
    if (spec.name.empty()) c.fail("name", "is required");
    if (!names.insert(spec.name).second) c.fail("name", "must be unique", show(json(spec.name)));
    const json* idx = c.raw("indices");
    if (!idx || !idx->is_array() || idx->empty()) {
      c.fail("indices", "must be a non-empty array of integers", idx ? show(*idx) : "");
    } else {
      std::set<long> seen;
      for (std::size_t k = 0; k < idx->size(); ++k) {
        const json& e = (*idx)[k];
        const std::string key = "indices[" + std::to_string(k) + "]";
        if (!e.is_number_integer()) {
          c.fail(key, "must be an integer", show(e));
          continue;
        }
        const long i = e.get<long>();
        if (i < 0 || i >= dimension) {
          c.fail(key, "must be in [0, " + std::to_string(dimension) + ")", std::to_string(i));
          continue;
        }
        if (!seen.insert(i).second) {
          c.fail(key, "duplicates an earlier index", std::to_string(i));
          continue;
        }
        spec.indices.push_back(static_cast<int>(i));
      }
    }
    c.finish();
    out.push_back(std::move(spec));
  }
  return out;
}

std::optional<Observable> parse_observable(const std::string& text, int dimension) {
  static const std::regex linear(R"(\s*w(\d+)\s*)");
  static const std::regex power(R"(\s*w(\d+)\s*\^\s*(\d+)\s*)");
  static const std::regex product(R"(\s*w(\d+)\s*\*\s*w(\d+)\s*)");
  static const std::regex unary(R"(\s*(cos|sin|exp)\s*\(?\s*w(\d+)\s*\)?\s*)");
  std::smatch m;
  Observable out;
  out.label = text;
  out.spec.label = text;
  out.spec.kind = ObservableSpec::Kind::kCustom;
  if (text == "excess_loss") {
    out.spec.kind = ObservableSpec::Kind::kExcessLoss;
    return out;
  }
  if (std::regex_match(text, m, linear)) {
    const auto i = coordinate(m[1], dimension);
    if (!i) return std::nullopt;
    out.spec.function = [k = *i](const Vector& w) { return w[k]; };
  } else if (std::regex_match(text, m, power)) {
    const auto i = coordinate(m[1], dimension);
    const int p = m[2].length() > 2 ? 0 : std::stoi(m[2]);
    if (!i || p < 1 || p > 12) return std::nullopt;
    out.spec.function = [k = *i, p](const Vector& w) { return std::pow(w[k], p); };
  } else if (std::regex_match(text, m, product)) {
    const auto i = coordinate(m[1], dimension);
    const auto j = coordinate(m[2], dimension);
    if (!i || !j) return std::nullopt;
    out.spec.function = [a = *i, b = *j](const Vector& w) { return w[a] * w[b]; };
  } else if (std::regex_match(text, m, unary)) {
    const auto i = coordinate(m[2], dimension);
    if (!i) return std::nullopt;
    const std::string f = m[1];
    const int k = *i;
    if (f == "cos") out.spec.function = [k](const Vector& w) { return std::cos(w[k]); };
    if (f == "sin") out.spec.function = [k](const Vector& w) { return std::sin(w[k]); };
    if (f == "exp") out.spec.function = [k](const Vector& w) { return std::exp(w[k]); };
  } else {
    return std::nullopt;
  }
  return out;
}

std::vector<Observable> read_observables(Reader& r, const std::string& key, int dimension) {
  std::vector<Observable> out;
  const json* v = r.raw(key);
  if (!v) return out;
  if (!v->is_array()) {
    r.fail(key, "must be an array of strings", show(*v));
    return out;
  }
  for (std::size_t k = 0; k < v->size(); ++k) {
    const json& e = (*v)[k];
    const std::string at = key + "[" + std::to_string(k) + "]";
    if (!e.is_string()) {
      r.fail(at, "must be a string", show(e));
      continue;
    }
    auto o = parse_observable(e.get<std::string>(), dimension);
    if (!o) {
      r.fail(at,
             "must be one of wK, wK^p, wJ*wK, cos wK, sin wK, exp wK, excess_loss with K < " +
                 std::to_string(dimension),
             show(e));
      continue;
    }
    out.push_back(std::move(*o));
  }
  return out;
}

}  // namespace suscept::lab
