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
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <type_traits>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "lab/blocks.hpp"
#include "lab/runner.hpp"
#include "lab/schema.hpp"
#include "lab/svg.hpp"
#include "suscept/io.hpp"
#include "suscept/laplace.hpp"
#include "suscept/parallel.hpp"
#include "suscept/patterning.hpp"
#include "suscept/quadrature.hpp"

#ifndef SUSCEPT_LAB_VERSION
#define SUSCEPT_LAB_VERSION "0.0.0"
#endif

namespace suscept::lab {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using ojson = nlohmann::ordered_json;

class Run {
 public:
  explicit Run(const ExperimentConfig& config) : config(config) {}

  // Times `f` and tags numerical failures with the stage name.
  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    auto done = [&] {
      timings.push_back({name, std::chrono::duration<double>(Clock::now() - t0).count()});
    };
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        f();
        done();
      } else {
        auto out = f();
        done();
        return out;
      }
    } catch (const StageError&) {
      throw;
    } catch (const NumericalError& e) {
      throw StageError(name, e.what());
    }
  }

  void add(const std::string& path, std::string content) { files.add(path, std::move(content)); }
  void add_json(const std::string& path, const ojson& j) { add(path, j.dump(2) + "\n"); }

  const ExperimentConfig& config;
  ArtifactSet files;
  std::vector<StageTiming> timings;
  std::vector<std::string> notes;
};

using Job = std::function<void(Run&)>;

std::string num(double x) { return io::format_double(x); }

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

ojson vector_json(const Vector& v) { return ojson(std::vector<double>(v.data(), v.data() + v.size())); }

// Same layout as io::write_susceptibility_matrix, collected in memory.
void add_matrix(Run& run, const std::string& stem, const SusceptibilityMatrix& m) {
  run.add(stem + ".csv", io::matrix_to_csv(m.values, m.row_labels, m.column_labels));
  ojson j;
  j["rows"] = m.values.rows();
  j["columns"] = m.values.cols();
  j["standardization"] = to_string(m.standardization);
  j["renormalized"] = m.renormalized;
  j["fingerprints"] = m.fingerprints;
  j["zscore_variance"] = "population (1/D)";
  j["covariance_normalization"] = "1/(S-1)";
  if (m.standard_errors.size() != 0) {
    const std::string se = stem + ".se.csv";
    run.add(se, io::matrix_to_csv(m.standard_errors, m.row_labels, m.column_labels));
    j["standard_errors"] = fs::path(se).filename().string();
  }
  run.add_json(stem + ".json", j);
}

std::vector<std::string> data_labels(const GibbsProblem& problem) { return numbered("z", problem.n()); }

void ensure_minimum(Run& run, GibbsProblem& problem) {
  if (problem.w_star.size() != 0) {
    run.stage("validate_problem", [&] { problem.validate(); });
    return;
  }
  run.stage("minimize", [&] {
    problem.w_star = Vector::Zero(problem.dimension());
    problem.w_star = minimize_empirical_loss(problem);
    problem.validate();
  });
}

ScalarFunction as_function(const Observable& o, const GibbsProblem& problem) {
  if (o.spec.kind == ObservableSpec::Kind::kCustom) return o.spec.function;
  return [&problem](const Vector& w) {
    return empirical_loss(w, problem) - empirical_loss(problem.w_star, problem);
  };
}

// --------------------------------------------------------------------------
// SGLD block

struct SgldBlock {
  SGLDConfig config;
  std::optional<double> step_size;
  double step_fraction = 0.005;
};

SgldBlock read_sgld(Reader& r, const SGLDConfig& fallback) {
  SgldBlock out;
  out.config = fallback;
  auto c = r.child("sgld");
  if (!c) return out;
  if (c->has("step_size") && c->has("step_fraction"))
    c->fail("step_fraction", "cannot be combined with step_size");
  if (c->has("step_size")) out.step_size = c->positive("step_size", fallback.step_size);
  out.step_fraction = c->positive("step_fraction", out.step_fraction);
  if (out.step_fraction >= 1.0)
    c->fail("step_fraction", "must be < 1", num(out.step_fraction));
  out.config.steps = c->integer("steps", fallback.steps, 1);
  out.config.burn_in = c->integer("burn_in", fallback.burn_in, 0);
  out.config.thinning = c->integer("thinning", fallback.thinning, 1);
  out.config.chains = static_cast<int>(c->integer("chains", fallback.chains, 1));
  out.config.minibatch_size =
      static_cast<std::size_t>(c->integer("minibatch_size", 0, 0));
  c->finish();
  return out;
}

SGLDConfig resolve_sgld(Run& run, const SgldBlock& block, const GibbsProblem& problem,
                        const std::optional<ComponentSpec>& restriction = {}) {
  SGLDConfig cfg = block.config;
  cfg.seed = run.config.seed;
  cfg.threads = run.config.threads;
  if (block.step_size) {
    cfg.step_size = *block.step_size;
  } else {
    const std::string name = restriction ? "step_size/" + restriction->name : "step_size";
    cfg.step_size = block.step_fraction *
                    run.stage(name, [&] { return stability_bound(problem, restriction, cfg.seed); });
  }
  return cfg;
}

void note_init(Run& run, ising::ChainInit init) {
  switch (init) {
    case ising::ChainInit::kAuto:
      run.notes.push_back("chain init: uniform random for beta <= beta_c, all spins up above");
      break;
    case ising::ChainInit::kRandom:
      run.notes.push_back("chain init: uniform random at every beta");
      break;
    default:
      run.notes.push_back("chain init: all spins up at every beta");
  }
}

// --------------------------------------------------------------------------
// ising-phase

Job parse_phase(Reader& r) {
  const long side = r.integer("side", 20, 2);
  const std::string boundary = r.choice("boundary", "periodic", {"periodic", "open"});
  const auto betas = read_betas(r, {0.10, 0.70, 0.05});
  ising::IsingChainConfig chain;
  chain.samples = 500;
  chain = read_chain(r, chain);
  if (side > 4096) r.fail("side", "must be <= 4096", std::to_string(side));
  return [=](Run& run) {
    const ising::SpinLattice lattice(
        static_cast<int>(side),
        boundary == "open" ? ising::Boundary::kOpen : ising::Boundary::kPeriodic);
    ising::IsingChainConfig cfg = chain;
    cfg.seed = run.config.seed;
    note_init(run, cfg.init);
    const auto curve = run.stage("sample", [&] {
      return ising::order_parameter_curve(betas, lattice, cfg, run.config.threads);
    });
    io::CsvTable t{{"beta", "order_parameter", "standard_error"}, {}};
    Series s{"<|M|>/N", {}, {}, {}};
    for (const auto& p : curve) {
      t.rows.push_back({num(p.beta), num(p.order_parameter), num(p.standard_error)});
      s.x.push_back(p.beta);
      s.y.push_back(p.order_parameter);
      s.error.push_back(p.standard_error);
    }
    run.add("phase.csv", io::to_csv(t));
    run.add("phase.svg", render_line_plot({"Order parameter", "beta", "<|M|>/N", {s},
                                           {{ising::kCriticalBeta, "beta_c"}}, false}));
    ojson j;
    j["side"] = side;
    j["boundary"] = boundary;
    j["sites"] = lattice.active_sites().size();
    if (curve.size() >= 2) {
      std::size_t steepest = 0;
      double best = -1e300;
      for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
        const double slope = (curve[k + 1].order_parameter - curve[k].order_parameter) /
                             (curve[k + 1].beta - curve[k].beta);
        if (slope > best) {
          best = slope;
          steepest = k;
        }
      }
      j["steepest_interval"] = {curve[steepest].beta, curve[steepest + 1].beta};
    }
    run.add_json("summary.json", j);
  };
}

// --------------------------------------------------------------------------
// ising-sweep

const ising::RegionSpec* find_region(const ising::IsingLayout& layout, const std::string& name) {
  for (const auto& g : layout.regions)
    if (g.name == name) return &g;
  return nullptr;
}

Job parse_sweep(Reader& r) {
  auto layout = read_layout(r, "wall-gap");
  const auto betas = read_betas(r, {0.30, 0.40, 0.005}, {0.44});
  ising::IsingChainConfig chain;
  chain.samples = 20000;
  chain = read_chain(r, chain);
  ising::SweepOptions options;
  options.noise_floor_sigmas = r.non_negative("noise_floor_sigmas", 3.0);
  std::string probe = r.text("probe", "");
  std::string left = r.text("left", "");
  std::string right = r.text("right", "");
  if (!layout) return {};
  if (layout->probes.probes.empty()) r.fail("layout", "must define at least one probe");
  if (layout->regions.size() < 2 && (left.empty() || right.empty()))
    r.fail("layout", "must define at least two regions");
  if (probe.empty() && !layout->probes.probes.empty()) probe = layout->probes.probes.front().name;
  if (left.empty() && !layout->regions.empty()) left = layout->regions[0].name;
  if (right.empty() && layout->regions.size() > 1) right = layout->regions[1].name;
  std::size_t site = 0;
  bool found = false;
  for (const auto& p : layout->probes.probes)
    if (p.name == probe) {
      site = p.site;
      found = true;
    }
  if (!found && !layout->probes.probes.empty()) r.fail("probe", "names no probe of the layout", probe);
  if (!left.empty() && !find_region(*layout, left)) r.fail("left", "names no region of the layout", left);
  if (!right.empty() && !find_region(*layout, right))
    r.fail("right", "names no region of the layout", right);
  if (!left.empty() && left == right) r.fail("right", "must differ from left", right);
  return [=, layout = *layout](Run& run) {
    ising::IsingChainConfig cfg = chain;
    cfg.seed = run.config.seed;
    note_init(run, cfg.init);
    ising::SweepOptions opts = options;
    opts.threads = run.config.threads;
    const auto points = run.stage("sample", [&] {
      return ising::susceptibility_sweep(layout.lattice, site, *find_region(layout, left),
                                         *find_region(layout, right), betas, cfg, opts);
    });
    io::CsvTable t{{"beta", "chi_left", "se_left", "chi_right", "se_right", "ratio"}, {}};
    Series sl{"chi_" + left, {}, {}, {}}, sr{"chi_" + right, {}, {}, {}}, ratio{"chi_" + left + " / chi_" + right, {}, {}, {}};
    for (const auto& p : points) {
      t.rows.push_back({num(p.beta), num(p.chi_left.value), num(p.chi_left.standard_error),
                        num(p.chi_right.value), num(p.chi_right.standard_error),
                        p.ratio ? num(*p.ratio) : ""});
      sl.x.push_back(p.beta);
      sl.y.push_back(p.chi_left.value);
      sl.error.push_back(p.chi_left.standard_error);
      sr.x.push_back(p.beta);
      sr.y.push_back(p.chi_right.value);
      sr.error.push_back(p.chi_right.standard_error);
      if (p.ratio && *p.ratio > 0.0) {
        ratio.x.push_back(p.beta);
        ratio.y.push_back(*p.ratio);
      }
    }
    const std::vector<Marker> markers{{ising::kCriticalBeta, "beta_c"}};
    run.add("sweep.csv", io::to_csv(t));
    run.add("sweep.svg", render_line_plot({"Probe susceptibility by region", "beta",
                                           "Cov[s_p, M]", {sl, sr}, markers, false}));
    run.add("ratio.svg", render_line_plot({"Susceptibility ratio", "beta", "ratio", {ratio},
                                           markers, true}));
    ojson j;
    j["probe"] = probe;
    j["left"] = left;
    j["right"] = right;
    j["noise_floor_sigmas"] = options.noise_floor_sigmas;
    double peak = 0.0, peak_beta = 0.0;
    for (const auto& p : points)
      if (p.ratio && *p.ratio > peak) {
        peak = *p.ratio;
        peak_beta = p.beta;
      }
    j["peak_ratio"] = peak;
    j["peak_beta"] = peak_beta;
    run.add_json("summary.json", j);
  };
}

// --------------------------------------------------------------------------
// ising-response

Job parse_response(Reader& r) {
  auto layout = read_layout(r, "three-rooms");
  ising::IsingChainConfig chain;
  chain.samples = 20000;
  chain = read_chain(r, chain);
  chain.beta = r.positive("beta", 0.44);
  if (!layout) return {};
  if (layout->probes.probes.empty()) r.fail("layout", "must define at least one probe");
  if (layout->regions.empty()) r.fail("layout", "must define at least one region");
  return [=, layout = *layout](Run& run) {
    ising::IsingChainConfig cfg = chain;
    cfg.seed = run.config.seed;
    note_init(run, cfg.init);
    const auto m = run.stage("sample", [&] {
      return ising::response_matrix(layout.lattice, layout.probes, layout.regions, cfg);
    });
    run.add("response.csv", io::matrix_to_csv(m.values, m.probe_labels, m.region_labels, "probe"));
    run.add("response.se.csv",
            io::matrix_to_csv(m.standard_errors, m.probe_labels, m.region_labels, "probe"));
    run.add("response.svg", render_heatmap({"Cov[s_p, M_region] at beta = " + num(cfg.beta),
                                            m.values, m.probe_labels, m.region_labels}));
    ojson j;
    j["beta"] = cfg.beta;
    j["any_degenerate"] = m.any_degenerate;
    run.add_json("summary.json", j);
  };
}

// --------------------------------------------------------------------------
// fdt-check

std::vector<Observable> default_observables(int dimension, const std::vector<std::string>& names) {
  std::vector<Observable> out;
  for (const auto& n : names) out.push_back(*parse_observable(n, dimension));
  return out;
}

Job parse_fdt(Reader& r) {
  auto problem = read_problem(r);
  const int d = problem ? problem->dimension() : 1;
  auto observables = read_observables(r, "observables", d);
  if (!r.has("observables")) observables = default_observables(d, {"w0", "w0^2", "cos w0"});
  const auto probe = r.reals("probe", {});
  if (!r.has("probe")) r.fail("probe", "is required");
  const double step = r.positive("step", 1e-4);
  const double grid_tolerance = r.positive("grid_tolerance", 1e-12);
  const double grid_width = r.positive("grid_width", 16.0);
  const double tolerance = r.positive("tolerance", 1e-5);
  if (!problem) return {};
  if (d > 2) r.fail("problem.model.dimension", "must be 1 or 2 for quadrature", std::to_string(d));
  if (r.has("probe") && static_cast<int>(probe.size()) != problem->loss->data_dimension())
    r.fail("probe", "must have length " + std::to_string(problem->loss->data_dimension()),
           std::to_string(probe.size()) + " values");
  return [=, problem = *problem](Run& run) mutable {
    ensure_minimum(run, problem);
    const Vector z_probe = to_vector(probe);
    const ScalarFunction probe_loss = [&](const Vector& w) { return problem.loss->value(w, z_probe); };
    std::vector<int> free(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) free[static_cast<std::size_t>(k)] = k;
    QuadratureOptions base;
    base.probe_loss = probe_loss;
    base.grid = run.stage("grid", [&] {
      return auto_grid(gibbs_energy(problem, base), problem.w_star, free, grid_tolerance,
                       grid_width);
    });
    io::CsvTable t{{"observable", "perturbation", "finite_difference", "covariance",
                    "relative_error"}, {}};
    double worst = 0.0;
    std::string worst_case;
    auto record = [&](const std::string& obs, const std::string& what, double fd, double cov) {
      const double rel = std::abs(fd - cov) / std::abs(cov);
      t.rows.push_back({obs, what, num(fd), num(cov), num(rel)});
      if (!(rel <= worst)) {
        worst = std::isfinite(rel) ? rel : INFINITY;
        worst_case = obs + " / " + what;
      }
    };
    run.stage("quadrature", [&] {
      const QuadraturePosterior q0 = gibbs_quadrature(problem, base);
      const Vector L = q0.evaluate([&](const Vector& w) { return empirical_loss(w, problem); });
      const Vector probe_values = q0.evaluate(probe_loss);
      QuadratureOptions plus = base, minus = base;
      plus.h = step;
      minus.h = -step;
      const QuadraturePosterior qp = gibbs_quadrature(problem, plus);
      const QuadraturePosterior qm = gibbs_quadrature(problem, minus);
      std::vector<QuadraturePosterior> up, down;
      std::vector<Vector> li;
      for (std::size_t i = 0; i < problem.n(); ++i) {
        GibbsProblem a = problem, b = problem;
        a.weights = Vector::Ones(static_cast<Eigen::Index>(problem.n()));
        if (problem.weights.size() != 0) a.weights = problem.weights;
        b.weights = a.weights;
        a.weights[static_cast<Eigen::Index>(i)] += step;
        b.weights[static_cast<Eigen::Index>(i)] -= step;
        up.push_back(gibbs_quadrature(a, base));
        down.push_back(gibbs_quadrature(b, base));
        li.push_back(q0.evaluate([&](const Vector& w) { return problem.loss->value(w, problem.data[i]); }));
      }
      for (const auto& o : observables) {
        const ScalarFunction phi = as_function(o, problem);
        const Vector phi_values = q0.evaluate(phi);
        record(o.label, "h", (qp.expectation(phi) - qm.expectation(phi)) / (2.0 * step),
               -problem.n_beta() * q0.covariance(phi_values, probe_values - L));
        for (std::size_t i = 0; i < problem.n(); ++i)
          record(o.label, "rho_" + std::to_string(i),
                 (up[i].expectation(phi) - down[i].expectation(phi)) / (2.0 * step),
                 -problem.beta * q0.covariance(phi_values, li[i]));
      }
    });
    run.add("fdt.csv", io::to_csv(t));
    ojson j;
    j["w_star"] = vector_json(problem.w_star);
    j["grid"] = {{"lower", base.grid->lower}, {"upper", base.grid->upper}, {"cells", base.grid->cells}};
    j["step"] = step;
    j["max_relative_error"] = worst;
    j["worst_case"] = worst_case;
    j["tolerance"] = tolerance;
    j["pass"] = worst < tolerance;
    run.add_json("fdt.json", j);
  };
}

// --------------------------------------------------------------------------
// laplace-check

struct LaplaceInstance {
  double lambda, alpha, quartic, b1, b2, b3;
};

std::pair<double, double> read_interval(Reader& r, const std::string& key,
                                        std::pair<double, double> fallback) {
  const auto v = r.reals(key, {fallback.first, fallback.second});
  if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] >= v[0])) {
    r.fail(key, "must be [low, high] with 0 < low <= high");
    return fallback;
  }
  return {v[0], v[1]};
}

Job parse_laplace(Reader& r) {
  const long instances = r.integer("instances", 20, 1);
  auto ts = r.reals("t", {1e2, 1e3, 1e4});
  const auto lambda_range = read_interval(r, "lambda_range", {0.5, 2.0});
  const auto quartic_range = read_interval(r, "quartic_range", {0.5, 2.0});
  const double cubic_fraction = r.positive("cubic_fraction", 0.9);
  const double ratio_limit = r.positive("ratio_limit", 10.0);
  if (cubic_fraction >= 1.0) r.fail("cubic_fraction", "must be < 1", num(cubic_fraction));
  if (ts.size() < 2) r.fail("t", "must list at least two values");
  for (double t : ts)
    if (!(t > 0.0)) {
      r.fail("t", "values must be > 0", num(t));
      break;
    }
  std::sort(ts.begin(), ts.end());
  return [=](Run& run) {
    run.notes.push_back("quadrature oracle uses a flat prior; boundary mass is checked");
    // Coefficients drawn in instance order, so results do not depend on threads.
    std::mt19937_64 rng(run.config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<LaplaceInstance> inst(static_cast<std::size_t>(instances));
    for (auto& c : inst) {
      c.lambda = lambda_range.first + (lambda_range.second - lambda_range.first) * unit(rng);
      c.quartic = quartic_range.first + (quartic_range.second - quartic_range.first) * unit(rng);
      const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      c.alpha = sign * std::sqrt(cubic_fraction * unit(rng) * 3.0 * c.lambda * c.quartic);
      c.b1 = unit(rng) - 0.5;
      c.b2 = unit(rng) - 0.5;
      c.b3 = unit(rng) - 0.5;
    }
    const char* names[] = {"mean_w", "var_w", "cov_w2_w", "cov_K_f"};
    const int orders[] = {2, 2, 3, 3};
    const std::size_t nt = ts.size();
    // [instance][quantity][t] -> oracle, formula, scaled residual
    std::vector<std::array<std::vector<std::array<double, 3>>, 4>> res(inst.size());
    run.stage("quadrature", [&] {
      parallel_for(inst.size(), run.config.threads, [&](std::size_t k) {
        const LaplaceInstance c = inst[k];
        const auto taylor = laplace::TaylorData::quartic_1d({c.lambda, c.alpha, c.quartic});
        const ScalarFunction loss = [c](const Vector& w) {
          const double x = w[0];
          return c.lambda * x * x / 2 + c.alpha * x * x * x / 6 + c.quartic * x * x * x * x / 24;
        };
        const ScalarFunction f_z = [c](const Vector& w) {
          const double x = w[0];
          return c.b1 * x + c.b2 * x * x / 2 + c.b3 * x * x * x / 6;
        };
        const Vector grad_ell = Vector::Constant(1, c.b1);
        const Matrix hess_ell = Matrix::Constant(1, 1, c.lambda + c.b2);
        for (int j = 0; j < 4; ++j) res[k][static_cast<std::size_t>(j)].resize(nt);
        for (std::size_t m = 0; m < nt; ++m) {
          const double t = ts[m];
          const auto q = flat_prior_quadrature(loss, t, Vector::Zero(1));
          const Vector x = q.evaluate([](const Vector& w) { return w[0]; });
          const Vector x2 = x.cwiseProduct(x);
          const double oracle[4] = {q.expectation(x), q.covariance(x, x), q.covariance(x2, x),
                                    q.covariance(q.evaluate(loss), q.evaluate(f_z))};
          const double l = c.lambda;
          const double formula[4] = {-c.alpha / (2 * l * l * t), 1 / (l * t),
                                     -2 * c.alpha / (l * l * l * t * t),
                                     laplace::llc_suscept_leading(grad_ell, hess_ell, taylor, t)};
          for (int j = 0; j < 4; ++j)
            res[k][static_cast<std::size_t>(j)][m] = {
                oracle[j], formula[j], std::abs(oracle[j] - formula[j]) * std::pow(t, orders[j])};
        }
      });
    });
    io::CsvTable ti{{"instance", "lambda", "alpha", "quartic", "b1", "b2", "b3"}, {}};
    io::CsvTable tr{{"instance", "quantity", "t", "quadrature", "expansion", "scaled_residual"}, {}};
    ojson worst = ojson::object();
    bool pass = true;
    std::vector<Series> series;
    for (int j = 0; j < 4; ++j) {
      double ratio_max = 1.0;
      long at = 0;
      Series s{names[j], {}, {}, {}};
      for (std::size_t m = 0; m < nt; ++m) {
        double largest = 0.0;
        for (const auto& r : res) largest = std::max(largest, r[static_cast<std::size_t>(j)][m][2]);
        s.x.push_back(std::log10(ts[m]));
        s.y.push_back(largest);
      }
      for (std::size_t k = 0; k < inst.size(); ++k) {
        const auto& row = res[k][static_cast<std::size_t>(j)];
        double lo = INFINITY, hi = 0.0;
        for (const auto& e : row) {
          lo = std::min(lo, e[2]);
          hi = std::max(hi, e[2]);
        }
        const double ratio = hi / lo;
        if (!(ratio <= ratio_max)) {
          ratio_max = std::isfinite(ratio) ? ratio : INFINITY;
          at = static_cast<long>(k);
        }
      }
      pass = pass && ratio_max <= ratio_limit;
      worst[names[j]] = {{"order", orders[j]}, {"worst_ratio", ratio_max}, {"instance", at}};
      series.push_back(std::move(s));
    }
    for (std::size_t k = 0; k < inst.size(); ++k) {
      const auto& c = inst[k];
      ti.rows.push_back({std::to_string(k), num(c.lambda), num(c.alpha), num(c.quartic), num(c.b1),
                         num(c.b2), num(c.b3)});
      for (int j = 0; j < 4; ++j)
        for (std::size_t m = 0; m < nt; ++m) {
          const auto& e = res[k][static_cast<std::size_t>(j)][m];
          tr.rows.push_back({std::to_string(k), names[j], num(ts[m]), num(e[0]), num(e[1]), num(e[2])});
        }
    }
    run.add("instances.csv", io::to_csv(ti));
    run.add("residuals.csv", io::to_csv(tr));
    run.add("laplace.svg", render_line_plot({"Largest scaled residual over instances", "log10 t",
                                             "|quadrature - expansion| t^order", series, {}, true}));
    ojson j;
    j["instances"] = instances;
    j["t"] = ts;
    j["ratio_limit"] = ratio_limit;
    j["quantities"] = worst;
    j["pass"] = pass;
    run.add_json("laplace.json", j);
  };
}

// --------------------------------------------------------------------------
// llc-check

Job parse_llc(Reader& r) {
  auto problem = read_problem(r);
  SGLDConfig fallback;
  fallback.steps = 1000000;
  fallback.burn_in = 5000;
  fallback.thinning = 100;
  const SgldBlock sgld = read_sgld(r, fallback);
  std::optional<double> target;
  if (r.has("target")) target = r.real("target", 0.0);
  const double tolerance = r.positive("tolerance", 0.1);
  if (!problem) return {};
  if (sgld.config.minibatch_size > problem->n())
    r.fail("sgld.minibatch_size", "must be <= the number of data points",
           std::to_string(sgld.config.minibatch_size));
  return [=, problem = *problem](Run& run) mutable {
    ensure_minimum(run, problem);
    const SGLDConfig cfg = resolve_sgld(run, sgld, problem);
    const ChainSamples samples = run.stage("sample", [&] { return sgld_run(problem, cfg); });
    const Estimate e = run.stage("estimate", [&] { return llc_estimate(samples, problem); });
    io::CsvTable t{{"draw", "loss", "running_estimate"}, {}};
    double sum = 0.0;
    for (Eigen::Index k = 0; k < samples.full_loss.size(); ++k) {
      const double excess = problem.n_beta() * (samples.full_loss[k] - samples.reference_loss);
      sum += excess;
      t.rows.push_back({std::to_string(k), num(samples.full_loss[k]),
                        num(sum / static_cast<double>(k + 1))});
    }
    run.add("llc_trace.csv", io::to_csv(t));
    ojson j;
    j["estimate"] = e.value;
    j["standard_error"] = e.standard_error;
    j["effective_sample_size"] = e.effective_sample_size;
    j["draws"] = samples.size();
    j["step_size"] = cfg.step_size;
    j["n_beta"] = problem.n_beta();
    j["w_star"] = vector_json(problem.w_star);
    if (target) {
      const double rel = std::abs(e.value - *target) / std::abs(*target);
      j["target"] = *target;
      j["relative_error"] = rel;
      j["tolerance"] = tolerance;
      j["pass"] = rel <= tolerance;
    }
    run.add_json("llc.json", j);
  };
}

// --------------------------------------------------------------------------
// suscept-estimate

std::string chain_json(const ChainSamples& s, const SGLDConfig& cfg) {
  ojson j;
  j["fingerprint"] = s.fingerprint;
  j["draws"] = s.size();
  j["chains"] = s.chains;
  j["reference_loss"] = s.reference_loss;
  j["seed"] = cfg.seed;
  j["config"] = {{"step_size", cfg.step_size}, {"minibatch_size", cfg.minibatch_size},
                 {"steps", cfg.steps},         {"burn_in", cfg.burn_in},
                 {"thinning", cfg.thinning},   {"chains", cfg.chains}};
  if (s.restriction)
    j["restriction"] = {{"name", s.restriction->name}, {"indices", s.restriction->indices}};
  else
    j["restriction"] = nullptr;
  return j.dump(2) + "\n";
}

void add_chain(Run& run, const std::string& stem, const ChainSamples& s, const SGLDConfig& cfg) {
  run.add(stem + ".draws.csv",
          io::matrix_to_csv(s.draws, numbered("t", s.size()),
                            numbered("w", static_cast<std::size_t>(s.draws.cols())), "draw"));
  run.add(stem + ".losses.csv",
          io::matrix_to_csv(s.per_sample_losses, numbered("t", s.size()),
                            numbered("z", static_cast<std::size_t>(s.per_sample_losses.cols())),
                            "draw"));
  run.add(stem + ".json", chain_json(s, cfg));
}

Job parse_estimate(Reader& r) {
  auto problem = read_problem(r);
  const int d = problem ? problem->dimension() : 1;
  const auto components = read_components(r, d);
  const auto observables = read_observables(r, "observables", d);
  const auto queries = r.rows("queries");
  SGLDConfig fallback;
  fallback.steps = 200000;
  fallback.burn_in = 5000;
  fallback.thinning = 20;
  const SgldBlock sgld = read_sgld(r, fallback);
  const bool standardize_rows = r.flag("standardize", true);
  const bool save_chains = r.flag("save_chains", false);
  if (!problem) return {};
  for (std::size_t k = 0; k < queries.size(); ++k)
    if (static_cast<int>(queries[k].size()) != problem->loss->data_dimension())
      r.fail("queries[" + std::to_string(k) + "]",
             "must have length " + std::to_string(problem->loss->data_dimension()),
             std::to_string(queries[k].size()) + " values");
  if (sgld.config.minibatch_size > problem->n())
    r.fail("sgld.minibatch_size", "must be <= the number of data points",
           std::to_string(sgld.config.minibatch_size));
  if (components.empty() && r.has("components")) r.fail("components", "must not be empty");
  return [=, problem = *problem](Run& run) mutable {
    ensure_minimum(run, problem);
    run.notes.push_back("restricted chains are localized at the same w* as the full chain");
    run.notes.push_back("structural entries omit the factor Z_C / Z_full, which is not estimated");
    const SGLDConfig full_cfg = resolve_sgld(run, sgld, problem);
    const ChainSamples full = run.stage("sample_full", [&] { return sgld_run(problem, full_cfg); });
    if (save_chains) add_chain(run, "chains/full", full, full_cfg);
    std::vector<ChainSamples> restricted;
    for (const auto& c : components) {
      const SGLDConfig cfg = resolve_sgld(run, sgld, problem, c);
      restricted.push_back(run.stage("sample_" + c.name, [&] { return sgld_run(problem, cfg, c); }));
      if (save_chains) add_chain(run, "chains/" + c.name, restricted.back(), cfg);
    }
    ojson summary;
    summary["w_star"] = vector_json(problem.w_star);
    summary["fingerprint"] = problem.fingerprint();
    summary["draws_per_chain"] = full.size();
    summary["step_size"] = full_cfg.step_size;
    const auto labels = data_labels(problem);
    if (!observables.empty()) {
      const auto m = run.stage("per_sample", [&] {
        std::vector<Vector> values;
        std::vector<std::string> names;
        for (const auto& o : observables) {
          values.push_back(observable_values(o.spec, full, problem));
          names.push_back(o.label);
        }
        auto out = susceptibility_matrix(full, values, names);
        out.column_labels = labels;
        return out;
      });
      add_matrix(run, "per_sample", m);
    }
    auto structural = run.stage("structural", [&] {
      auto out = structural_susceptibility(restricted, full, problem);
      out.column_labels = labels;
      return out;
    });
    add_matrix(run, "structural", structural);
    Heatmap map{"Structural susceptibility", structural.values, structural.row_labels, labels};
    if (standardize_rows) {
      const auto z = run.stage("standardize", [&] { return standardize(structural); });
      add_matrix(run, "structural_standardized", z);
      map = {"Structural susceptibility (standardized)", z.values, z.row_labels, labels};
    }
    run.add("structural.svg", render_heatmap(map));
    if (!queries.empty()) {
      const auto inf = run.stage("influence", [&] {
        std::vector<Vector> q;
        for (const auto& row : queries) q.push_back(to_vector(row));
        return influence_matrix(full, problem, q);
      });
      SusceptibilityMatrix m;
      m.values = inf.values;
      m.standard_errors = inf.standard_errors;
      m.row_labels = numbered("q", queries.size());
      m.column_labels = labels;
      m.fingerprints = {full.fingerprint};
      add_matrix(run, "influence", m);
    }
    ojson comps = ojson::array();
    for (std::size_t k = 0; k < components.size(); ++k)
      comps.push_back({{"name", components[k].name},
                       {"indices", components[k].indices},
                       {"draws", restricted[k].size()}});
    summary["components"] = comps;
    summary["standardized"] = standardize_rows;
    run.add_json("summary.json", summary);
  };
}

// --------------------------------------------------------------------------
// pattern-solve

Job parse_pattern(Reader& r, const ExperimentConfig& config) {
  std::optional<SusceptibilityMatrix> matrix;
  const json* spec = r.raw("matrix");
  if (!spec) {
    r.fail("matrix", "is required");
  } else if (spec->is_string()) {
    fs::path stem = spec->get<std::string>();
    if (stem.is_relative()) stem = config.base_dir / stem;
    try {
      matrix = io::read_susceptibility_matrix(stem);
    } catch (const std::exception& e) {
      r.fail("matrix", std::string("cannot be read: ") + e.what(), show(*spec));
    }
  } else if (spec->is_object()) {
    auto m = r.child("matrix");
    const auto rows = m->rows("values");
    SusceptibilityMatrix out;
    if (rows.empty()) m->fail("values", "must be a non-empty array of rows");
    bool ok = !rows.empty();
    for (const auto& row : rows)
      if (row.size() != rows.front().size()) {
        m->fail("values", "rows must have equal length");
        ok = false;
        break;
      }
    if (ok) {
      out.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) = to_vector(rows[i]).transpose();
    }
    auto labels = [&](const std::string& key, const std::string& prefix, std::size_t count) {
      std::vector<std::string> out_labels;
      const json* v = m->raw(key);
      if (!v) return numbered(prefix, count);
      if (!v->is_array() || v->size() != count) {
        m->fail(key, "must list " + std::to_string(count) + " strings", show(*v));
        return numbered(prefix, count);
      }
      for (const auto& e : *v) out_labels.push_back(e.is_string() ? e.get<std::string>() : e.dump());
      return out_labels;
    };
    out.row_labels = labels("row_labels", "c", ok ? rows.size() : 0);
    out.column_labels = labels("column_labels", "z", ok ? rows.front().size() : 0);
    out.standardization = Standardization::kRaw;
    const std::string s = m->choice("standardization", "raw",
                                    {"raw", "component_zscored", "fully_standardized"});
    if (s == "component_zscored") out.standardization = Standardization::kComponentZScored;
    if (s == "fully_standardized") out.standardization = Standardization::kFullyStandardized;
    m->finish();
    if (ok) matrix = out;
  } else {
    r.fail("matrix", "must be a file stem or an object with values", show(*spec));
  }
  const auto target = r.reals("target", {});
  if (!r.has("target")) r.fail("target", "is required");
  const double epsilon = r.positive("epsilon", 0.1);
  const double beta = r.positive("beta", 1.0);
  std::optional<double> ridge;
  if (r.has("ridge_lambda")) ridge = r.positive("ridge_lambda", 1.0);
  const double rank_tolerance = r.non_negative("rank_tolerance", patterning::kDefaultRankTolerance);
  if (!matrix) return {};
  if (!matrix->values.allFinite()) r.fail("matrix", "has non-finite entries");
  if (r.has("target") && static_cast<Eigen::Index>(target.size()) != matrix->values.rows())
    r.fail("target", "must have one entry per matrix row (" +
                         std::to_string(matrix->values.rows()) + ")",
           std::to_string(target.size()) + " values");
  return [=, X = *matrix](Run& run) {
    const Vector dmu = to_vector(target);
    run.notes.push_back("target read in " + to_string(X.standardization) + " coordinates");
    const auto modes = run.stage("svd", [&] { return patterning::svd_modes(X.values, rank_tolerance); });
    const auto plan = run.stage("solve", [&] {
      return patterning::batch_reweight(X.values, dmu, epsilon, beta, ridge, rank_tolerance);
    });
    ojson j;
    j["standardization"] = to_string(X.standardization);
    j["rows"] = X.values.rows();
    j["columns"] = X.values.cols();
    j["rank"] = modes.rank;
    j["rank_tolerance"] = rank_tolerance;
    j["epsilon"] = epsilon;
    j["beta"] = beta;
    j["ridge_lambda"] = ridge ? ojson(*ridge) : ojson(nullptr);
    j["residual_norm"] = plan.residual_norm;
    j["projection_residual"] = plan.projection_residual;
    j["negative_weights"] = plan.negative_weights;
    j["target"] = vector_json(plan.target);
    j["achieved"] = vector_json(plan.achieved);
    j["row_labels"] = X.row_labels;
    run.add_json("plan.json", j);
    io::CsvTable t{{"data", "direction", "weight"}, {}};
    for (Eigen::Index k = 0; k < plan.direction.size(); ++k)
      t.rows.push_back({X.column_labels[static_cast<std::size_t>(k)], num(plan.direction[k]),
                        num(plan.weights[k])});
    run.add("plan.csv", io::to_csv(t));
    const Eigen::Index count = modes.singular_values.size();
    Matrix table(count, 2 + X.values.rows() + X.values.cols());
    std::vector<std::string> cols{"singular_value", "retained"};
    for (const auto& l : X.row_labels) cols.push_back("u:" + l);
    for (const auto& l : X.column_labels) cols.push_back("v:" + l);
    for (Eigen::Index a = 0; a < count; ++a) {
      table(a, 0) = modes.singular_values[a];
      table(a, 1) = a < modes.rank ? 1.0 : 0.0;
      table.row(a).segment(2, X.values.rows()) = modes.left_modes.col(a).transpose();
      table.row(a).tail(X.values.cols()) = modes.right_modes.col(a).transpose();
    }
    run.add("modes.csv", io::matrix_to_csv(table, numbered("mode", static_cast<std::size_t>(count)),
                                           cols, "mode"));
  };
}

Job parse(Reader& r, const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kIsingPhase: return parse_phase(r);
    case ExperimentKind::kIsingSweep: return parse_sweep(r);
    case ExperimentKind::kIsingResponse: return parse_response(r);
    case ExperimentKind::kFdtCheck: return parse_fdt(r);
    case ExperimentKind::kLaplaceCheck: return parse_laplace(r);
    case ExperimentKind::kLlcCheck: return parse_llc(r);
    case ExperimentKind::kSusceptEstimate: return parse_estimate(r);
    case ExperimentKind::kPatternSolve: return parse_pattern(r, config);
  }
  return {};
}

std::pair<Job, std::vector<Diagnostic>> prepare(const ExperimentConfig& config) {
  std::vector<Diagnostic> diagnostics;
  json params;
  try {
    params = json::parse(config.parameters);
  } catch (const json::exception& e) {
    diagnostics.push_back({"parameters", "must be valid JSON", e.what()});
    return {{}, diagnostics};
  }
  Reader root(params, "parameters", diagnostics);
  Job job = parse(root, config);
  root.finish();
  if (config.threads < 1) diagnostics.push_back({"threads", "must be >= 1", "0"});
  if (!job && diagnostics.empty())
    diagnostics.push_back({"parameters", "could not be interpreted", ""});
  return {job, diagnostics};
}

}  // namespace

const char* version() { return SUSCEPT_LAB_VERSION; }

ExperimentConfig with_overrides(ExperimentConfig config, const RunOptions& options) {
  if (options.output) config.output = *options.output;
  if (options.seed) config.seed = *options.seed;
  if (options.threads) config.threads = *options.threads;
  return config;
}

std::vector<Diagnostic> validate(const ExperimentConfig& config) { return prepare(config).second; }

RunManifest run(const ExperimentConfig& config) {
  auto [job, diagnostics] = prepare(config);
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  Run state(config);
  job(state);
  RunManifest m;
  m.version = version();
  m.kind = to_string(config.kind);
  m.config_hash = config.hash();
  m.seed = config.seed;
  m.threads = config.threads;
  m.directory = config.output;
  m.timings = state.timings;
  m.notes = state.notes;
  m.files = state.files.commit(config.output);
  io::write_file_atomic(config.output / "manifest.json", manifest_json(m, config.canonical()));
  return m;
}

}  // namespace suscept::lab
