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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
//   suscept_acceptance [--only N[,N...]] [--threads K]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "suscept/estimators.hpp"
#include "suscept/gibbs.hpp"
#include "suscept/ising.hpp"
#include "suscept/laplace.hpp"
#include "suscept/models.hpp"
#include "suscept/parallel.hpp"
#include "suscept/patterning.hpp"
#include "suscept/quadrature.hpp"

namespace {

using namespace suscept;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t g_threads = 1;

// --------------------------------------------------------------------------
// 1. Ordering curve on the periodic 20x20 lattice.

Outcome criterion_phase() {
  const auto t0 = Clock::now();
  ising::SpinLattice lattice(20, ising::Boundary::kPeriodic);
  std::vector<double> betas;
  for (int k = 0; k <= 12; ++k) betas.push_back(0.10 + 0.05 * k);
  ising::IsingChainConfig config;
  config.samples = 500;
  config.burn_in_sweeps = 2000;
  config.thinning_sweeps = 5;
  config.seed = 1;
  const auto curve = ising::order_parameter_curve(betas, lattice, config, g_threads);
  const double elapsed = seconds_since(t0);

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
  const double lo = curve.front().order_parameter;
  const double hi = curve.back().order_parameter;
  const double b0 = curve[steepest].beta, b1 = curve[steepest + 1].beta;
  const bool bracket = b0 >= 0.35 - 1e-9 && b1 <= 0.50 + 1e-9;
  Outcome o;
  o.pass = lo < 0.25 && hi > 0.85 && bracket && elapsed < 60.0;
  o.detail = "m(0.10)=" + fmt("%.3f", lo) + " m(0.70)=" + fmt("%.3f", hi) +
             " steepest [" + fmt("%.2f", b0) + "," + fmt("%.2f", b1) + "] " +
             fmt("%.1fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 2. Wall/probe sweep.

Outcome criterion_wall_sweep() {
  const auto t0 = Clock::now();
  const auto layout = ising::wall_gap_layout();
  std::vector<double> betas;
  for (int k = 0; k <= 20; ++k) betas.push_back(0.30 + 0.005 * k);
  betas.push_back(0.44);
  ising::IsingChainConfig config;
  config.samples = 20000;
  config.seed = 1;
  ising::SweepOptions options;
  options.threads = g_threads;
  const auto points =
      ising::susceptibility_sweep(layout.lattice, layout.probes.probes.front().site,
                                  layout.regions[0], layout.regions[1], betas, config, options);
  const double elapsed = seconds_since(t0);

  double peak = 0.0, peak_beta = 0.0;
  for (const auto& p : points) {
    if (p.beta > 0.40 + 1e-9 || !p.ratio) continue;
    if (*p.ratio > peak) {
      peak = *p.ratio;
      peak_beta = p.beta;
    }
  }
  const auto& near = *std::min_element(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return std::abs(a.beta - 0.44) < std::abs(b.beta - 0.44);
  });
  const double ratio_near = near.chi_left.value / near.chi_right.value;
  Outcome o;
  o.pass = peak >= 10.0 && near.ratio.has_value() && ratio_near <= 3.0 && elapsed < 300.0;
  o.detail = "peak chi_L/chi_R=" + fmt("%.2f", peak) + " at beta=" + fmt("%.3f", peak_beta) +
             ", ratio at beta=" + fmt("%.2f", near.beta) + " is " + fmt("%.2f", ratio_near) +
             " " + fmt("%.1fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 3. Three-region response matrix.

Outcome criterion_response() {
  const auto t0 = Clock::now();
  const auto layout = ising::three_rooms_layout();
  ising::IsingChainConfig config;
  config.beta = 0.44;
  config.samples = 20000;
  config.seed = 1;
  const auto m = ising::response_matrix(layout.lattice, layout.probes, layout.regions, config);
  const double elapsed = seconds_since(t0);
  const Matrix& v = m.values;

  const int own[] = {0, 0, 1, 1, 2, 2};
  bool own_max = true;
  for (int p = 0; p < 6; ++p)
    for (int r = 0; r < 3; ++r)
      if (r != own[p] && v(p, r) >= v(p, own[p])) own_max = false;
  // B probes onto C, C probes onto B.
  const double leak = std::max({v(2, 2) / v(2, 1), v(3, 2) / v(3, 1), v(4, 1) / v(4, 2),
                                v(5, 1) / v(5, 2)});
  const double a1 = v(0, 1) / v(0, 2);
  const double a2 = v(1, 2) / v(1, 1);
  Outcome o;
  o.pass = own_max && leak < 0.10 && a1 >= 2.0 && a2 >= 2.0 && elapsed < 300.0;
  o.detail = std::string("own-row-max=") + (own_max ? "yes" : "no") +
             " max B<->C share=" + fmt("%.3f", leak) + " A1 B/C=" + fmt("%.2f", a1) +
             " A2 C/B=" + fmt("%.2f", a2) + " " + fmt("%.1fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 4. Finite-difference derivatives of quadrature expectations against the
//    covariance formulas.

Outcome criterion_fdt() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_case;
  auto record = [&](double fd, double cov, const std::string& label) {
    const double rel = std::abs(fd - cov) / std::abs(cov);
    if (!(rel <= worst)) {
      worst = std::isfinite(rel) ? rel : 1e300;
      worst_case = label;
    }
  };

  struct Case {
    std::string name;
    ToyModelSpec model;
    double beta;
  };
  const std::vector<Case> cases = {
      {"gaussian_location", {"gaussian_location", 1, {}, {}, {}, 0.0}, 4.0},
      {"anharmonic", {"polynomial", 1, {1.0}, {0.8}, {0.6}, 0.0}, 6.0},
  };
  const std::vector<Vector> data = {vec({-0.7}), vec({0.1}), vec({0.4}), vec({1.3}),
                                    vec({-0.2})};
  const double step = 1e-4;

  for (const auto& c : cases) {
    GibbsProblem problem;
    problem.loss = make_toy_loss(c.model);
    problem.data = data;
    problem.beta = c.beta;
    problem.gamma = 0.5;
    problem.w_star = Vector::Zero(1);
    problem.w_star = minimize_empirical_loss(problem);

    const Vector z_probe = vec({0.9});
    const ScalarFunction probe = [&](const Vector& w) { return problem.loss->value(w, z_probe); };
    QuadratureOptions base;
    base.probe_loss = probe;
    base.grid = auto_grid(gibbs_energy(problem, base), problem.w_star, {0}, 1e-12, 16.0);
    const QuadraturePosterior q0 = gibbs_quadrature(problem, base);

    const std::vector<std::pair<std::string, ScalarFunction>> observables = {
        {"w", [](const Vector& w) { return w[0]; }},
        {"w^2", [](const Vector& w) { return w[0] * w[0]; }},
        {"cos w", [](const Vector& w) { return std::cos(w[0]); }},
    };
    const Vector L = q0.evaluate([&](const Vector& w) { return empirical_loss(w, problem); });
    const Vector probe_values = q0.evaluate(probe);

    for (const auto& [label, phi] : observables) {
      const Vector phi_values = q0.evaluate(phi);
      // Mixture perturbation L^h = (1-h) L + h l_{z'}.
      QuadratureOptions plus = base, minus = base;
      plus.h = step;
      minus.h = -step;
      const double fd_h = (gibbs_quadrature(problem, plus).expectation(phi) -
                           gibbs_quadrature(problem, minus).expectation(phi)) /
                          (2.0 * step);
      record(fd_h, -problem.n_beta() * q0.covariance(phi_values, probe_values - L),
             c.name + " d/dh <" + label + ">");

      // Per-sample weights.
      for (std::size_t i = 0; i < problem.n(); ++i) {
        GibbsProblem up = problem, down = problem;
        up.weights = Vector::Ones(static_cast<Eigen::Index>(problem.n()));
        down.weights = up.weights;
        up.weights[static_cast<Eigen::Index>(i)] += step;
        down.weights[static_cast<Eigen::Index>(i)] -= step;
        const double fd_rho = (gibbs_quadrature(up, base).expectation(phi) -
                               gibbs_quadrature(down, base).expectation(phi)) /
                              (2.0 * step);
        const Vector li = q0.evaluate(
            [&](const Vector& w) { return problem.loss->value(w, problem.data[i]); });
        record(fd_rho, -problem.beta * q0.covariance(phi_values, li),
               c.name + " d/drho_" + std::to_string(i) + " <" + label + ">");
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-5 && elapsed < 10.0;
  o.detail = "max relative error " + fmt("%.2e", worst) + " (" + worst_case + ") " +
             fmt("%.2fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 5. Scaled residuals of the 1-D expansions at t = 1e2 and 1e4.

Outcome criterion_laplace() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const char* names[] = {"<w>", "Var[w]", "Cov[w^2,w]", "Cov[K,f_z]"};
  const int orders[] = {2, 2, 3, 3};
  double worst = 1.0;
  std::string worst_case;
  constexpr int kInstances = 20;
  for (int inst = 0; inst < kInstances; ++inst) {
    const double lambda = 0.5 + 1.5 * unit(rng);
    const double g4 = 0.5 + 1.5 * unit(rng);
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double alpha = sign * std::sqrt(0.9 * unit(rng) * 3.0 * lambda * g4);
    const double b1 = unit(rng) - 0.5, b2 = unit(rng) - 0.5, b3 = unit(rng) - 0.5;
    const auto taylor = laplace::TaylorData::quartic_1d({lambda, alpha, g4});
    const ScalarFunction loss = [=](const Vector& w) {
      const double x = w[0];
      return lambda * x * x / 2 + alpha * x * x * x / 6 + g4 * x * x * x * x / 24;
    };
    // l_z = L + f_z with f_z a cubic in w.
    const ScalarFunction f_z = [=](const Vector& w) {
      const double x = w[0];
      return b1 * x + b2 * x * x / 2 + b3 * x * x * x / 6;
    };
    const Vector grad_ell = vec({b1});
    const Matrix hess_ell = Matrix::Constant(1, 1, lambda + b2);

    double scaled[4][2];
    const double ts[2] = {1e2, 1e4};
    for (int k = 0; k < 2; ++k) {
      const double t = ts[k];
      const auto q = flat_prior_quadrature(loss, t, Vector::Zero(1));
      const Vector x = q.evaluate([](const Vector& w) { return w[0]; });
      const Vector x2 = x.cwiseProduct(x);
      const double oracle[4] = {q.expectation(x), q.covariance(x, x), q.covariance(x2, x),
                                q.covariance(q.evaluate(loss), q.evaluate(f_z))};
      const double formula[4] = {-alpha / (2 * lambda * lambda * t), 1 / (lambda * t),
                                 -2 * alpha / (lambda * lambda * lambda * t * t),
                                 laplace::llc_suscept_leading(grad_ell, hess_ell, taylor, t)};
      for (int j = 0; j < 4; ++j)
        scaled[j][k] = std::abs(oracle[j] - formula[j]) * std::pow(t, orders[j]);
    }
    for (int j = 0; j < 4; ++j) {
      const double ratio = std::max(scaled[j][0], scaled[j][1]) /
                           std::min(scaled[j][0], scaled[j][1]);
      if (!(ratio <= worst)) {
        worst = std::isfinite(ratio) ? ratio : 1e300;
        worst_case = std::string(names[j]) + " instance " + std::to_string(inst);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 10.0 && elapsed < 60.0;
  o.detail = std::to_string(kInstances) + " instances, worst residual ratio " +
             fmt("%.2f", worst) + " (" + worst_case + ") " + fmt("%.2fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 6. Direct order t^-2 covariance against the pairing expansion.

Matrix random_symmetric(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng);
  return 0.5 * (a + a.transpose());
}

Outcome criterion_wick() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  const int d = 3;
  const double t = 37.0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
    const Matrix h = g * g.transpose() + 0.5 * Matrix::Identity(d, d);
    const laplace::TaylorData taylor(h, laplace::SymmetricTensor3::random(d, rng));
    laplace::ObservableJet phi = laplace::ObservableJet::zero(d);
    phi.hessian = random_symmetric(d, rng);
    phi.third = laplace::SymmetricTensor3::random(d, rng);
    laplace::ObservableJet psi = laplace::ObservableJet::zero(d);
    for (int i = 0; i < d; ++i) psi.gradient[i] = normal(rng);
    psi.hessian = random_symmetric(d, rng);
    psi.third = laplace::SymmetricTensor3::random(d, rng);
    const double direct = laplace::cov_nlo(phi, psi, taylor, t) * t * t;
    const double wick = laplace::gaussian_term_oracle(phi, psi, taylor).covariance_coefficient();
    worst = std::max(worst, std::abs(direct - wick) / std::max(1.0, std::abs(wick)));
  }
  const auto classes = laplace::degree6_pairing_classes();
  const std::size_t all6 = laplace::perfect_pairings(6).size();
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-12 && classes.a_with_a == 3 && classes.a_with_b == 6 &&
           classes.a_with_t == 6 && all6 == 15;
  o.detail = "100 d=3 instances, max deviation " + fmt("%.2e", worst) + "; classes " +
             std::to_string(classes.a_with_a) + "+" + std::to_string(classes.a_with_b) + "+" +
             std::to_string(classes.a_with_t) + "=" + std::to_string(all6) + " " +
             fmt("%.2fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 7. Regular-case learning coefficient from SGLD.

Outcome criterion_llc() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  for (int d : {1, 2}) {
    GibbsProblem problem;
    problem.loss = make_toy_loss({"gaussian_location", d, {}, {}, {}, 0.0});
    for (int i = 0; i < 10; ++i) {
      Vector z(d);
      for (int j = 0; j < d; ++j) z[j] = 0.3 * std::sin(1.7 * i + j);
      problem.data.push_back(z);
    }
    problem.beta = 100.0;  // n beta = 1000
    problem.gamma = 1.0;
    problem.w_star = Vector::Zero(d);
    problem.w_star = minimize_empirical_loss(problem);
    SGLDConfig config;
    config.step_size = 0.01 / (problem.n_beta() + problem.gamma);
    config.steps = 3000000;
    config.burn_in = 5000;
    config.thinning = 100;
    config.seed = 7;
    const ChainSamples samples = sgld_run(problem, config);
    const Estimate e = llc_estimate(samples, problem);
    const double target = 0.5 * d;
    const bool ok = std::abs(e.value - target) <= 0.1 * target &&
                    e.effective_sample_size >= 1e4;
    pass = pass && ok;
    detail << "d=" << d << ": " << fmt("%.4f", e.value) << " (ESS " << fmt("%.0f", e.effective_sample_size)
           << ") ";
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = pass && elapsed < 120.0;
  o.detail = detail.str() + fmt("%.1fs", elapsed);
  return o;
}

// --------------------------------------------------------------------------
// 8. Estimators against quadrature oracles over 40 seeded repetitions.

Outcome criterion_estimators() {
  const auto t0 = Clock::now();
  // 1-D Gaussian location, n beta = 1000.
  GibbsProblem p1;
  p1.loss = make_toy_loss({"gaussian_location", 1, {}, {}, {}, 0.0});
  p1.data = {vec({-1.0}), vec({0.2}), vec({0.5}), vec({1.6})};
  p1.beta = 250.0;
  p1.gamma = 1.0;
  p1.w_star = Vector::Zero(1);
  p1.w_star = minimize_empirical_loss(p1);
  const auto q1 = gibbs_quadrature(p1);
  auto losses_on = [](const QuadraturePosterior& q, const GibbsProblem& p, const Vector& z) {
    return q.evaluate([&](const Vector& w) { return p.loss->value(w, z); });
  };
  const auto cubic = [](const Vector& w) { return w[0] * w[0] * w[0]; };
  const Vector L1 = q1.evaluate([&](const Vector& w) { return empirical_loss(w, p1); });
  const Vector l0 = losses_on(q1, p1, p1.data[0]);
  const Vector l2 = losses_on(q1, p1, p1.data[2]);
  const Vector query = vec({0.9});
  const double oracle_chi = -q1.covariance(q1.evaluate(cubic), l2 - L1);
  const double oracle_inf = -q1.covariance(l0 - L1, l2 - L1);
  const double oracle_kernel = q1.covariance(losses_on(q1, p1, query), l2);

  // 2-D coupled anharmonic loss, component = coordinate 1.
  GibbsProblem p2;
  p2.loss = make_toy_loss({"polynomial", 2, {1.0, 2.0}, {0.5, -0.4}, {0.3, 0.3}, 0.4});
  p2.data = {vec({-0.5, 0.3}), vec({0.1, -0.2}), vec({0.6, 0.4}), vec({-0.2, -0.5})};
  p2.beta = 250.0;
  p2.gamma = 1.0;
  p2.w_star = Vector::Zero(2);
  p2.w_star = minimize_empirical_loss(p2);
  const ComponentSpec component{"c1", {1}};
  QuadratureOptions restricted_options;
  restricted_options.restriction = component;
  const auto qr = gibbs_quadrature(p2, restricted_options);
  const auto qf = gibbs_quadrature(p2);
  const int column = 1;
  const auto L2 = [&](const Vector& w) { return empirical_loss(w, p2); };
  const Vector K = qr.evaluate(L2).array() - empirical_loss(p2.w_star, p2);
  const Vector g_restricted = losses_on(qr, p2, p2.data[column]) - qr.evaluate(L2);
  const Vector g_full = losses_on(qf, p2, p2.data[column]) - qf.evaluate(L2);
  const double oracle_struct = -qr.expectation(K.cwiseProduct(g_restricted)) +
                               qr.expectation(K) * qf.expectation(g_full);

  constexpr int kReps = 40;
  std::vector<std::array<double, 4>> z(kReps);
  parallel_for(kReps, g_threads, [&](std::size_t rep) {
    SGLDConfig c1;
    c1.step_size = 0.01 / (p1.n_beta() + p1.gamma);
    c1.steps = 2000000;
    c1.burn_in = 5000;
    c1.thinning = 100;
    c1.seed = 1000 + rep;
    const ChainSamples s = sgld_run(p1, c1);
    std::vector<double> phi(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) phi[t] = cubic(s.draws.row(static_cast<Eigen::Index>(t)).transpose());
    const auto chi = per_sample_susceptibility(s, phi, 2);
    const auto inf = influence_matrix(s, p1, {p1.data[0]});
    const auto ker = loss_kernel(s, p1, query, p1.data[2]);

    SGLDConfig c2 = c1;
    const double lambda_max =
        Eigen::SelfAdjointEigenSolver<Matrix>(empirical_hessian(p2.w_star, p2)).eigenvalues().maxCoeff();
    c2.step_size = 0.01 / (p2.n_beta() * lambda_max + p2.gamma);
    const ChainSamples full = sgld_run(p2, c2);
    const ChainSamples restricted = sgld_run(p2, c2, component);
    const auto X = structural_susceptibility({restricted}, full, p2);

    z[rep] = {(chi.value - oracle_chi) / chi.standard_error,
              (inf.values(0, 2) - oracle_inf) / inf.standard_errors(0, 2),
              (ker.value - oracle_kernel) / ker.standard_error,
              (X.values(0, column) - oracle_struct) / X.standard_errors(0, column)};
  });
  const char* names[] = {"per-sample", "influence", "kernel", "structural"};
  bool pass = true;
  std::ostringstream detail;
  for (int k = 0; k < 4; ++k) {
    int within = 0;
    for (const auto& r : z) within += std::abs(r[static_cast<std::size_t>(k)]) <= 3.0;
    pass = pass && within >= 38;  // 95% of 40
    detail << names[k] << " " << within << "/" << kReps << " ";
  }
  Outcome o;
  o.pass = pass;
  o.detail = "within 3 SE: " + detail.str() + fmt("%.1fs", seconds_since(t0));
  return o;
}

// --------------------------------------------------------------------------
// 9. Pseudo-inverse, ridge and standardization algebra.

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

Outcome criterion_patterning() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  double mp = 0.0, ridge_excess = -1e300, minnorm_violation = 0.0, invariance = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index h = 2 + trial % 5, d = 6 + trial % 11;
    Matrix x = random_matrix(h, d, rng);
    if (trial % 3 == 0) x.row(h - 1) = 0.5 * x.row(0) - 2.0 * x.row(1 % h);  // rank deficient
    const Matrix p = patterning::pseudo_inverse(x);
    const double scale = std::max(1.0, x.norm() * p.norm());
    mp = std::max({mp, (x * p * x - x).norm() / std::max(1.0, x.norm()),
                   (p * x * p - p).norm() / std::max(1.0, p.norm()),
                   ((x * p) - (x * p).transpose()).norm() / scale,
                   ((p * x) - (p * x).transpose()).norm() / scale});

    for (double lambda : {1e-4, 1e-2, 1.0, 10.0}) {
      const Matrix r = patterning::ridge_inverse(x, lambda);
      const double op = Eigen::JacobiSVD<Matrix>(r).singularValues()(0);
      ridge_excess = std::max(ridge_excess, op - 1.0 / (2.0 * std::sqrt(lambda)));
    }

    // Minimum norm: adding any null-space direction keeps the residual and
    // cannot shorten the solution.
    const Vector target = random_matrix(h, 1, rng);
    const double nb = 3.0;
    const Vector dq = patterning::pseudo_inverse_solve(x, target, nb);
    const Vector residual = nb * x * dq - target;
    const Matrix null_proj = Matrix::Identity(d, d) - p * x;
    for (int k = 0; k < 20; ++k) {
      const Vector step = null_proj * random_matrix(d, 1, rng);
      const Vector other = dq + step;
      const Vector other_residual = nb * x * other - target;
      if ((other_residual - residual).norm() > 1e-9 * std::max(1.0, target.norm())) continue;
      minnorm_violation = std::max(minnorm_violation, dq.norm() - other.norm());
    }

    // Standardization invariance under positive per-component scaling and
    // per-component shifts.
    SusceptibilityMatrix raw;
    raw.values = random_matrix(h, d, rng);
    for (Eigen::Index i = 0; i < h; ++i) raw.row_labels.push_back("c" + std::to_string(i));
    for (Eigen::Index j = 0; j < d; ++j) raw.column_labels.push_back("z" + std::to_string(j));
    SusceptibilityMatrix scaled = raw;
    for (Eigen::Index i = 0; i < h; ++i)
      scaled.values.row(i) = std::exp(2.0 * normal(rng)) * raw.values.row(i).array() + 5.0 * normal(rng);
    invariance = std::max(invariance, (standardize(raw).values - standardize(scaled).values)
                                          .cwiseAbs()
                                          .maxCoeff());
  }
  Outcome o;
  o.pass = mp < 1e-9 && ridge_excess <= 0.0 && minnorm_violation <= 1e-12 && invariance < 1e-10;
  o.detail = "Moore-Penrose " + fmt("%.1e", mp) + ", ridge |R|-1/(2sqrt(lambda)) max " +
             fmt("%.2e", ridge_excess) + ", min-norm violation " + fmt("%.1e", minnorm_violation) +
             ", standardization drift " + fmt("%.1e", invariance) + " " +
             fmt("%.2fs", seconds_since(t0));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--only" && a + 1 < argc) {
      std::stringstream ss(argv[++a]);
      for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
    } else if (arg == "--threads" && a + 1 < argc) {
      g_threads = static_cast<std::size_t>(std::max(1, std::atoi(argv[++a])));
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,N...]] [--threads K]\n", argv[0]);
      return 2;
    }
  }
  if (g_threads == 1 && only.empty())
    g_threads = std::max(1u, std::thread::hardware_concurrency());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Ising ordering curve", criterion_phase},
      {"wall/probe susceptibility sweep", criterion_wall_sweep},
      {"three-region response matrix", criterion_response},
      {"fluctuation-dissipation exactness", criterion_fdt},
      {"Laplace expansion orders", criterion_laplace},
      {"pairing path equivalence", criterion_wick},
      {"regular-case learning coefficient", criterion_llc},
      {"estimator-oracle agreement", criterion_estimators},
      {"patterning algebra", criterion_patterning},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
