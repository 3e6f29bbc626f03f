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

#include <array>
#include <string>

#include "suscept/errors.hpp"
#include "suscept/laplace.hpp"

namespace suscept::laplace {
namespace {

constexpr int kMaxDegree = 8;

void extend(std::vector<int>& open, Pairing& current, std::vector<Pairing>& out) {
  if (open.empty()) {
    out.push_back(current);
    return;
  }
  const int first = open.front();
  for (std::size_t k = 1; k < open.size(); ++k) {
    const int partner = open[k];
    std::vector<int> rest;
    for (std::size_t j = 1; j < open.size(); ++j)
      if (j != k) rest.push_back(open[j]);
    current.emplace_back(first, partner);
    extend(rest, current, out);
    current.pop_back();
  }
}

const std::vector<Pairing>& cached_pairings(int count) {
  static const std::array<std::vector<Pairing>, kMaxDegree / 2 + 1> table = [] {
    std::array<std::vector<Pairing>, kMaxDegree / 2 + 1> t;
    for (int m = 0; m <= kMaxDegree / 2; ++m) {
      std::vector<int> open;
      for (int i = 0; i < 2 * m; ++i) open.push_back(i);
      Pairing current;
      extend(open, current, t[static_cast<std::size_t>(m)]);
    }
    return t;
  }();
  return table[static_cast<std::size_t>(count / 2)];
}

// Sums f(i_1..i_k) over all index tuples in [0, d)^k.
template <typename F>
double index_sum(int d, int k, F&& f) {
  std::array<int, kMaxDegree> idx{};
  double total = 0.0;
  while (true) {
    total += f(idx);
    int pos = k - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == d) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return total;
}

}  // namespace

std::vector<Pairing> perfect_pairings(int count) {
  if (count < 0 || count % 2 != 0 || count > kMaxDegree)
    throw InvalidArgument("pairings need an even count <= 8, got " + std::to_string(count));
  return cached_pairings(count);
}

double isserlis_moment(const Matrix& sigma, std::span<const int> indices) {
  if (indices.size() > kMaxDegree)
    throw InvalidArgument("moments are supported up to degree 8");
  if (sigma.rows() != sigma.cols()) throw InvalidArgument("Sigma must be square");
  for (int i : indices)
    if (i < 0 || i >= sigma.rows()) throw InvalidArgument("moment index out of range");
  if (indices.size() % 2 != 0) return 0.0;
  double total = 0.0;
  for (const auto& pairing : cached_pairings(static_cast<int>(indices.size()))) {
    double term = 1.0;
    for (const auto& [a, b] : pairing)
      term *= sigma(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    total += term;
  }
  return total;
}

PairingClassCounts degree6_pairing_classes() {
  // Legs 0, 1 belong to A, leg 2 to b, legs 3-5 to T.
  PairingClassCounts counts;
  for (const auto& pairing : cached_pairings(6)) {
    int to_b = 0, to_t = 0;
    bool a_pair = false;
    for (const auto& [x, y] : pairing) {
      const bool xa = x <= 1, ya = y <= 1;
      if (xa && ya) a_pair = true;
      if (xa != ya) {
        const int other = xa ? y : x;
        if (other == 2) ++to_b; else ++to_t;
      }
    }
    if (a_pair) ++counts.a_with_a;
    else if (to_b == 1) ++counts.a_with_b;
    else if (to_t == 2) ++counts.a_with_t;
  }
  return counts;
}

GaussianTerms gaussian_term_oracle(const ObservableJet& phi, const ObservableJet& psi,
                                   const TaylorData& taylor) {
  const int d = taylor.dimension();
  phi.validate(d);
  psi.validate(d);
  const Matrix& s = taylor.sigma();
  const SymmetricTensor3& T = taylor.cubic();
  const Matrix& A = phi.hessian;
  const Matrix& B = psi.hessian;
  const Vector& a = phi.gradient;
  const Vector& b = psi.gradient;
  auto moment = [&](const std::array<int, kMaxDegree>& idx, int k) {
    return isserlis_moment(s, std::span<const int>(idx.data(), static_cast<std::size_t>(k)));
  };

  GaussianTerms g;
  // phi2 = 1/2 A_ij x_i x_j, phi3 = 1/6 Phi_ijk x_i x_j x_k, psi1 = b_l x_l,
  // V3 = 1/6 T_lmn x_l x_m x_n.
  g.phi2_psi2 = 0.25 * index_sum(d, 4, [&](const auto& i) {
    return A(i[0], i[1]) * B(i[2], i[3]) * moment(i, 4);
  });
  g.phi3_psi1 = index_sum(d, 4, [&](const auto& i) {
    return phi.third(i[0], i[1], i[2]) * b[i[3]] * moment(i, 4);
  }) / 6.0;
  g.phi2_psi1_v3 = index_sum(d, 6, [&](const auto& i) {
    return A(i[0], i[1]) * b[i[2]] * T(i[3], i[4], i[5]) * moment(i, 6);
  }) / 12.0;
  const double phi2 = 0.5 * index_sum(d, 2, [&](const auto& i) { return A(i[0], i[1]) * moment(i, 2); });
  const double psi2 = 0.5 * index_sum(d, 2, [&](const auto& i) { return B(i[0], i[1]) * moment(i, 2); });
  const double phi1_v3 = index_sum(d, 4, [&](const auto& i) {
    return a[i[0]] * T(i[1], i[2], i[3]) * moment(i, 4);
  }) / 6.0;
  const double psi1_v3 = index_sum(d, 4, [&](const auto& i) {
    return b[i[0]] * T(i[1], i[2], i[3]) * moment(i, 4);
  }) / 6.0;
  g.mean_phi = phi2 - phi1_v3;
  g.mean_psi = psi2 - psi1_v3;
  return g;
}

}  // namespace suscept::laplace
