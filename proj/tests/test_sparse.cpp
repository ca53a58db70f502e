// Copyright 2026 The hamlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hamlab/kitaev.hpp"
#include "hamlab/sparse.hpp"

using namespace hamlab;

TEST_CASE("row oracle validation catches malformed rows") {
  // Declared sparsity 1 but two entries in a row.
  RowSparseOperator overfull(4, 1, [](index_t) {
    return std::vector<std::pair<index_t, cplx>>{{0, cplx{1.0, 0.0}},
                                                 {1, cplx{1.0, 0.0}}};
  });
  CHECK_THROWS_AS(overfull.row(0), InvariantError);

  RowSparseOperator unsorted(4, 2, [](index_t) {
    return std::vector<std::pair<index_t, cplx>>{{2, cplx{1.0, 0.0}},
                                                 {1, cplx{1.0, 0.0}}};
  });
  CHECK_THROWS_AS(unsorted.row(0), InvariantError);

  RowSparseOperator out_of_range(4, 1, [](index_t) {
    return std::vector<std::pair<index_t, cplx>>{{9, cplx{1.0, 0.0}}};
  });
  CHECK_THROWS_AS(out_of_range.row(0), InvariantError);
}

TEST_CASE("term oracles reproduce dense embeddings") {
  std::mt19937_64 rng = make_rng(3);
  const int n = 4;
  Mat local = random_hermitian(4, rng);
  const std::vector<int> support = {1, 3};
  RowSparseOperator oracle = row_oracle_for_term(support, local, n);
  Mat want = expand_operator(support, local, n);
  CHECK((oracle.dense() - want).norm() < 1e-14);
  CHECK(oracle.declared_sparsity() == 4);

  Vec psi = random_state_vector(dim_for(n), rng);
  CHECK((oracle.apply(psi) - want * psi).norm() < 1e-12);
}

TEST_CASE("gate oracles: permutations stay one-sparse") {
  std::mt19937_64 rng = make_rng(5);
  const int n = 5;
  Gate cswap = controlled_register_swap(2, {0, 1}, {3, 4});
  RowSparseOperator oracle = row_oracle_for_gate(cswap, n);
  CHECK(oracle.declared_sparsity() == 1);
  CHECK((oracle.dense() - gate_matrix(cswap, n)).norm() < 1e-14);

  // Generic unitaries are not Hermitian, so compare through apply().
  Gate dense_gate = make_unitary_gate({1, 3}, random_unitary(4, rng));
  RowSparseOperator g2 = row_oracle_for_gate(dense_gate, n);
  Vec psi = random_state_vector(dim_for(n), rng);
  CHECK((g2.apply(psi) - gate_matrix(dense_gate, n) * psi).norm() < 1e-12);
}

TEST_CASE("propagation oracles match the dense construction exactly") {
  std::mt19937_64 rng = make_rng(7);
  std::vector<Gate> gates = {
      make_unitary_gate({0, 1}, random_unitary(4, rng)),
      controlled_register_swap(0, {1}, {2}),
      make_unitary_gate({2}, random_unitary(2, rng)),
  };
  VerificationCircuit c = make_circuit(std::move(gates), 1, 1, 1, 0);
  ClockEncoding clock = ClockEncoding::for_steps(c.step_count());
  for (int t = 1; t <= c.step_count(); ++t) {
    RowSparseOperator oracle =
        row_oracle_for_term(t, c.gates[t - 1], clock, c.layout);
    Mat want = propagation_term(t, c.gates[t - 1], clock, c.layout);
    CHECK((oracle.dense() - want).norm() < 1e-12);
  }
  // The swap step keeps two-sparse rows even with the clock attached.
  RowSparseOperator swap_oracle =
      row_oracle_for_term(2, c.gates[1], clock, c.layout);
  CHECK(swap_oracle.declared_sparsity() == 2);
}

TEST_CASE("evolution is unitary on the span of the spectrum") {
  std::mt19937_64 rng = make_rng(11);
  Mat h = random_hermitian(8, rng);
  RowSparseOperator op = row_oracle_for_term({0, 1, 2}, h, 3);
  Mat u = evolve_operator(op, 0.7, 1e-8);
  CHECK(is_unitary(u, 1e-10));

  // Eigenvectors pick up exactly exp(-i lambda t).
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  for (int k = 0; k < 8; ++k) {
    const cplx want = std::exp(cplx{0.0, -0.7 * es.eigenvalues()(k)});
    CHECK((u * es.eigenvectors().col(k) -
           want * es.eigenvectors().col(k)).norm() < 1e-10);
  }

  // Composition in time.
  Mat u1 = evolve_operator(op, 0.3, 1e-8);
  Mat u2 = evolve_operator(op, 0.4, 1e-8);
  CHECK((u2 * u1 - u).norm() < 1e-10);
  CHECK_THROWS_AS(evolve_operator(op, 1.0, 0.0), InvariantError);

  PureState psi(random_state_vector(8, rng), 3);
  PureState evolved = evolve(op, 0.7, 1e-8, psi);
  CHECK(std::abs(evolved.amplitudes().norm() - 1.0) < 1e-12);
  CHECK((evolved.amplitudes() - u * psi.amplitudes()).norm() < 1e-10);
}

TEST_CASE("phase estimation register sizing follows the budget formula") {
  PhaseEstimateConfig cfg = PhaseEstimateConfig::make(0.1, 0.1);
  CHECK(cfg.t == 7);  // ceil(log2 10) + ceil(log2 7)
  CHECK(PhaseEstimateConfig::make(0.5, 0.5).t == 3);
  CHECK(PhaseEstimateConfig::make(0.25, 0.0625).t == 6);
  CHECK_THROWS_AS(PhaseEstimateConfig::make(0.0, 0.1), InvariantError);
  CHECK_THROWS_AS(PhaseEstimateConfig::make(0.1, 1.0), InvariantError);
}

TEST_CASE("readout distribution matches the direct Fourier sum") {
  // Reference: probability of outcome x for eigenphase phi is
  // |mean_j exp(ij(phi - 2 pi x / M))|^2 summed over components.
  std::mt19937_64 rng = make_rng(13);
  const int t_bits = 6;
  const index_t m = index_t{1} << t_bits;
  RVec phases(3), weights(3);
  phases << 0.3, 2.0, 5.9;
  weights << 0.5, 0.3, 0.2;
  PhaseEstimationSampler sampler(phases, weights, t_bits);
  double total = 0.0;
  for (index_t x = 0; x < m; ++x) {
    double want = 0.0;
    for (int k = 0; k < 3; ++k) {
      cplx acc{0.0, 0.0};
      const double step = phases(k) - 2.0 * std::numbers::pi *
                                          static_cast<double>(x) /
                                          static_cast<double>(m);
      for (index_t j = 0; j < m; ++j) {
        acc += std::exp(cplx{0.0, static_cast<double>(j) * step});
      }
      want += weights(k) * std::norm(acc / static_cast<double>(m));
    }
    CHECK(std::abs(sampler.outcome_probabilities()[x] - want) < 1e-10);
    total += sampler.outcome_probabilities()[x];
  }
  CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("grid-aligned eigenphases read out exactly") {
  const int t_bits = 5;
  const index_t m = index_t{1} << t_bits;
  const double phi = 2.0 * std::numbers::pi * 12.0 / static_cast<double>(m);
  RVec phases(1), weights(1);
  phases << phi;
  weights << 1.0;
  PhaseEstimationSampler sampler(phases, weights, t_bits);
  for (index_t x = 0; x < m; ++x) {
    const double want = x == 12 ? 1.0 : 0.0;
    CHECK(std::abs(sampler.outcome_probabilities()[x] - want) < 1e-12);
  }
  CHECK(std::abs(sampler.hit_probability(phi, 1.0 / m) - 1.0) < 1e-12);
}

TEST_CASE("sampled frequencies track the exact distribution") {
  std::mt19937_64 rng = make_rng(17);
  Mat u = random_unitary(4, rng);
  Vec psi = random_state_vector(4, rng);
  const int t_bits = 4;
  PhaseEstimationSampler sampler(u, psi, t_bits);
  const int shots = 20000;
  std::vector<int> counts(1 << t_bits, 0);
  for (int s = 0; s < shots; ++s) {
    const double phi = sampler.sample(rng);
    const auto x = static_cast<index_t>(std::llround(
        phi * (1 << t_bits) / (2.0 * std::numbers::pi)));
    ++counts[x % (1 << t_bits)];
  }
  for (index_t x = 0; x < (1 << t_bits); ++x) {
    const double p = sampler.outcome_probabilities()[x];
    const double freq = static_cast<double>(counts[x]) / shots;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / shots);
    CHECK(std::abs(freq - p) <= 5.0 * sigma + 1e-3);
  }
}

TEST_CASE("energy verifier meets the two-sided deviation bound") {
  std::mt19937_64 rng = make_rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    Mat g = random_hermitian(8, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(7);
    Mat h = (g - lo * Mat::Identity(8, 8)) / (hi - lo);
    PureState psi(random_state_vector(8, rng), 3);
    const double a = 0.1, b = 0.7;
    QjVerifier v(h, psi, a, b);
    CHECK(std::abs(v.reject_probability() - v.energy()) <= (b - a) / 3.0);
  }
}

TEST_CASE("energy verifier is exact on eigenstates up to readout width") {
  std::mt19937_64 rng = make_rng(23);
  Mat g = random_hermitian(4, rng);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(3);
  Mat h = (g - lo * Mat::Identity(4, 4)) / (hi - lo);
  Eigen::SelfAdjointEigenSolver<Mat> hes(h);
  for (int k = 0; k < 4; ++k) {
    PureState psi(hes.eigenvectors().col(k), 2);
    QjVerifier v(h, psi, 0.2, 0.8);
    CHECK(std::abs(v.energy() - hes.eigenvalues()(k)) < 1e-10);
    CHECK(std::abs(v.reject_probability() - v.energy()) <= 0.2);
  }
}

TEST_CASE("energy verifier rejects out-of-range spectra and clamps wraps") {
  std::mt19937_64 rng = make_rng(29);
  Mat too_big = 3.0 * Mat::Identity(4, 4);
  PureState psi(random_state_vector(4, rng), 2);
  CHECK_THROWS_AS(QjVerifier(too_big, psi, 0.1, 0.9), InvariantError);

  // Wrap-around readouts just above pi count as zero energy, not negative.
  CHECK(QjVerifier::rejection_weight(2.0 * std::numbers::pi - 0.01) == 0.0);
  CHECK(QjVerifier::rejection_weight(0.4) == 0.4);
  CHECK(QjVerifier::rejection_weight(2.5) == 1.0);  // clamp above one
}

TEST_CASE("single-shot verifier helpers are seed deterministic") {
  std::mt19937_64 rng = make_rng(31);
  Mat h = 0.5 * Mat::Identity(4, 4);
  RowSparseOperator op = row_oracle_for_term({0, 1}, h, 2);
  PureState psi(random_state_vector(4, rng), 2);
  CHECK(qj_verifier(op, psi, 0.1, 0.9, 77) == qj_verifier(op, psi, 0.1, 0.9, 77));
  std::vector<RowSparseOperator> terms = {op, op};
  CHECK(q_verifier(terms, psi, 0.1, 0.9, 78) ==
        q_verifier(terms, psi, 0.1, 0.9, 78));
}
