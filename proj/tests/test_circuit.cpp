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
#include <random>
#include <vector>

#include "hamlab/circuit.hpp"
#include "hamlab/qstate.hpp"

using namespace hamlab;

namespace {

Vec basis_vec(index_t dim, index_t i) {
  Vec v = Vec::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("gate constructors validate their inputs") {
  CHECK_THROWS_AS(make_unitary_gate({0, 0}, Mat::Identity(4, 4)),
                  InvariantError);
  Mat shrink = 0.5 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(make_unitary_gate({0}, shrink), InvariantError);
  CHECK_THROWS_AS(make_unitary_gate({0}, Mat::Identity(4, 4)), InvariantError);
  CHECK_NOTHROW(make_unitary_gate({1, 0}, Mat::Identity(4, 4)));

  CHECK_THROWS_AS(controlled_register_swap(0, {1, 2}, {3}), InvariantError);
  CHECK_THROWS_AS(controlled_register_swap(0, {1}, {1}), InvariantError);
  CHECK_THROWS_AS(controlled_register_swap(0, {0}, {1}), InvariantError);
  CHECK_NOTHROW(controlled_register_swap(2, {0}, {1}));
}

TEST_CASE("controlled register swap is a controlled involution") {
  Gate g = controlled_register_swap(0, {1, 2}, {3, 4});
  const int n = 5;
  std::mt19937_64 rng = make_rng(5);
  std::uniform_int_distribution<index_t> idx(0, dim_for(n) - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const index_t i = idx(rng);
    const index_t j = cswap_image(g, i, n);
    CHECK(cswap_image(g, j, n) == i);
    if (bit_at(i, 0, n) == 0) {
      CHECK(j == i);
    } else {
      CHECK(bit_at(j, 1, n) == bit_at(i, 3, n));
      CHECK(bit_at(j, 2, n) == bit_at(i, 4, n));
      CHECK(bit_at(j, 3, n) == bit_at(i, 1, n));
      CHECK(bit_at(j, 4, n) == bit_at(i, 2, n));
    }
  }
}

TEST_CASE("apply_gate agrees with the dense gate matrix") {
  std::mt19937_64 rng = make_rng(7);
  const int n = 5;
  std::vector<Gate> gates = {
      make_unitary_gate({2}, random_unitary(2, rng)),
      make_unitary_gate({4, 1}, random_unitary(4, rng)),
      make_unitary_gate({0, 3, 2}, random_unitary(8, rng)),
      controlled_register_swap(1, {0, 4}, {2, 3}),
  };
  for (const Gate& g : gates) {
    Mat dense = gate_matrix(g, n);
    CHECK(is_unitary(dense, 1e-10));
    for (int trial = 0; trial < 5; ++trial) {
      Vec psi = random_state_vector(dim_for(n), rng);
      CHECK((apply_gate(g, psi, n) - dense * psi).norm() < 1e-12);
    }
  }
}

TEST_CASE("gate_local_matrix for swaps permutes [control, reg1, reg2]") {
  Gate g = controlled_register_swap(3, {0}, {2});
  Mat local = gate_local_matrix(g);
  REQUIRE(local.rows() == 8);
  // control = bit 2 of the local index, reg1 = bit 1, reg2 = bit 0.
  // |1 a b> -> |1 b a>, |0 a b> untouched.
  CHECK((local * basis_vec(8, 0b110) - basis_vec(8, 0b101)).norm() < 1e-15);
  CHECK((local * basis_vec(8, 0b101) - basis_vec(8, 0b110)).norm() < 1e-15);
  CHECK((local * basis_vec(8, 0b100) - basis_vec(8, 0b100)).norm() < 1e-15);
  CHECK((local * basis_vec(8, 0b010) - basis_vec(8, 0b010)).norm() < 1e-15);
}

TEST_CASE("circuit constructor checks shape invariants") {
  Mat id = Mat::Identity(2, 2);
  std::vector<Gate> gates = {make_unitary_gate({0}, id)};
  CHECK_THROWS_AS(make_circuit(gates, 0, 1, 0, 0), InvariantError);
  CHECK_THROWS_AS(make_circuit(gates, 1, 1, 0, 1), InvariantError);
  CHECK_THROWS_AS(make_circuit({make_unitary_gate({5}, id)}, 1, 1, 0, 0),
                  InvariantError);
  CHECK_THROWS_AS(make_circuit(gates, 1, 3, 0, 0, {1, 1}), InvariantError);
  VerificationCircuit c = make_circuit(gates, 2, 3, 1, 1, {2, 1});
  CHECK(c.workspace_qubits() == 6);
  CHECK(c.ancilla_qubits() == 2);
  CHECK(c.proof1_qubits() == 3);
  CHECK(c.proof2_qubits() == 1);
  CHECK(c.layout.offset(Label::P1) == 2);
}

TEST_CASE("apply_prefix starts from |0...0> x witness") {
  std::mt19937_64 rng = make_rng(11);
  Mat u1 = random_unitary(4, rng);
  Mat u2 = random_unitary(4, rng);
  VerificationCircuit c = make_circuit(
      {make_unitary_gate({0, 1}, u1), make_unitary_gate({1, 2}, u2)}, 1, 1, 1,
      0);
  PureState witness(random_state_vector(4, rng),
                    QubitLayout({{Label::P1, 1}, {Label::P2, 1}}));
  PureState start = apply_prefix(c, 0, witness);
  // Ancilla is the most significant workspace qubit: witness sits in the low
  // amplitudes.
  CHECK((start.amplitudes().head(4) - witness.amplitudes()).norm() < 1e-15);
  CHECK(start.amplitudes().tail(4).norm() < 1e-15);

  Vec expect = gate_matrix(c.gates[1], 3) * (gate_matrix(c.gates[0], 3) *
                                             start.amplitudes());
  CHECK((apply_prefix(c, 2, witness).amplitudes() - expect).norm() < 1e-12);
}

TEST_CASE("acceptance probability reads the accept wire") {
  Mat flip = Mat::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  VerificationCircuit accepts =
      make_circuit({make_unitary_gate({0}, flip)}, 1, 1, 0, 0);
  VerificationCircuit rejects =
      make_circuit({make_unitary_gate({1}, flip)}, 1, 1, 0, 0);
  PureState witness = PureState::basis(QubitLayout({{Label::P1, 1}}), 0);
  CHECK(std::abs(acceptance_probability(accepts, witness) - 1.0) < 1e-12);
  CHECK(std::abs(acceptance_probability(rejects, witness)) < 1e-12);

  // Hadamard on the accept wire: exactly 1/2.
  VerificationCircuit half =
      make_circuit({make_unitary_gate({0}, hadamard())}, 1, 1, 0, 0);
  CHECK(std::abs(acceptance_probability(half, witness) - 0.5) < 1e-12);
}

TEST_CASE("and gate implements its truth table") {
  // zero_controls = {q0}, one_controls = {q1}, target = q2.
  Gate g = and_into_gate({0}, {1}, 2);
  Mat m = gate_local_matrix(g);
  for (index_t i = 0; i < 8; ++i) {
    const bool fire = ((i >> 2) & 1) == 0 && ((i >> 1) & 1) == 1;
    const index_t want = fire ? (i ^ 1) : i;
    CHECK(std::abs(m(want, i) - cplx{1.0, 0.0}) < 1e-15);
  }
}

TEST_CASE("swap test accepts identical states and coin-flips orthogonal ones") {
  // Workspace: control 0, register A = {1}, register B = {2}.
  Gate block = swap_test_block(0, {1}, {2});
  const int n = 3;
  std::mt19937_64 rng = make_rng(13);

  auto accept_prob = [&](const Vec& a, const Vec& b) {
    Vec in = kron(basis_vec(2, 0), kron(a, b));
    Vec out = apply_gate(block, in, n);
    double p = 0.0;
    for (index_t i = 0; i < 4; ++i) p += std::norm(out(i));  // control = 0
    return p;
  };

  Vec chi = random_state_vector(2, rng);
  CHECK(std::abs(accept_prob(chi, chi) - 1.0) < 1e-12);
  CHECK(std::abs(accept_prob(basis_vec(2, 0), basis_vec(2, 1)) - 0.5) < 1e-12);
  // Generic pair: (1 + |<a|b>|^2) / 2.
  Vec a = random_state_vector(2, rng);
  Vec b = random_state_vector(2, rng);
  const double want = 0.5 * (1.0 + std::norm(a.dot(b)));
  CHECK(std::abs(accept_prob(a, b) - want) < 1e-12);
}

TEST_CASE("product test acceptance factors over registers") {
  std::mt19937_64 rng = make_rng(17);
  for (const std::vector<int>& registers :
       {std::vector<int>{1}, std::vector<int>{1, 1}}) {
    VerificationCircuit c = product_test_circuit(registers);
    const int r = static_cast<int>(registers.size());
    CHECK(c.ancilla_qubits() == r + 1);
    CHECK(c.accept_qubit == r);
    CHECK(c.step_count() == r + 1);

    int total = 0;
    for (int s : registers) total += s;
    Vec psi1 = Vec::Ones(1), psi2 = Vec::Ones(1);
    double want = 1.0;
    std::vector<Vec> parts1, parts2;
    for (int s : registers) {
      Vec x = random_state_vector(dim_for(s), rng);
      Vec y = random_state_vector(dim_for(s), rng);
      want *= 0.5 * (1.0 + std::norm(x.dot(y)));
      psi1 = kron(psi1, x);
      psi2 = kron(psi2, y);
    }
    PureState witness(kron(psi1, psi2),
                      QubitLayout({{Label::P1, total}, {Label::P2, total}}));
    CHECK(std::abs(acceptance_probability(c, witness) - want) < 1e-12);

    // Identical product pairs pass with certainty.
    PureState same(kron(psi1, psi1),
                   QubitLayout({{Label::P1, total}, {Label::P2, total}}));
    CHECK(std::abs(acceptance_probability(c, same) - 1.0) < 1e-12);
  }
}

TEST_CASE("wrapping preserves inner acceptance on mirrored product proofs") {
  std::mt19937_64 rng = make_rng(19);
  for (const std::vector<int>& registers :
       {std::vector<int>{2}, std::vector<int>{1, 1}}) {
    std::vector<Gate> inner_gates = {
        make_unitary_gate({0, 1, 2}, random_unitary(8, rng)),
        make_unitary_gate({0, 2}, random_unitary(4, rng))};
    VerificationCircuit inner = make_circuit(inner_gates, 1, 2, 0, 0);
    VerificationCircuit wrapped = hm_wrap(inner, registers);
    const int r = static_cast<int>(registers.size());
    CHECK(wrapped.ancilla_qubits() == r + inner.ancilla_qubits() + 1);
    CHECK(wrapped.accept_qubit == wrapped.ancilla_qubits() - 1);
    CHECK(wrapped.proof2_qubits() == 2);
    CHECK(wrapped.step_count() == r + inner.step_count() + 1);

    Vec psi1 = Vec::Ones(1);
    for (int s : registers) psi1 = kron(psi1, random_state_vector(dim_for(s), rng));
    PureState inner_witness(psi1, QubitLayout({{Label::P1, 2}}));
    PureState mirrored(kron(psi1, psi1),
                       QubitLayout({{Label::P1, 2}, {Label::P2, 2}}));
    const double p_inner = acceptance_probability(inner, inner_witness);
    const double p_wrapped = acceptance_probability(wrapped, mirrored);
    CHECK(std::abs(p_wrapped - p_inner) < 1e-10);
  }
}

TEST_CASE("wrapping rejects inner circuits that already use both proofs") {
  std::mt19937_64 rng = make_rng(23);
  VerificationCircuit two_proof = make_circuit(
      {make_unitary_gate({0, 1}, random_unitary(4, rng))}, 1, 1, 1, 0);
  CHECK_THROWS_AS(hm_wrap(two_proof, {1}), InvariantError);
  VerificationCircuit inner = make_circuit(
      {make_unitary_gate({0, 1}, random_unitary(4, rng))}, 1, 1, 0, 0);
  CHECK_THROWS_AS(hm_wrap(inner, {2}), InvariantError);  // width mismatch
}
