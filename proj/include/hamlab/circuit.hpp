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

#ifndef HAMLAB_CIRCUIT_HPP_
#define HAMLAB_CIRCUIT_HPP_

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hamlab/core.hpp"
#include "hamlab/qstate.hpp"

namespace hamlab {

// One circuit step. Either a dense unitary on an explicit target list, or a
// register-controlled swap kept in structured form so sparse oracles can
// exploit it (its dense matrix on k registers of size s is 2^(2s+1) wide, but
// every row has a single nonzero).
struct Gate {
  enum class Kind { Unitary, ControlledRegisterSwap };

  Kind kind = Kind::Unitary;
  // Unitary: target qubits; the first listed target is the most significant
  // bit of the local matrix index.
  std::vector<int> targets;
  Mat matrix;
  // ControlledRegisterSwap: swaps reg1[i] <-> reg2[i] when `control` is set.
  int control = -1;
  std::vector<int> reg1;
  std::vector<int> reg2;

  std::vector<int> support() const {
    if (kind == Kind::Unitary) return targets;
    std::vector<int> s;
    s.push_back(control);
    s.insert(s.end(), reg1.begin(), reg1.end());
    s.insert(s.end(), reg2.begin(), reg2.end());
    return s;
  }

  int support_size() const { return static_cast<int>(support().size()); }
};

inline Gate make_unitary_gate(std::vector<int> targets, Mat matrix,
                              double tol = kGateUnitaryTol) {
  require(!targets.empty(), "gate: empty target list");
  std::set<int> uniq(targets.begin(), targets.end());
  require(uniq.size() == targets.size(), "gate: repeated target qubit");
  for (int q : targets) require(q >= 0, "gate: negative qubit index");
  require(matrix.rows() == dim_for(static_cast<int>(targets.size())) &&
              matrix.cols() == matrix.rows(),
          "gate: matrix shape does not match target count");
  require(is_unitary(matrix, tol), "gate: matrix is not unitary");
  Gate g;
  g.kind = Gate::Kind::Unitary;
  g.targets = std::move(targets);
  g.matrix = std::move(matrix);
  return g;
}

inline Gate controlled_register_swap(int control, std::vector<int> reg1,
                                     std::vector<int> reg2) {
  require(control >= 0, "cswap: negative control index");
  require(!reg1.empty() && reg1.size() == reg2.size(),
          "cswap: registers must be nonempty and the same size");
  std::set<int> uniq;
  uniq.insert(control);
  for (int q : reg1) uniq.insert(q);
  for (int q : reg2) uniq.insert(q);
  require(uniq.size() == 1 + reg1.size() + reg2.size(),
          "cswap: control and register qubits must be distinct");
  for (int q : uniq) require(q >= 0, "cswap: negative qubit index");
  Gate g;
  g.kind = Gate::Kind::ControlledRegisterSwap;
  g.control = control;
  g.reg1 = std::move(reg1);
  g.reg2 = std::move(reg2);
  return g;
}

// Image of basis state `i` under a controlled register swap (a permutation).
inline index_t cswap_image(const Gate& g, index_t i, int n) {
  if (bit_at(i, g.control, n) == 0) return i;
  index_t j = i;
  for (std::size_t k = 0; k < g.reg1.size(); ++k) {
    const int b1 = bit_at(i, g.reg1[k], n);
    const int b2 = bit_at(i, g.reg2[k], n);
    j = with_bit(j, g.reg1[k], n, b2);
    j = with_bit(j, g.reg2[k], n, b1);
  }
  return j;
}

inline Vec apply_gate(const Gate& g, const Vec& state, int n) {
  const index_t dim = dim_for(n);
  require(state.size() == dim, "apply_gate: state dimension mismatch");
  for (int q : g.support()) {
    require(q < n, "apply_gate: gate acts outside the state");
  }
  if (g.kind == Gate::Kind::ControlledRegisterSwap) {
    Vec out(dim);
    // The permutation is an involution, so image == preimage.
    for (index_t i = 0; i < dim; ++i) out(i) = state(cswap_image(g, i, n));
    return out;
  }
  const int k = static_cast<int>(g.targets.size());
  const index_t local_dim = dim_for(k);
  Vec out = Vec::Zero(dim);
  for (index_t i = 0; i < dim; ++i) {
    const cplx amp = state(i);
    if (amp == cplx{0.0, 0.0}) continue;
    const index_t col = gather_bits(i, g.targets, n);
    for (index_t row = 0; row < local_dim; ++row) {
      const cplx m = g.matrix(row, col);
      if (m == cplx{0.0, 0.0}) continue;
      out(scatter_bits(i, g.targets, n, row)) += m * amp;
    }
  }
  return out;
}

// Dense matrix of the gate on its own support, ordered [control, reg1, reg2]
// for swaps and by target list for unitaries.
inline Mat gate_local_matrix(const Gate& g) {
  if (g.kind == Gate::Kind::Unitary) return g.matrix;
  const int k = g.support_size();
  const index_t dim = dim_for(k);
  Mat m = Mat::Zero(dim, dim);
  // Local index layout: control bit, then reg1 bits, then reg2 bits.
  Gate local = g;
  local.control = 0;
  const int s = static_cast<int>(g.reg1.size());
  local.reg1.clear();
  local.reg2.clear();
  for (int i = 0; i < s; ++i) local.reg1.push_back(1 + i);
  for (int i = 0; i < s; ++i) local.reg2.push_back(1 + s + i);
  for (index_t i = 0; i < dim; ++i) m(cswap_image(local, i, k), i) = 1.0;
  return m;
}

inline Mat gate_matrix(const Gate& g, int n) {
  return expand_operator(g.support(), gate_local_matrix(g), n);
}

// Verifier circuit over workspace (A, P1, P2): ancillas start at |0...0>, the
// proof registers carry the witness, and acceptance is measuring |1> on one
// designated ancilla after the last gate.
struct VerificationCircuit {
  std::vector<Gate> gates;
  QubitLayout layout;          // (A, P1, P2)
  int accept_qubit = 0;        // index within A
  std::vector<int> registers;  // proof register sizes, if P1 is sectioned

  int workspace_qubits() const { return layout.total_qubits(); }
  int ancilla_qubits() const { return layout.size(Label::A); }
  int proof1_qubits() const { return layout.size(Label::P1); }
  int proof2_qubits() const { return layout.size(Label::P2); }
  int step_count() const { return static_cast<int>(gates.size()); }
};

inline VerificationCircuit make_circuit(std::vector<Gate> gates, int ancillas,
                                        int proof1, int proof2,
                                        int accept_qubit,
                                        std::vector<int> registers = {}) {
  require(ancillas >= 1, "circuit: need at least one ancilla (accept wire)");
  require(proof1 >= 0 && proof2 >= 0, "circuit: negative register size");
  require(accept_qubit >= 0 && accept_qubit < ancillas,
          "circuit: accept qubit must be an ancilla");
  const int n = ancillas + proof1 + proof2;
  check_qubit_budget(n, "circuit workspace");
  for (const Gate& g : gates) {
    for (int q : g.support()) {
      require(q >= 0 && q < n, "circuit: gate acts outside the workspace");
    }
  }
  if (!registers.empty()) {
    int total = 0;
    for (int r : registers) {
      require(r >= 1, "circuit: register sizes must be positive");
      total += r;
    }
    require(total == proof1,
            "circuit: register sizes must sum to the P1 width");
  }
  VerificationCircuit c;
  c.gates = std::move(gates);
  c.layout = QubitLayout({{Label::A, ancillas},
                          {Label::P1, proof1},
                          {Label::P2, proof2}});
  c.accept_qubit = accept_qubit;
  c.registers = std::move(registers);
  return c;
}

// State after the first t gates on input |0^m> x |witness>.
inline PureState apply_prefix(const VerificationCircuit& c, int t,
                              const PureState& witness) {
  require(t >= 0 && t <= c.step_count(),
          "apply_prefix: step index out of range");
  require(witness.dim() ==
              dim_for(c.proof1_qubits() + c.proof2_qubits()),
          "apply_prefix: witness dimension mismatch");
  const int n = c.workspace_qubits();
  Vec state = Vec::Zero(dim_for(n));
  // |0^m> on A occupies the high bits; the witness fills the P1,P2 block.
  state.head(witness.dim()) = witness.amplitudes();
  for (int step = 0; step < t; ++step) {
    state = apply_gate(c.gates[step], state, n);
  }
  return PureState(std::move(state), c.layout);
}

// Probability that the accept ancilla reads 1 after the full circuit.
inline double acceptance_probability(const VerificationCircuit& c,
                                     const PureState& witness) {
  PureState final_state = apply_prefix(c, c.step_count(), witness);
  const int n = c.workspace_qubits();
  const int accept = c.layout.offset(Label::A) + c.accept_qubit;
  double p = 0.0;
  for (index_t i = 0; i < final_state.dim(); ++i) {
    if (bit_at(i, accept, n) == 1) p += std::norm(final_state.amplitudes()(i));
  }
  return p;
}

// Hadamard on one qubit.
inline Mat hadamard() {
  Mat h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

// Reversible AND: flips `target` when every listed control matches its
// polarity (zero_controls read 0, one_controls read 1). A permutation, given
// as a dense unitary on [zero_controls, one_controls, target].
inline Gate and_into_gate(const std::vector<int>& zero_controls,
                          const std::vector<int>& one_controls, int target) {
  std::vector<int> targets = zero_controls;
  targets.insert(targets.end(), one_controls.begin(), one_controls.end());
  targets.push_back(target);
  const int k = static_cast<int>(targets.size());
  const index_t dim = dim_for(k);
  const int nz = static_cast<int>(zero_controls.size());
  const int no = static_cast<int>(one_controls.size());
  Mat m = Mat::Zero(dim, dim);
  for (index_t i = 0; i < dim; ++i) {
    bool fire = true;
    for (int q = 0; q < nz; ++q) fire = fire && bit_at(i, q, k) == 0;
    for (int q = 0; q < no; ++q) fire = fire && bit_at(i, nz + q, k) == 1;
    m(fire ? (i ^ 1) : i, i) = 1.0;
  }
  return make_unitary_gate(targets, std::move(m));
}

// One swap test as a single circuit step: Hadamard on the control, a
// controlled register swap, Hadamard again. Composed into one unitary so that
// history-state prefixes stay product states until the control collapses.
inline Gate swap_test_block(int control, std::vector<int> reg1,
                            std::vector<int> reg2) {
  Gate cswap = controlled_register_swap(control, std::move(reg1),
                                        std::move(reg2));
  const int k = cswap.support_size();
  Mat h_edge = expand_operator({0}, hadamard(), k);
  Mat block = h_edge * gate_local_matrix(cswap) * h_edge;
  std::vector<int> targets = cswap.support();
  Gate g;
  g.kind = Gate::Kind::Unitary;
  g.targets = std::move(targets);
  g.matrix = std::move(block);
  return g;
}

// Swap-test steps for a register-structured product test: block i compares
// register i of P1 against register i of P2, controlled by ancilla i. The
// layout must provide at least r ancillas and matching P1/P2 widths.
inline std::vector<Gate> build_product_test(const std::vector<int>& registers,
                                            const QubitLayout& layout) {
  require(!registers.empty(), "product test: empty register list");
  int total = 0;
  for (int r : registers) {
    require(r >= 1, "product test: register sizes must be positive");
    total += r;
  }
  const int r_count = static_cast<int>(registers.size());
  require(layout.size(Label::A) >= r_count,
          "product test: need one ancilla per register");
  require(layout.size(Label::P1) == total && layout.size(Label::P2) == total,
          "product test: register sizes must sum to the proof width");
  const int a0 = layout.offset(Label::A);
  const int p1 = layout.offset(Label::P1);
  const int p2 = layout.offset(Label::P2);
  std::vector<Gate> gates;
  int at = 0;
  for (int i = 0; i < r_count; ++i) {
    std::vector<int> r1, r2;
    for (int q = 0; q < registers[i]; ++q) {
      r1.push_back(p1 + at + q);
      r2.push_back(p2 + at + q);
    }
    gates.push_back(swap_test_block(a0 + i, std::move(r1), std::move(r2)));
    at += registers[i];
  }
  return gates;
}

// Standalone product test: r swap-test blocks, then accept if every control
// came out |0>. Ancilla r is the accept wire.
inline VerificationCircuit product_test_circuit(
    const std::vector<int>& registers) {
  int total = 0;
  for (int r : registers) {
    require(r >= 1, "product test: register sizes must be positive");
    total += r;
  }
  const int r_count = static_cast<int>(registers.size());
  QubitLayout layout({{Label::A, r_count + 1},
                      {Label::P1, total},
                      {Label::P2, total}});
  std::vector<Gate> gates = build_product_test(registers, layout);
  std::vector<int> controls;
  for (int i = 0; i < r_count; ++i) controls.push_back(i);
  gates.push_back(and_into_gate(controls, {}, r_count));
  return make_circuit(std::move(gates), r_count + 1, total, total, r_count,
                      registers);
}

// Wraps a one-proof verifier with the product test: the second proof must
// mirror the first, register by register. Step order is r swap tests, the
// inner circuit, then one step collecting "all swap tests passed AND inner
// accepted" into a fresh ancilla. Returns a circuit with m_inner + r + 1
// ancillas; the wrapped accept wire is the last ancilla.
inline VerificationCircuit hm_wrap(const VerificationCircuit& inner,
                                   const std::vector<int>& registers) {
  int total = 0;
  for (int r : registers) {
    require(r >= 1, "hm_wrap: register sizes must be positive");
    total += r;
  }
  require(inner.proof1_qubits() == total,
          "hm_wrap: register sizes must sum to the inner proof width");
  require(inner.proof2_qubits() == 0,
          "hm_wrap: inner circuit must not use a second proof register");
  const int r_count = static_cast<int>(registers.size());
  const int m_inner = inner.ancilla_qubits();
  const int m = r_count + m_inner + 1;
  const int n = m + 2 * total;
  check_qubit_budget(n, "wrapped circuit workspace");

  // Wrapped qubit order: [swap controls | inner ancillas | final accept |
  // P1 | P2]. Inner workspace qubit q lands at:
  auto map_inner = [&](int q) {
    const int inner_p1 = inner.layout.offset(Label::P1);
    if (q < inner_p1) return r_count + q;       // ancilla block
    return m + (q - inner_p1);                  // P1 block
  };

  QubitLayout layout({{Label::A, m}, {Label::P1, total}, {Label::P2, total}});
  std::vector<Gate> gates = build_product_test(registers, layout);
  for (const Gate& g : inner.gates) {
    Gate mapped = g;
    if (g.kind == Gate::Kind::Unitary) {
      for (int& q : mapped.targets) q = map_inner(q);
    } else {
      mapped.control = map_inner(g.control);
      for (int& q : mapped.reg1) q = map_inner(q);
      for (int& q : mapped.reg2) q = map_inner(q);
    }
    gates.push_back(mapped);
  }
  std::vector<int> zero_controls;
  for (int i = 0; i < r_count; ++i) zero_controls.push_back(i);
  const int inner_accept = r_count + inner.accept_qubit;
  gates.push_back(and_into_gate(zero_controls, {inner_accept}, m - 1));
  return make_circuit(std::move(gates), m, total, total, m - 1, registers);
}

}  // namespace hamlab

#endif  // HAMLAB_CIRCUIT_HPP_
