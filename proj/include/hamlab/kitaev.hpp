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

#ifndef HAMLAB_KITAEV_HPP_
#define HAMLAB_KITAEV_HPP_

#include <cmath>
#include <utility>
#include <vector>

#include "hamlab/circuit.hpp"
#include "hamlab/core.hpp"
#include "hamlab/qstate.hpp"

namespace hamlab {

// Binary clock register: T+1 time values stored in ceil(log2(T+1)) qubits.
// Clock values above T are invalid encodings and get penalized by the input
// term so that the low-energy sector lives entirely on valid times.
struct ClockEncoding {
  int steps = 0;         // T
  int clock_qubits = 0;  // ceil(log2(T+1)), and 1 when T == 0

  static ClockEncoding for_steps(int steps) {
    require(steps >= 1, "clock: need at least one circuit step");
    int bits = 1;
    while (dim_for(bits) < static_cast<index_t>(steps) + 1) ++bits;
    return ClockEncoding{steps, bits};
  }

  index_t dim() const { return dim_for(clock_qubits); }
  bool is_valid(index_t t) const { return t >= 0 && t <= steps; }
};

// Propagation penalty for step t (1-based):
//   (1/2)(|t-1><t-1| + |t><t|) (x) I - (1/2)|t><t-1| (x) U_t - h.c.
// Projects onto the complement of states that advance the clock in lockstep
// with applying U_t; it is itself a projector.
inline Mat propagation_term(int t, const Gate& u_t, const ClockEncoding& clock,
                            const QubitLayout& workspace) {
  require(t >= 1 && t <= clock.steps, "propagation_term: step out of range");
  const int w = workspace.total_qubits();
  for (int q : u_t.support()) {
    require(q < w, "propagation_term: gate acts outside the workspace");
  }
  check_qubit_budget(clock.clock_qubits + w, "propagation term");
  const index_t wd = dim_for(w);
  const index_t dim = clock.dim() * wd;
  Mat u = gate_matrix(u_t, w);
  Mat h = Mat::Zero(dim, dim);
  const index_t row = static_cast<index_t>(t) * wd;
  const index_t col = (static_cast<index_t>(t) - 1) * wd;
  h.block(row, row, wd, wd) = 0.5 * Mat::Identity(wd, wd);
  h.block(col, col, wd, wd) = 0.5 * Mat::Identity(wd, wd);
  h.block(row, col, wd, wd) = -0.5 * u;
  h.block(col, row, wd, wd) = -0.5 * u.adjoint();
  return h;
}

// Compiled Hamiltonian H = H_in + H_prop + H_out over (C, A, P1, P2).
// H_in pins the clock-0 ancillas to |0^m> and penalizes invalid clock values;
// H_out charges 1/(T+1)-scale energy to rejecting runs. All three pieces are
// PSD, and H_in + H_prop annihilates exactly the history states.
struct KitaevHamiltonian {
  ClockEncoding clock;
  QubitLayout layout;  // (C, A, P1, P2)
  VerificationCircuit circuit;
  Mat h_in;
  Mat h_prop;
  Mat h_out;
  std::vector<Mat> prop_terms;  // one per step, same dimension as h_prop

  index_t dim() const { return layout.dim(); }
  Mat total() const { return h_in + h_prop + h_out; }
};

inline KitaevHamiltonian compile(const VerificationCircuit& circuit) {
  require(circuit.step_count() >= 1, "compile: circuit has no gates");
  ClockEncoding clock = ClockEncoding::for_steps(circuit.step_count());
  const int w = circuit.workspace_qubits();
  const int n = clock.clock_qubits + w;
  check_qubit_budget(n, "compiled Hamiltonian");
  const index_t wd = dim_for(w);
  const index_t dim = clock.dim() * wd;

  KitaevHamiltonian out;
  out.clock = clock;
  out.circuit = circuit;
  std::vector<Subsystem> parts;
  parts.push_back({Label::C, clock.clock_qubits});
  for (const Subsystem& p : circuit.layout.parts()) parts.push_back(p);
  out.layout = QubitLayout(parts);

  out.h_prop = Mat::Zero(dim, dim);
  for (int t = 1; t <= clock.steps; ++t) {
    out.prop_terms.push_back(
        propagation_term(t, circuit.gates[t - 1], clock, circuit.layout));
    out.h_prop += out.prop_terms.back();
  }

  // Input penalty at clock 0: project onto "some ancilla differs from 0".
  const std::vector<int> ancillas = circuit.layout.qubits(Label::A);
  Mat anc_ok = Mat::Zero(dim_for(static_cast<int>(ancillas.size())),
                         dim_for(static_cast<int>(ancillas.size())));
  anc_ok(0, 0) = 1.0;
  Mat bad_anc = Mat::Identity(wd, wd) - expand_operator(ancillas, anc_ok, w);
  out.h_in = Mat::Zero(dim, dim);
  out.h_in.block(0, 0, wd, wd) = bad_anc;
  for (index_t t = clock.steps + 1; t < clock.dim(); ++t) {
    out.h_in.block(t * wd, t * wd, wd, wd) = Mat::Identity(wd, wd);
  }

  // Output penalty at clock T: accept wire reads |0>.
  const int accept = circuit.layout.offset(Label::A) + circuit.accept_qubit;
  Mat reject_local = Mat::Zero(2, 2);
  reject_local(0, 0) = 1.0;
  Mat reject = expand_operator({accept}, reject_local, w);
  out.h_out = Mat::Zero(dim, dim);
  out.h_out.block(static_cast<index_t>(clock.steps) * wd,
                  static_cast<index_t>(clock.steps) * wd, wd, wd) = reject;
  return out;
}

// Uniform superposition over the circuit's step-by-step evolution of
// |0^m> (x) |witness|, entangled with the clock.
struct HistoryState {
  PureState state;    // over (C, A, P1, P2)
  PureState witness;  // the proof it was built from
  int steps = 0;
};

inline HistoryState history_state(const VerificationCircuit& circuit,
                                  const PureState& witness) {
  require(circuit.step_count() >= 1, "history_state: circuit has no gates");
  ClockEncoding clock = ClockEncoding::for_steps(circuit.step_count());
  const int w = circuit.workspace_qubits();
  check_qubit_budget(clock.clock_qubits + w, "history state");
  const index_t wd = dim_for(w);
  Vec amp = Vec::Zero(clock.dim() * wd);
  const double scale = 1.0 / std::sqrt(static_cast<double>(clock.steps) + 1.0);
  PureState current = apply_prefix(circuit, 0, witness);
  for (int t = 0; t <= clock.steps; ++t) {
    if (t > 0) {
      Vec next = apply_gate(circuit.gates[t - 1], current.amplitudes(), w);
      current = PureState(std::move(next), circuit.layout);
    }
    amp.segment(static_cast<index_t>(t) * wd, wd) =
        scale * current.amplitudes();
  }
  std::vector<Subsystem> parts;
  parts.push_back({Label::C, clock.clock_qubits});
  for (const Subsystem& p : circuit.layout.parts()) parts.push_back(p);
  return HistoryState{PureState(std::move(amp), QubitLayout(parts)), witness,
                      clock.steps};
}

// Rayleigh quotient <psi|H|psi>; the imaginary residue must vanish.
inline double energy(const Mat& h, const PureState& psi) {
  require(h.rows() == psi.dim() && h.cols() == psi.dim(),
          "energy: dimension mismatch");
  const cplx v = (psi.amplitudes().adjoint() * h * psi.amplitudes())(0);
  require(std::abs(v.imag()) <= kEqTol, "energy: nonreal expectation");
  return v.real();
}

inline double energy(const Mat& h, const DensityMatrix& rho) {
  require(h.rows() == rho.dim() && h.cols() == rho.dim(),
          "energy: dimension mismatch");
  const cplx v = (h * rho.matrix()).trace();
  require(std::abs(v.imag()) <= kEqTol, "energy: nonreal expectation");
  return v.real();
}

}  // namespace hamlab

#endif  // HAMLAB_KITAEV_HPP_
