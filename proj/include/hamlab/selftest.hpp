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

// End-to-end verification suite. Each criterion exercises a documented
// contract at fixed tolerances with seeded randomness; the CLI selftest
// command and the acceptance test binary both run this list.

#ifndef HAMLAB_SELFTEST_HPP_
#define HAMLAB_SELFTEST_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hamlab/circuit.hpp"
#include "hamlab/cldm.hpp"
#include "hamlab/core.hpp"
#include "hamlab/kitaev.hpp"
#include "hamlab/optimize.hpp"
#include "hamlab/qstate.hpp"
#include "hamlab/sparse.hpp"
#include "hamlab/spectral.hpp"

namespace hamlab::selftest {

inline constexpr std::uint64_t kDefaultSeed = 20260823ULL;

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Random verifier circuit: workspace sizes within [3, 6] qubits, unitary
// steps of width 1-2 plus occasional controlled register swaps.
inline VerificationCircuit random_circuit(std::mt19937_64& rng,
                                          int max_steps) {
  std::uniform_int_distribution<int> size(1, 2);
  const int m = size(rng);
  const int p1 = size(rng);
  const int p2 = size(rng);
  const int w = m + p1 + p2;
  std::uniform_int_distribution<int> steps(1, max_steps);
  const int t_count = steps(rng);
  std::uniform_int_distribution<int> qubit(0, w - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Gate> gates;
  for (int t = 0; t < t_count; ++t) {
    const double c = coin(rng);
    if (c < 0.2 && w >= 3) {
      // One-step swap between two single-qubit registers.
      std::vector<int> picks;
      while (picks.size() < 3) {
        const int q = qubit(rng);
        if (std::find(picks.begin(), picks.end(), q) == picks.end()) {
          picks.push_back(q);
        }
      }
      gates.push_back(
          controlled_register_swap(picks[0], {picks[1]}, {picks[2]}));
    } else if (c < 0.6 && w >= 2) {
      int q1 = qubit(rng), q2 = qubit(rng);
      while (q2 == q1) q2 = qubit(rng);
      gates.push_back(make_unitary_gate({q1, q2}, random_unitary(4, rng)));
    } else {
      gates.push_back(make_unitary_gate({qubit(rng)}, random_unitary(2, rng)));
    }
  }
  std::uniform_int_distribution<int> anc(0, m - 1);
  return make_circuit(std::move(gates), m, p1, p2, anc(rng));
}

inline PureState random_witness(const VerificationCircuit& c,
                                std::mt19937_64& rng) {
  const int p = c.proof1_qubits() + c.proof2_qubits();
  return PureState(random_state_vector(dim_for(p), rng),
                   QubitLayout({{Label::P1, c.proof1_qubits()},
                                {Label::P2, c.proof2_qubits()}}));
}

// Cut separating the second proof register from everything else in a
// compiled layout.
inline Bipartition proof2_cut(const QubitLayout& layout) {
  std::vector<int> side_b = layout.qubits(Label::P2);
  std::vector<int> side_a;
  for (int q = 0; q < layout.total_qubits(); ++q) {
    if (std::find(side_b.begin(), side_b.end(), q) == side_b.end()) {
      side_a.push_back(q);
    }
  }
  return Bipartition(side_a, side_b, layout.total_qubits());
}

// Acceptance projector compressed onto the witness space: K[i,j] =
// <psi_T(e_i)| accept |psi_T(e_j)>. Max product acceptance then reduces to a
// product minimization of I - K.
inline Mat witness_acceptance_matrix(const VerificationCircuit& c) {
  const int p = c.proof1_qubits() + c.proof2_qubits();
  const index_t pd = dim_for(p);
  const int n = c.workspace_qubits();
  const int accept = c.layout.offset(Label::A) + c.accept_qubit;
  QubitLayout wit({{Label::P1, c.proof1_qubits()},
                   {Label::P2, c.proof2_qubits()}});
  Mat finals(dim_for(n), pd);
  for (index_t i = 0; i < pd; ++i) {
    finals.col(i) =
        apply_prefix(c, c.step_count(), PureState::basis(wit, i)).amplitudes();
  }
  Mat k = Mat::Zero(pd, pd);
  for (index_t i = 0; i < pd; ++i) {
    for (index_t j = 0; j < pd; ++j) {
      cplx acc{0.0, 0.0};
      for (index_t x = 0; x < finals.rows(); ++x) {
        if (bit_at(x, accept, n) == 1) {
          acc += std::conj(finals(x, i)) * finals(x, j);
        }
      }
      k(i, j) = acc;
    }
  }
  return hermitize(k);
}

template <typename F>
inline CriterionResult timed(const std::string& name, F&& body) {
  CriterionResult out;
  out.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

// --- criterion 1 -----------------------------------------------------------

inline CriterionResult history_kernel(std::uint64_t seed) {
  return timed("history-kernel", [&](CriterionResult& out) {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 100 + trial));
      VerificationCircuit c = random_circuit(rng, 8);
      KitaevHamiltonian ham = compile(c);
      HistoryState hist = history_state(c, random_witness(c, rng));
      const double residual =
          ((ham.h_in + ham.h_prop) * hist.state.amplitudes()).norm();
      worst = std::max(worst, residual);
    }
    out.pass = worst <= 1e-9;
    out.detail = "max ||(H_in+H_prop) eta|| = " + fmt(worst) +
                 " over 50 random circuits (tol 1e-9)";
  });
}

// --- criterion 2 -----------------------------------------------------------

inline CriterionResult energy_identity(std::uint64_t seed) {
  return timed("energy-identity", [&](CriterionResult& out) {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 200 + trial));
      VerificationCircuit c = random_circuit(rng, 8);
      KitaevHamiltonian ham = compile(c);
      PureState witness = random_witness(c, rng);
      HistoryState hist = history_state(c, witness);
      const double e = energy(ham.total(), hist.state);
      const double p = acceptance_probability(c, witness);
      const double expected =
          (1.0 - p) / (static_cast<double>(c.step_count()) + 1.0);
      worst = std::max(worst, std::abs(e - expected));
    }
    out.pass = worst <= 1e-9;
    out.detail = "max |<eta|H|eta> - (1-p)/(T+1)| = " + fmt(worst) +
                 " over 50 instances (tol 1e-9)";
  });
}

// --- criterion 3 -----------------------------------------------------------

inline CriterionResult sparsity(std::uint64_t) {
  return timed("sparsity", [&](CriterionResult& out) {
    int worst_prop = 0;
    bool exact_values = true;
    for (int s = 1; s <= 3; ++s) {
      // Workspace (A=1, P1=s, P2=s); two swap steps so both clock offsets
      // appear; clock has an invalid value when T+1 < 2^nc.
      std::vector<int> r1, r2;
      for (int q = 0; q < s; ++q) {
        r1.push_back(1 + q);
        r2.push_back(1 + s + q);
      }
      Gate g = controlled_register_swap(0, r1, r2);
      VerificationCircuit c = make_circuit({g, g}, 1, s, s, 0);
      ClockEncoding clock = ClockEncoding::for_steps(2);
      for (int t = 1; t <= 2; ++t) {
        RowSparseOperator oracle = row_oracle_for_term(t, g, clock, c.layout);
        if (oracle.declared_sparsity() != 2) exact_values = false;
        Mat dense =
            s <= 2 ? propagation_term(t, g, clock, c.layout) : Mat();
        for (index_t i = 0; i < oracle.dim(); ++i) {
          const auto row = oracle.row(i);
          worst_prop = std::max(worst_prop, static_cast<int>(row.size()));
          for (const auto& [col, val] : row) {
            if (val != cplx{0.5, 0.0} && val != cplx{-0.5, 0.0}) {
              exact_values = false;
            }
            if (dense.size() > 0 && dense(i, col) != val) exact_values = false;
          }
          if (dense.size() > 0) {
            int nonzeros = 0;
            for (index_t col = 0; col < dense.cols(); ++col) {
              if (dense(i, col) != cplx{0.0, 0.0}) ++nonzeros;
            }
            if (nonzeros != static_cast<int>(row.size())) exact_values = false;
          }
        }
      }
      // Raw controlled register swap: exactly one nonzero per row.
      RowSparseOperator raw = row_oracle_for_gate(g, c.workspace_qubits());
      for (index_t i = 0; i < raw.dim(); ++i) {
        const auto row = raw.row(i);
        if (row.size() != 1 || row[0].second != cplx{1.0, 0.0}) {
          exact_values = false;
        }
      }
      if (raw.declared_sparsity() != 1) exact_values = false;
    }
    out.pass = worst_prop <= 2 && exact_values;
    out.detail = "cswap propagation rows <= " + std::to_string(worst_prop) +
                 " nonzeros (registers up to 3+3), raw swap exactly 1, "
                 "entries exact";
  });
}

// --- criterion 4 -----------------------------------------------------------

inline CriterionResult separability(std::uint64_t seed) {
  return timed("separability", [&](CriterionResult& out) {
    double worst_product = 0.0;   // distance from 1 for product witnesses
    double worst_entangled = 0.0; // largest overlap for entangled witnesses
    const std::vector<std::vector<int>> register_shapes = {{1}, {1, 1}, {2}};
    int trial = 0;
    for (const std::vector<int>& registers : register_shapes) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 400 + trial++));
      int p = 0;
      for (int r : registers) p += r;
      // Inner verifier on (A=1, P1=p): two random steps.
      std::vector<Gate> inner_gates;
      for (int t = 0; t < 2; ++t) {
        std::vector<int> targets;
        for (int q = 0; q <= p; ++q) targets.push_back(q);
        inner_gates.push_back(make_unitary_gate(
            targets, random_unitary(dim_for(p + 1), rng)));
      }
      VerificationCircuit inner =
          make_circuit(std::move(inner_gates), 1, p, 0, 0);
      VerificationCircuit wrapped = hm_wrap(inner, registers);

      // Identical product witness: one factor per register, mirrored.
      Vec psi1 = Vec::Ones(1);
      for (int r : registers) {
        psi1 = kron(psi1, random_state_vector(dim_for(r), rng));
      }
      Vec amp = kron(psi1, psi1);
      PureState witness(amp, QubitLayout({{Label::P1, p}, {Label::P2, p}}));
      HistoryState hist = history_state(wrapped, witness);
      Bipartition cut = proof2_cut(hist.state.layout());
      const double v = max_product_overlap(hist.state, cut).value;
      worst_product = std::max(worst_product, std::abs(v - 1.0));

      // Entangled witness: generic state across (P1, P2) entangles the swap
      // controls with the proofs.
      PureState entangled(random_state_vector(dim_for(2 * p), rng),
                          QubitLayout({{Label::P1, p}, {Label::P2, p}}));
      HistoryState hist2 = history_state(wrapped, entangled);
      const double v2 = max_product_overlap(hist2.state, cut).value;
      worst_entangled = std::max(worst_entangled, v2);
    }
    out.pass = worst_product <= 1e-9 && worst_entangled < 1.0 - 1e-3;
    out.detail = "product witnesses: |overlap-1| <= " + fmt(worst_product) +
                 "; entangled witnesses: overlap <= " + fmt(worst_entangled) +
                 " (< 1-1e-3)";
  });
}

// --- criterion 5 -----------------------------------------------------------

inline CriterionResult clock_angle(std::uint64_t seed) {
  return timed("clock-angle", [&](CriterionResult& out) {
    double worst_excess = -1.0;
    bool all_ok = true;
    for (int t_steps = 1; t_steps <= 6; ++t_steps) {
      for (int m = 1; m <= 3; ++m) {
        std::mt19937_64 rng =
            make_rng(derive_seed(seed, 500 + 10 * t_steps + m));
        std::vector<Gate> gates;
        const int w = m + 2;
        std::uniform_int_distribution<int> qubit(0, w - 1);
        for (int t = 0; t < t_steps; ++t) {
          int q1 = qubit(rng), q2 = qubit(rng);
          while (q2 == q1) q2 = qubit(rng);
          gates.push_back(make_unitary_gate({q1, q2}, random_unitary(4, rng)));
        }
        VerificationCircuit c = make_circuit(std::move(gates), m, 1, 1, 0);
        ClockAngleReport report = verify_clock_angle(c);
        if (report.vacuous || !report.holds) all_ok = false;
        worst_excess =
            std::max(worst_excess, report.cos_sq_theta - report.bound);
      }
    }
    out.pass = all_ok && worst_excess <= 1e-9;
    out.detail = "max cos^2(theta) - (1 - 1/(T+1)) = " + fmt(worst_excess) +
                 " over T in 1..6, m in 1..3 (tol 1e-9)";
  });
}

// --- criterion 6 -----------------------------------------------------------

inline CriterionResult geometric_gap(std::uint64_t seed) {
  return timed("geometric-gap", [&](CriterionResult& out) {
    int failures = 0;
    int vacuous = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 600 + trial));
      const index_t dim = trial % 2 == 0 ? 16 : 32;
      std::uniform_int_distribution<int> kdim(1, static_cast<int>(dim) / 4);
      Mat a1 = random_psd_with_kernel(dim, kdim(rng), rng);
      Mat a2 = random_psd_with_kernel(dim, kdim(rng), rng);
      GeometricBoundReport r = verify_geometric_bound(a1, a2);
      if (r.vacuous) {
        ++vacuous;
        continue;
      }
      if (!r.holds) ++failures;
      worst_margin = std::min(
          worst_margin, r.delta_sum - r.v * (1.0 - r.cos_theta));
    }
    // Compiled pairs in the rotated frame, T = 1..5.
    for (int t_steps = 1; t_steps <= 5; ++t_steps) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 680 + t_steps));
      std::vector<Gate> gates;
      for (int t = 0; t < t_steps; ++t) {
        gates.push_back(make_unitary_gate({0, 1}, random_unitary(4, rng)));
      }
      VerificationCircuit c = make_circuit(std::move(gates), 1, 1, 1, 0);
      KitaevHamiltonian ham = compile(c);
      Mat w = rotation_w(c, ham.clock);
      GeometricBoundReport r = verify_geometric_bound(
          hermitize(w.adjoint() * ham.h_in * w),
          hermitize(w.adjoint() * ham.h_prop * w));
      if (r.vacuous || !r.holds) ++failures;
    }
    out.pass = failures == 0;
    out.detail = "0 violations allowed, got " + std::to_string(failures) +
                 " (" + std::to_string(vacuous) +
                 " vacuous pairs skipped; min margin " + fmt(worst_margin) +
                 ")";
  });
}

// --- criterion 7 -----------------------------------------------------------

inline CriterionResult step_lemmas(std::uint64_t seed) {
  return timed("step-lemmas", [&](CriterionResult& out) {
    const int trials = 10000;
    int bad_l2 = 0, bad_l3 = 0, bad_l4 = 0, bad_c2 = 0;

    // Shared fixture: 3-qubit workspace, T = 2 circuit.
    std::mt19937_64 fixture_rng = make_rng(derive_seed(seed, 700));
    std::vector<Gate> gates;
    gates.push_back(make_unitary_gate({0, 1}, random_unitary(4, fixture_rng)));
    gates.push_back(make_unitary_gate({1, 2}, random_unitary(4, fixture_rng)));
    VerificationCircuit circ = make_circuit(std::move(gates), 1, 1, 1, 0);
    KitaevHamiltonian ham = compile(circ);
    const int t_count = circ.step_count();
    const Mat low = ham.h_in + ham.h_prop;
    Subspace kernel = null_space(low);
    const double gap = smallest_nonzero_eigenvalue(low);
    const Mat h_total = ham.total();
    const index_t dim = ham.dim();
    QubitLayout wit_layout({{Label::P1, 1}, {Label::P2, 1}});
    Bipartition compiled_cut = proof2_cut(ham.layout);
    Bipartition witness_cut({0}, {1}, 2);

    // Max product acceptance of the fixture (exhaustive grid on I - K).
    const Mat k = witness_acceptance_matrix(circ);
    const double s_max =
        1.0 - brute_force_product_min(Mat::Identity(4, 4) - k, witness_cut,
                                      1.0);

    std::mt19937_64 rng = make_rng(derive_seed(seed, 701));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
      // Lemma of step one: overlap of a low-energy state with the history
      // space, plus the energy lower bound through the measured gap.
      {
        const double p = unif(rng);
        Vec in_kernel = kernel.basis *
                        random_state_vector(kernel.dim(), rng);
        Vec perp = random_state_vector(dim, rng);
        perp -= kernel.basis * (kernel.basis.adjoint() * perp);
        perp /= perp.norm();
        Vec omega = std::sqrt(1.0 - p) * in_kernel + std::sqrt(p) * perp;
        omega /= omega.norm();
        const double hist_overlap =
            (kernel.basis.adjoint() * omega).squaredNorm();
        const double e = ((omega.adjoint() * low * omega)(0)).real();
        if (std::abs(hist_overlap - (1.0 - p)) > 1e-9) ++bad_l2;
        if (p * gap > e + 1e-9) ++bad_l2;
      }

      // Lemma of step two: product approximation of a history state yields a
      // proof-register state via the t = 0 block.
      {
        PureState witness(random_state_vector(4, rng), wit_layout);
        HistoryState hist = history_state(circ, witness);
        ProductOverlapResult best =
            max_product_overlap(hist.state, compiled_cut);
        const double noise = 0.6 * unif(rng);
        Vec left = best.left.amplitudes() +
                   noise * random_state_vector(best.left.dim(), rng);
        Vec right = best.right.amplitudes() +
                    noise * random_state_vector(best.right.dim(), rng);
        left /= left.norm();
        right /= right.norm();
        const double eps =
            1.0 - std::norm(kron(left, right).dot(hist.state.amplitudes()));
        const double bound =
            1.0 - eps * (static_cast<double>(t_count) + 1.0);
        if (bound > 1e-9) {
          // Extract |L> from the clock-0, ancilla-0 component of the left
          // factor; left holds (C, A, P1) with P1 in the low bits.
          Vec l_state = left.segment(0, 2);
          const double l_norm = l_state.norm();
          if (l_norm <= 1e-12) {
            ++bad_l3;
          } else {
            l_state /= l_norm;
            const double got =
                std::norm(kron(l_state, right).dot(witness.amplitudes()));
            if (got < bound - 1e-9) ++bad_l3;
          }
        }
      }

      // Lemma of step three: near-product witnesses keep the history energy
      // above the soundness floor.
      {
        Vec prod = kron(random_state_vector(2, rng),
                        random_state_vector(2, rng));
        Vec noise_vec = random_state_vector(4, rng);
        Vec psi = prod + 0.5 * unif(rng) * noise_vec;
        psi /= psi.norm();
        PureState witness(psi, wit_layout);
        const double eps =
            1.0 - max_product_overlap(witness, witness_cut).value;
        HistoryState hist = history_state(circ, witness);
        const double e = energy(h_total, hist.state);
        const double floor_val =
            (1.0 - s_max - 2.0 * std::sqrt(std::max(eps, 0.0))) /
            (static_cast<double>(t_count) + 1.0);
        if (e < floor_val - 1e-9) ++bad_l4;
      }

      // Projector perturbation claim: measurement statistics move by at most
      // sqrt(delta) between sqrt(1-delta)-overlapping states.
      {
        Vec v1 = random_state_vector(8, rng);
        Vec other = random_state_vector(8, rng);
        other -= v1 * (v1.dot(other));
        if (other.norm() > 1e-12) {
          other /= other.norm();
          const double mix = 0.9 * unif(rng);
          Vec v2 = std::sqrt(1.0 - mix) * v1 + std::sqrt(mix) * other;
          v2 /= v2.norm();
          const double delta = 1.0 - std::norm(v1.dot(v2));
          std::uniform_int_distribution<int> rank(1, 7);
          Mat u = random_unitary(8, rng);
          Mat p = u.leftCols(rank(rng)) * u.leftCols(rank(rng)).adjoint();
          const double q1 = ((v1.adjoint() * p * v1)(0)).real();
          const double q2 = ((v2.adjoint() * p * v2)(0)).real();
          if (std::abs(q1 - q2) > std::sqrt(delta) + 1e-9) ++bad_c2;
        }
      }
    }
    out.pass = bad_l2 == 0 && bad_l3 == 0 && bad_l4 == 0 && bad_c2 == 0;
    out.detail = "counterexamples: overlap/energy " + std::to_string(bad_l2) +
                 ", extraction " + std::to_string(bad_l3) + ", soundness floor " +
                 std::to_string(bad_l4) + ", perturbation " +
                 std::to_string(bad_c2) + " over 10^4 trials each";
  });
}

// --- criterion 8 -----------------------------------------------------------

inline CriterionResult phase_estimation(std::uint64_t seed) {
  return timed("phase-estimation", [&](CriterionResult& out) {
    const double eps = 0.1, delta = 0.1;
    PhaseEstimateConfig cfg = PhaseEstimateConfig::make(eps, delta);
    const int shots = 10000;
    bool all_ok = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int u_trial = 0; u_trial < 3; ++u_trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 800 + u_trial));
      Mat u = random_unitary(8, rng);
      Vec psi = random_state_vector(8, rng);
      // Independent spectral reference for the per-component contract.
      Eigen::ComplexSchur<Mat> schur(u);
      RVec phases(8), weights(8);
      for (int k = 0; k < 8; ++k) {
        double phi = std::arg(schur.matrixT()(k, k));
        if (phi < 0.0) phi += 2.0 * std::numbers::pi;
        phases(k) = phi;
        weights(k) = std::norm(schur.matrixU().col(k).dot(psi));
      }
      PhaseEstimationSampler sampler(u, psi, cfg.t);
      std::vector<double> outs(shots);
      for (int s = 0; s < shots; ++s) outs[s] = sampler.sample(rng);
      for (int k = 0; k < 8; ++k) {
        if (weights(k) < 1e-12) continue;
        int hits = 0;
        for (double phi_out : outs) {
          double frac = phi_out / (2.0 * std::numbers::pi) -
                        phases(k) / (2.0 * std::numbers::pi);
          frac -= std::round(frac);
          if (std::abs(frac) <= delta) ++hits;
        }
        const double freq = static_cast<double>(hits) / shots;
        const double q = sampler.hit_probability(phases(k), delta);
        const double sigma = std::sqrt(std::max(q * (1.0 - q), 0.0) / shots);
        const double floor_val = weights(k) * (1.0 - eps) - 3.0 * sigma;
        worst_slack = std::min(worst_slack, freq - floor_val);
        if (freq < floor_val) all_ok = false;
      }
    }
    out.pass = all_ok;
    out.detail =
        "per-component hit freq >= p_i(1-eps) - 3 sigma (eps = delta = 0.1, "
        "t = " + std::to_string(cfg.t) + " bits); min slack " +
        fmt(worst_slack);
  });
}

// --- criterion 9 -----------------------------------------------------------

inline CriterionResult qj_contract(std::uint64_t seed) {
  return timed("qj-contract", [&](CriterionResult& out) {
    const int trials = 10000;
    bool all_ok = true;
    std::string parts;
    int stream = 900;
    for (double width : {0.3, 0.6}) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, stream++));
      // Random term with spectrum inside [0, 1].
      Mat g = random_hermitian(8, rng);
      Eigen::SelfAdjointEigenSolver<Mat> es(g);
      const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(7);
      Mat h = (g - lo * Mat::Identity(8, 8)) * (0.9 / (hi - lo));
      h += 0.05 * Mat::Identity(8, 8);
      PureState psi(random_state_vector(8, rng), 3);
      const double a = 0.2, b = 0.2 + width;
      QjVerifier verifier(h, psi, a, b);
      int rejects = 0;
      for (int t = 0; t < trials; ++t) {
        if (!verifier.accept(rng)) ++rejects;
      }
      const double emp = static_cast<double>(rejects) / trials;
      const double p = verifier.reject_probability();
      const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
      const double err = std::abs(emp - verifier.energy());
      const double budget = width / 3.0 + 3.0 * sigma;
      if (err > budget) all_ok = false;
      parts += (parts.empty() ? "" : "; ") + std::string("b-a=") + fmt(width) +
               ": |emp-E| = " + fmt(err) + " <= " + fmt(budget);
    }
    out.pass = all_ok;
    out.detail = parts + " (10^4 trials each)";
  });
}

// --- criterion 10 ----------------------------------------------------------

inline CriterionResult product_optimization(std::uint64_t seed) {
  return timed("product-optimization", [&](CriterionResult& out) {
    double worst_diff = 0.0;
    Bipartition cut({0, 1}, {2, 3}, 4);
    for (int trial = 0; trial < 20; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 1000 + trial));
      Mat h = random_hermitian(16, rng);
      ProductMinResult alt =
          min_product_energy(h, cut, 50, 1e-10, derive_seed(seed, 1050 + trial));
      const double grid = brute_force_product_min(h, cut, 30.0);
      worst_diff = std::max(worst_diff, std::abs(alt.value - grid));
    }
    // Swap instance: product minimum 0 against global minimum -1.
    Mat swap = Mat::Zero(4, 4);
    swap(0, 0) = 1.0;
    swap(1, 2) = 1.0;
    swap(2, 1) = 1.0;
    swap(3, 3) = 1.0;
    Bipartition single({0}, {1}, 2);
    ProductMinResult swap_min =
        min_product_energy(swap, single, 50, 1e-10, derive_seed(seed, 1090));
    const double swap_grid = brute_force_product_min(swap, single, 1.0);
    const double global = ground_energy(swap).first;
    const double gap = std::min(swap_min.value, swap_grid) - global;
    const bool swap_ok = std::abs(swap_min.value) <= 1e-3 &&
                         std::abs(swap_grid) <= 1e-3 &&
                         std::abs(global + 1.0) <= 1e-9 && gap >= 0.99;
    out.pass = worst_diff <= 1e-3 && swap_ok;
    out.detail = "max |alternating - grid| = " + fmt(worst_diff) +
                 " over 20 random 2+2 instances (tol 1e-3); swap: product " +
                 fmt(swap_min.value) + ", global " + fmt(global) + ", gap " +
                 fmt(gap);
  });
}

// --- criterion 11 ----------------------------------------------------------

inline double witness_residual(const CLDMInstance& inst,
                               const DensityMatrix& witness) {
  return hamlab::detail::marginal_residual(inst, witness.matrix());
}

inline CriterionResult cldm_oracle(std::uint64_t seed) {
  return timed("cldm-oracle", [&](CriterionResult& out) {
    int consistent_ok = 0, inconsistent_ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 1100 + trial));
      std::uniform_int_distribution<int> nq(3, 4);
      const int n = nq(rng);
      Mat sigma = random_density(dim_for(n), rng);
      // Overlapping support pattern with nested singleton/pair pairs.
      std::uniform_int_distribution<int> q0(0, n - 2);
      const int q = q0(rng);
      std::vector<std::vector<int>> supports = {
          {q}, {q, q + 1}, {(q + 2) % n}};
      std::sort(supports[2].begin(), supports[2].end());
      std::vector<CLDMInstance::Marginal> marginals;
      for (const std::vector<int>& s : supports) {
        marginals.push_back(
            {s, partial_trace_matrix(sigma, n, s)});
      }
      CLDMInstance feasible = make_cldm_instance(marginals, n, 2, 0.1);
      Verdict v = consistency_decide(feasible, derive_seed(seed, 1150 + trial));
      if (v.outcome == ConsistencyOutcome::Consistent &&
          v.witness.has_value() &&
          witness_residual(feasible, *v.witness) <= 1e-8) {
        ++consistent_ok;
      }

      // Perturb the nested singleton by trace distance 0.2 (>= beta = 0.1):
      // the enclosing pair marginal pins that qubit, so no global state can
      // satisfy both.
      Mat rho_q = marginals[0].rho;
      Eigen::SelfAdjointEigenSolver<Mat> es(rho_q);
      Vec far = es.eigenvectors().col(0);  // least-weight eigenvector
      Mat target = far * far.adjoint();
      const double dist = 0.5 * trace_norm(target - rho_q);
      const double mix = std::min(1.0, 0.2 / std::max(dist, 1e-12));
      marginals[0].rho = (1.0 - mix) * rho_q + mix * target;
      CLDMInstance infeasible = make_cldm_instance(marginals, n, 2, 0.1);
      Verdict v2 =
          consistency_decide(infeasible, derive_seed(seed, 1175 + trial));
      if (v2.outcome == ConsistencyOutcome::Inconsistent) ++inconsistent_ok;
    }
    out.pass = consistent_ok == 20 && inconsistent_ok == 20;
    out.detail = std::to_string(consistent_ok) +
                 "/20 feasible instances consistent, " +
                 std::to_string(inconsistent_ok) +
                 "/20 perturbed instances (trace distance 0.2 >= beta = 0.1) "
                 "inconsistent";
  });
}

// --- criterion 12 ----------------------------------------------------------

inline CriterionResult slh_protocol(std::uint64_t seed) {
  return timed("slh-protocol", [&](CriterionResult& out) {
    Bipartition cut({0, 1}, {2, 3}, 4);

    // Yes-instance: independent |1><1| penalties, product ground state
    // |0000> at energy 0.
    Mat excited = Mat::Zero(2, 2);
    excited(1, 1) = 1.0;
    std::vector<SLHInstance::Term> yes_terms;
    for (int q = 0; q < 4; ++q) yes_terms.push_back({{q}, excited});
    SLHInstance yes_inst =
        make_slh_instance(yes_terms, 4, cut, 0.1, 0.9);
    DensityMatrix ground =
        DensityMatrix::from_pure(PureState::basis(QubitLayout::free_layout(4), 0));
    SLHVerdict honest =
        slh_verifier(yes_inst, honest_prover(yes_inst, ground),
                     default_consistency_oracle(), derive_seed(seed, 1200));
    const bool yes_ok = honest.accept && honest.energy <= yes_inst.a + 1e-12;

    // No-instance: cross-cut Bell projectors on pairs (0,2) and (1,3). Any
    // product state across the cut pays at least 1/2 per term, so the
    // product minimum is 1; certify exhaustively.
    Vec bell = Vec::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);
    bell(3) = 1.0 / std::sqrt(2.0);
    Mat bell_pen = Mat::Identity(4, 4) - bell * bell.adjoint();
    std::vector<SLHInstance::Term> no_terms = {{{0, 2}, bell_pen},
                                               {{1, 3}, bell_pen}};
    SLHInstance no_inst = make_slh_instance(no_terms, 4, cut, 0.15, 0.95);
    const double certified =
        brute_force_product_min(assemble(no_inst), cut, 30.0);
    const bool certified_no = certified >= no_inst.b - 1e-6;

    // Cheating sweep: 50 proofs reduced from random product states, 50 with
    // arbitrary per-term density matrices.
    int rejected = 0;
    bool energies_ok = true;
    const double midpoint = 0.5 * (no_inst.a + no_inst.b);
    for (int trial = 0; trial < 100; ++trial) {
      std::mt19937_64 rng = make_rng(derive_seed(seed, 1300 + trial));
      SLHProof proof;
      if (trial < 50) {
        Mat rho_a = random_density(4, rng);
        Mat rho_b = random_density(4, rng);
        DensityMatrix product(kron(rho_a, rho_b), 4);
        proof = honest_prover(no_inst, product);
      } else {
        for (std::size_t i = 0; i < no_inst.terms.size(); ++i) {
          proof.terms.push_back(
              {random_density(2, rng), random_density(2, rng)});
        }
      }
      SLHVerdict verdict =
          slh_verifier(no_inst, proof, default_consistency_oracle(),
                       derive_seed(seed, 1400 + trial));
      if (!verdict.accept) ++rejected;
      const bool consistent =
          verdict.side_a.outcome == ConsistencyOutcome::Consistent &&
          verdict.side_b.outcome == ConsistencyOutcome::Consistent;
      if (consistent && verdict.energy < midpoint - 1e-6) energies_ok = false;
    }
    out.pass = yes_ok && certified_no && rejected == 100 && energies_ok;
    out.detail = std::string("honest proof ") +
                 (yes_ok ? "accepted" : "NOT accepted") +
                 " (E = " + fmt(honest.energy) + "); no-instance product min " +
                 fmt(certified) + " >= b; " + std::to_string(rejected) +
                 "/100 cheating proofs rejected; consistent proofs all at E >= "
                 "(a+b)/2 - 1e-6: " + (energies_ok ? "yes" : "no");
  });
}

}  // namespace detail

inline std::vector<CriterionResult> run_all(const std::string& filter = "",
                                            std::uint64_t seed = kDefaultSeed) {
  using Runner = CriterionResult (*)(std::uint64_t);
  const std::pair<const char*, Runner> criteria[] = {
      {"history-kernel", detail::history_kernel},
      {"energy-identity", detail::energy_identity},
      {"sparsity", detail::sparsity},
      {"separability", detail::separability},
      {"clock-angle", detail::clock_angle},
      {"geometric-gap", detail::geometric_gap},
      {"step-lemmas", detail::step_lemmas},
      {"phase-estimation", detail::phase_estimation},
      {"qj-contract", detail::qj_contract},
      {"product-optimization", detail::product_optimization},
      {"cldm-oracle", detail::cldm_oracle},
      {"slh-protocol", detail::slh_protocol},
  };
  std::vector<CriterionResult> results;
  for (const auto& [name, runner] : criteria) {
    if (!filter.empty() &&
        std::string(name).find(filter) == std::string::npos) {
      continue;
    }
    results.push_back(runner(seed));
  }
  return results;
}

}  // namespace hamlab::selftest

#endif  // HAMLAB_SELFTEST_HPP_
