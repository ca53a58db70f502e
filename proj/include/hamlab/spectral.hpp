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

#ifndef HAMLAB_SPECTRAL_HPP_
#define HAMLAB_SPECTRAL_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hamlab/circuit.hpp"
#include "hamlab/core.hpp"
#include "hamlab/kitaev.hpp"

namespace hamlab {

// Subspace of C^d held as orthonormal basis columns; zero columns = {0}.
struct Subspace {
  Mat basis;
  index_t ambient = 0;

  int dim() const { return static_cast<int>(basis.cols()); }
  bool trivial() const { return basis.cols() == 0; }
};

inline Mat projector_onto(const Subspace& s) {
  if (s.trivial()) return Mat::Zero(s.ambient, s.ambient);
  return s.basis * s.basis.adjoint();
}

// Orthonormalizes arbitrary spanning columns, dropping numerically dependent
// directions.
inline Subspace subspace_from_span(const Mat& span, double rank_tol = 1e-6) {
  if (span.cols() == 0) return Subspace{Mat(span.rows(), 0), span.rows()};
  Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > rank_tol) ++rank;
  }
  return Subspace{svd.matrixU().leftCols(rank), span.rows()};
}

// Smallest eigenvalue strictly above zero_tol of a PSD matrix.
inline double smallest_nonzero_eigenvalue(const Mat& a,
                                          double zero_tol = kKernelTol) {
  require(is_hermitian(a, kEqTol),
          "smallest_nonzero_eigenvalue: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
  require(es.eigenvalues()(0) >= -zero_tol,
          "smallest_nonzero_eigenvalue: matrix is not PSD");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > zero_tol) return es.eigenvalues()(i);
  }
  throw InvariantError(
      "smallest_nonzero_eigenvalue: every eigenvalue is below zero_tol");
}

inline Subspace null_space(const Mat& a, double zero_tol = kKernelTol) {
  require(is_hermitian(a, kEqTol), "null_space: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  require(es.eigenvalues()(0) >= -zero_tol, "null_space: matrix is not PSD");
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) <= zero_tol) ++count;
  }
  return Subspace{es.eigenvectors().leftCols(count), a.rows()};
}

inline Subspace complement(const Subspace& s) {
  // Eigenvalues of a projector cluster at 0 and 1; 0.5 splits them cleanly.
  return null_space(projector_onto(s), 0.5);
}

inline Subspace intersect(const Subspace& a, const Subspace& b,
                          double zero_tol = kKernelTol) {
  require(a.ambient == b.ambient, "intersect: ambient dimension mismatch");
  if (a.trivial() || b.trivial()) return Subspace{Mat(a.ambient, 0), a.ambient};
  Mat m = 2.0 * Mat::Identity(a.ambient, a.ambient) - projector_onto(a) -
          projector_onto(b);
  return null_space(m, zero_tol);
}

// Largest |<x|y>| over unit x in a, y in b: the top singular value of the
// basis overlap matrix.
inline double principal_angle_cos(const Subspace& a, const Subspace& b) {
  require(a.ambient == b.ambient,
          "principal_angle_cos: ambient dimension mismatch");
  require(!a.trivial() && !b.trivial(),
          "principal_angle_cos: trivial subspace has no angle");
  Mat overlap = a.basis.adjoint() * b.basis;
  Eigen::JacobiSVD<Mat> svd(overlap);
  return std::min(1.0, svd.singularValues()(0));
}

// Block-diagonal change of frame sum_t |t><t| (x) U_t...U_1, extended as the
// identity on invalid clock values. Conjugating the propagation part by this
// turns it into a pure clock operator.
inline Mat rotation_w(const VerificationCircuit& circuit,
                      const ClockEncoding& clock) {
  require(clock.steps == circuit.step_count(),
          "rotation_w: clock does not match the circuit length");
  const int w = circuit.workspace_qubits();
  check_qubit_budget(clock.clock_qubits + w, "rotation frame");
  const index_t wd = dim_for(w);
  Mat out = Mat::Zero(clock.dim() * wd, clock.dim() * wd);
  Mat prefix = Mat::Identity(wd, wd);
  for (index_t t = 0; t < clock.dim(); ++t) {
    if (t >= 1 && t <= clock.steps) {
      prefix = gate_matrix(circuit.gates[t - 1], w) * prefix;
    }
    out.block(t * wd, t * wd, wd, wd) =
        clock.is_valid(t) ? prefix : Mat::Identity(wd, wd);
  }
  return out;
}

struct GeometricBoundReport {
  double v = 0.0;          // min over both operators' smallest nonzero eigenvalue
  double cos_theta = 0.0;  // principal angle between the kernels, mod overlap
  double delta_sum = 0.0;  // smallest nonzero eigenvalue of the sum
  bool holds = false;
  bool vacuous = false;    // one kernel contains the other (or is trivial)
};

// Checks the angle-to-gap bound for a pair of PSD operators:
//   smallest nonzero eigenvalue of A1+A2 >= v (1 - cos theta),
// with theta the principal angle between null(A1) and null(A2) after
// quotienting out their common part.
inline GeometricBoundReport verify_geometric_bound(
    const Mat& a1, const Mat& a2, double zero_tol = kKernelTol) {
  require(a1.rows() == a2.rows() && a1.cols() == a2.cols(),
          "verify_geometric_bound: dimension mismatch");
  GeometricBoundReport out;
  out.v = std::min(smallest_nonzero_eigenvalue(a1, zero_tol),
                   smallest_nonzero_eigenvalue(a2, zero_tol));
  out.delta_sum = smallest_nonzero_eigenvalue(a1 + a2, zero_tol);
  Subspace l1 = null_space(a1, zero_tol);
  Subspace l2 = null_space(a2, zero_tol);
  Subspace common = intersect(l1, l2, zero_tol);
  Mat shrink = Mat::Identity(a1.rows(), a1.cols()) - projector_onto(common);
  Subspace l1q = subspace_from_span(shrink * l1.basis);
  Subspace l2q = subspace_from_span(shrink * l2.basis);
  if (l1q.trivial() || l2q.trivial()) {
    out.vacuous = true;
    out.cos_theta = 0.0;
    out.holds = true;
    return out;
  }
  out.cos_theta = principal_angle_cos(l1q, l2q);
  out.holds = out.delta_sum >= out.v * (1.0 - out.cos_theta) - 1e-9;
  return out;
}

struct ClockAngleReport {
  double cos_sq_theta = 0.0;
  double bound = 0.0;  // 1 - 1/(T+1)
  bool holds = false;
  bool vacuous = false;
};

// Measures the kernel angle of a compiled circuit in the rotated frame and
// compares it against the clock bound cos^2(theta) <= 1 - 1/(T+1).
inline ClockAngleReport verify_clock_angle(const VerificationCircuit& circuit,
                                           double zero_tol = kKernelTol) {
  KitaevHamiltonian ham = compile(circuit);
  Mat w = rotation_w(circuit, ham.clock);
  Mat a1 = hermitize(w.adjoint() * ham.h_in * w);
  Mat a2 = hermitize(w.adjoint() * ham.h_prop * w);
  ClockAngleReport out;
  out.bound = 1.0 - 1.0 / (static_cast<double>(ham.clock.steps) + 1.0);
  Subspace l1 = null_space(a1, zero_tol);
  Subspace l2 = null_space(a2, zero_tol);
  Subspace common = intersect(l1, l2, zero_tol);
  Mat shrink =
      Mat::Identity(a1.rows(), a1.cols()) - projector_onto(common);
  Subspace l1q = subspace_from_span(shrink * l1.basis);
  Subspace l2q = subspace_from_span(shrink * l2.basis);
  if (l1q.trivial() || l2q.trivial()) {
    out.vacuous = true;
    out.holds = true;
    return out;
  }
  const double c = principal_angle_cos(l1q, l2q);
  out.cos_sq_theta = c * c;
  out.holds = out.cos_sq_theta <= out.bound + 1e-9;
  return out;
}

}  // namespace hamlab

#endif  // HAMLAB_SPECTRAL_HPP_
