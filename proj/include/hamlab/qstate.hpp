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

#ifndef HAMLAB_QSTATE_HPP_
#define HAMLAB_QSTATE_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamlab/core.hpp"

namespace hamlab {

// Roles a register block can play: clock (C), verifier ancillas (A), the two
// proof registers (P1, P2), or an unnamed block (Free). Named labels are
// unique within a layout; Free blocks may repeat and adjacent ones merge.
enum class Label { C, A, P1, P2, Free };

inline std::string to_string(Label label) {
  switch (label) {
    case Label::C: return "C";
    case Label::A: return "A";
    case Label::P1: return "P1";
    case Label::P2: return "P2";
    case Label::Free: return "free";
  }
  return "?";
}

struct Subsystem {
  Label label;
  int qubits;
};

// Ordered register map for a multi-qubit space. Qubit indices run 0..n-1 with
// qubit 0 the most significant bit of a basis index, so the first subsystem
// occupies the highest-order bits.
class QubitLayout {
 public:
  QubitLayout() = default;

  explicit QubitLayout(std::vector<Subsystem> parts) {
    for (const Subsystem& p : parts) {
      require(p.qubits >= 0, "QubitLayout: negative subsystem size");
      if (p.qubits == 0) continue;
      if (p.label != Label::Free) {
        for (const Subsystem& q : parts_) {
          require(q.label != p.label,
                  "QubitLayout: duplicate label " + to_string(p.label));
        }
      }
      if (p.label == Label::Free && !parts_.empty() &&
          parts_.back().label == Label::Free) {
        parts_.back().qubits += p.qubits;
      } else {
        parts_.push_back(p);
      }
      total_ += p.qubits;
    }
  }

  static QubitLayout free_layout(int qubits) {
    return QubitLayout({{Label::Free, qubits}});
  }

  int total_qubits() const { return total_; }
  index_t dim() const { return dim_for(total_); }
  const std::vector<Subsystem>& parts() const { return parts_; }

  bool has(Label label) const { return size(label) > 0; }

  int size(Label label) const {
    int total = 0;
    for (const Subsystem& p : parts_) {
      if (p.label == label) total += p.qubits;
    }
    return total;
  }

  int offset(Label label) const {
    int at = 0;
    for (const Subsystem& p : parts_) {
      if (p.label == label) return at;
      at += p.qubits;
    }
    throw InvariantError("QubitLayout: no subsystem labelled " +
                         to_string(label));
  }

  std::vector<int> qubits(Label label) const {
    std::vector<int> out;
    int at = 0;
    for (const Subsystem& p : parts_) {
      if (p.label == label) {
        for (int q = 0; q < p.qubits; ++q) out.push_back(at + q);
      }
      at += p.qubits;
    }
    return out;
  }

  bool operator==(const QubitLayout& other) const {
    if (total_ != other.total_ || parts_.size() != other.parts_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i].label != other.parts_[i].label ||
          parts_[i].qubits != other.parts_[i].qubits) {
        return false;
      }
    }
    return true;
  }
  bool operator!=(const QubitLayout& other) const { return !(*this == other); }

 private:
  std::vector<Subsystem> parts_;
  int total_ = 0;
};

// Concatenation places `b`'s subsystems after `a`'s (so `a` holds the more
// significant bits). Named labels must not collide.
inline QubitLayout concat(const QubitLayout& a, const QubitLayout& b) {
  std::vector<Subsystem> parts = a.parts();
  for (const Subsystem& p : b.parts()) parts.push_back(p);
  return QubitLayout(parts);
}

class PureState {
 public:
  PureState(Vec amplitudes, QubitLayout layout)
      : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)) {
    require(amplitudes_.size() == layout_.dim(),
            "PureState: amplitude count does not match layout dimension");
    require(std::abs(amplitudes_.norm() - 1.0) <= kCtorTol,
            "PureState: vector is not normalized");
  }

  PureState(Vec amplitudes, int qubits)
      : PureState(std::move(amplitudes), QubitLayout::free_layout(qubits)) {}

  static PureState basis(const QubitLayout& layout, index_t index) {
    require(index >= 0 && index < layout.dim(),
            "PureState::basis: index out of range");
    Vec v = Vec::Zero(layout.dim());
    v(index) = 1.0;
    return PureState(std::move(v), layout);
  }

  static PureState zero(const QubitLayout& layout) {
    return basis(layout, 0);
  }

  const Vec& amplitudes() const { return amplitudes_; }
  const QubitLayout& layout() const { return layout_; }
  int qubits() const { return layout_.total_qubits(); }
  index_t dim() const { return amplitudes_.size(); }

 private:
  Vec amplitudes_;
  QubitLayout layout_;
};

class DensityMatrix {
 public:
  DensityMatrix(Mat matrix, QubitLayout layout)
      : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    require(matrix_.rows() == layout_.dim() && matrix_.cols() == layout_.dim(),
            "DensityMatrix: shape does not match layout dimension");
    require(is_hermitian(matrix_, kCtorTol), "DensityMatrix: not Hermitian");
    require(std::abs(matrix_.trace().real() - 1.0) <= kEqTol &&
                std::abs(matrix_.trace().imag()) <= kEqTol,
            "DensityMatrix: trace is not one");
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix_,
                                          Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -kEqTol,
            "DensityMatrix: negative eigenvalue");
  }

  DensityMatrix(Mat matrix, int qubits)
      : DensityMatrix(std::move(matrix), QubitLayout::free_layout(qubits)) {}

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(),
                         psi.layout());
  }

  const Mat& matrix() const { return matrix_; }
  const QubitLayout& layout() const { return layout_; }
  int qubits() const { return layout_.total_qubits(); }
  index_t dim() const { return matrix_.rows(); }

 private:
  Mat matrix_;
  QubitLayout layout_;
};

inline PureState tensor(const PureState& a, const PureState& b) {
  check_qubit_budget(a.qubits() + b.qubits(), "tensor product");
  return PureState(kron(a.amplitudes(), b.amplitudes()),
                   concat(a.layout(), b.layout()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  check_qubit_budget(a.qubits() + b.qubits(), "tensor product");
  return DensityMatrix(kron(a.matrix(), b.matrix()),
                       concat(a.layout(), b.layout()));
}

namespace detail {

inline void check_keep_list(const std::vector<int>& keep, int n) {
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] >= 0 && keep[i] < n,
            "partial_trace: qubit index out of range");
    require(i == 0 || keep[i] > keep[i - 1],
            "partial_trace: keep list must be strictly increasing");
  }
}

}  // namespace detail

// Partial trace over the complement of `keep` (ascending qubit indices),
// usable on raw matrices; no layout bookkeeping.
inline Mat partial_trace_matrix(const Mat& rho, int n,
                                const std::vector<int>& keep) {
  require(rho.rows() == dim_for(n) && rho.cols() == dim_for(n),
          "partial_trace: matrix shape does not match qubit count");
  detail::check_keep_list(keep, n);
  std::vector<bool> kept(n, false);
  for (int q : keep) kept[q] = true;
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!kept[q]) traced.push_back(q);
  }
  const index_t keep_dim = dim_for(static_cast<int>(keep.size()));
  const index_t traced_dim = dim_for(static_cast<int>(traced.size()));
  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (index_t a = 0; a < keep_dim; ++a) {
    for (index_t b = 0; b < keep_dim; ++b) {
      cplx acc{0.0, 0.0};
      for (index_t e = 0; e < traced_dim; ++e) {
        const index_t row = scatter_bits(scatter_bits(0, keep, n, a), traced, n, e);
        const index_t col = scatter_bits(scatter_bits(0, keep, n, b), traced, n, e);
        acc += rho(row, col);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

// The reduced state's layout is a single Free block: register labels do not
// survive an arbitrary qubit selection.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  Mat reduced = partial_trace_matrix(rho.matrix(), rho.qubits(), keep);
  return DensityMatrix(hermitize(reduced),
                       QubitLayout::free_layout(static_cast<int>(keep.size())));
}

inline double trace_norm(const Mat& m) {
  require(is_hermitian(m, kEqTol), "trace_norm: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// 0.5 * ||rho - sigma||_1.
inline double trace_distance(const DensityMatrix& rho,
                             const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(),
          "trace_distance: dimension mismatch");
  return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
}

inline double overlap(const PureState& a, const PureState& b) {
  require(a.dim() == b.dim(), "overlap: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

inline double overlap(const PureState& psi, const DensityMatrix& rho) {
  require(psi.dim() == rho.dim(), "overlap: dimension mismatch");
  cplx v = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0);
  return v.real();
}

// A cut of n qubits into two disjoint, exhaustive, ascending index lists.
struct Bipartition {
  std::vector<int> side_a;
  std::vector<int> side_b;
  int total = 0;

  Bipartition(std::vector<int> a, std::vector<int> b, int n)
      : side_a(std::move(a)), side_b(std::move(b)), total(n) {
    detail::check_keep_list(side_a, n);
    detail::check_keep_list(side_b, n);
    std::vector<int> seen(n, 0);
    for (int q : side_a) seen[q]++;
    for (int q : side_b) seen[q]++;
    for (int q = 0; q < n; ++q) {
      require(seen[q] == 1, "Bipartition: sides must partition all qubits");
    }
  }

  index_t dim_a() const { return dim_for(static_cast<int>(side_a.size())); }
  index_t dim_b() const { return dim_for(static_cast<int>(side_b.size())); }
};

// Reshapes a state vector into the side_a x side_b coefficient matrix for a
// given cut. M(a, b) is the amplitude of the basis state whose side_a bits
// spell a and side_b bits spell b.
inline Mat cut_matrix(const PureState& psi, const Bipartition& cut) {
  require(psi.qubits() == cut.total,
          "cut_matrix: state and cut qubit counts differ");
  Mat m(cut.dim_a(), cut.dim_b());
  for (index_t i = 0; i < psi.dim(); ++i) {
    m(gather_bits(i, cut.side_a, cut.total),
      gather_bits(i, cut.side_b, cut.total)) = psi.amplitudes()(i);
  }
  return m;
}

struct ProductOverlapResult {
  double value = 0.0;  // largest squared overlap with any product state
  PureState left;      // maximizer on side_a
  PureState right;     // maximizer on side_b
};

// Largest |<chi_a x chi_b|psi>|^2 over product states across the cut. Equals
// the squared top Schmidt coefficient, so the maximizers are the leading
// singular vectors of the cut matrix.
inline ProductOverlapResult max_product_overlap(const PureState& psi,
                                                const Bipartition& cut) {
  Mat m = cut_matrix(psi, cut);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = svd.singularValues()(0);
  Vec left = svd.matrixU().col(0);
  Vec right = svd.matrixV().col(0).conjugate();
  return ProductOverlapResult{
      s * s,
      PureState(left, QubitLayout::free_layout(
                          static_cast<int>(cut.side_a.size()))),
      PureState(right, QubitLayout::free_layout(
                           static_cast<int>(cut.side_b.size())))};
}

}  // namespace hamlab

#endif  // HAMLAB_QSTATE_HPP_
