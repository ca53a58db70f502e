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

#ifndef HAMLAB_CORE_HPP_
#define HAMLAB_CORE_HPP_

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamlab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using index_t = std::int64_t;

// Tolerance conventions shared across the library: constructors validate at
// 1e-12, numerical identities are asserted at 1e-10, and kernel detection in
// spectral routines uses 1e-8.
inline constexpr double kCtorTol = 1e-12;
inline constexpr double kEqTol = 1e-10;
inline constexpr double kKernelTol = 1e-8;
inline constexpr double kGateUnitaryTol = 1e-10;

// Raised on malformed input files.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a precondition or internal invariant is violated.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvariantError(msg);
}

// Dense-representation budget. Operators are stored as full matrices, so the
// total qubit count of any constructed object is capped (default 12, i.e.
// 4096x4096 complex doubles at the limit). Override via HAMLAB_MAX_QUBITS.
inline int max_qubits() {
  static const int cached = [] {
    const char* env = std::getenv("HAMLAB_MAX_QUBITS");
    if (env == nullptr) return 12;
    int v = std::atoi(env);
    return v > 0 ? v : 12;
  }();
  return cached;
}

inline void check_qubit_budget(int qubits, const std::string& what) {
  if (qubits > max_qubits()) {
    throw InvariantError(what + " needs " + std::to_string(qubits) +
                         " qubits; limit is " + std::to_string(max_qubits()) +
                         " (set HAMLAB_MAX_QUBITS to raise)");
  }
}

inline index_t dim_for(int qubits) { return index_t{1} << qubits; }

inline int qubits_for_dim(index_t dim) {
  int n = 0;
  while ((index_t{1} << n) < dim) ++n;
  if ((index_t{1} << n) != dim) {
    throw InvariantError("dimension " + std::to_string(dim) +
                         " is not a power of two");
  }
  return n;
}

// Qubit 0 is the most significant bit of a basis-state index.
inline int bit_at(index_t index, int qubit, int n) {
  return static_cast<int>((index >> (n - 1 - qubit)) & 1);
}

inline index_t with_bit(index_t index, int qubit, int n, int value) {
  const index_t mask = index_t{1} << (n - 1 - qubit);
  return value ? (index | mask) : (index & ~mask);
}

// Packs the bits of `index` at the listed qubits into a small integer; the
// first listed qubit becomes the most significant bit of the result.
inline index_t gather_bits(index_t index, const std::vector<int>& qubits,
                           int n) {
  index_t out = 0;
  for (int q : qubits) out = (out << 1) | bit_at(index, q, n);
  return out;
}

inline index_t scatter_bits(index_t index, const std::vector<int>& qubits,
                            int n, index_t packed) {
  const int k = static_cast<int>(qubits.size());
  for (int i = 0; i < k; ++i) {
    index = with_bit(index, qubits[i], n, static_cast<int>((packed >> (k - 1 - i)) & 1));
  }
  return index;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

// Embeds a 2^k x 2^k operator acting on the listed qubits (first listed =
// most significant bit of the local index) into the full n-qubit space.
inline Mat expand_operator(const std::vector<int>& support, const Mat& local,
                           int n) {
  const int k = static_cast<int>(support.size());
  require(local.rows() == dim_for(k) && local.cols() == dim_for(k),
          "expand_operator: local matrix does not match support size");
  for (int q : support) {
    require(q >= 0 && q < n, "expand_operator: qubit index out of range");
  }
  const index_t dim = dim_for(n);
  const index_t local_dim = dim_for(k);
  Mat out = Mat::Zero(dim, dim);
  // Iterate over the complement once; each pass fills one local block.
  std::vector<int> rest;
  std::vector<bool> in_support(n, false);
  for (int q : support) in_support[q] = true;
  for (int q = 0; q < n; ++q) {
    if (!in_support[q]) rest.push_back(q);
  }
  const index_t rest_dim = dim_for(static_cast<int>(rest.size()));
  for (index_t e = 0; e < rest_dim; ++e) {
    const index_t base = scatter_bits(0, rest, n, e);
    for (index_t a = 0; a < local_dim; ++a) {
      const index_t row = scatter_bits(base, support, n, a);
      for (index_t b = 0; b < local_dim; ++b) {
        if (local(a, b) == cplx{0.0, 0.0}) continue;
        out(row, scatter_bits(base, support, n, b)) = local(a, b);
      }
    }
  }
  return out;
}

inline bool is_hermitian(const Mat& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_unitary(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Mat g = m.adjoint() * m;
  g -= Mat::Identity(m.rows(), m.cols());
  return g.cwiseAbs().maxCoeff() <= tol;
}

// Deterministic seeding: a fixed-increment splitmix64 step derives per-stream
// seeds so independent substreams never share state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64{seed};
}

inline Vec random_state_vector(index_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (index_t i = 0; i < dim; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
  double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

// Haar-distributed unitary via QR of a Ginibre matrix with the standard phase
// correction on R's diagonal.
inline Mat random_unitary(index_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (index_t i = 0; i < dim; ++i) {
    for (index_t j = 0; j < dim; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (index_t j = 0; j < dim; ++j) {
    cplx d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : cplx{1.0, 0.0};
  }
  return q;
}

inline Mat random_hermitian(index_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (index_t i = 0; i < dim; ++i) {
    for (index_t j = 0; j < dim; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
  }
  return hermitize(g);
}

inline Mat random_density(index_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (index_t i = 0; i < dim; ++i) {
    for (index_t j = 0; j < dim; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
  }
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// PSD matrix with an exact kernel of the requested dimension and smallest
// positive eigenvalue bounded away from zero.
inline Mat random_psd_with_kernel(index_t dim, index_t kernel_dim,
                                  std::mt19937_64& rng,
                                  double min_gap = 0.05) {
  require(kernel_dim >= 0 && kernel_dim < dim,
          "random_psd_with_kernel: kernel must be a proper subspace");
  Mat u = random_unitary(dim, rng);
  std::uniform_real_distribution<double> unif(min_gap, 1.0);
  RVec eigs = RVec::Zero(dim);
  for (index_t i = kernel_dim; i < dim; ++i) eigs(i) = unif(rng);
  return u * eigs.asDiagonal() * u.adjoint();
}

}  // namespace hamlab

#endif  // HAMLAB_CORE_HPP_
