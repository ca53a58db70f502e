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

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "hamlab/qstate.hpp"

using namespace hamlab;

namespace {

// Independent partial trace: explicit double loop over kept and traced
// indices, assembled with the raw bit helpers.
Mat partial_trace_oracle(const Mat& rho, int n, const std::vector<int>& keep) {
  std::vector<int> comp;
  for (int q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      comp.push_back(q);
    }
  }
  const index_t dk = dim_for(static_cast<int>(keep.size()));
  const index_t dc = dim_for(static_cast<int>(comp.size()));
  Mat out = Mat::Zero(dk, dk);
  for (index_t a = 0; a < dk; ++a) {
    for (index_t b = 0; b < dk; ++b) {
      for (index_t e = 0; e < dc; ++e) {
        const index_t i = scatter_bits(scatter_bits(0, comp, n, e), keep, n, a);
        const index_t j = scatter_bits(scatter_bits(0, comp, n, e), keep, n, b);
        out(a, b) += rho(i, j);
      }
    }
  }
  return out;
}

// Independent maximizer for the product overlap: alternating power iteration
// on the cut matrix, restarted from random points.
double product_overlap_oracle(const PureState& psi, const Bipartition& cut,
                              int restarts, std::mt19937_64& rng) {
  const index_t da = cut.dim_a();
  const index_t db = cut.dim_b();
  Mat m(da, db);
  for (index_t i = 0; i < psi.dim(); ++i) {
    m(gather_bits(i, cut.side_a, cut.total),
      gather_bits(i, cut.side_b, cut.total)) = psi.amplitudes()(i);
  }
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Vec a = random_state_vector(da, rng);
    Vec b(db);
    for (int it = 0; it < 300; ++it) {
      b = m.adjoint() * a;
      if (b.norm() < 1e-15) break;
      b /= b.norm();
      a = m * b;
      if (a.norm() < 1e-15) break;
      a /= a.norm();
    }
    best = std::max(best, std::norm((a.adjoint() * m * b)(0)));
  }
  return best;
}

}  // namespace

TEST_CASE("layout offsets, sizes, and merging") {
  QubitLayout layout({{Label::C, 2}, {Label::A, 1}, {Label::P1, 3}});
  CHECK(layout.total_qubits() == 6);
  CHECK(layout.dim() == 64);
  CHECK(layout.offset(Label::C) == 0);
  CHECK(layout.offset(Label::A) == 2);
  CHECK(layout.offset(Label::P1) == 3);
  CHECK(layout.size(Label::P1) == 3);
  CHECK(layout.has(Label::A));
  CHECK_FALSE(layout.has(Label::P2));
  CHECK(layout.qubits(Label::P1) == std::vector<int>{3, 4, 5});

  // Zero-size parts vanish; adjacent anonymous blocks merge.
  QubitLayout dropped({{Label::A, 1}, {Label::P2, 0}, {Label::Free, 2},
                       {Label::Free, 1}});
  CHECK_FALSE(dropped.has(Label::P2));
  CHECK(dropped.total_qubits() == 4);
  CHECK(dropped.parts().size() == 2);
}

TEST_CASE("layout rejects duplicate names") {
  CHECK_THROWS_AS(QubitLayout({{Label::A, 1}, {Label::A, 2}}), InvariantError);
  QubitLayout a({{Label::A, 1}});
  QubitLayout b({{Label::A, 2}});
  CHECK_THROWS_AS(concat(a, b), InvariantError);
  QubitLayout c({{Label::P1, 2}});
  CHECK(concat(a, c).total_qubits() == 3);
  CHECK(concat(a, c).offset(Label::P1) == 1);
}

TEST_CASE("state constructors enforce their invariants") {
  CHECK_THROWS_AS(PureState(Vec::Ones(4), 2), InvariantError);  // norm 2
  CHECK_NOTHROW(PureState(Vec::Ones(4) / 2.0, 2));
  CHECK_THROWS_AS(PureState(Vec::Ones(4) / 2.0, QubitLayout({{Label::A, 3}})),
                  InvariantError);  // wrong dimension

  Mat not_hermitian = Mat::Zero(2, 2);
  not_hermitian(0, 1) = 1.0;
  CHECK_THROWS_AS(DensityMatrix(not_hermitian, 1), InvariantError);
  CHECK_THROWS_AS(DensityMatrix(Mat::Identity(2, 2), 1),
                  InvariantError);  // trace 2
  Mat indefinite = Mat::Zero(2, 2);
  indefinite(0, 0) = 1.5;
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(indefinite, 1), InvariantError);
  CHECK_NOTHROW(DensityMatrix(0.5 * Mat::Identity(2, 2), 1));
}

TEST_CASE("bit helpers agree and invert each other") {
  std::mt19937_64 rng = make_rng(11);
  const int n = 7;
  std::uniform_int_distribution<index_t> idx(0, dim_for(n) - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const index_t i = idx(rng);
    std::vector<int> qubits = {1, 3, 6};
    const index_t packed = gather_bits(i, qubits, n);
    // First listed qubit is the most significant packed bit.
    CHECK(static_cast<int>(packed >> 2) == bit_at(i, 1, n));
    CHECK(((packed >> 1) & 1) == static_cast<index_t>(bit_at(i, 3, n)));
    CHECK((packed & 1) == static_cast<index_t>(bit_at(i, 6, n)));
    CHECK(gather_bits(scatter_bits(i, qubits, n, packed), qubits, n) ==
          packed);
    CHECK(scatter_bits(i, qubits, n, packed) == i);
  }
}

TEST_CASE("tensor products follow the most-significant-first convention") {
  PureState a = PureState::basis(QubitLayout({{Label::A, 2}}), 2);
  PureState b = PureState::basis(QubitLayout({{Label::P1, 1}}), 1);
  PureState ab = tensor(a, b);
  CHECK(ab.qubits() == 3);
  // index = 2 * 2 + 1
  CHECK(std::abs(ab.amplitudes()(5) - cplx{1.0, 0.0}) < 1e-15);

  std::mt19937_64 rng = make_rng(3);
  DensityMatrix da(random_density(4, rng), 2);
  DensityMatrix db(random_density(2, rng), 1);
  DensityMatrix dd = tensor(da, db);
  CHECK(dd.dim() == 8);
  CHECK(std::abs(dd.matrix().trace().real() - 1.0) < 1e-12);
  CHECK((dd.matrix() - kron(da.matrix(), db.matrix())).norm() < 1e-14);
}

TEST_CASE("partial trace matches the double-index oracle") {
  std::mt19937_64 rng = make_rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4;
    Mat rho = random_density(dim_for(n), rng);
    const std::vector<std::vector<int>> keeps = {
        {0}, {3}, {1, 2}, {0, 3}, {0, 1, 2}, {0, 1, 2, 3}};
    for (const auto& keep : keeps) {
      Mat got = partial_trace_matrix(rho, n, keep);
      Mat want = partial_trace_oracle(rho, n, keep);
      REQUIRE((got - want).norm() < 1e-12);
      CHECK(std::abs(got.trace().real() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("partial trace composes and respects products") {
  std::mt19937_64 rng = make_rng(19);
  Mat rho_a = random_density(4, rng);
  Mat rho_b = random_density(4, rng);
  DensityMatrix joint(kron(rho_a, rho_b), 4);
  DensityMatrix left = partial_trace(joint, {0, 1});
  DensityMatrix right = partial_trace(joint, {2, 3});
  CHECK((left.matrix() - rho_a).norm() < 1e-12);
  CHECK((right.matrix() - rho_b).norm() < 1e-12);

  // Tracing in two stages equals tracing at once.
  Mat rho = random_density(16, rng);
  Mat once = partial_trace_matrix(rho, 4, {1});
  Mat stage1 = partial_trace_matrix(rho, 4, {1, 2});
  Mat twice = partial_trace_matrix(stage1, 2, {0});
  CHECK((once - twice).norm() < 1e-12);
}

TEST_CASE("partial trace rejects bad keep lists") {
  std::mt19937_64 rng = make_rng(23);
  Mat rho = random_density(8, rng);
  CHECK_THROWS_AS(partial_trace_matrix(rho, 3, {2, 1}), InvariantError);
  CHECK_THROWS_AS(partial_trace_matrix(rho, 3, {0, 0}), InvariantError);
  CHECK_THROWS_AS(partial_trace_matrix(rho, 3, {3}), InvariantError);
}

TEST_CASE("trace distance is a unitary-invariant metric") {
  std::mt19937_64 rng = make_rng(29);
  DensityMatrix rho(random_density(8, rng), 3);
  DensityMatrix sigma(random_density(8, rng), 3);
  DensityMatrix tau(random_density(8, rng), 3);
  const double d_rs = trace_distance(rho, sigma);
  CHECK(d_rs >= 0.0);
  CHECK(d_rs <= 1.0 + 1e-12);
  CHECK(trace_distance(rho, rho) < 1e-12);
  CHECK(std::abs(trace_distance(sigma, rho) - d_rs) < 1e-12);
  CHECK(d_rs <= trace_distance(rho, tau) + trace_distance(tau, sigma) + 1e-12);

  Mat u = random_unitary(8, rng);
  DensityMatrix rho_u(u * rho.matrix() * u.adjoint(), 3);
  DensityMatrix sigma_u(u * sigma.matrix() * u.adjoint(), 3);
  CHECK(std::abs(trace_distance(rho_u, sigma_u) - d_rs) < 1e-12);
}

TEST_CASE("pure-state trace distance equals sqrt(1 - overlap)") {
  std::mt19937_64 rng = make_rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    PureState a(random_state_vector(8, rng), 3);
    PureState b(random_state_vector(8, rng), 3);
    const double td = trace_distance(DensityMatrix::from_pure(a),
                                     DensityMatrix::from_pure(b));
    CHECK(std::abs(td - std::sqrt(1.0 - overlap(a, b))) < 1e-10);
  }
}

TEST_CASE("overlap agrees with direct inner products") {
  std::mt19937_64 rng = make_rng(37);
  PureState a(random_state_vector(8, rng), 3);
  PureState b(random_state_vector(8, rng), 3);
  CHECK(std::abs(overlap(a, b) -
                 std::norm(a.amplitudes().dot(b.amplitudes()))) < 1e-14);
  CHECK(std::abs(overlap(a, a) - 1.0) < 1e-12);
  DensityMatrix rho(random_density(8, rng), 3);
  const double want =
      ((a.amplitudes().adjoint() * rho.matrix() * a.amplitudes())(0)).real();
  CHECK(std::abs(overlap(a, rho) - want) < 1e-14);
}

TEST_CASE("bipartition validation") {
  CHECK_NOTHROW(Bipartition({0, 2}, {1, 3}, 4));
  CHECK_NOTHROW(Bipartition({0, 1}, {}, 2));  // empty side is legal
  CHECK_THROWS_AS(Bipartition({0, 1}, {1, 2}, 3), InvariantError); // overlap
  CHECK_THROWS_AS(Bipartition({0}, {2}, 3), InvariantError);       // missing
  CHECK_THROWS_AS(Bipartition({1, 0}, {2}, 3), InvariantError);    // order
}

TEST_CASE("cut matrix spells amplitudes by side indices") {
  std::mt19937_64 rng = make_rng(41);
  PureState psi(random_state_vector(16, rng), 4);
  Bipartition cut({0, 2}, {1, 3}, 4);
  Mat m = cut_matrix(psi, cut);
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 4);
  for (index_t i = 0; i < 16; ++i) {
    const index_t a = gather_bits(i, cut.side_a, 4);
    const index_t b = gather_bits(i, cut.side_b, 4);
    CHECK(std::abs(m(a, b) - psi.amplitudes()(i)) < 1e-15);
  }
}

TEST_CASE("product overlap on known states") {
  // A product state across the cut overlaps itself perfectly.
  std::mt19937_64 rng = make_rng(43);
  Vec left = random_state_vector(4, rng);
  Vec right = random_state_vector(4, rng);
  PureState product(kron(left, right), 4);
  Bipartition cut({0, 1}, {2, 3}, 4);
  ProductOverlapResult r = max_product_overlap(product, cut);
  CHECK(std::abs(r.value - 1.0) < 1e-12);

  // A Bell pair has top Schmidt coefficient 1/sqrt(2).
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  ProductOverlapResult rb =
      max_product_overlap(PureState(bell, 2), Bipartition({0}, {1}, 2));
  CHECK(std::abs(rb.value - 0.5) < 1e-12);
}

TEST_CASE("product overlap matches the alternating-iteration oracle") {
  std::mt19937_64 rng = make_rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    PureState psi(random_state_vector(16, rng), 4);
    Bipartition cut({0, 1}, {2, 3}, 4);
    ProductOverlapResult r = max_product_overlap(psi, cut);
    const double want = product_overlap_oracle(psi, cut, 50, rng);
    CHECK(std::abs(r.value - want) < 1e-9);
    // The returned maximizers achieve the reported value.
    const double achieved = std::norm(
        kron(r.left.amplitudes(), r.right.amplitudes()).dot(psi.amplitudes()));
    CHECK(std::abs(achieved - r.value) < 1e-12);
  }
}

TEST_CASE("random generators meet their contracts") {
  std::mt19937_64 rng = make_rng(53);
  Mat u = random_unitary(8, rng);
  CHECK(is_unitary(u, 1e-12));
  Mat h = random_hermitian(8, rng);
  CHECK(is_hermitian(h, 1e-14));
  Mat rho = random_density(8, rng);
  CHECK_NOTHROW(DensityMatrix(rho, 3));

  Mat psd = random_psd_with_kernel(16, 5, rng);
  Eigen::SelfAdjointEigenSolver<Mat> es(psd, Eigen::EigenvaluesOnly);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(es.eigenvalues()(k)) < 1e-10);
  CHECK(es.eigenvalues()(5) >= 0.05 - 1e-12);
}

TEST_CASE("seed derivation separates streams deterministically") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  std::mt19937_64 a = make_rng(99), b = make_rng(99);
  CHECK(a() == b());
}
