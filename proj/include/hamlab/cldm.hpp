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

#ifndef HAMLAB_CLDM_HPP_
#define HAMLAB_CLDM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hamlab/core.hpp"
#include "hamlab/optimize.hpp"
#include "hamlab/qstate.hpp"

namespace hamlab {

// Local-marginal consistency instance: does any global n-qubit state have
// exactly these reduced density matrices? beta is the promised trace-norm
// separation of no-instances.
struct CLDMInstance {
  struct Marginal {
    std::vector<int> support;  // ascending qubit indices
    Mat rho;
  };

  std::vector<Marginal> marginals;
  int n = 0;
  int k = 0;  // max allowed support size
  double beta = 0.0;
};

inline CLDMInstance make_cldm_instance(
    std::vector<CLDMInstance::Marginal> marginals, int n, int k, double beta) {
  require(n >= 1, "CLDM instance: need at least one qubit");
  require(k >= 1 && k <= n, "CLDM instance: bad locality bound");
  require(beta >= 0.0, "CLDM instance: negative separation");
  require(!marginals.empty(), "CLDM instance: no marginals");
  for (const CLDMInstance::Marginal& m : marginals) {
    detail::check_keep_list(m.support, n);
    require(!m.support.empty(), "CLDM instance: empty marginal support");
    require(static_cast<int>(m.support.size()) <= k,
            "CLDM instance: marginal wider than the locality bound");
    // Constructor side effects validate Hermiticity, trace, positivity.
    DensityMatrix check(hermitize(m.rho),
                        static_cast<int>(m.support.size()));
  }
  return CLDMInstance{std::move(marginals), n, k, beta};
}

inline std::vector<DensityMatrix> reduce_all(
    const DensityMatrix& rho, const std::vector<std::vector<int>>& supports) {
  std::vector<DensityMatrix> out;
  out.reserve(supports.size());
  for (const std::vector<int>& keep : supports) {
    out.push_back(partial_trace(rho, keep));
  }
  return out;
}

enum class ConsistencyOutcome { Consistent, Inconsistent, Indeterminate };

inline std::string to_string(ConsistencyOutcome o) {
  switch (o) {
    case ConsistencyOutcome::Consistent: return "consistent";
    case ConsistencyOutcome::Inconsistent: return "inconsistent";
    case ConsistencyOutcome::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct Verdict {
  ConsistencyOutcome outcome = ConsistencyOutcome::Indeterminate;
  std::optional<DensityMatrix> witness;
  double max_violation = 0.0;  // worst marginal deviation in ||.||_1
};

namespace detail {

// Eigenvalue projection onto the probability simplex, i.e. the nearest (in
// Frobenius norm) PSD unit-trace matrix.
inline Mat project_density_cone(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(sigma));
  RVec lam = es.eigenvalues();
  const int d = static_cast<int>(lam.size());
  RVec sorted = lam;
  std::sort(sorted.data(), sorted.data() + d, std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (int i = 0; i < d; ++i) {
    cumulative += sorted(i);
    const double candidate = (cumulative - 1.0) / (i + 1);
    if (sorted(i) - candidate > 0.0) theta = candidate;
  }
  RVec clipped = (lam.array() - theta).cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Frobenius projection onto the affine set {sigma : Tr_rest(sigma) = rho_i}.
// The stacked constraint map T has adjoint "embed against identity", and the
// correction is T^+ applied through the pseudo-inverse of T T^dagger,
// precomputed once per instance.
class MarginalProjector {
 public:
  MarginalProjector(const CLDMInstance& inst) : inst_(&inst) {
    offsets_.push_back(0);
    for (const CLDMInstance::Marginal& m : inst.marginals) {
      const index_t d = dim_for(static_cast<int>(m.support.size()));
      offsets_.push_back(offsets_.back() + d * d);
    }
    const index_t rows = offsets_.back();
    Mat gram = Mat::Zero(rows, rows);
    // Column by column: push each constraint-space basis matrix through
    // T T^dagger = (partial traces) o (identity embeddings).
    for (std::size_t j = 0; j < inst.marginals.size(); ++j) {
      const std::vector<int>& supp_j = inst.marginals[j].support;
      const index_t dj = dim_for(static_cast<int>(supp_j.size()));
      for (index_t col = 0; col < dj * dj; ++col) {
        Mat basis = Mat::Zero(dj, dj);
        basis(col / dj, col % dj) = 1.0;
        Mat embedded = expand_operator(supp_j, basis, inst.n);
        for (std::size_t i = 0; i < inst.marginals.size(); ++i) {
          Mat traced = partial_trace_matrix(embedded, inst.n,
                                            inst.marginals[i].support);
          const index_t di = traced.rows();
          for (index_t r = 0; r < di * di; ++r) {
            gram(offsets_[i] + r, offsets_[j] + col) = traced(r / di, r % di);
          }
        }
      }
    }
    // Hermitian PSD pseudo-inverse with a relative eigenvalue cutoff.
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(gram));
    const double cutoff = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
    Vec inv = Vec::Zero(rows);
    for (index_t i = 0; i < rows; ++i) {
      if (es.eigenvalues()(i) > cutoff) inv(i) = 1.0 / es.eigenvalues()(i);
    }
    pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  }

  Mat project(const Mat& sigma) const {
    const index_t rows = offsets_.back();
    Vec residual(rows);
    for (std::size_t i = 0; i < inst_->marginals.size(); ++i) {
      Mat diff = partial_trace_matrix(sigma, inst_->n,
                                      inst_->marginals[i].support) -
                 inst_->marginals[i].rho;
      const index_t di = diff.rows();
      for (index_t r = 0; r < di * di; ++r) {
        residual(offsets_[i] + r) = diff(r / di, r % di);
      }
    }
    Vec correction = pinv_ * residual;
    Mat out = sigma;
    for (std::size_t i = 0; i < inst_->marginals.size(); ++i) {
      const index_t di =
          dim_for(static_cast<int>(inst_->marginals[i].support.size()));
      Mat block(di, di);
      for (index_t r = 0; r < di * di; ++r) {
        block(r / di, r % di) = correction(offsets_[i] + r);
      }
      out -= expand_operator(inst_->marginals[i].support, block, inst_->n);
    }
    return out;
  }

 private:
  const CLDMInstance* inst_;
  std::vector<index_t> offsets_;
  Mat pinv_;
};

inline double marginal_residual(const CLDMInstance& inst, const Mat& sigma) {
  double worst = 0.0;
  for (const CLDMInstance::Marginal& m : inst.marginals) {
    Mat diff =
        partial_trace_matrix(sigma, inst.n, m.support) - m.rho;
    worst = std::max(worst, trace_norm(hermitize(diff)));
  }
  return worst;
}

// When supports are pairwise disjoint the tensor product of the prescribed
// marginals (padded maximally mixed elsewhere) is feasible outright; check it
// before spending iterations.
inline std::optional<Mat> disjoint_candidate(const CLDMInstance& inst) {
  std::vector<int> owner(inst.n, -1);
  for (std::size_t i = 0; i < inst.marginals.size(); ++i) {
    for (int q : inst.marginals[i].support) {
      if (owner[q] != -1) return std::nullopt;
      owner[q] = static_cast<int>(i);
    }
  }
  // Supports must also be contiguous in qubit order for a plain kron.
  for (const CLDMInstance::Marginal& m : inst.marginals) {
    for (std::size_t q = 1; q < m.support.size(); ++q) {
      if (m.support[q] != m.support[q - 1] + 1) return std::nullopt;
    }
  }
  Mat sigma = Mat::Ones(1, 1);
  // Walk qubits in order, appending marginal blocks and identity fillers.
  int q = 0;
  while (q < inst.n) {
    bool matched = false;
    for (const CLDMInstance::Marginal& m : inst.marginals) {
      if (m.support.front() == q) {
        sigma = kron(sigma, m.rho);
        q += static_cast<int>(m.support.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      sigma = kron(sigma, 0.5 * Mat::Identity(2, 2));
      ++q;
    }
  }
  return sigma;
}

}  // namespace detail

struct ConsistencyOptions {
  int max_iter = 5000;
  double tol = 1e-8;
  int restarts = 10;
  int stall_window = 100;
};

// Feasibility search over global density matrices by alternating projection
// between the density-matrix cone and the affine marginal set. Verdicts:
// consistent when some iterate's marginals all match within tol;
// inconsistent when every restart stalls at a residual above beta/2;
// indeterminate otherwise (and on non-promise inputs).
inline Verdict consistency_decide(const CLDMInstance& inst,
                                  const ConsistencyOptions& options,
                                  std::uint64_t rng_seed) {
  require(inst.n <= 6, "consistency_decide: more than six qubits");
  require(options.max_iter >= 1 && options.restarts >= 1,
          "consistency_decide: bad iteration budget");
  require(options.tol > 0.0, "consistency_decide: tolerance must be positive");
  const index_t dim = dim_for(inst.n);

  if (std::optional<Mat> direct = detail::disjoint_candidate(inst)) {
    const double residual = detail::marginal_residual(inst, *direct);
    if (residual <= options.tol) {
      return Verdict{ConsistencyOutcome::Consistent,
                     DensityMatrix(hermitize(*direct), inst.n), residual};
    }
  }

  detail::MarginalProjector projector(inst);
  double best_stalled = std::numeric_limits<double>::infinity();
  bool all_stalled = true;
  for (int r = 0; r < options.restarts; ++r) {
    std::mt19937_64 rng = make_rng(derive_seed(rng_seed, r));
    Mat sigma = r == 0 ? Mat(Mat::Identity(dim, dim) / static_cast<double>(dim))
                       : random_density(dim, rng);
    double residual = std::numeric_limits<double>::max();
    double window_best = residual;
    int since_improvement = 0;
    bool stalled = false;
    for (int it = 0; it < options.max_iter; ++it) {
      sigma = detail::project_density_cone(projector.project(sigma));
      residual = detail::marginal_residual(inst, sigma);
      if (residual <= options.tol) {
        return Verdict{ConsistencyOutcome::Consistent,
                       DensityMatrix(hermitize(sigma) /
                                         hermitize(sigma).trace().real(),
                                     inst.n),
                       residual};
      }
      if (residual <
          window_best - std::max(1e-12, 1e-6 * window_best)) {
        window_best = residual;
        since_improvement = 0;
      } else if (++since_improvement >= options.stall_window) {
        stalled = true;
        break;
      }
    }
    if (!stalled) all_stalled = false;
    best_stalled = std::min(best_stalled, window_best);
  }
  Verdict out;
  out.max_violation = best_stalled;
  out.outcome = (all_stalled && best_stalled > 0.5 * inst.beta)
                    ? ConsistencyOutcome::Inconsistent
                    : ConsistencyOutcome::Indeterminate;
  return out;
}

inline Verdict consistency_decide(const CLDMInstance& inst,
                                  std::uint64_t rng_seed = 0) {
  return consistency_decide(inst, ConsistencyOptions{}, rng_seed);
}

// Per-term separable proof: classical reduced matrices for both sides of
// every Hamiltonian term. Sides a term does not touch hold the scalar 1.
struct SLHProof {
  struct TermMarginals {
    Mat rho_a;  // over support() intersect side A, ascending
    Mat rho_b;  // over support() intersect side B, ascending
  };
  std::vector<TermMarginals> terms;
};

namespace detail {

inline std::vector<int> side_positions(const std::vector<int>& side,
                                       const std::vector<int>& support) {
  // Positions of support-members within the (sorted) side list.
  std::vector<int> out;
  for (int q : support) {
    const auto it = std::lower_bound(side.begin(), side.end(), q);
    if (it != side.end() && *it == q) {
      out.push_back(static_cast<int>(it - side.begin()));
    }
  }
  return out;
}

inline std::vector<int> side_members(const std::vector<int>& side,
                                     const std::vector<int>& support) {
  std::vector<int> out;
  for (int q : support) {
    if (std::binary_search(side.begin(), side.end(), q)) out.push_back(q);
  }
  return out;
}

}  // namespace detail

// Reduces a product state to per-term proof marginals. The input must be a
// product across the instance cut; anything entangled is refused.
inline SLHProof honest_prover(const SLHInstance& inst,
                              const DensityMatrix& product_state) {
  require(product_state.qubits() == inst.n,
          "honest_prover: state size mismatch");
  DensityMatrix rho_a = partial_trace(product_state, inst.cut.side_a);
  DensityMatrix rho_b = partial_trace(product_state, inst.cut.side_b);
  // Rebuild the product in the original qubit order and compare.
  Mat rebuilt(product_state.dim(), product_state.dim());
  for (index_t i = 0; i < product_state.dim(); ++i) {
    for (index_t j = 0; j < product_state.dim(); ++j) {
      rebuilt(i, j) =
          rho_a.matrix()(gather_bits(i, inst.cut.side_a, inst.n),
                         gather_bits(j, inst.cut.side_a, inst.n)) *
          rho_b.matrix()(gather_bits(i, inst.cut.side_b, inst.n),
                         gather_bits(j, inst.cut.side_b, inst.n));
    }
  }
  require((rebuilt - product_state.matrix()).cwiseAbs().maxCoeff() <= 1e-8,
          "honest_prover: state is not a product across the cut");

  SLHProof proof;
  for (const SLHInstance::Term& term : inst.terms) {
    const std::vector<int> pos_a =
        detail::side_positions(inst.cut.side_a, term.support);
    const std::vector<int> pos_b =
        detail::side_positions(inst.cut.side_b, term.support);
    SLHProof::TermMarginals tm{Mat::Ones(1, 1), Mat::Ones(1, 1)};
    if (!pos_a.empty()) {
      tm.rho_a = partial_trace_matrix(rho_a.matrix(),
                                      static_cast<int>(inst.cut.side_a.size()),
                                      pos_a);
    }
    if (!pos_b.empty()) {
      tm.rho_b = partial_trace_matrix(rho_b.matrix(),
                                      static_cast<int>(inst.cut.side_b.size()),
                                      pos_b);
    }
    proof.terms.push_back(std::move(tm));
  }
  return proof;
}

struct SLHVerdict {
  bool accept = false;
  double energy = 0.0;
  Verdict side_a;
  Verdict side_b;
};

using ConsistencyOracle =
    std::function<Verdict(const CLDMInstance&, std::uint64_t)>;

inline ConsistencyOracle default_consistency_oracle() {
  return [](const CLDMInstance& inst, std::uint64_t seed) {
    return consistency_decide(inst, seed);
  };
}

// Verification protocol for separable local Hamiltonians: check each side's
// proof marginals for mutual consistency (separation beta = (b-a)/(8m)), then
// accept iff the claimed energy lands below the midpoint (a+b)/2.
// Indeterminate consistency verdicts reject - conservative soundness.
inline SLHVerdict slh_verifier(
    const SLHInstance& inst, const SLHProof& proof,
    const ConsistencyOracle& oracle = default_consistency_oracle(),
    std::uint64_t rng_seed = 0) {
  require(proof.terms.size() == inst.terms.size(),
          "slh_verifier: proof shape does not match the instance");
  const double beta =
      (inst.b - inst.a) / (8.0 * static_cast<double>(inst.terms.size()));

  // Assemble and validate each side's marginal collection.
  std::vector<CLDMInstance::Marginal> marg_a, marg_b;
  double energy = 0.0;
  for (std::size_t i = 0; i < inst.terms.size(); ++i) {
    const SLHInstance::Term& term = inst.terms[i];
    const SLHProof::TermMarginals& tm = proof.terms[i];
    const std::vector<int> mem_a =
        detail::side_members(inst.cut.side_a, term.support);
    const std::vector<int> mem_b =
        detail::side_members(inst.cut.side_b, term.support);
    require(tm.rho_a.rows() == dim_for(static_cast<int>(mem_a.size())) &&
                tm.rho_a.cols() == tm.rho_a.rows(),
            "slh_verifier: A-side marginal shape mismatch");
    require(tm.rho_b.rows() == dim_for(static_cast<int>(mem_b.size())) &&
                tm.rho_b.cols() == tm.rho_b.rows(),
            "slh_verifier: B-side marginal shape mismatch");
    if (!mem_a.empty()) {
      DensityMatrix check(hermitize(tm.rho_a),
                          static_cast<int>(mem_a.size()));
      marg_a.push_back({detail::side_positions(inst.cut.side_a, term.support),
                        hermitize(tm.rho_a)});
    }
    if (!mem_b.empty()) {
      DensityMatrix check(hermitize(tm.rho_b),
                          static_cast<int>(mem_b.size()));
      marg_b.push_back({detail::side_positions(inst.cut.side_b, term.support),
                        hermitize(tm.rho_b)});
    }

    // E += tr(H_i (rho_Ai (x) rho_Bi)), assembled in the term's qubit order.
    const index_t td = term.matrix.rows();
    const int tk = static_cast<int>(term.support.size());
    std::vector<int> local_a, local_b;
    for (int p = 0; p < tk; ++p) {
      const bool in_a = std::binary_search(inst.cut.side_a.begin(),
                                           inst.cut.side_a.end(),
                                           term.support[p]);
      (in_a ? local_a : local_b).push_back(p);
    }
    cplx acc{0.0, 0.0};
    for (index_t r = 0; r < td; ++r) {
      for (index_t c = 0; c < td; ++c) {
        const cplx rho_val =
            tm.rho_a(gather_bits(c, local_a, tk), gather_bits(r, local_a, tk)) *
            tm.rho_b(gather_bits(c, local_b, tk), gather_bits(r, local_b, tk));
        acc += term.matrix(r, c) * rho_val;
      }
    }
    energy += acc.real();
  }

  SLHVerdict out;
  out.energy = energy;
  const int na = static_cast<int>(inst.cut.side_a.size());
  const int nb = static_cast<int>(inst.cut.side_b.size());
  int kmax_a = 1, kmax_b = 1;
  for (const CLDMInstance::Marginal& m : marg_a) {
    kmax_a = std::max(kmax_a, static_cast<int>(m.support.size()));
  }
  for (const CLDMInstance::Marginal& m : marg_b) {
    kmax_b = std::max(kmax_b, static_cast<int>(m.support.size()));
  }
  out.side_a = marg_a.empty()
                   ? Verdict{ConsistencyOutcome::Consistent, std::nullopt, 0.0}
                   : oracle(make_cldm_instance(marg_a, na, kmax_a, beta),
                            derive_seed(rng_seed, 1));
  out.side_b = marg_b.empty()
                   ? Verdict{ConsistencyOutcome::Consistent, std::nullopt, 0.0}
                   : oracle(make_cldm_instance(marg_b, nb, kmax_b, beta),
                            derive_seed(rng_seed, 2));
  out.accept = out.side_a.outcome == ConsistencyOutcome::Consistent &&
               out.side_b.outcome == ConsistencyOutcome::Consistent &&
               energy < 0.5 * (inst.a + inst.b);
  return out;
}

}  // namespace hamlab

#endif  // HAMLAB_CLDM_HPP_
