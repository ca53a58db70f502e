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

#ifndef HAMLAB_SPARSE_HPP_
#define HAMLAB_SPARSE_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "hamlab/circuit.hpp"
#include "hamlab/core.hpp"
#include "hamlab/kitaev.hpp"
#include "hamlab/qstate.hpp"

namespace hamlab {

// Hermitian operator exposed through a row oracle: row(i) lists the (column,
// value) pairs of every nonzero in row i, columns ascending. The declared
// sparsity is a hard cap checked on every access.
class RowSparseOperator {
 public:
  using Entry = std::pair<index_t, cplx>;
  using Oracle = std::function<std::vector<Entry>(index_t)>;

  RowSparseOperator(index_t dimension, int declared_sparsity, Oracle oracle)
      : dim_(dimension),
        sparsity_(declared_sparsity),
        oracle_(std::move(oracle)) {
    require(dim_ >= 1, "row-sparse operator: empty dimension");
    require(sparsity_ >= 0, "row-sparse operator: negative sparsity");
    require(static_cast<bool>(oracle_), "row-sparse operator: null oracle");
  }

  std::vector<Entry> row(index_t i) const {
    require(i >= 0 && i < dim_, "row oracle: index out of range");
    std::vector<Entry> entries = oracle_(i);
    require(static_cast<int>(entries.size()) <= sparsity_,
            "row oracle: row exceeds declared sparsity");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      require(entries[k].first >= 0 && entries[k].first < dim_,
              "row oracle: column out of range");
      require(k == 0 || entries[k].first > entries[k - 1].first,
              "row oracle: columns must be strictly ascending");
    }
    return entries;
  }

  index_t dim() const { return dim_; }
  int declared_sparsity() const { return sparsity_; }

  Vec apply(const Vec& x) const {
    require(x.size() == dim_, "row-sparse apply: dimension mismatch");
    Vec y = Vec::Zero(dim_);
    for (index_t i = 0; i < dim_; ++i) {
      cplx acc{0.0, 0.0};
      for (const Entry& e : row(i)) acc += e.second * x(e.first);
      y(i) = acc;
    }
    return y;
  }

  Mat dense() const {
    Mat m = Mat::Zero(dim_, dim_);
    for (index_t i = 0; i < dim_; ++i) {
      for (const Entry& e : row(i)) m(i, e.first) = e.second;
    }
    require(is_hermitian(m, kEqTol), "row-sparse operator: not Hermitian");
    return m;
  }

 private:
  index_t dim_;
  int sparsity_;
  Oracle oracle_;
};

namespace detail {

inline int max_nonzeros_per_row(const Mat& m) {
  int best = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int count = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != cplx{0.0, 0.0}) ++count;
    }
    best = std::max(best, count);
  }
  return best;
}

// Structural row oracle for a local matrix embedded at `support`: row i of
// the embedding reads off row gather(i) of the local matrix.
inline RowSparseOperator embedded_oracle(const std::vector<int>& support,
                                         const Mat& local, int n,
                                         int sparsity) {
  const index_t local_dim = local.rows();
  auto oracle = [support, local, n, local_dim](index_t i) {
    std::vector<RowSparseOperator::Entry> out;
    const index_t a = gather_bits(i, support, n);
    for (index_t b = 0; b < local_dim; ++b) {
      const cplx v = local(a, b);
      if (v == cplx{0.0, 0.0}) continue;
      out.emplace_back(scatter_bits(i, support, n, b), v);
    }
    return out;
  };
  return RowSparseOperator(dim_for(n), sparsity, std::move(oracle));
}

}  // namespace detail

// Oracle for a k-local Hermitian term embedded in an n-qubit space. Rows are
// produced structurally; no 2^n-sized matrix is ever formed.
inline RowSparseOperator row_oracle_for_term(const std::vector<int>& support,
                                             const Mat& local, int n) {
  require(is_hermitian(local, kEqTol),
          "row_oracle_for_term: local term is not Hermitian");
  const int k = static_cast<int>(support.size());
  require(local.rows() == dim_for(k) && local.cols() == local.rows(),
          "row_oracle_for_term: local term does not match support");
  for (int q : support) {
    require(q >= 0 && q < n, "row_oracle_for_term: qubit out of range");
  }
  return detail::embedded_oracle(support, local, n,
                                 detail::max_nonzeros_per_row(local));
}

// Oracle for a gate treated as an operator on the full space. A controlled
// register swap is a permutation: exactly one nonzero per row, however wide
// its registers are.
inline RowSparseOperator row_oracle_for_gate(const Gate& g, int n) {
  for (int q : g.support()) {
    require(q < n, "row_oracle_for_gate: gate acts outside the space");
  }
  if (g.kind == Gate::Kind::ControlledRegisterSwap) {
    Gate copy = g;
    auto oracle = [copy, n](index_t i) {
      // Involution: the nonzero in row i sits at i's image.
      return std::vector<RowSparseOperator::Entry>{
          {cswap_image(copy, i, n), cplx{1.0, 0.0}}};
    };
    return RowSparseOperator(dim_for(n), 1, std::move(oracle));
  }
  const Mat local = gate_local_matrix(g);
  return detail::embedded_oracle(g.targets, local, n,
                                 detail::max_nonzeros_per_row(local));
}

// Oracle for one propagation term. Each row holds the 1/2 diagonal at clock
// t-1 or t plus the transported gate row, so a controlled register swap
// yields at most two nonzeros per row regardless of register width.
inline RowSparseOperator row_oracle_for_term(int t, const Gate& u_t,
                                             const ClockEncoding& clock,
                                             const QubitLayout& workspace) {
  require(t >= 1 && t <= clock.steps,
          "row_oracle_for_term: step out of range");
  const int w = workspace.total_qubits();
  for (int q : u_t.support()) {
    require(q < w, "row_oracle_for_term: gate acts outside the workspace");
  }
  const index_t wd = dim_for(w);
  const index_t dim = clock.dim() * wd;
  const index_t t_lo = static_cast<index_t>(t) - 1;
  const index_t t_hi = static_cast<index_t>(t);

  if (u_t.kind == Gate::Kind::ControlledRegisterSwap) {
    Gate g = u_t;
    auto oracle = [g, t_lo, t_hi, w, wd](index_t i) {
      std::vector<RowSparseOperator::Entry> out;
      const index_t c = i / wd;
      if (c != t_lo && c != t_hi) return out;
      const index_t other = (c == t_hi) ? t_lo : t_hi;
      const index_t partner = other * wd + cswap_image(g, i % wd, w);
      if (partner < i) out.emplace_back(partner, cplx{-0.5, 0.0});
      out.emplace_back(i, cplx{0.5, 0.0});
      if (partner > i) out.emplace_back(partner, cplx{-0.5, 0.0});
      return out;
    };
    return RowSparseOperator(dim, 2, std::move(oracle));
  }

  const Mat local = u_t.matrix;
  const std::vector<int> support = u_t.targets;
  const int gate_nnz = std::max(
      detail::max_nonzeros_per_row(local),
      detail::max_nonzeros_per_row(Mat(local.adjoint())));
  auto oracle = [local, support, t_lo, t_hi, w, wd](index_t i) {
    std::vector<RowSparseOperator::Entry> out;
    const index_t c = i / wd;
    if (c != t_lo && c != t_hi) return out;
    const index_t x = i % wd;
    const index_t local_dim = local.rows();
    const index_t a = gather_bits(x, support, w);
    const bool at_lower_clock = c == t_lo;
    const index_t other = at_lower_clock ? t_hi : t_lo;
    // At clock t-1 the coupling row is -1/2 U^dag; at clock t it is -1/2 U.
    // Column order: the lower-clock block precedes the diagonal one iff
    // other < c.
    if (at_lower_clock) out.emplace_back(i, cplx{0.5, 0.0});
    for (index_t b = 0; b < local_dim; ++b) {
      const cplx v = at_lower_clock ? std::conj(local(b, a)) : local(a, b);
      if (v == cplx{0.0, 0.0}) continue;
      out.emplace_back(other * wd + scatter_bits(x, support, w, b),
                       cplx{-0.5, 0.0} * v);
    }
    if (!at_lower_clock) out.emplace_back(i, cplx{0.5, 0.0});
    return out;
  };
  return RowSparseOperator(dim, 1 + gate_nnz, std::move(oracle));
}

// Exact dense spectral exponential exp(-i H time); at this scale the alpha
// accuracy contract is met with margin by construction.
inline Mat evolve_operator(const RowSparseOperator& h, double time,
                           double alpha) {
  require(alpha > 0.0, "evolve: accuracy must be positive");
  check_qubit_budget(qubits_for_dim(h.dim()), "evolution");
  Eigen::SelfAdjointEigenSolver<Mat> es(h.dense());
  Vec phases(h.dim());
  for (index_t k = 0; k < h.dim(); ++k) {
    phases(k) = std::exp(cplx{0.0, -es.eigenvalues()(k) * time});
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

inline PureState evolve(const RowSparseOperator& h, double time, double alpha,
                        const PureState& psi) {
  require(psi.dim() == h.dim(), "evolve: state dimension mismatch");
  Vec out = evolve_operator(h, time, alpha) * psi.amplitudes();
  // Spectral exponentials keep the norm to machine precision; shave the
  // residue so downstream constructors stay strict.
  out /= out.norm();
  return PureState(std::move(out), psi.layout());
}

// Register sizing for phase estimation: delta is the phase precision as a
// fraction of a full turn, epsilon the admissible failure probability.
struct PhaseEstimateConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  int t = 0;  // register bits

  static PhaseEstimateConfig make(double epsilon, double delta) {
    require(epsilon > 0.0 && epsilon < 1.0,
            "phase estimation: epsilon must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0,
            "phase estimation: delta must lie in (0,1)");
    PhaseEstimateConfig cfg;
    cfg.epsilon = epsilon;
    cfg.delta = delta;
    cfg.t = static_cast<int>(std::ceil(std::log2(1.0 / delta))) +
            static_cast<int>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * epsilon))));
    require(cfg.t >= 1, "phase estimation: register collapsed to zero bits");
    return cfg;
  }
};

// Exact outcome distribution of textbook phase estimation on a t-bit
// register. For an input with eigenphase weights {(phi_k, p_k)} readout x
// occurs with probability sum_k p_k F(phi_k - 2 pi x / 2^t), where F is the
// squared normalized Dirichlet kernel of the inverse Fourier transform.
class PhaseEstimationSampler {
 public:
  PhaseEstimationSampler(const RVec& phases, const RVec& weights, int t_bits)
      : t_bits_(t_bits) {
    require(t_bits_ >= 1 && t_bits_ <= 24,
            "phase estimation: register size out of range");
    require(phases.size() == weights.size() && phases.size() >= 1,
            "phase estimation: spectrum shape mismatch");
    require(std::abs(weights.sum() - 1.0) <= 1e-9,
            "phase estimation: weights must sum to one");
    const index_t outcomes = index_t{1} << t_bits_;
    probabilities_.assign(outcomes, 0.0);
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
      if (weights(k) <= 0.0) continue;
      for (index_t x = 0; x < outcomes; ++x) {
        const double delta =
            phases(k) - 2.0 * std::numbers::pi * static_cast<double>(x) /
                            static_cast<double>(outcomes);
        probabilities_[x] += weights(k) * kernel(delta, outcomes);
      }
    }
    double total = 0.0;
    for (double p : probabilities_) total += p;
    require(std::abs(total - 1.0) <= 1e-8,
            "phase estimation: outcome distribution does not normalize");
    cumulative_.resize(outcomes);
    double acc = 0.0;
    for (index_t x = 0; x < outcomes; ++x) {
      acc += probabilities_[x] / total;
      cumulative_[x] = acc;
    }
    cumulative_.back() = 1.0;
  }

  // Spectrum route for an explicit unitary and input state.
  PhaseEstimationSampler(const Mat& unitary, const Vec& state, int t_bits)
      : PhaseEstimationSampler(unitary_spectrum(unitary, state), t_bits) {}

  int register_bits() const { return t_bits_; }
  const std::vector<double>& outcome_probabilities() const {
    return probabilities_;
  }

  // Readout as a phase in [0, 2 pi).
  double sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(),
                                     unif(rng));
    const index_t x = it - cumulative_.begin();
    return 2.0 * std::numbers::pi * static_cast<double>(x) /
           static_cast<double>(index_t{1} << t_bits_);
  }

  // Probability that the readout lands within `delta` (fraction of a turn,
  // circular) of the given phase.
  double hit_probability(double phase, double delta) const {
    const index_t outcomes = index_t{1} << t_bits_;
    double p = 0.0;
    for (index_t x = 0; x < outcomes; ++x) {
      double frac = static_cast<double>(x) / static_cast<double>(outcomes) -
                    phase / (2.0 * std::numbers::pi);
      frac -= std::round(frac);
      if (std::abs(frac) <= delta) p += probabilities_[x];
    }
    return p;
  }

 private:
  explicit PhaseEstimationSampler(std::pair<RVec, RVec> spectrum, int t_bits)
      : PhaseEstimationSampler(spectrum.first, spectrum.second, t_bits) {}

  // Schur form of a unitary (a normal matrix) is diagonal, so the Schur basis
  // is an orthonormal eigenbasis even across degenerate eigenvalues.
  static std::pair<RVec, RVec> unitary_spectrum(const Mat& unitary,
                                                const Vec& state) {
    require(is_unitary(unitary, 1e-8), "phase estimation: input not unitary");
    require(unitary.rows() == state.size(),
            "phase estimation: state dimension mismatch");
    Eigen::ComplexSchur<Mat> schur(unitary);
    const index_t d = unitary.rows();
    RVec phases(d), weights(d);
    for (index_t k = 0; k < d; ++k) {
      double phi = std::arg(schur.matrixT()(k, k));
      if (phi < 0.0) phi += 2.0 * std::numbers::pi;
      phases(k) = phi;
      weights(k) = std::norm(schur.matrixU().col(k).dot(state));
    }
    const double total = weights.sum();
    require(std::abs(total - 1.0) <= 1e-8,
            "phase estimation: eigenweights do not normalize");
    return {phases, weights / total};
  }

  static double kernel(double delta, index_t outcomes) {
    // |1/M sum_{j<M} e^{i j delta}|^2 evaluated stably near delta = 0.
    const double m = static_cast<double>(outcomes);
    const double s = std::sin(0.5 * delta);
    if (std::abs(s) < 1e-12) return 1.0;
    const double num = std::sin(m * 0.5 * delta);
    return (num * num) / (m * m * s * s);
  }

  int t_bits_ = 0;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

// One phase-estimation run on an explicit unitary; returns the register
// readout as a phase in [0, 2 pi).
inline double phase_estimate(const Mat& unitary, const PureState& state,
                             const PhaseEstimateConfig& cfg,
                             std::uint64_t rng_seed) {
  PhaseEstimationSampler sampler(unitary, state.amplitudes(), cfg.t);
  std::mt19937_64 rng = make_rng(rng_seed);
  return sampler.sample(rng);
}

// Energy check for one normalized term: phase-estimate exp(i H_j) with error
// and precision budget (b-a)/6, then reject with probability equal to the
// estimated energy. Readouts just above pi are wrap-around underestimates of
// small eigenvalues, so the signed representative is clamped into [0, 1].
class QjVerifier {
 public:
  QjVerifier(const RowSparseOperator& h_j, const PureState& state, double a,
             double b)
      : QjVerifier(h_j.dense(), state, a, b) {}

  QjVerifier(const Mat& h_dense, const PureState& state, double a, double b) {
    require(b > a, "Qj: need b > a");
    require(state.dim() == h_dense.rows(), "Qj: state dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h_dense));
    const index_t d = state.dim();
    require(es.eigenvalues()(0) >= -1e-9 &&
                es.eigenvalues()(d - 1) <= 1.0 + 1e-9,
            "Qj: term spectrum must lie in [0, 1]");
    RVec phases(d), weights(d);
    energy_ = 0.0;
    for (index_t k = 0; k < d; ++k) {
      const double lambda = es.eigenvalues()(k);
      const double wk =
          std::norm(es.eigenvectors().col(k).dot(state.amplitudes()));
      phases(k) = std::max(lambda, 0.0);  // exp(i H) phase, already radians
      weights(k) = wk;
      energy_ += wk * lambda;
    }
    weights /= weights.sum();
    const double budget = (b - a) / 6.0;
    cfg_ = PhaseEstimateConfig::make(budget,
                                     budget / (2.0 * std::numbers::pi));
    sampler_.emplace(phases, weights, cfg_.t);
    const index_t outcomes = index_t{1} << cfg_.t;
    reject_probability_ = 0.0;
    for (index_t x = 0; x < outcomes; ++x) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(x) /
                         static_cast<double>(outcomes);
      reject_probability_ +=
          sampler_->outcome_probabilities()[x] * rejection_weight(phi);
    }
  }

  // Exact Pr(reject) over both the readout and the coin.
  double reject_probability() const { return reject_probability_; }
  double energy() const { return energy_; }
  const PhaseEstimateConfig& config() const { return cfg_; }

  bool accept(std::mt19937_64& rng) const {
    const double phi = sampler_->sample(rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return unif(rng) >= rejection_weight(phi);
  }

  static double rejection_weight(double phase) {
    const double signed_phase =
        phase > std::numbers::pi ? phase - 2.0 * std::numbers::pi : phase;
    return std::clamp(signed_phase, 0.0, 1.0);
  }

 private:
  std::optional<PhaseEstimationSampler> sampler_;
  PhaseEstimateConfig cfg_;
  double reject_probability_ = 0.0;
  double energy_ = 0.0;
};

inline bool qj_verifier(const RowSparseOperator& h_j, const PureState& state,
                        double a, double b, std::uint64_t rng_seed) {
  QjVerifier v(h_j, state, a, b);
  std::mt19937_64 rng = make_rng(rng_seed);
  return v.accept(rng);
}

// Full energy test: pick one term uniformly at random and run its Qj check.
inline bool q_verifier(const std::vector<RowSparseOperator>& terms,
                       const PureState& state, double a, double b,
                       std::uint64_t rng_seed) {
  require(!terms.empty(), "Q: empty term list");
  std::mt19937_64 rng = make_rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, terms.size() - 1);
  QjVerifier v(terms[pick(rng)], state, a, b);
  return v.accept(rng);
}

}  // namespace hamlab

#endif  // HAMLAB_SPARSE_HPP_
