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

// Command-line driver. Exit codes: 0 success, 1 check failure, 2 parse
// error, 3 invariant violation, 64 usage error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hamlab/circuit.hpp"
#include "hamlab/cldm.hpp"
#include "hamlab/core.hpp"
#include "hamlab/io.hpp"
#include "hamlab/kitaev.hpp"
#include "hamlab/optimize.hpp"
#include "hamlab/qstate.hpp"
#include "hamlab/selftest.hpp"
#include "hamlab/sparse.hpp"
#include "hamlab/spectral.hpp"

namespace {

using hamlab::json;

struct CommonFlags {
  std::uint64_t seed = 0;
  double tol = -1.0;  // negative means "use the command default"
  int restarts = 50;
  std::string out;
};

void emit(const json& j, const std::string& out_path) {
  const std::string text = hamlab::canonical_dump(j);
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    hamlab::write_text_file(out_path, text);
  }
}

void emit_error(const std::string& type, const std::string& message) {
  json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::fputs(hamlab::canonical_dump(err).c_str(), stderr);
}

json base_report(const std::string& kind,
                 const std::vector<std::string>& input_texts,
                 std::uint64_t seed) {
  json digests = json::array();
  for (const std::string& text : input_texts) {
    digests.push_back(hamlab::hex64(hamlab::fnv1a64(text)));
  }
  json out;
  out["report"] = kind;
  out["input_digests"] = digests;
  out["seed"] = seed;
  return out;
}

int run_compile(const std::string& circuit_path, const CommonFlags& flags) {
  const std::string text = hamlab::read_text_file(circuit_path);
  hamlab::VerificationCircuit circuit =
      hamlab::circuit_from_json(hamlab::parse_json_text(text, circuit_path));
  hamlab::KitaevHamiltonian ham = hamlab::compile(circuit);
  emit(hamlab::compiled_to_json(ham), flags.out);
  return 0;
}

int report_spectrum(const std::string& text, const CommonFlags& flags) {
  hamlab::SLHInstance inst =
      hamlab::slh_from_json(hamlab::parse_json_text(text));
  hamlab::Mat h = hamlab::assemble(inst);
  Eigen::SelfAdjointEigenSolver<hamlab::Mat> es(h, Eigen::EigenvaluesOnly);
  json report = base_report("spectrum", {text}, flags.seed);
  report["qubits"] = inst.n;
  report["term_count"] = inst.terms.size();
  report["a"] = inst.a;
  report["b"] = inst.b;
  const hamlab::index_t keep = std::min<hamlab::index_t>(es.eigenvalues().size(), 128);
  json eigs = json::array();
  for (hamlab::index_t k = 0; k < keep; ++k) eigs.push_back(es.eigenvalues()(k));
  report["eigenvalues"] = eigs;
  report["eigenvalue_count"] = es.eigenvalues().size();
  report["ground_energy"] = es.eigenvalues()(0);
  if (es.eigenvalues().size() > 1) {
    report["spectral_gap"] = es.eigenvalues()(1) - es.eigenvalues()(0);
  }
  emit(report, flags.out);
  return 0;
}

int report_gap(const std::string& text, const CommonFlags& flags) {
  hamlab::VerificationCircuit circuit =
      hamlab::circuit_from_json(hamlab::parse_json_text(text));
  hamlab::KitaevHamiltonian ham = hamlab::compile(circuit);
  hamlab::GeometricBoundReport r =
      hamlab::verify_geometric_bound(ham.h_in, ham.h_prop);
  json report = base_report("gap", {text}, flags.seed);
  report["steps"] = ham.clock.steps;
  report["qubits"] = ham.layout.total_qubits();
  report["delta_sum"] = r.delta_sum;
  report["v"] = r.v;
  report["cos_theta"] = r.cos_theta;
  report["bound"] = r.v * (1.0 - r.cos_theta);
  report["holds"] = r.holds;
  report["vacuous"] = r.vacuous;
  emit(report, flags.out);
  return r.vacuous || r.holds ? 0 : 1;
}

int report_clock_angle(const std::string& text, const CommonFlags& flags) {
  hamlab::VerificationCircuit circuit =
      hamlab::circuit_from_json(hamlab::parse_json_text(text));
  hamlab::ClockAngleReport r = hamlab::verify_clock_angle(circuit);
  json report = base_report("clock-angle", {text}, flags.seed);
  report["steps"] = circuit.step_count();
  report["cos_sq_theta"] = r.cos_sq_theta;
  report["bound"] = r.bound;
  report["holds"] = r.holds;
  report["vacuous"] = r.vacuous;
  emit(report, flags.out);
  return r.vacuous || r.holds ? 0 : 1;
}

int report_history(const std::string& text, const CommonFlags& flags) {
  const double tol = flags.tol > 0.0 ? flags.tol : 1e-9;
  hamlab::VerificationCircuit circuit =
      hamlab::circuit_from_json(hamlab::parse_json_text(text));
  hamlab::KitaevHamiltonian ham = hamlab::compile(circuit);
  std::mt19937_64 rng =
      hamlab::make_rng(hamlab::derive_seed(flags.seed, 1));
  const int p = circuit.proof1_qubits() + circuit.proof2_qubits();
  hamlab::PureState witness(
      hamlab::random_state_vector(hamlab::dim_for(p), rng),
      hamlab::QubitLayout({{hamlab::Label::P1, circuit.proof1_qubits()},
                           {hamlab::Label::P2, circuit.proof2_qubits()}}));
  hamlab::HistoryState hist = hamlab::history_state(circuit, witness);
  const double residual =
      ((ham.h_in + ham.h_prop) * hist.state.amplitudes()).norm();
  const double p_acc = hamlab::acceptance_probability(circuit, witness);
  const double e = hamlab::energy(ham.total(), hist.state);
  const double expected =
      (1.0 - p_acc) / (static_cast<double>(ham.clock.steps) + 1.0);
  json report = base_report("history", {text}, flags.seed);
  report["steps"] = ham.clock.steps;
  report["tolerance"] = tol;
  report["kernel_residual"] = residual;
  report["acceptance_probability"] = p_acc;
  report["energy"] = e;
  report["energy_identity_error"] = std::abs(e - expected);
  const bool pass = residual <= tol && std::abs(e - expected) <= tol;
  report["pass"] = pass;
  emit(report, flags.out);
  return pass ? 0 : 1;
}

int report_min_product(const std::string& text, const CommonFlags& flags) {
  const double tol = flags.tol > 0.0 ? flags.tol : 1e-10;
  hamlab::SLHInstance inst =
      hamlab::slh_from_json(hamlab::parse_json_text(text));
  hamlab::Mat h = hamlab::assemble(inst);
  hamlab::ProductMinResult r = hamlab::min_product_energy(
      h, inst.cut, flags.restarts, tol, hamlab::derive_seed(flags.seed, 1));
  const double ground = hamlab::ground_energy(h).first;
  json report = base_report("min-product", {text}, flags.seed);
  report["a"] = inst.a;
  report["b"] = inst.b;
  report["tolerance"] = tol;
  report["restarts"] = flags.restarts;
  report["value"] = r.value;
  report["iterations"] = r.iterations;
  report["converged"] = r.converged;
  report["ground_energy"] = ground;
  report["product_gap"] = r.value - ground;
  if (inst.cut.side_a.size() <= 2 && inst.cut.side_b.size() <= 2) {
    const double grid = hamlab::brute_force_product_min(h, inst.cut, 30.0);
    report["grid_value"] = grid;
    report["grid_difference"] = std::abs(grid - r.value);
  }
  emit(report, flags.out);
  return 0;
}

int report_slh_verify(const std::string& inst_text,
                      const std::string& proof_text,
                      const CommonFlags& flags) {
  hamlab::SLHInstance inst =
      hamlab::slh_from_json(hamlab::parse_json_text(inst_text));
  hamlab::SLHProof proof =
      hamlab::proof_from_json(hamlab::parse_json_text(proof_text), inst);
  hamlab::SLHVerdict verdict =
      hamlab::slh_verifier(inst, proof, hamlab::default_consistency_oracle(),
                           hamlab::derive_seed(flags.seed, 1));
  json report = base_report("slh-verify", {inst_text, proof_text}, flags.seed);
  report["accept"] = verdict.accept;
  report["E"] = verdict.energy;
  report["threshold"] = 0.5 * (inst.a + inst.b);
  report["beta"] =
      (inst.b - inst.a) / (8.0 * static_cast<double>(inst.terms.size()));
  report["side_a"] = hamlab::to_string(verdict.side_a.outcome);
  report["side_b"] = hamlab::to_string(verdict.side_b.outcome);
  emit(report, flags.out);
  return 0;
}

int report_phase_estimate(const std::string& text, const CommonFlags& flags) {
  const double tol = flags.tol > 0.0 ? flags.tol : 0.1;
  hamlab::SLHInstance inst =
      hamlab::slh_from_json(hamlab::parse_json_text(text));
  hamlab::Mat h = hamlab::assemble(inst);
  // Normalize by the term count so every eigenphase of exp(i H / m) stays
  // inside one turn.
  h /= static_cast<double>(inst.terms.size());
  Eigen::SelfAdjointEigenSolver<hamlab::Mat> es(h);
  hamlab::Mat u = es.eigenvectors() *
                  (es.eigenvalues().array().cast<hamlab::cplx>() *
                   hamlab::cplx{0.0, 1.0})
                      .exp()
                      .matrix()
                      .asDiagonal() *
                  es.eigenvectors().adjoint();
  std::mt19937_64 rng =
      hamlab::make_rng(hamlab::derive_seed(flags.seed, 1));
  hamlab::Vec psi = hamlab::random_state_vector(h.rows(), rng);
  hamlab::PhaseEstimateConfig cfg = hamlab::PhaseEstimateConfig::make(tol, tol);
  hamlab::PhaseEstimationSampler sampler(u, psi, cfg.t);
  const double estimate =
      sampler.sample(rng);
  json components = json::array();
  bool bound_holds = true;
  double mean_energy = 0.0;
  for (hamlab::index_t k = 0; k < h.rows(); ++k) {
    const double weight = std::norm(es.eigenvectors().col(k).dot(psi));
    mean_energy += weight * es.eigenvalues()(k);
    if (weight < 1e-12 || components.size() >= 64) continue;
    const double phase = std::max(es.eigenvalues()(k), 0.0);
    // Condition on the component: fed this eigenstate alone, the register
    // must land within delta of its phase with probability >= 1 - epsilon.
    hamlab::RVec one_phase(1), one_weight(1);
    one_phase << phase;
    one_weight << 1.0;
    const double hit =
        hamlab::PhaseEstimationSampler(one_phase, one_weight, cfg.t)
            .hit_probability(phase, cfg.delta);
    if (hit < 1.0 - cfg.epsilon - 1e-12) bound_holds = false;
    components.push_back(
        {{"phase", phase}, {"weight", weight}, {"hit_probability", hit}});
  }
  json report = base_report("phase-estimate", {text}, flags.seed);
  report["epsilon"] = cfg.epsilon;
  report["delta"] = cfg.delta;
  report["register_bits"] = cfg.t;
  report["estimate"] = estimate;
  report["mean_energy"] = mean_energy;
  report["components"] = components;
  report["per_component_bound_holds"] = bound_holds;
  emit(report, flags.out);
  return bound_holds ? 0 : 1;
}

int report_qj(const std::string& text, const CommonFlags& flags) {
  hamlab::SLHInstance inst =
      hamlab::slh_from_json(hamlab::parse_json_text(text));
  std::mt19937_64 rng =
      hamlab::make_rng(hamlab::derive_seed(flags.seed, 1));
  hamlab::PureState psi(
      hamlab::random_state_vector(hamlab::dim_for(inst.n), rng), inst.n);
  const double bound = (inst.b - inst.a) / 3.0;
  json terms = json::array();
  bool all_hold = true;
  double mean_reject = 0.0;
  double mean_energy = 0.0;
  int t_bits = 0;
  for (const hamlab::SLHInstance::Term& term : inst.terms) {
    hamlab::Mat expanded =
        hamlab::expand_operator(term.support, term.matrix, inst.n);
    hamlab::QjVerifier v(expanded, psi, inst.a, inst.b);
    const double err = std::abs(v.reject_probability() - v.energy());
    const bool holds = err <= bound + 1e-12;
    if (!holds) all_hold = false;
    mean_reject += v.reject_probability();
    mean_energy += v.energy();
    t_bits = v.config().t;
    terms.push_back({{"support", term.support},
                     {"energy", v.energy()},
                     {"reject_probability", v.reject_probability()},
                     {"deviation", err},
                     {"holds", holds}});
  }
  const double m = static_cast<double>(inst.terms.size());
  json report = base_report("qj", {text}, flags.seed);
  report["a"] = inst.a;
  report["b"] = inst.b;
  report["bound"] = bound;
  report["register_bits"] = t_bits;
  report["terms"] = terms;
  report["uniform_reject_probability"] = mean_reject / m;
  report["mean_term_energy"] = mean_energy / m;
  report["holds"] = all_hold;
  emit(report, flags.out);
  return all_hold ? 0 : 1;
}

int run_report(const std::string& kind, const std::vector<std::string>& inputs,
               const CommonFlags& flags) {
  const std::size_t expected = kind == "slh-verify" ? 2 : 1;
  if (inputs.size() != expected) {
    emit_error("usage", "report " + kind + " expects " +
                            std::to_string(expected) + " input file(s)");
    return 64;
  }
  std::vector<std::string> texts;
  for (const std::string& path : inputs) {
    texts.push_back(hamlab::read_text_file(path));
  }
  if (kind == "spectrum") return report_spectrum(texts[0], flags);
  if (kind == "gap") return report_gap(texts[0], flags);
  if (kind == "clock-angle") return report_clock_angle(texts[0], flags);
  if (kind == "history") return report_history(texts[0], flags);
  if (kind == "min-product") return report_min_product(texts[0], flags);
  if (kind == "slh-verify") return report_slh_verify(texts[0], texts[1], flags);
  if (kind == "phase-estimate") return report_phase_estimate(texts[0], flags);
  if (kind == "qj") return report_qj(texts[0], flags);
  emit_error("usage", "unknown report kind: " + kind);
  return 64;
}

int run_selftest(const std::string& filter, std::uint64_t seed) {
  const std::vector<hamlab::selftest::CriterionResult> results =
      hamlab::selftest::run_all(filter, seed);
  bool all_pass = true;
  for (const hamlab::selftest::CriterionResult& r : results) {
    json line;
    line["criterion"] = r.name;
    line["pass"] = r.pass;
    line["detail"] = r.detail;
    line["seconds"] = r.seconds;
    std::fputs(hamlab::canonical_dump(line).c_str(), stdout);
    if (!r.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circuit-to-Hamiltonian compiler and verification toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string circuit_path;
  std::string report_kind;
  std::vector<std::string> report_inputs;
  std::string filter;

  CLI::App* compile = app.add_subcommand(
      "compile", "Compile a verifier circuit into a clock Hamiltonian file");
  compile->add_option("circuit", circuit_path, "Circuit JSON file")
      ->required();
  compile->add_option("--out", flags.out, "Output path (default stdout)");

  CLI::App* report = app.add_subcommand(
      "report", "Produce a machine-readable analysis report");
  report->add_option("kind", report_kind, "Report kind")
      ->required()
      ->check(CLI::IsMember({"spectrum", "gap", "clock-angle", "history",
                             "min-product", "slh-verify", "phase-estimate",
                             "qj"}));
  report->add_option("inputs", report_inputs, "Input JSON file(s)")
      ->required();
  report->add_option("--seed", flags.seed, "Random seed");
  report->add_option("--tol", flags.tol, "Tolerance override");
  report->add_option("--restarts", flags.restarts, "Optimizer restarts")
      ->check(CLI::PositiveNumber);
  report->add_option("--out", flags.out, "Output path (default stdout)");

  CLI::App* selftest = app.add_subcommand(
      "selftest", "Run the acceptance-criteria suite (JSON line per check)");
  selftest->add_option("--filter", filter,
                       "Run only criteria whose name contains this substring");
  selftest->add_option("--seed", flags.seed, "Random seed");
  selftest->add_option("--tol", flags.tol,
                       "Accepted for uniformity; criteria pin their own "
                       "tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (compile->parsed()) return run_compile(circuit_path, flags);
    if (report->parsed()) return run_report(report_kind, report_inputs, flags);
    if (selftest->parsed()) {
      return run_selftest(filter,
                          flags.seed == 0 ? hamlab::selftest::kDefaultSeed
                                          : flags.seed);
    }
  } catch (const hamlab::ParseError& e) {
    emit_error("parse", e.what());
    return 2;
  } catch (const hamlab::InvariantError& e) {
    emit_error("invariant", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 64;
}
