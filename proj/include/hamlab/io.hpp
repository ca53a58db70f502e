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

#ifndef HAMLAB_IO_HPP_
#define HAMLAB_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamlab/circuit.hpp"
#include "hamlab/cldm.hpp"
#include "hamlab/core.hpp"
#include "hamlab/kitaev.hpp"
#include "hamlab/optimize.hpp"
#include "hamlab/sparse.hpp"

namespace hamlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical serialization: object keys sorted, floats at 17 significant
// digits (lossless for doubles), so emit(parse(emit(x))) == emit(x) byte for
// byte and fixtures diff cleanly.

namespace detail {

inline std::string format_double(double v) {
  require(std::isfinite(v), "canonical JSON: non-finite number");
  if (v == 0.0) return "0";  // merge -0.0 so reparse-and-dump is stable
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void canonical_append(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();  // reuse escaping
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const json& item : j) {
        if (!first) out += ',';
        first = false;
        canonical_append(item, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      // nlohmann's default object backing is an ordered std::map, so
      // iteration is already sorted by key.
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        canonical_append(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      throw InvariantError("canonical JSON: unsupported value type");
  }
}

}  // namespace detail

inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::canonical_append(j, out);
  out += '\n';
  return out;
}

inline json parse_json_text(const std::string& text,
                            const std::string& what = "input") {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(what + ": malformed JSON");
  return j;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json load_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvariantError("cannot write " + path);
  out << content;
}

// FNV-1a, for input digests in reports.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Matrices as flat row-major lists of [re, im] pairs.

inline json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return out;
}

inline Mat matrix_from_json(const json& j, index_t rows, index_t cols,
                            const std::string& what) {
  if (!j.is_array() || static_cast<index_t>(j.size()) != rows * cols) {
    throw ParseError(what + ": expected " + std::to_string(rows * cols) +
                     " complex entries");
  }
  Mat m(rows, cols);
  for (index_t k = 0; k < rows * cols; ++k) {
    const json& e = j[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number()) {
      throw ParseError(what + ": entries must be [re, im] pairs");
    }
    m(k / cols, k % cols) = cplx{e[0].get<double>(), e[1].get<double>()};
  }
  return m;
}

namespace detail {

inline std::vector<int> int_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<int> out;
  for (const json& e : j) {
    if (!e.is_number_integer()) {
      throw ParseError(what + ": expected integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

inline const json& field(const json& j, const std::string& key,
                         const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(what + ": missing \"" + key + "\"");
  return *it;
}

inline int int_field(const json& j, const std::string& key,
                     const std::string& what) {
  const json& f = field(j, key, what);
  if (!f.is_number_integer()) {
    throw ParseError(what + ": \"" + key + "\" must be an integer");
  }
  return f.get<int>();
}

inline double real_field(const json& j, const std::string& key,
                         const std::string& what) {
  const json& f = field(j, key, what);
  if (!f.is_number()) {
    throw ParseError(what + ": \"" + key + "\" must be a number");
  }
  return f.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Circuit files.

inline json gate_to_json(const Gate& g) {
  json out;
  if (g.kind == Gate::Kind::Unitary) {
    out["kind"] = "unitary";
    out["targets"] = g.targets;
    out["matrix"] = matrix_to_json(g.matrix);
  } else {
    out["kind"] = "cswap";
    out["control"] = g.control;
    out["r1"] = g.reg1;
    out["r2"] = g.reg2;
  }
  return out;
}

inline Gate gate_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("gate: expected an object");
  const json& kind = detail::field(j, "kind", "gate");
  if (kind == "unitary") {
    std::vector<int> targets =
        detail::int_list(detail::field(j, "targets", "gate"), "gate targets");
    const index_t dim = dim_for(static_cast<int>(targets.size()));
    Mat m = matrix_from_json(detail::field(j, "matrix", "gate"), dim, dim,
                             "gate matrix");
    // File matrices may carry decimal round-off; gate admission is looser
    // than the in-memory constructor default.
    return make_unitary_gate(std::move(targets), std::move(m), 1e-8);
  }
  if (kind == "cswap") {
    return controlled_register_swap(
        detail::int_field(j, "control", "gate"),
        detail::int_list(detail::field(j, "r1", "gate"), "gate r1"),
        detail::int_list(detail::field(j, "r2", "gate"), "gate r2"));
  }
  throw ParseError("gate: unknown kind");
}

inline json circuit_to_json(const VerificationCircuit& c) {
  json out;
  out["qubits"] = {{"ancilla", c.ancilla_qubits()},
                   {"proof1", c.proof1_qubits()},
                   {"proof2", c.proof2_qubits()}};
  out["accept_qubit"] = c.accept_qubit;
  if (!c.registers.empty()) out["registers"] = c.registers;
  json gates = json::array();
  for (const Gate& g : c.gates) gates.push_back(gate_to_json(g));
  out["gates"] = gates;
  return out;
}

inline VerificationCircuit circuit_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("circuit: expected an object");
  const json& qubits = detail::field(j, "qubits", "circuit");
  const int ancilla = detail::int_field(qubits, "ancilla", "circuit qubits");
  const int proof1 = detail::int_field(qubits, "proof1", "circuit qubits");
  const int proof2 = detail::int_field(qubits, "proof2", "circuit qubits");
  const int accept = detail::int_field(j, "accept_qubit", "circuit");
  std::vector<int> registers;
  if (j.contains("registers")) {
    registers = detail::int_list(j["registers"], "circuit registers");
  }
  std::vector<Gate> gates;
  for (const json& g : detail::field(j, "gates", "circuit")) {
    gates.push_back(gate_from_json(g));
  }
  return make_circuit(std::move(gates), ancilla, proof1, proof2, accept,
                      std::move(registers));
}

// ---------------------------------------------------------------------------
// Hamiltonian files.

inline json slh_to_json(const SLHInstance& inst) {
  json out;
  out["qubits"] = inst.n;
  out["partition"] = {{"A", inst.cut.side_a}, {"B", inst.cut.side_b}};
  out["a"] = inst.a;
  out["b"] = inst.b;
  json terms = json::array();
  for (const SLHInstance::Term& t : inst.terms) {
    terms.push_back({{"support", t.support},
                     {"matrix", matrix_to_json(t.matrix)}});
  }
  out["terms"] = terms;
  return out;
}

inline SLHInstance slh_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("hamiltonian: expected an object");
  const int n = detail::int_field(j, "qubits", "hamiltonian");
  const json& part = detail::field(j, "partition", "hamiltonian");
  std::vector<int> side_a =
      detail::int_list(detail::field(part, "A", "partition"), "partition A");
  std::vector<int> side_b =
      detail::int_list(detail::field(part, "B", "partition"), "partition B");
  const double a = detail::real_field(j, "a", "hamiltonian");
  const double b = detail::real_field(j, "b", "hamiltonian");
  std::vector<SLHInstance::Term> terms;
  for (const json& t : detail::field(j, "terms", "hamiltonian")) {
    std::vector<int> support =
        detail::int_list(detail::field(t, "support", "term"), "term support");
    const index_t dim = dim_for(static_cast<int>(support.size()));
    Mat m = matrix_from_json(detail::field(t, "matrix", "term"), dim, dim,
                             "term matrix");
    terms.push_back({std::move(support), hermitize(m)});
  }
  try {
    return make_slh_instance(std::move(terms), n,
                             Bipartition(std::move(side_a), std::move(side_b),
                                         n),
                             a, b);
  } catch (const InvariantError& e) {
    // Anything structurally wrong in a file is a parse failure to callers.
    throw ParseError(std::string("hamiltonian: ") + e.what());
  }
}

namespace detail {

// Pulls the local matrix of an operator known to act as M (x) I off its
// support, verifying that claim exactly.
inline Mat restrict_to_support(const Mat& full, int n,
                               const std::vector<int>& support) {
  const index_t local_dim = dim_for(static_cast<int>(support.size()));
  Mat local(local_dim, local_dim);
  for (index_t a = 0; a < local_dim; ++a) {
    for (index_t b = 0; b < local_dim; ++b) {
      local(a, b) = full(scatter_bits(0, support, n, a),
                         scatter_bits(0, support, n, b));
    }
  }
  require((expand_operator(support, local, n) - full).cwiseAbs().maxCoeff() <=
              1e-12,
          "restrict_to_support: operator is not identity off the support");
  return local;
}

}  // namespace detail

// Term-list export of a compiled Hamiltonian. Each term is restricted to its
// actual support; propagation terms carry their step index and row sparsity.
// The partition follows the separability analysis: everything but the second
// proof register on one side.
inline json compiled_to_json(const KitaevHamiltonian& ham) {
  const int n = ham.layout.total_qubits();
  const int nc = ham.clock.clock_qubits;
  json terms = json::array();

  std::vector<int> support_in;
  for (int q : ham.layout.qubits(Label::C)) support_in.push_back(q);
  for (int q : ham.layout.qubits(Label::A)) support_in.push_back(q);
  terms.push_back(
      {{"role", "in"},
       {"support", support_in},
       {"matrix",
        matrix_to_json(detail::restrict_to_support(ham.h_in, n, support_in))}});

  for (int t = 1; t <= ham.clock.steps; ++t) {
    const Gate& g = ham.circuit.gates[t - 1];
    std::vector<int> support;
    for (int q = 0; q < nc; ++q) support.push_back(q);
    for (int q : g.support()) support.push_back(nc + q);
    std::sort(support.begin(), support.end());
    RowSparseOperator oracle =
        row_oracle_for_term(t, g, ham.clock, ham.circuit.layout);
    terms.push_back(
        {{"role", "prop"},
         {"t", t},
         {"sparsity", oracle.declared_sparsity()},
         {"support", support},
         {"matrix",
          matrix_to_json(detail::restrict_to_support(ham.prop_terms[t - 1], n,
                                                     support))}});
  }

  std::vector<int> support_out;
  for (int q = 0; q < nc; ++q) support_out.push_back(q);
  support_out.push_back(nc + ham.circuit.layout.offset(Label::A) +
                        ham.circuit.accept_qubit);
  terms.push_back(
      {{"role", "out"},
       {"support", support_out},
       {"matrix", matrix_to_json(
                      detail::restrict_to_support(ham.h_out, n, support_out))}});

  json out;
  out["qubits"] = n;
  std::vector<int> side_a, side_b;
  for (int q = 0; q < n; ++q) side_a.push_back(q);
  for (int q : ham.layout.qubits(Label::P2)) side_b.push_back(q);
  std::erase_if(side_a, [&](int q) {
    return std::find(side_b.begin(), side_b.end(), q) != side_b.end();
  });
  out["partition"] = {{"A", side_a}, {"B", side_b}};
  out["a"] = 0.0;
  out["b"] = 1.0 / (static_cast<double>(ham.clock.steps) + 1.0);
  out["terms"] = terms;
  return out;
}

// ---------------------------------------------------------------------------
// Proof files.

inline json proof_to_json(const SLHProof& proof) {
  json terms = json::array();
  for (const SLHProof::TermMarginals& tm : proof.terms) {
    terms.push_back({{"rho_a", matrix_to_json(tm.rho_a)},
                     {"rho_b", matrix_to_json(tm.rho_b)}});
  }
  return json{{"terms", terms}};
}

inline SLHProof proof_from_json(const json& j, const SLHInstance& inst) {
  if (!j.is_object()) throw ParseError("proof: expected an object");
  const json& terms = detail::field(j, "terms", "proof");
  if (!terms.is_array() || terms.size() != inst.terms.size()) {
    throw ParseError("proof: expected one marginal pair per term");
  }
  SLHProof proof;
  for (std::size_t i = 0; i < inst.terms.size(); ++i) {
    const std::vector<int> mem_a =
        detail::side_members(inst.cut.side_a, inst.terms[i].support);
    const std::vector<int> mem_b =
        detail::side_members(inst.cut.side_b, inst.terms[i].support);
    const index_t da = dim_for(static_cast<int>(mem_a.size()));
    const index_t db = dim_for(static_cast<int>(mem_b.size()));
    proof.terms.push_back(
        {matrix_from_json(detail::field(terms[i], "rho_a", "proof term"), da,
                          da, "proof rho_a"),
         matrix_from_json(detail::field(terms[i], "rho_b", "proof term"), db,
                          db, "proof rho_b")});
  }
  return proof;
}

}  // namespace hamlab

#endif  // HAMLAB_IO_HPP_
