// Copyright 2026 The qcflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * JSON (de)serialization of circuits and Pauli sums.
 *
 * Circuit:
 *   {"num_qubits": n,
 *    "gates": [{"name": str, "targets": [int],
 *               "exponent": {"symbol": str|null, "coeff": f, "const": f} | null,
 *               "matrix": [[re, im], ...] | null,      // row-major, "unitary" only
 *               "generator": [{"coeff": f, "paulis": {"0": "Z"}}] | null}]}  // "exp" only
 *
 * For named parameterized gates the exponent is the gate argument (theta of
 * Rx, t of XPow); for "exp" it multiplies the generator directly.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/gate.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"

namespace qcflow {

using Json = nlohmann::json;

namespace json_detail {

inline Error schema_error(const std::string& where, const std::string& what) {
    return Error("schema error at " + where + ": " + what);
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
        throw schema_error(where, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw schema_error(where, std::string("missing field '") + key + "'");
    }
    return *it;
}

inline bool has_value(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && !it->is_null();
}

inline double number(const Json& j, const std::string& where) {
    if (!j.is_number()) {
        throw schema_error(where, "expected a number");
    }
    return j.get<double>();
}

inline std::size_t index(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw schema_error(where, "expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

/// Maps a nlohmann parse error's byte offset to a line number.
inline std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        line += text[i] == '\n';
    }
    return line;
}

inline Json parse_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error("JSON parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                    e.what());
    }
}

} // namespace json_detail

inline Json pauli_sum_to_json_value(const PauliSum& sum) {
    Json out = Json::array();
    for (const auto& t : sum.terms()) {
        Json paulis = Json::object();
        for (const auto& [q, p] : t.factors()) {
            paulis[std::to_string(q)] = std::string(1, pauli_char(p));
        }
        out.push_back({{"coeff", t.coefficient()}, {"paulis", paulis}});
    }
    return out;
}

inline PauliSum pauli_sum_from_json_value(const Json& j, const std::string& where = "$") {
    using namespace json_detail;
    if (!j.is_array()) {
        throw schema_error(where, "expected a list of Pauli terms");
    }
    PauliSum out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const double coeff = number(field(j[i], "coeff", w), w + ".coeff");
        const Json& paulis = field(j[i], "paulis", w);
        if (!paulis.is_object()) {
            throw schema_error(w + ".paulis", "expected an object of qubit -> X|Y|Z");
        }
        std::vector<PauliString::Factor> factors;
        for (auto it = paulis.begin(); it != paulis.end(); ++it) {
            const std::string wq = w + ".paulis." + it.key();
            std::size_t q = 0;
            try {
                std::size_t used = 0;
                q = std::stoul(it.key(), &used);
                if (used != it.key().size()) {
                    throw std::invalid_argument("trailing");
                }
            } catch (const std::exception&) {
                throw schema_error(wq, "qubit key must be a non-negative integer");
            }
            if (!it.value().is_string() || it.value().get<std::string>().size() != 1 ||
                !pauli_from_char(it.value().get<std::string>()[0])) {
                throw schema_error(wq, "expected \"X\", \"Y\" or \"Z\"");
            }
            factors.emplace_back(q, *pauli_from_char(it.value().get<std::string>()[0]));
        }
        try {
            out.add(PauliString(coeff, std::move(factors)));
        } catch (const Error& e) {
            throw schema_error(w, e.what());
        }
    }
    return out;
}

inline Json param_to_json_value(const ParamExpr& e) {
    Json out;
    out["symbol"] = e.symbol_name() ? Json(*e.symbol_name()) : Json(nullptr);
    out["coeff"] = e.symbol_name() ? e.coefficient() : 0.0;
    out["const"] = e.constant();
    return out;
}

inline ParamExpr param_from_json_value(const Json& j, const std::string& where) {
    using namespace json_detail;
    const double c = has_value(j, "const") ? number(j["const"], where + ".const") : 0.0;
    if (!has_value(j, "symbol")) {
        return ParamExpr(c);
    }
    if (!j["symbol"].is_string() || j["symbol"].get<std::string>().empty()) {
        throw schema_error(where + ".symbol", "expected a non-empty string or null");
    }
    const double k = has_value(j, "coeff") ? number(j["coeff"], where + ".coeff") : 1.0;
    return ParamExpr::symbol(j["symbol"].get<std::string>(), k, c);
}

inline Json gate_to_json_value(const Gate& g) {
    Json out;
    out["name"] = g.name();
    out["targets"] = g.targets();
    out["exponent"] = nullptr;
    out["matrix"] = nullptr;
    out["generator"] = nullptr;
    if (const auto* ge = g.generator_exp()) {
        out["exponent"] = param_to_json_value(ge->exponent);
        if (g.name() == "exp") {
            out["generator"] = pauli_sum_to_json_value(ge->generator);
        }
    } else if (g.name() == "unitary") {
        Json m = Json::array();
        const auto& mat = g.fixed()->matrix;
        for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            for (Eigen::Index c = 0; c < mat.cols(); ++c) {
                m.push_back({mat(r, c).real(), mat(r, c).imag()});
            }
        }
        out["matrix"] = m;
    }
    return out;
}

inline Gate gate_from_json_value(const Json& j, const std::string& where) {
    using namespace json_detail;
    const Json& name_j = field(j, "name", where);
    if (!name_j.is_string()) {
        throw schema_error(where + ".name", "expected a string");
    }
    const std::string name = name_j.get<std::string>();
    const Json& targets_j = field(j, "targets", where);
    if (!targets_j.is_array()) {
        throw schema_error(where + ".targets", "expected a list of qubit indices");
    }
    std::vector<Qubit> targets;
    for (std::size_t i = 0; i < targets_j.size(); ++i) {
        targets.push_back(index(targets_j[i], where + ".targets[" + std::to_string(i) + "]"));
    }
    try {
        if (name == "unitary") {
            if (!has_value(j, "matrix")) {
                throw schema_error(where, "gate 'unitary' requires 'matrix'");
            }
            const Json& m = j["matrix"];
            const std::size_t dim = std::size_t{1} << targets.size();
            if (!m.is_array() || m.size() != dim * dim) {
                throw schema_error(where + ".matrix", "expected " + std::to_string(dim * dim) +
                                                          " [re, im] entries");
            }
            Matrix mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (std::size_t k = 0; k < m.size(); ++k) {
                const std::string wk = where + ".matrix[" + std::to_string(k) + "]";
                if (!m[k].is_array() || m[k].size() != 2) {
                    throw schema_error(wk, "expected [re, im]");
                }
                mat(static_cast<Eigen::Index>(k / dim), static_cast<Eigen::Index>(k % dim)) =
                    Complex(number(m[k][0], wk), number(m[k][1], wk));
            }
            return gates::unitary(targets, mat);
        }
        if (name == "exp") {
            if (!has_value(j, "exponent") || !has_value(j, "generator")) {
                throw schema_error(where, "gate 'exp' requires 'exponent' and 'generator'");
            }
            return Gate("exp", targets,
                        GeneratorExp{param_from_json_value(j["exponent"], where + ".exponent"),
                                     pauli_sum_from_json_value(j["generator"],
                                                               where + ".generator")});
        }
        if (!gates::is_parameterized_name(name) && !gates::is_fixed_name(name)) {
            throw schema_error(where + ".name", "unknown gate '" + name + "'");
        }
        std::optional<ParamExpr> exponent;
        if (has_value(j, "exponent")) {
            exponent = param_from_json_value(j["exponent"], where + ".exponent");
        }
        return gates::named(name, targets, exponent);
    } catch (const Error& e) {
        const std::string msg = e.what();
        if (msg.rfind("schema error", 0) == 0) {
            throw;
        }
        throw schema_error(where, msg);
    }
}

inline Json circuit_to_json_value(const Circuit& c) {
    Json gates = Json::array();
    for (const auto& g : c.gates()) {
        gates.push_back(gate_to_json_value(g));
    }
    return {{"num_qubits", c.num_qubits()}, {"gates", gates}};
}

inline Circuit circuit_from_json_value(const Json& j) {
    using namespace json_detail;
    const std::size_t n = index(field(j, "num_qubits", "$"), "$.num_qubits");
    if (n == 0) {
        throw schema_error("$.num_qubits", "must be positive");
    }
    const Json& gates_j = field(j, "gates", "$");
    if (!gates_j.is_array()) {
        throw schema_error("$.gates", "expected a list");
    }
    Circuit out(n);
    for (std::size_t i = 0; i < gates_j.size(); ++i) {
        const std::string where = "$.gates[" + std::to_string(i) + "]";
        Gate g = gate_from_json_value(gates_j[i], where);
        try {
            out.append(std::move(g));
        } catch (const Error& e) {
            throw schema_error(where, e.what());
        }
    }
    return out;
}

inline std::string to_json(const Circuit& c, int indent = 2) {
    return circuit_to_json_value(c).dump(indent);
}

inline Circuit circuit_from_json(const std::string& text) {
    return circuit_from_json_value(json_detail::parse_text(text));
}

inline std::string to_json(const PauliSum& s, int indent = 2) {
    return pauli_sum_to_json_value(s).dump(indent);
}

inline PauliSum pauli_sum_from_json(const std::string& text) {
    return pauli_sum_from_json_value(json_detail::parse_text(text));
}

} // namespace qcflow
