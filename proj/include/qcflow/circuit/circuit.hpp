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

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/gate.hpp"
#include "qcflow/circuit/param.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"

namespace qcflow {

/// Ordered gate list over a linear register. Qubit 0 is the
/// least-significant bit of the state index.
class Circuit {
  public:
    explicit Circuit(std::size_t num_qubits) : num_qubits_(num_qubits) {
        QCFLOW_REQUIRE(num_qubits > 0, "circuit needs at least one qubit");
        QCFLOW_REQUIRE(num_qubits <= 62, "circuit supports at most 62 qubits");
    }

    Circuit(std::size_t num_qubits, std::vector<Gate> gates) : Circuit(num_qubits) {
        for (auto& g : gates) {
            append(std::move(g));
        }
    }

    Circuit& append(Gate g) {
        for (auto q : g.targets()) {
            QCFLOW_REQUIRE(q < num_qubits_, "gate '" + g.name() + "' targets qubit " +
                                                std::to_string(q) + " but circuit has " +
                                                std::to_string(num_qubits_) + " qubits");
        }
        gates_.push_back(std::move(g));
        return *this;
    }

    Circuit& append(const Circuit& other) {
        QCFLOW_REQUIRE(other.num_qubits_ == num_qubits_,
                       "qubit-count mismatch: " + std::to_string(num_qubits_) + " vs " +
                           std::to_string(other.num_qubits_));
        gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
        return *this;
    }

    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
    [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
    [[nodiscard]] std::size_t size() const { return gates_.size(); }
    [[nodiscard]] bool empty() const { return gates_.empty(); }

    /// Distinct symbol names in order of first appearance.
    [[nodiscard]] std::vector<std::string> symbols() const {
        std::vector<std::string> out;
        for (const auto& g : gates_) {
            if (auto s = g.symbol(); s && std::find(out.begin(), out.end(), *s) == out.end()) {
                out.push_back(*s);
            }
        }
        return out;
    }

    [[nodiscard]] bool is_concrete() const {
        return std::none_of(gates_.begin(), gates_.end(),
                            [](const Gate& g) { return g.is_parameterized(); });
    }

    /// U^dagger: reversed order, each gate adjointed.
    [[nodiscard]] Circuit inverse() const {
        Circuit out(num_qubits_);
        for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
            out.gates_.push_back(it->adjoint());
        }
        return out;
    }

    friend bool operator==(const Circuit&, const Circuit&) = default;

  private:
    std::size_t num_qubits_;
    std::vector<Gate> gates_;
};

/// a followed by b. Shared symbol names denote one shared parameter.
inline Circuit compose(const Circuit& a, const Circuit& b) {
    QCFLOW_REQUIRE(a.num_qubits() == b.num_qubits(),
                   "qubit-count mismatch: " + std::to_string(a.num_qubits()) + " vs " +
                       std::to_string(b.num_qubits()));
    Circuit out = a;
    out.append(b);
    return out;
}

/// A circuit with every exponent numeric. Only obtainable through resolve()
/// or from a circuit that is already free of symbols.
class ConcreteCircuit {
  public:
    explicit ConcreteCircuit(Circuit c) : circuit_(std::move(c)) {
        QCFLOW_REQUIRE(circuit_.is_concrete(), "circuit has unresolved symbols");
    }

    [[nodiscard]] const Circuit& circuit() const { return circuit_; }
    [[nodiscard]] std::size_t num_qubits() const { return circuit_.num_qubits(); }
    [[nodiscard]] const std::vector<Gate>& gates() const { return circuit_.gates(); }
    [[nodiscard]] std::size_t size() const { return circuit_.size(); }

    friend bool operator==(const ConcreteCircuit&, const ConcreteCircuit&) = default;

  private:
    Circuit circuit_;
};

/// Evaluates every parameter expression. Generator structure is kept.
inline ConcreteCircuit resolve(const Circuit& c, const Bindings& bindings) {
    Circuit out(c.num_qubits());
    for (const auto& g : c.gates()) {
        out.append(g.resolved(bindings));
    }
    return ConcreteCircuit(std::move(out));
}

/**
 * One exp(-i * coefficient * c_k * P_k) gate per non-identity term of each
 * operator, in the given order. Identity terms only contribute a global
 * phase and are dropped. Terms inside one operator must commute; no
 * Trotterization is applied implicitly.
 */
inline Circuit exponential_circuit(std::size_t num_qubits, const std::vector<PauliSum>& operators,
                                   const std::vector<ParamExpr>& coefficients) {
    QCFLOW_REQUIRE(operators.size() == coefficients.size(),
                   "exponential_circuit: " + std::to_string(operators.size()) +
                       " operators but " + std::to_string(coefficients.size()) + " coefficients");
    Circuit out(num_qubits);
    for (std::size_t i = 0; i < operators.size(); ++i) {
        QCFLOW_REQUIRE(operators[i].terms_commute(),
                       "exponential_circuit: operator " + std::to_string(i) +
                           " has non-commuting terms; split it into separate operators");
        for (const auto& term : operators[i].terms()) {
            if (term.is_identity()) {
                continue;
            }
            out.append(gates::exp(coefficients[i], PauliSum{term}));
        }
    }
    return out;
}

} // namespace qcflow
