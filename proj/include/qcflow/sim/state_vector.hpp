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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/gate.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"
#include "qcflow/sim/kernels.hpp"

namespace qcflow {

/// 2^n complex amplitudes, little-endian: qubit q is bit q of the index.
class StateVector {
  public:
    /// |0...0>.
    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits, Complex(0.0, 0.0)) {
        QCFLOW_REQUIRE(num_qubits > 0 && num_qubits <= 40, "state vector: unsupported size");
        amps_[0] = 1.0;
    }

    static StateVector basis(std::size_t num_qubits, std::uint64_t index) {
        StateVector s(num_qubits);
        QCFLOW_REQUIRE(index < s.dim(), "basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    /// Takes amplitudes as given; they must already be normalized.
    static StateVector from_amplitudes(std::vector<Complex> amps, double tol = 1e-9) {
        QCFLOW_REQUIRE(amps.size() >= 2 && (amps.size() & (amps.size() - 1)) == 0,
                       "state vector: length must be a power of two");
        StateVector s(static_cast<std::size_t>(std::countr_zero(amps.size())));
        s.amps_ = std::move(amps);
        QCFLOW_REQUIRE(std::abs(s.norm_squared() - 1.0) <= tol, "state vector: not normalized");
        return s;
    }

    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<Complex> mutable_amplitudes() { return amps_; }
    [[nodiscard]] Complex amplitude(std::uint64_t i) const { return amps_.at(i); }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            p[i] = std::norm(amps_[i]);
        }
        return p;
    }

    void apply_matrix(std::span<const Qubit> targets, const Matrix& m) {
        for (auto q : targets) {
            QCFLOW_REQUIRE(q < num_qubits_, "target qubit " + std::to_string(q) + " out of range");
        }
        kernels::apply_matrix(amps_, targets, m);
    }

    void apply_gate(const Gate& g, const Bindings& bindings = {}) {
        apply_matrix(g.targets(), g.matrix(bindings));
    }

    /// psi <- exp(-i angle P) psi; the coefficient of `p` is ignored.
    void apply_pauli_rotation(const PauliString& p, double angle) {
        if (p.is_identity()) {
            const Complex ph = std::exp(Complex(0.0, -angle));
            for (auto& a : amps_) {
                a *= ph;
            }
            return;
        }
        QCFLOW_REQUIRE(*p.max_qubit() < num_qubits_, "Pauli rotation out of range");
        kernels::apply_pauli_rotation(amps_, p.x_mask(), p.z_mask(), p.y_count(), angle);
    }

    [[nodiscard]] Vector to_eigen() const {
        Vector v(static_cast<Eigen::Index>(amps_.size()));
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = amps_[i];
        }
        return v;
    }

  private:
    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

/// <psi|P|psi> for one Pauli string, including its coefficient.
inline double expectation(const StateVector& state, const PauliString& p) {
    if (p.is_identity()) {
        return p.coefficient() * state.norm_squared();
    }
    QCFLOW_REQUIRE(*p.max_qubit() < state.num_qubits(),
                   "observable acts on qubit " + std::to_string(*p.max_qubit()) +
                       " beyond the register");
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const std::uint64_t xm = p.x_mask();
    const std::uint64_t zm = p.z_mask();
    const auto amps = state.amplitudes();
    Complex acc(0.0, 0.0);
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const double sign = (std::popcount(i & zm) & 1) ? -1.0 : 1.0;
        acc += std::conj(amps[i ^ xm]) * amps[i] * sign;
    }
    acc *= kIPow[p.y_count() % 4];
    QCFLOW_REQUIRE(std::abs(acc.imag()) < 1e-10 * std::max(1.0, std::abs(acc.real())) + 1e-10,
                   "expectation: imaginary residue of a Hermitian observable");
    return p.coefficient() * acc.real();
}

/// Sum of coefficient-weighted Pauli expectations.
inline double expectation(const StateVector& state, const PauliSum& obs) {
    double total = 0.0;
    for (const auto& t : obs.terms()) {
        total += expectation(state, t);
    }
    return total;
}

} // namespace qcflow
