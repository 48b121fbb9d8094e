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
 * Gate representation and the named gate library.
 *
 * Every gate is either a fixed dense unitary on one or two qubits or the
 * exponential exp(-i * value(exponent) * generator) of a real Pauli sum.
 * Local matrices are little-endian over the target list: targets[0] is the
 * least-significant bit of the local basis index.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcflow/circuit/param.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"

namespace qcflow {

struct FixedMatrix {
    Matrix matrix;

    friend bool operator==(const FixedMatrix& a, const FixedMatrix& b) {
        return a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() &&
               a.matrix == b.matrix;
    }
};

struct GeneratorExp {
    ParamExpr exponent;
    PauliSum generator;

    friend bool operator==(const GeneratorExp&, const GeneratorExp&) = default;
};

/// exp(-i * eta * generator) as a dense matrix over `targets`.
inline Matrix generator_exp_matrix(const PauliSum& generator, std::span<const Qubit> targets,
                                   double eta) {
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    if (!generator.terms_commute()) {
        return hermitian_expm(generator.matrix(targets), eta);
    }
    // Commuting terms factor into a product of cos(a) I - i sin(a) P.
    Matrix out = Matrix::Identity(dim, dim);
    Complex global(1.0, 0.0);
    for (const auto& term : generator.terms()) {
        const double a = eta * term.coefficient();
        if (term.is_identity()) {
            global *= std::exp(Complex(0.0, -a));
            continue;
        }
        const Matrix p = term.with_coefficient(1.0).matrix(targets);
        out = (std::cos(a) * Matrix::Identity(dim, dim) - Complex(0.0, std::sin(a)) * p) * out;
    }
    return global * out;
}

class Gate {
  public:
    using Op = std::variant<FixedMatrix, GeneratorExp>;

    Gate(std::string name, std::vector<Qubit> targets, FixedMatrix op)
        : name_(std::move(name)), targets_(std::move(targets)), op_(std::move(op)) {
        check_targets();
        const auto& m = std::get<FixedMatrix>(op_).matrix;
        QCFLOW_REQUIRE(targets_.size() <= 2,
                       "gate '" + name_ + "': fixed matrices act on one or two qubits");
        const Eigen::Index dim = Eigen::Index{1} << targets_.size();
        QCFLOW_REQUIRE(m.rows() == dim && m.cols() == dim,
                       "gate '" + name_ + "': matrix must be " + std::to_string(dim) + "x" +
                           std::to_string(dim));
        QCFLOW_REQUIRE(is_unitary(m, 1e-10), "gate '" + name_ + "': matrix is not unitary");
    }

    Gate(std::string name, std::vector<Qubit> targets, GeneratorExp op)
        : name_(std::move(name)), targets_(std::move(targets)), op_(std::move(op)) {
        check_targets();
        for (const auto& term : std::get<GeneratorExp>(op_).generator.terms()) {
            QCFLOW_REQUIRE(std::isfinite(term.coefficient()),
                           "gate '" + name_ + "': generator coefficients must be finite");
            for (const auto& f : term.factors()) {
                QCFLOW_REQUIRE(std::find(targets_.begin(), targets_.end(), f.first) !=
                                   targets_.end(),
                               "gate '" + name_ + "': generator acts on qubit " +
                                   std::to_string(f.first) + " outside the gate targets");
            }
        }
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<Qubit>& targets() const { return targets_; }
    [[nodiscard]] std::size_t arity() const { return targets_.size(); }
    [[nodiscard]] const Op& op() const { return op_; }

    [[nodiscard]] const FixedMatrix* fixed() const { return std::get_if<FixedMatrix>(&op_); }
    [[nodiscard]] const GeneratorExp* generator_exp() const {
        return std::get_if<GeneratorExp>(&op_);
    }

    [[nodiscard]] std::optional<std::string> symbol() const {
        if (const auto* g = generator_exp()) {
            return g->exponent.symbol_name();
        }
        return std::nullopt;
    }

    [[nodiscard]] bool is_parameterized() const { return symbol().has_value(); }

    /// Dense unitary over targets() with all symbols bound.
    [[nodiscard]] Matrix matrix(const Bindings& bindings = {}) const {
        if (const auto* f = fixed()) {
            return f->matrix;
        }
        const auto& g = std::get<GeneratorExp>(op_);
        return generator_exp_matrix(g.generator, targets_, g.exponent.evaluate(bindings));
    }

    /// Same gate with its exponent replaced by its numeric value.
    [[nodiscard]] Gate resolved(const Bindings& bindings) const {
        if (const auto* g = generator_exp(); g && !g->exponent.is_constant()) {
            return Gate(name_, targets_, GeneratorExp{ParamExpr(g->exponent.evaluate(bindings)),
                                                      g->generator});
        }
        return *this;
    }

    [[nodiscard]] Gate adjoint() const {
        if (const auto* g = generator_exp()) {
            return Gate(name_, targets_, GeneratorExp{-g->exponent, g->generator});
        }
        static const std::set<std::string> self_inverse = {"I", "X", "Y", "Z", "H",
                                                           "CZ", "CNOT", "SWAP"};
        const auto& m = std::get<FixedMatrix>(op_).matrix;
        return Gate(self_inverse.count(name_) ? name_ : std::string("unitary"), targets_,
                    FixedMatrix{m.adjoint()});
    }

    friend bool operator==(const Gate&, const Gate&) = default;

  private:
    void check_targets() const {
        QCFLOW_REQUIRE(!targets_.empty(), "gate '" + name_ + "': needs at least one target");
        std::vector<Qubit> sorted = targets_;
        std::sort(sorted.begin(), sorted.end());
        QCFLOW_REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                       "gate '" + name_ + "': repeated target qubit");
    }

    std::string name_;
    std::vector<Qubit> targets_;
    Op op_;
};

inline Matrix gate_matrix(const Gate& g, const Bindings& bindings = {}) {
    return g.matrix(bindings);
}

/// Named gate library. Rotations use the half-angle convention
/// Rx(theta) = exp(-i theta X / 2); the *Pow gates keep their global phase,
/// e.g. XPow(t) = exp(i pi t / 2) exp(-i (pi t / 2) X).
namespace gates {

namespace detail {
inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Matrix mat4(std::array<Complex, 16> v) {
    Matrix m(4, 4);
    for (int i = 0; i < 16; ++i) {
        m(i / 4, i % 4) = v[static_cast<std::size_t>(i)];
    }
    return m;
}

inline Gate fixed1(std::string name, Qubit q, Matrix m) {
    return Gate(std::move(name), {q}, FixedMatrix{std::move(m)});
}
} // namespace detail

inline Gate I(Qubit q) { return detail::fixed1("I", q, Matrix::Identity(2, 2)); }
inline Gate X(Qubit q) { return detail::fixed1("X", q, pauli_matrix(Pauli::X)); }
inline Gate Y(Qubit q) { return detail::fixed1("Y", q, pauli_matrix(Pauli::Y)); }
inline Gate Z(Qubit q) { return detail::fixed1("Z", q, pauli_matrix(Pauli::Z)); }

inline Gate H(Qubit q) {
    const double r = std::numbers::sqrt2 / 2.0;
    return detail::fixed1("H", q, detail::mat2(r, r, r, -r));
}

inline Gate S(Qubit q) { return detail::fixed1("S", q, detail::mat2(1, 0, 0, Complex(0, 1))); }

inline Gate T(Qubit q) {
    return detail::fixed1("T", q,
                          detail::mat2(1, 0, 0, std::exp(Complex(0, std::numbers::pi / 4))));
}

inline Gate CZ(Qubit a, Qubit b) {
    return Gate("CZ", {a, b},
                FixedMatrix{detail::mat4({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1})});
}

/// targets = {control, target}; local index bit 0 is the control.
inline Gate CNOT(Qubit control, Qubit target) {
    return Gate("CNOT", {control, target},
                FixedMatrix{detail::mat4({1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0})});
}

inline Gate SWAP(Qubit a, Qubit b) {
    return Gate("SWAP", {a, b},
                FixedMatrix{detail::mat4({1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1})});
}

inline Gate Rx(Qubit q, ParamExpr theta) {
    return Gate("Rx", {q}, GeneratorExp{std::move(theta), PauliSum{0.5 * qcflow::X(q)}});
}
inline Gate Ry(Qubit q, ParamExpr theta) {
    return Gate("Ry", {q}, GeneratorExp{std::move(theta), PauliSum{0.5 * qcflow::Y(q)}});
}
inline Gate Rz(Qubit q, ParamExpr theta) {
    return Gate("Rz", {q}, GeneratorExp{std::move(theta), PauliSum{0.5 * qcflow::Z(q)}});
}

namespace detail {
inline Gate pow1(std::string name, PauliString p, Qubit q, ParamExpr t) {
    const double h = std::numbers::pi / 2.0;
    return Gate(std::move(name), {q},
                GeneratorExp{std::move(t), PauliSum{h * p, PauliString::identity(-h)}});
}
} // namespace detail

inline Gate XPow(Qubit q, ParamExpr t) { return detail::pow1("XPow", qcflow::X(q), q, std::move(t)); }
inline Gate YPow(Qubit q, ParamExpr t) { return detail::pow1("YPow", qcflow::Y(q), q, std::move(t)); }
inline Gate ZPow(Qubit q, ParamExpr t) { return detail::pow1("ZPow", qcflow::Z(q), q, std::move(t)); }

/// CNOT^t = exp(-i (pi t / 4) (I - Z_c)(X_t - I)); all four terms commute.
inline Gate CNotPow(Qubit control, Qubit target, ParamExpr t) {
    const double c = std::numbers::pi / 4.0;
    PauliSum g{c * qcflow::X(target), PauliString::identity(-c),
               -c * (qcflow::Z(control) * qcflow::X(target)), c * qcflow::Z(control)};
    return Gate("CNotPow", {control, target}, GeneratorExp{std::move(t), std::move(g)});
}

/// Arbitrary fixed unitary on one or two qubits.
inline Gate unitary(std::vector<Qubit> targets, Matrix m) {
    return Gate("unitary", std::move(targets), FixedMatrix{std::move(m)});
}

/// exp(-i * exponent * generator) on the generator's support.
inline Gate exp(ParamExpr exponent, PauliSum generator) {
    auto targets = generator.support();
    QCFLOW_REQUIRE(!targets.empty(), "exp gate: generator has no non-identity support");
    return Gate("exp", std::move(targets), GeneratorExp{std::move(exponent), std::move(generator)});
}

inline bool is_parameterized_name(const std::string& name) {
    static const std::set<std::string> names = {"Rx", "Ry", "Rz", "XPow", "YPow", "ZPow",
                                                "CNotPow"};
    return names.count(name) > 0;
}

inline bool is_fixed_name(const std::string& name) {
    static const std::set<std::string> names = {"I", "X", "Y", "Z", "H",
                                                "S", "T", "CZ", "CNOT", "SWAP"};
    return names.count(name) > 0;
}

/// Builds a library gate by name. Throws on unknown names or wrong arity.
inline Gate named(const std::string& name, const std::vector<Qubit>& t,
                  const std::optional<ParamExpr>& exponent = std::nullopt) {
    auto need = [&](std::size_t k) {
        QCFLOW_REQUIRE(t.size() == k, "gate '" + name + "' expects " + std::to_string(k) +
                                          " target(s), got " + std::to_string(t.size()));
    };
    if (is_parameterized_name(name)) {
        QCFLOW_REQUIRE(exponent.has_value(), "gate '" + name + "' requires an exponent");
        if (name == "CNotPow") {
            need(2);
            return CNotPow(t[0], t[1], *exponent);
        }
        need(1);
        if (name == "Rx") return Rx(t[0], *exponent);
        if (name == "Ry") return Ry(t[0], *exponent);
        if (name == "Rz") return Rz(t[0], *exponent);
        if (name == "XPow") return XPow(t[0], *exponent);
        if (name == "YPow") return YPow(t[0], *exponent);
        return ZPow(t[0], *exponent);
    }
    if (name == "CZ" || name == "CNOT" || name == "SWAP") {
        need(2);
        if (name == "CZ") return CZ(t[0], t[1]);
        if (name == "CNOT") return CNOT(t[0], t[1]);
        return SWAP(t[0], t[1]);
    }
    if (is_fixed_name(name)) {
        need(1);
        if (name == "I") return I(t[0]);
        if (name == "X") return X(t[0]);
        if (name == "Y") return Y(t[0]);
        if (name == "Z") return Z(t[0]);
        if (name == "H") return H(t[0]);
        if (name == "S") return S(t[0]);
        return T(t[0]);
    }
    throw Error("unknown gate '" + name + "'");
}

} // namespace gates

} // namespace qcflow
