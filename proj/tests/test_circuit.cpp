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

#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcflow/qcflow.hpp"

using namespace qcflow;
namespace g = qcflow::gates;

namespace {

constexpr double kPi = std::numbers::pi;

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(PauliString, RejectsDuplicateQubit) {
    EXPECT_THROW(PauliString(1.0, {{0, Pauli::X}, {0, Pauli::Z}}), Error);
}

TEST(PauliString, MatrixMatchesKroneckerOracle) {
    const PauliString p = 0.5 * (X(0) * Z(2) * Y(3));
    const std::vector<Qubit> span = {0, 1, 2, 3};
    EXPECT_LT(oracle::max_abs_diff(p.matrix(span), oracle::dense(p, 4)), 1e-15);
}

TEST(PauliString, Commutation) {
    EXPECT_TRUE((Z(0) * Z(1)).commutes_with(X(0) * X(1)));
    EXPECT_FALSE(X(0).commutes_with(Z(0)));
    EXPECT_TRUE(X(0).commutes_with(Z(1)));
}

TEST(PauliSum, MergesIdenticalFactorMaps) {
    PauliSum s{Z(0), 2.0 * Z(0), X(1)};
    ASSERT_EQ(s.size(), 2U);
    EXPECT_DOUBLE_EQ(s.terms()[0].coefficient(), 3.0);
}

TEST(Compose, EmptyIsIdentity) {
    Circuit c(2);
    c.append(g::H(0)).append(g::CZ(0, 1));
    EXPECT_EQ(compose(Circuit(2), c), c);
}

TEST(Compose, PreservesOrder) {
    Circuit a(2), b(2);
    a.append(g::H(0));
    b.append(g::CZ(0, 1));
    const Circuit c = compose(a, b);
    ASSERT_EQ(c.size(), 2U);
    EXPECT_EQ(c.gates()[0].name(), "H");
    EXPECT_EQ(c.gates()[1].name(), "CZ");
}

TEST(Compose, SharedSymbolDoublesAngle) {
    Circuit a(1);
    a.append(g::Ry(0, sym("a")));
    const Circuit c = compose(a, a);
    EXPECT_EQ(c.symbols(), std::vector<std::string>{"a"});
    const double theta = 0.731;
    const Matrix twice = g::Ry(0, 2 * theta).matrix();
    const Matrix m0 = c.gates()[0].matrix({{"a", theta}});
    EXPECT_LT(oracle::max_abs_diff(m0 * m0, twice), 1e-12);
    EXPECT_LT(oracle::max_abs_diff(oracle::circuit_unitary(c, {{"a", theta}}), twice), 1e-12);
}

TEST(Compose, QubitCountMismatch) {
    EXPECT_NE(error_of([] { compose(Circuit(2), Circuit(3)); }).find("qubit-count mismatch"),
              std::string::npos);
}

TEST(Resolve, ZeroAngleIsIdentity) {
    Circuit c(1);
    c.append(g::Rx(0, sym("t")));
    const auto rc = resolve(c, {{"t", 0.0}});
    EXPECT_LT(oracle::max_abs_diff(rc.gates()[0].matrix(), Matrix::Identity(2, 2)), 1e-12);
}

TEST(Resolve, DiagonalExponential) {
    const Gate e = g::exp(sym("t"), PauliSum{Z(0)});
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = std::exp(Complex(0, -kPi / 4));
    want(1, 1) = std::exp(Complex(0, kPi / 4));
    EXPECT_LT(oracle::max_abs_diff(e.matrix({{"t", kPi / 4}}), want), 1e-12);
}

TEST(Resolve, MissingBinding) {
    Circuit c(2);
    c.append(g::Rx(0, sym("a"))).append(g::Ry(1, sym("b")));
    EXPECT_NE(error_of([&] { resolve(c, {{"a", 1.0}}); }).find("missing binding"),
              std::string::npos);
}

TEST(Resolve, NonFiniteBinding) {
    Circuit c(1);
    c.append(g::Rx(0, sym("a")));
    EXPECT_THROW(resolve(c, {{"a", std::nan("")}}), Error);
}

TEST(Resolve, KeepsGeneratorStructure) {
    Circuit c(1);
    c.append(g::Rx(0, sym("a")));
    const auto rc = resolve(c, {{"a", 0.3}});
    ASSERT_NE(rc.gates()[0].generator_exp(), nullptr);
    EXPECT_TRUE(rc.gates()[0].generator_exp()->exponent.is_constant());
    EXPECT_DOUBLE_EQ(rc.gates()[0].generator_exp()->exponent.value(), 0.3);
}

TEST(Resolve, IdempotentOnConcreteCircuit) {
    Circuit c(2);
    c.append(g::H(0)).append(g::Rx(1, 0.4)).append(g::CZ(0, 1));
    EXPECT_EQ(resolve(c, {}).circuit(), c);
    EXPECT_EQ(resolve(resolve(c, {}).circuit(), {}).circuit(), c);
}

TEST(GateMatrix, SinglePauliAtHalfPi) {
    const Gate e = g::exp(kPi / 2, PauliSum{X(0)});
    EXPECT_LT(oracle::max_abs_diff(e.matrix(), Complex(0, -1) * oracle::pauli2('X')), 1e-12);
}

TEST(GateMatrix, NonCommutingGeneratorMatchesTaylor) {
    const Gate e = g::exp(1.0, PauliSum{0.5 * Z(0), 0.5 * X(0)});
    const Matrix want = oracle::taylor_expm(Complex(0, -1) * 0.5 *
                                            (oracle::pauli2('Z') + oracle::pauli2('X')));
    EXPECT_LT(oracle::max_abs_diff(e.matrix(), want), 1e-9);
}

TEST(GateMatrix, HadamardUnchanged) {
    const double r = std::numbers::sqrt2 / 2;
    Matrix h(2, 2);
    h << r, r, r, -r;
    EXPECT_LT(oracle::max_abs_diff(g::H(0).matrix(), h), 1e-15);
}

TEST(GateMatrix, NamedGatesMatchTaylorOracle) {
    const double t = 0.37;
    const std::vector<Gate> gs = {g::Rx(0, t), g::Ry(0, t), g::Rz(0, t), g::XPow(0, t),
                                  g::YPow(0, t), g::ZPow(0, t), g::CNotPow(0, 1, t)};
    for (const auto& gate : gs) {
        const std::size_t n = gate.arity();
        Matrix want = oracle::gate_unitary(gate, n, {});
        EXPECT_LT(oracle::max_abs_diff(oracle::embed(gate.matrix(), gate.targets(), n), want),
                  1e-10)
            << gate.name();
    }
}

TEST(GateMatrix, PowerGatesAtOneAreThePaulis) {
    EXPECT_LT(oracle::max_abs_diff(g::XPow(0, 1.0).matrix(), g::X(0).matrix()), 1e-12);
    EXPECT_LT(oracle::max_abs_diff(g::ZPow(0, 1.0).matrix(), g::Z(0).matrix()), 1e-12);
    EXPECT_LT(oracle::max_abs_diff(g::CNotPow(0, 1, 1.0).matrix(), g::CNOT(0, 1).matrix()), 1e-12);
}

TEST(GateMatrix, UnitaryForRandomBindings) {
    CounterRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Circuit c = oracle::random_circuit(3, 10, rng, true);
        Bindings b;
        for (const auto& s : c.symbols()) {
            b[s] = rng.uniform(-10.0, 10.0);
        }
        for (const auto& gate : c.gates()) {
            EXPECT_LE(unitarity_error(gate.matrix(b)), 1e-10);
        }
    }
}

TEST(GateMatrix, RejectsNonUnitaryFixedMatrix) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 0) = 2.0;
    EXPECT_THROW(g::unitary({0}, m), Error);
}

TEST(ExponentialCircuit, SingleZZ) {
    const Circuit c = exponential_circuit(2, {PauliSum{Z(0) * Z(1)}}, {sym("g")});
    ASSERT_EQ(c.size(), 1U);
    EXPECT_EQ(c.gates()[0].arity(), 2U);
}

TEST(ExponentialCircuit, TriangleCostMatchesDenseExpm) {
    PauliSum hc;
    for (auto [a, b] : {std::pair<Qubit, Qubit>{0, 1}, {1, 2}, {0, 2}}) {
        hc += PauliSum{PauliString::identity(0.5), 0.5 * (Z(a) * Z(b))};
    }
    const Circuit c = exponential_circuit(3, {hc}, {sym("g")});
    EXPECT_EQ(c.size(), 3U);
    const double gamma = 0.81;
    const Matrix want = oracle::taylor_expm(Complex(0, -gamma) * oracle::dense(hc, 3));
    // Identity terms only contribute a global phase.
    const Matrix got = oracle::circuit_unitary(c, {{"g", gamma}});
    const Complex phase = want(0, 0) / got(0, 0);
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
    EXPECT_LT(oracle::max_abs_diff(phase * got, want), 1e-10);
}

TEST(ExponentialCircuit, NonCommutingTermsRejected) {
    EXPECT_NE(error_of([] { exponential_circuit(1, {PauliSum{X(0), Z(0)}}, {1.0}); })
                  .find("non-commuting"),
              std::string::npos);
}

TEST(Inverse, ProducesAdjointUnitary) {
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = oracle::random_circuit(3, 15, rng, true);
        Bindings b;
        for (const auto& s : c.symbols()) {
            b[s] = rng.uniform(-3.0, 3.0);
        }
        const Matrix u = oracle::circuit_unitary(c, b);
        const Matrix v = oracle::circuit_unitary(c.inverse(), b);
        EXPECT_LT(oracle::max_abs_diff(v * u, Matrix::Identity(8, 8)), 1e-9);
    }
}

TEST(Json, BellRoundTrip) {
    Circuit c(2);
    c.append(g::H(0)).append(g::CNOT(0, 1));
    EXPECT_EQ(circuit_from_json(to_json(c)), c);
}

TEST(Json, RandomRoundTrip) {
    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Circuit c = oracle::random_circuit(4, 12, rng, true);
        Matrix m = g::H(0).matrix() * g::T(0).matrix();
        c.append(g::unitary({2}, m));
        EXPECT_EQ(circuit_from_json(to_json(c)), c);
    }
}

TEST(Json, UnknownGateNamed) {
    const std::string text =
        R"({"num_qubits": 1, "gates": [{"name": "FOO", "targets": [0]}]})";
    const std::string msg = error_of([&] { circuit_from_json(text); });
    EXPECT_NE(msg.find("FOO"), std::string::npos);
    EXPECT_NE(msg.find("gates[0]"), std::string::npos);
}

TEST(Json, ParseErrorReportsLine) {
    const std::string text = "{\n\"num_qubits\": 1,\n\"gates\": [,]\n}";
    EXPECT_NE(error_of([&] { circuit_from_json(text); }).find("line 3"), std::string::npos);
}

TEST(Json, TargetOutOfRange) {
    const std::string text =
        R"({"num_qubits": 1, "gates": [{"name": "H", "targets": [3]}]})";
    EXPECT_THROW(circuit_from_json(text), Error);
}

TEST(Json, SharedSymbol) {
    const std::string text = R"({"num_qubits": 2, "gates": [
        {"name": "Rx", "targets": [0], "exponent": {"symbol": "a", "coeff": 1, "const": 0}},
        {"name": "Ry", "targets": [1], "exponent": {"symbol": "a", "coeff": 2, "const": 0}}]})";
    EXPECT_EQ(circuit_from_json(text).symbols(), std::vector<std::string>{"a"});
}

TEST(Json, PauliSumRoundTrip) {
    const PauliSum s{0.5 * (X(0) * Y(2)), -1.25 * Z(1), PauliString::identity(0.3)};
    EXPECT_EQ(pauli_sum_from_json(to_json(s)), s);
}
