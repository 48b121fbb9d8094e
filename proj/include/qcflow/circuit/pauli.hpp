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
 * Real-weighted Pauli strings and sums. A PauliSum is the one operator type
 * used for observables, cost Hamiltonians, and gate generators.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"

namespace qcflow {

using Qubit = std::size_t;

enum class Pauli : std::uint8_t { X, Y, Z };

inline char pauli_char(Pauli p) {
    switch (p) {
    case Pauli::X:
        return 'X';
    case Pauli::Y:
        return 'Y';
    case Pauli::Z:
        return 'Z';
    }
    return '?';
}

inline std::optional<Pauli> pauli_from_char(char c) {
    switch (c) {
    case 'X':
    case 'x':
        return Pauli::X;
    case 'Y':
    case 'y':
        return Pauli::Y;
    case 'Z':
    case 'z':
        return Pauli::Z;
    default:
        return std::nullopt;
    }
}

/// 2x2 matrix of a single Pauli.
inline Matrix pauli_matrix(Pauli p) {
    Matrix m(2, 2);
    switch (p) {
    case Pauli::X:
        m << 0, 1, 1, 0;
        break;
    case Pauli::Y:
        m << 0, Complex(0, -1), Complex(0, 1), 0;
        break;
    case Pauli::Z:
        m << 1, 0, 0, -1;
        break;
    }
    return m;
}

/// coefficient * (tensor product of factors), identity on absent qubits.
class PauliString {
  public:
    using Factor = std::pair<Qubit, Pauli>;

    PauliString() = default;

    PauliString(double coefficient, std::vector<Factor> factors)
        : coefficient_(coefficient), factors_(std::move(factors)) {
        QCFLOW_REQUIRE(std::isfinite(coefficient_), "PauliString: coefficient must be finite");
        std::sort(factors_.begin(), factors_.end(),
                  [](const Factor& a, const Factor& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < factors_.size(); ++i) {
            QCFLOW_REQUIRE(factors_[i].first != factors_[i - 1].first,
                           "PauliString: qubit " + std::to_string(factors_[i].first) +
                               " appears twice");
        }
    }

    static PauliString identity(double coefficient = 1.0) { return {coefficient, {}}; }

    [[nodiscard]] double coefficient() const { return coefficient_; }
    [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
    [[nodiscard]] bool is_identity() const { return factors_.empty(); }
    [[nodiscard]] std::size_t weight() const { return factors_.size(); }

    [[nodiscard]] std::optional<Pauli> at(Qubit q) const {
        for (const auto& [qq, p] : factors_) {
            if (qq == q) {
                return p;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::vector<Qubit> support() const {
        std::vector<Qubit> out;
        out.reserve(factors_.size());
        for (const auto& f : factors_) {
            out.push_back(f.first);
        }
        return out;
    }

    [[nodiscard]] std::optional<Qubit> max_qubit() const {
        if (factors_.empty()) {
            return std::nullopt;
        }
        return factors_.back().first;
    }

    [[nodiscard]] PauliString with_coefficient(double c) const {
        PauliString out = *this;
        QCFLOW_REQUIRE(std::isfinite(c), "PauliString: coefficient must be finite");
        out.coefficient_ = c;
        return out;
    }

    [[nodiscard]] bool same_factors(const PauliString& other) const {
        return factors_ == other.factors_;
    }

    /// Two Pauli strings commute iff they anticommute on an even number of qubits.
    [[nodiscard]] bool commutes_with(const PauliString& other) const {
        std::size_t anti = 0;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < factors_.size() && j < other.factors_.size()) {
            if (factors_[i].first < other.factors_[j].first) {
                ++i;
            } else if (factors_[i].first > other.factors_[j].first) {
                ++j;
            } else {
                if (factors_[i].second != other.factors_[j].second) {
                    ++anti;
                }
                ++i;
                ++j;
            }
        }
        return anti % 2 == 0;
    }

    /// Bit mask of qubits carrying X or Y (the bit-flip part).
    [[nodiscard]] std::uint64_t x_mask() const {
        std::uint64_t m = 0;
        for (const auto& [q, p] : factors_) {
            if (p != Pauli::Z) {
                m |= std::uint64_t{1} << q;
            }
        }
        return m;
    }

    /// Bit mask of qubits carrying Y or Z (the phase part).
    [[nodiscard]] std::uint64_t z_mask() const {
        std::uint64_t m = 0;
        for (const auto& [q, p] : factors_) {
            if (p != Pauli::X) {
                m |= std::uint64_t{1} << q;
            }
        }
        return m;
    }

    [[nodiscard]] std::size_t y_count() const {
        return static_cast<std::size_t>(std::count_if(
            factors_.begin(), factors_.end(), [](const Factor& f) { return f.second == Pauli::Y; }));
    }

    /// Dense matrix over `qubits`; qubits[0] is the least-significant local bit.
    [[nodiscard]] Matrix matrix(std::span<const Qubit> qubits) const {
        Matrix out = Matrix::Identity(1, 1);
        for (auto it = qubits.rbegin(); it != qubits.rend(); ++it) {
            const auto p = at(*it);
            out = kron(out, p ? pauli_matrix(*p) : Matrix(Matrix::Identity(2, 2)));
        }
        for (const auto& f : factors_) {
            QCFLOW_REQUIRE(std::find(qubits.begin(), qubits.end(), f.first) != qubits.end(),
                           "PauliString: qubit " + std::to_string(f.first) + " outside target list");
        }
        return coefficient_ * out;
    }

    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        os << coefficient_;
        if (factors_.empty()) {
            os << "*I";
        }
        for (const auto& [q, p] : factors_) {
            os << '*' << pauli_char(p) << q;
        }
        return os.str();
    }

    friend bool operator==(const PauliString&, const PauliString&) = default;

    friend PauliString operator*(double s, const PauliString& p) {
        return p.with_coefficient(s * p.coefficient_);
    }
    friend PauliString operator*(const PauliString& p, double s) { return s * p; }
    friend PauliString operator-(const PauliString& p) { return -1.0 * p; }

    /// Product of strings on disjoint supports.
    friend PauliString operator*(const PauliString& a, const PauliString& b) {
        std::vector<Factor> f = a.factors_;
        f.insert(f.end(), b.factors_.begin(), b.factors_.end());
        return {a.coefficient_ * b.coefficient_, std::move(f)};
    }

  private:
    double coefficient_ = 1.0;
    std::vector<Factor> factors_;
};

inline PauliString X(Qubit q) { return {1.0, {{q, Pauli::X}}}; }
inline PauliString Y(Qubit q) { return {1.0, {{q, Pauli::Y}}}; }
inline PauliString Z(Qubit q) { return {1.0, {{q, Pauli::Z}}}; }

/// Sum of Pauli strings with identical factor maps merged.
class PauliSum {
  public:
    PauliSum() = default;
    PauliSum(std::initializer_list<PauliString> terms) {
        for (const auto& t : terms) {
            add(t);
        }
    }
    explicit PauliSum(const std::vector<PauliString>& terms) {
        for (const auto& t : terms) {
            add(t);
        }
    }
    PauliSum(const PauliString& term) { add(term); } // NOLINT(google-explicit-constructor)

    /// Merges into an existing term with the same factors, else appends.
    void add(const PauliString& term) {
        for (auto& t : terms_) {
            if (t.same_factors(term)) {
                t = t.with_coefficient(t.coefficient() + term.coefficient());
                return;
            }
        }
        terms_.push_back(term);
    }

    [[nodiscard]] const std::vector<PauliString>& terms() const { return terms_; }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] bool empty() const { return terms_.empty(); }

    [[nodiscard]] bool terms_commute() const {
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            for (std::size_t j = i + 1; j < terms_.size(); ++j) {
                if (!terms_[i].commutes_with(terms_[j])) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Sorted union of qubits touched by any term.
    [[nodiscard]] std::vector<Qubit> support() const {
        std::vector<Qubit> out;
        for (const auto& t : terms_) {
            for (const auto& f : t.factors()) {
                out.push_back(f.first);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    [[nodiscard]] std::optional<Qubit> max_qubit() const {
        auto s = support();
        if (s.empty()) {
            return std::nullopt;
        }
        return s.back();
    }

    /// Pauli coefficient norm: sum of |coefficient|.
    [[nodiscard]] double coefficient_norm() const {
        double s = 0.0;
        for (const auto& t : terms_) {
            s += std::abs(t.coefficient());
        }
        return s;
    }

    /// Sum of coefficients of identity terms.
    [[nodiscard]] double identity_coefficient() const {
        double s = 0.0;
        for (const auto& t : terms_) {
            if (t.is_identity()) {
                s += t.coefficient();
            }
        }
        return s;
    }

    [[nodiscard]] Matrix matrix(std::span<const Qubit> qubits) const {
        const Eigen::Index dim = Eigen::Index{1} << qubits.size();
        Matrix out = Matrix::Zero(dim, dim);
        for (const auto& t : terms_) {
            out += t.matrix(qubits);
        }
        return out;
    }

    /// Dense matrix on qubits 0..n-1.
    [[nodiscard]] Matrix matrix(std::size_t num_qubits) const {
        std::vector<Qubit> qs(num_qubits);
        for (std::size_t i = 0; i < num_qubits; ++i) {
            qs[i] = i;
        }
        return matrix(qs);
    }

    [[nodiscard]] std::string str() const {
        if (terms_.empty()) {
            return "0";
        }
        std::string out;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) {
                out += " + ";
            }
            out += terms_[i].str();
        }
        return out;
    }

    PauliSum& operator+=(const PauliSum& other) {
        for (const auto& t : other.terms_) {
            add(t);
        }
        return *this;
    }

    friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }

    friend PauliSum operator*(double s, const PauliSum& a) {
        PauliSum out;
        for (const auto& t : a.terms_) {
            out.terms_.push_back(s * t);
        }
        return out;
    }
    friend PauliSum operator*(const PauliSum& a, double s) { return s * a; }

    friend bool operator==(const PauliSum&, const PauliSum&) = default;

  private:
    std::vector<PauliString> terms_;
};

} // namespace qcflow
