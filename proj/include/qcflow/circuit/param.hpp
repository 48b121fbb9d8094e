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
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "qcflow/core/error.hpp"

namespace qcflow {

/// Symbol name -> value.
using Bindings = std::map<std::string, double>;

/// Affine expression coefficient * symbol + constant; a plain constant when
/// no symbol is attached.
class ParamExpr {
  public:
    ParamExpr(double constant = 0.0) : constant_(constant) {} // NOLINT(google-explicit-constructor)

    static ParamExpr symbol(std::string name, double coefficient = 1.0, double constant = 0.0) {
        QCFLOW_REQUIRE(!name.empty(), "symbol name must be non-empty");
        ParamExpr e(constant);
        e.symbol_ = std::move(name);
        e.coefficient_ = coefficient;
        return e;
    }

    [[nodiscard]] const std::optional<std::string>& symbol_name() const { return symbol_; }
    [[nodiscard]] double coefficient() const { return coefficient_; }
    [[nodiscard]] double constant() const { return constant_; }
    [[nodiscard]] bool is_constant() const { return !symbol_.has_value(); }

    [[nodiscard]] double evaluate(const Bindings& bindings) const {
        if (!symbol_) {
            return constant_;
        }
        auto it = bindings.find(*symbol_);
        if (it == bindings.end()) {
            throw Error("missing binding for symbol '" + *symbol_ + "'");
        }
        QCFLOW_REQUIRE(std::isfinite(it->second),
                       "non-finite binding for symbol '" + *symbol_ + "'");
        return coefficient_ * it->second + constant_;
    }

    /// Constant value; only valid when is_constant().
    [[nodiscard]] double value() const {
        QCFLOW_REQUIRE(is_constant(), "expression depends on symbol '" + symbol_.value_or("") + "'");
        return constant_;
    }

    friend ParamExpr operator*(double s, const ParamExpr& e) {
        ParamExpr out = e;
        out.coefficient_ *= s;
        out.constant_ *= s;
        return out;
    }
    friend ParamExpr operator*(const ParamExpr& e, double s) { return s * e; }
    friend ParamExpr operator+(const ParamExpr& e, double c) {
        ParamExpr out = e;
        out.constant_ += c;
        return out;
    }
    friend ParamExpr operator-(const ParamExpr& e) { return -1.0 * e; }

    friend bool operator==(const ParamExpr& a, const ParamExpr& b) {
        if (a.symbol_ != b.symbol_ || a.constant_ != b.constant_) {
            return false;
        }
        return !a.symbol_ || a.coefficient_ == b.coefficient_;
    }

  private:
    std::optional<std::string> symbol_;
    double coefficient_ = 1.0;
    double constant_ = 0.0;
};

inline ParamExpr sym(std::string name) { return ParamExpr::symbol(std::move(name)); }

} // namespace qcflow
