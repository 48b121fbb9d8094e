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
 * Gradient variance of random layered circuits as the register grows.
 */

#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/grad/differentiators.hpp"

namespace qcflow::apps {

/// Ry(pi/4) on every qubit, then `depth` layers of a random choice of
/// Rx/Ry/Rz per qubit followed by a CZ ladder. Every rotation angle is drawn
/// uniformly from [0, 2pi); only the first rotation keeps the symbol "theta".
inline std::pair<Circuit, Bindings> random_layered_circuit(std::size_t n, std::size_t depth,
                                                           CounterRng& rng) {
    Circuit c(n);
    for (Qubit q = 0; q < n; ++q) {
        c.append(gates::Ry(q, std::numbers::pi / 4));
    }
    Bindings b;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        for (Qubit q = 0; q < n; ++q) {
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const bool first = layer == 0 && q == 0;
            const ParamExpr p = first ? sym("theta") : ParamExpr(angle);
            if (first) {
                b["theta"] = angle;
            }
            switch (rng.below(3)) {
                case 0:
                    c.append(gates::Rx(q, p));
                    break;
                case 1:
                    c.append(gates::Ry(q, p));
                    break;
                default:
                    c.append(gates::Rz(q, p));
                    break;
            }
        }
        for (Qubit q = 0; q + 1 < n; ++q) {
            c.append(gates::CZ(q, q + 1));
        }
    }
    return {c, b};
}

/// Sample variance (n - 1 denominator) of d<Z0 Z1>/dtheta per register size.
inline std::vector<double> barren_plateau_scan(const std::vector<std::size_t>& n_list,
                                               std::size_t depth, std::size_t trials,
                                               std::uint64_t seed) {
    QCFLOW_REQUIRE(depth >= 1 && trials >= 2, "barren plateau: need depth >= 1 and trials >= 2");
    const CounterRng master(seed);
    std::vector<double> out;
    for (std::size_t n : n_list) {
        QCFLOW_REQUIRE(n >= 2, "barren plateau: need at least 2 qubits");
        const PauliSum obs{Z(0) * Z(1)};
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            CounterRng rng = master.split(stream_id({n, t}));
            auto [c, b] = random_layered_circuit(n, depth, rng);
            const double g = parameter_shift_grad({c, obs, b}).gradient.at(0);
            sum += g;
            sum_sq += g * g;
        }
        const auto k = static_cast<double>(trials);
        out.push_back((sum_sq - sum * sum / k) / (k - 1.0));
    }
    return out;
}

} // namespace qcflow::apps
