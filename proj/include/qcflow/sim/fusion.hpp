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
 * Anchor-based gate fusion.
 *
 * The circuit is viewed as a lattice: one row per qubit, gates ordered along
 * each row. Two-qubit gates are visited by (timestep, lower row) and each one
 * becomes an anchor that swallows every one-qubit gate reachable on its two
 * rows, plus any following two-qubit gate on exactly the same pair once both
 * rows have advanced to it. Rows with no two-qubit gate collapse into one
 * 2x2 product. The result contains only 2x2 and 4x4 dense matrices.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"
#include "qcflow/sim/state_vector.hpp"

namespace qcflow {

/// Dense 2x2 or 4x4 unitary. For two targets, targets[0] < targets[1] and
/// targets[0] is local bit 0.
struct FusedGate {
    Matrix matrix;
    std::vector<Qubit> targets;
};

struct FusedCircuit {
    std::size_t num_qubits = 0;
    std::vector<FusedGate> gates;
    std::size_t source_gate_count = 0;
};

inline void apply_fused(StateVector& state, const FusedGate& g) {
    state.apply_matrix(g.targets, g.matrix);
}

namespace fusion_detail {

/// 4x4 matrix of a two-qubit gate re-expressed with local bit 0 = lo.
inline Matrix ordered_pair_matrix(const Gate& g, Qubit lo, const Bindings& b = {}) {
    Matrix m = g.matrix(b);
    if (g.targets()[0] == lo) {
        return m;
    }
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    return swap * m * swap;
}

/// One-qubit matrix embedded into the (lo, hi) pair space.
inline Matrix embed_in_pair(const Matrix& m1, bool on_low) {
    const Matrix id = Matrix::Identity(2, 2);
    return on_low ? kron(id, m1) : kron(m1, id);
}

} // namespace fusion_detail

inline FusedCircuit fuse(const ConcreteCircuit& circuit) {
    using fusion_detail::embed_in_pair;
    using fusion_detail::ordered_pair_matrix;

    const auto& gates = circuit.gates();
    const std::size_t n = circuit.num_qubits();
    const std::size_t count = gates.size();
    FusedCircuit out;
    out.num_qubits = n;
    out.source_gate_count = count;

    for (std::size_t g = 0; g < count; ++g) {
        QCFLOW_REQUIRE(gates[g].arity() <= 2,
                       "fusion: gate " + std::to_string(g) + " ('" + gates[g].name() + "') acts on " +
                           std::to_string(gates[g].arity()) + " qubits; at most 2 supported");
    }

    // Lattice: per-row gate lists and an as-soon-as-possible timestep per gate.
    std::vector<std::vector<std::size_t>> rows(n);
    std::vector<std::size_t> timestep(count, 0);
    std::vector<std::size_t> row_time(n, 0);
    for (std::size_t g = 0; g < count; ++g) {
        std::size_t t = 0;
        for (auto q : gates[g].targets()) {
            t = std::max(t, row_time[q]);
        }
        timestep[g] = t;
        for (auto q : gates[g].targets()) {
            row_time[q] = t + 1;
            rows[q].push_back(g);
        }
    }
    auto position_in_row = [&](std::size_t g, Qubit q) {
        const auto& r = rows[q];
        return static_cast<std::size_t>(std::find(r.begin(), r.end(), g) - r.begin());
    };

    std::vector<std::size_t> scan(count);
    std::iota(scan.begin(), scan.end(), 0);
    std::stable_sort(scan.begin(), scan.end(), [&](std::size_t a, std::size_t b) {
        if (timestep[a] != timestep[b]) {
            return timestep[a] < timestep[b];
        }
        const auto& ta = gates[a].targets();
        const auto& tb = gates[b].targets();
        return *std::min_element(ta.begin(), ta.end()) < *std::min_element(tb.begin(), tb.end());
    });

    std::vector<std::size_t> counter(n, 0); // c_n: first unprocessed position per row
    std::vector<bool> consumed(count, false);
    std::vector<Matrix> cache(count);
    auto matrix_of = [&](std::size_t g) -> const Matrix& {
        if (cache[g].size() == 0) {
            cache[g] = gates[g].matrix();
        }
        return cache[g];
    };

    for (std::size_t anchor : scan) {
        if (gates[anchor].arity() != 2 || consumed[anchor]) {
            continue;
        }
        const Qubit lo = std::min(gates[anchor].targets()[0], gates[anchor].targets()[1]);
        const Qubit hi = std::max(gates[anchor].targets()[0], gates[anchor].targets()[1]);
        consumed[anchor] = true;

        // Earlier one-qubit gates on both rows.
        Matrix before = Matrix::Identity(4, 4);
        for (Qubit row : {lo, hi}) {
            const std::size_t stop = position_in_row(anchor, row);
            for (std::size_t p = counter[row]; p < stop; ++p) {
                const std::size_t g = rows[row][p];
                QCFLOW_REQUIRE(gates[g].arity() == 1 && !consumed[g],
                               "fusion: lattice invariant violated");
                before = embed_in_pair(matrix_of(g), row == lo) * before;
                consumed[g] = true;
            }
        }
        Matrix fused = ordered_pair_matrix(gates[anchor], lo) * before;

        std::size_t pos_lo = position_in_row(anchor, lo);
        std::size_t pos_hi = position_in_row(anchor, hi);
        while (true) {
            for (Qubit row : {lo, hi}) {
                std::size_t p = (row == lo ? pos_lo : pos_hi) + 1;
                while (p < rows[row].size() && gates[rows[row][p]].arity() == 1) {
                    fused = embed_in_pair(matrix_of(rows[row][p]), row == lo) * fused;
                    consumed[rows[row][p]] = true;
                    ++p;
                }
                counter[row] = p;
            }
            const bool lo_open = counter[lo] < rows[lo].size();
            const bool hi_open = counter[hi] < rows[hi].size();
            if (!lo_open || !hi_open || rows[lo][counter[lo]] != rows[hi][counter[hi]]) {
                break;
            }
            // Both rows stopped at the same two-qubit gate on (lo, hi): absorb it.
            const std::size_t next = rows[lo][counter[lo]];
            fused = ordered_pair_matrix(gates[next], lo) * fused;
            consumed[next] = true;
            pos_lo = counter[lo];
            pos_hi = counter[hi];
        }
        out.gates.push_back(FusedGate{std::move(fused), {lo, hi}});
    }

    // Rows never touched by a two-qubit gate.
    for (Qubit q = 0; q < n; ++q) {
        Matrix acc;
        for (std::size_t g : rows[q]) {
            if (consumed[g]) {
                continue;
            }
            QCFLOW_REQUIRE(gates[g].arity() == 1, "fusion: unabsorbed two-qubit gate");
            acc = acc.size() == 0 ? matrix_of(g) : Matrix(matrix_of(g) * acc);
            consumed[g] = true;
        }
        if (acc.size() != 0) {
            out.gates.push_back(FusedGate{std::move(acc), {q}});
        }
    }
    return out;
}

} // namespace qcflow
