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
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/sim/fusion.hpp"
#include "qcflow/sim/state_vector.hpp"

namespace qcflow {

inline constexpr std::size_t kDefaultMaxQubits = 26;

/// QCFLOW_MAX_QUBITS if set to a positive integer, else 26.
inline std::size_t default_max_qubits() {
    if (const char* env = std::getenv("QCFLOW_MAX_QUBITS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 40) {
            return v;
        }
    }
    return kDefaultMaxQubits;
}

struct SimOptions {
    bool fuse = true;
    std::size_t max_qubits = default_max_qubits();
};

inline void check_budget(std::size_t num_qubits, std::size_t max_qubits) {
    if (num_qubits > max_qubits) {
        throw ResourceError("memory budget exceeded: " + std::to_string(num_qubits) +
                            " qubits requested, limit is " + std::to_string(max_qubits) +
                            " (set QCFLOW_MAX_QUBITS to raise it)");
    }
}

inline void run(StateVector& state, const FusedCircuit& fused) {
    for (const auto& g : fused.gates) {
        apply_fused(state, g);
    }
}

inline void run(StateVector& state, const ConcreteCircuit& c, bool fuse_enabled) {
    QCFLOW_REQUIRE(state.num_qubits() == c.num_qubits(), "simulate: register size mismatch");
    const bool fusible = std::all_of(c.gates().begin(), c.gates().end(),
                                     [](const Gate& g) { return g.arity() <= 2; });
    // Gates on three or more qubits fall back to the gate-by-gate path.
    if (fuse_enabled && fusible) {
        run(state, fuse(c));
        return;
    }
    for (const auto& g : c.gates()) {
        state.apply_gate(g);
    }
}

/// Final state of the circuit applied to |0...0>.
inline StateVector simulate(const ConcreteCircuit& c, const SimOptions& opts = {}) {
    check_budget(c.num_qubits(), opts.max_qubits);
    StateVector state(c.num_qubits());
    run(state, c, opts.fuse);
    return state;
}

/// Final state of the circuit applied to `initial`.
inline StateVector simulate(const ConcreteCircuit& c, StateVector initial,
                            const SimOptions& opts = {}) {
    check_budget(c.num_qubits(), opts.max_qubits);
    run(initial, c, opts.fuse);
    return initial;
}

struct SampleBatch {
    std::size_t num_qubits = 0;
    std::vector<std::uint64_t> bitstrings; // bit q of each entry is qubit q

    [[nodiscard]] std::size_t shots() const { return bitstrings.size(); }
    [[nodiscard]] bool bit(std::size_t shot, Qubit q) const { return (bitstrings[shot] >> q) & 1U; }

    /// Qubit 0 first.
    [[nodiscard]] std::string str(std::size_t shot) const {
        std::string s(num_qubits, '0');
        for (std::size_t q = 0; q < num_qubits; ++q) {
            s[q] = bit(shot, q) ? '1' : '0';
        }
        return s;
    }
};

namespace sim_detail {

inline std::vector<double> cumulative(const StateVector& state) {
    std::vector<double> cdf(state.dim());
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += std::norm(amps[i]);
        cdf[i] = acc;
    }
    return cdf;
}

inline std::uint64_t draw(const std::vector<double>& cdf, CounterRng& rng) {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        --it;
    }
    // Skip zero-probability entries that share the same cumulative value.
    return static_cast<std::uint64_t>(it - cdf.begin());
}

/// Rotates the measurement basis so that Z-basis outcomes measure `p`:
/// H for X, S^dagger then H for Y.
inline void to_measurement_basis(StateVector& state, const PauliString& p) {
    const double r = std::numbers::sqrt2 / 2.0;
    Matrix h(2, 2);
    h << r, r, r, -r;
    Matrix sdg_then_h(2, 2);
    sdg_then_h << r, Complex(0, -r), r, Complex(0, r);
    for (const auto& [q, pauli] : p.factors()) {
        const Qubit t[1] = {q};
        if (pauli == Pauli::X) {
            state.apply_matrix(t, h);
        } else if (pauli == Pauli::Y) {
            state.apply_matrix(t, sdg_then_h);
        }
    }
}

} // namespace sim_detail

inline SampleBatch sample(const StateVector& state, std::size_t shots, CounterRng rng) {
    QCFLOW_REQUIRE(shots >= 1, "sample: shots must be >= 1");
    const auto cdf = sim_detail::cumulative(state);
    SampleBatch out{state.num_qubits(), {}};
    out.bitstrings.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        out.bitstrings.push_back(sim_detail::draw(cdf, rng));
    }
    return out;
}

/// i.i.d. bitstrings from |a_x|^2; identical seeds give identical batches.
inline SampleBatch sample(const StateVector& state, std::size_t shots, std::uint64_t seed) {
    return sample(state, shots, CounterRng(seed));
}

/// Mean eigenvalue of one unit-coefficient Pauli string from `shots` samples.
inline double sampled_pauli_mean(const StateVector& state, const PauliString& p, std::size_t shots,
                                 CounterRng rng) {
    QCFLOW_REQUIRE(shots >= 1, "sampled expectation: shots must be >= 1");
    if (p.is_identity()) {
        return 1.0;
    }
    StateVector rotated = state;
    sim_detail::to_measurement_basis(rotated, p);
    const auto cdf = sim_detail::cumulative(rotated);
    std::uint64_t mask = 0;
    for (auto q : p.support()) {
        mask |= std::uint64_t{1} << q;
    }
    long long total = 0;
    for (std::size_t s = 0; s < shots; ++s) {
        total += (std::popcount(sim_detail::draw(cdf, rng) & mask) & 1) ? -1 : 1;
    }
    return static_cast<double>(total) / static_cast<double>(shots);
}

/**
 * Unbiased estimate of <obs>: every non-identity term is measured in its own
 * rotated basis with `shots_per_term` samples drawn from substream
 * rng.split(term index). Identity terms contribute their coefficient exactly.
 */
inline double sampled_expectation(const StateVector& state, const PauliSum& obs,
                                  std::size_t shots_per_term, const CounterRng& rng) {
    QCFLOW_REQUIRE(shots_per_term >= 1, "sampled expectation: shots must be >= 1");
    double total = 0.0;
    for (std::size_t k = 0; k < obs.terms().size(); ++k) {
        const auto& t = obs.terms()[k];
        if (t.is_identity()) {
            total += t.coefficient();
            continue;
        }
        total += t.coefficient() * sampled_pauli_mean(state, t, shots_per_term, rng.split(k));
    }
    return total;
}

inline double sampled_expectation(const ConcreteCircuit& c, const PauliSum& obs,
                                  std::size_t shots_per_term, std::uint64_t seed,
                                  const SimOptions& opts = {}) {
    return sampled_expectation(simulate(c, opts), obs, shots_per_term, CounterRng(seed));
}

struct BatchOptions {
    SimOptions sim{};
    std::size_t workers = 1;
};

/**
 * Expectation matrix [batch, observables]. Row b binds circuits[b] with
 * values[b], whose columns follow `symbol_names`. Rows are independent and
 * split across `workers` threads; results do not depend on the split.
 */
inline std::vector<std::vector<double>>
batch_execute(const std::vector<Circuit>& circuits, const std::vector<std::string>& symbol_names,
              const std::vector<std::vector<double>>& values,
              const std::vector<PauliSum>& observables, const BatchOptions& opts = {}) {
    QCFLOW_REQUIRE(values.size() == circuits.size(),
                   "batch_execute: " + std::to_string(circuits.size()) + " circuits but " +
                       std::to_string(values.size()) + " binding rows");
    std::vector<Bindings> rows(circuits.size());
    for (std::size_t b = 0; b < circuits.size(); ++b) {
        QCFLOW_REQUIRE(values[b].size() == symbol_names.size(),
                       "batch_execute: ragged symbol coverage in row " + std::to_string(b));
        for (std::size_t s = 0; s < symbol_names.size(); ++s) {
            rows[b][symbol_names[s]] = values[b][s];
        }
        for (const auto& name : circuits[b].symbols()) {
            QCFLOW_REQUIRE(rows[b].count(name),
                           "batch_execute: ragged symbol coverage, row " + std::to_string(b) +
                               " does not bind '" + name + "'");
        }
    }
    std::vector<std::vector<double>> out(circuits.size(),
                                         std::vector<double>(observables.size(), 0.0));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            const StateVector s = simulate(resolve(circuits[b], rows[b]), opts.sim);
            for (std::size_t k = 0; k < observables.size(); ++k) {
                out[b][k] = expectation(s, observables[k]);
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, circuits.size()));
    if (workers <= 1) {
        work(0, circuits.size());
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (circuits.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(circuits.size(), begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace qcflow
