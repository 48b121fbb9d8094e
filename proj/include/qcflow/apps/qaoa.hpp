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
 * MaxCut with QAOA. The cost Hamiltonian is |E|/2 + 1/2 sum Z_i Z_j, which
 * counts uncut edges, so cut(x) = |E| - H_C(x) and minimizing H_C maximizes
 * the cut.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/fit.hpp"
#include "qcflow/nn/model.hpp"
#include "qcflow/sim/simulator.hpp"

namespace qcflow::apps {

struct Graph {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    [[nodiscard]] bool connected() const {
        if (nodes == 0) {
            return false;
        }
        std::vector<std::size_t> parent(nodes);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) {
                x = parent[x] = parent[parent[x]];
            }
            return x;
        };
        std::size_t parts = nodes;
        for (auto [a, b] : edges) {
            const std::size_t ra = find(a), rb = find(b);
            if (ra != rb) {
                parent[ra] = rb;
                --parts;
            }
        }
        return parts == 1;
    }

    /// Throws unless every edge joins two distinct in-range nodes once.
    void validate() const {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (auto [a, b] : edges) {
            QCFLOW_REQUIRE(a < nodes && b < nodes, "graph: edge endpoint out of range");
            QCFLOW_REQUIRE(a != b, "graph: self loop on node " + std::to_string(a));
            QCFLOW_REQUIRE(seen.insert(std::minmax(a, b)).second, "graph: repeated edge");
        }
    }
};

/// Uniform pairing of d stubs per node, redrawn until the result is a
/// simple connected graph.
inline Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
    QCFLOW_REQUIRE(n > d && (n * d) % 2 == 0, "random regular graph: need n > d and n*d even");
    CounterRng rng(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<std::size_t> stubs;
        for (std::size_t v = 0; v < n; ++v) {
            stubs.insert(stubs.end(), d, v);
        }
        std::shuffle(stubs.begin(), stubs.end(), rng);
        Graph g{n, {}};
        std::set<std::pair<std::size_t, std::size_t>> seen;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
            const auto e = std::minmax(stubs[i], stubs[i + 1]);
            ok = e.first != e.second && seen.insert(e).second;
            g.edges.emplace_back(e);
        }
        if (ok && g.connected()) {
            return g;
        }
    }
    throw Error("random regular graph: no simple connected sample found");
}

inline PauliSum maxcut_cost_hamiltonian(const Graph& g) {
    g.validate();
    PauliSum h{PauliString::identity(static_cast<double>(g.edges.size()) / 2.0)};
    for (auto [a, b] : g.edges) {
        h += 0.5 * (Z(static_cast<Qubit>(a)) * Z(static_cast<Qubit>(b)));
    }
    return h;
}

inline PauliSum maxcut_mixer_hamiltonian(const Graph& g) {
    PauliSum h;
    for (std::size_t v = 0; v < g.nodes; ++v) {
        h += X(static_cast<Qubit>(v));
    }
    return h;
}

inline std::size_t cut_value(const Graph& g, std::uint64_t bits) {
    std::size_t cut = 0;
    for (auto [a, b] : g.edges) {
        cut += ((bits >> a) & 1U) != ((bits >> b) & 1U);
    }
    return cut;
}

/// Exhaustive optimum; only meant for small graphs.
inline std::pair<std::uint64_t, std::size_t> brute_force_maxcut(const Graph& g) {
    QCFLOW_REQUIRE(g.nodes <= 24, "brute force maxcut: graph too large");
    std::pair<std::uint64_t, std::size_t> best{0, 0};
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << g.nodes); ++x) {
        if (const std::size_t c = cut_value(g, x); c > best.second) {
            best = {x, c};
        }
    }
    return best;
}

struct MaxCutProblem {
    Graph graph;
    std::size_t p = 1;
};

struct QaoaCircuit {
    Circuit hadamards;  // input: |+>^n
    Circuit ansatz;     // p blocks of exp(-i gamma_l H_C) exp(-i eta_l H_M)
    PauliSum cost;
};

inline QaoaCircuit build_maxcut_qaoa(const MaxCutProblem& prob) {
    const Graph& g = prob.graph;
    QCFLOW_REQUIRE(prob.p >= 1, "qaoa: depth p must be >= 1");
    QCFLOW_REQUIRE(g.connected(), "qaoa: graph must be connected");
    QaoaCircuit out{Circuit(g.nodes), Circuit(g.nodes), maxcut_cost_hamiltonian(g)};
    for (Qubit q = 0; q < g.nodes; ++q) {
        out.hadamards.append(gates::H(q));
    }
    const PauliSum mixer = maxcut_mixer_hamiltonian(g);
    for (std::size_t l = 0; l < prob.p; ++l) {
        out.ansatz.append(exponential_circuit(
            g.nodes, {out.cost, mixer},
            {sym("gamma" + std::to_string(l)), sym("eta" + std::to_string(l))}));
    }
    return out;
}

struct QaoaOptions {
    std::size_t epochs = 200;
    double lr = 0.05;
    std::size_t shots = 2048;
    std::uint64_t seed = 7;
};

struct QaoaResult {
    nn::History history;       // loss is <H_C> before each update
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::uint64_t best_bitstring = 0;
    std::size_t best_cut = 0;
    std::vector<double> angles; // gamma_0, eta_0, gamma_1, ...
};

/// Trains the angles against mean absolute error to 0 (H_C is nonnegative,
/// so this is <H_C> itself), then samples and keeps the lowest-cost shot.
inline QaoaResult run_qaoa(const MaxCutProblem& prob, const QaoaOptions& o = {}) {
    const QaoaCircuit qc = build_maxcut_qaoa(prob);
    nn::Model m;
    const nn::NodeId in = m.circuit_input();
    const nn::NodeId node = m.pqc(in, qc.ansatz, {qc.cost}, {}, o.seed);
    m.set_output(node);
    const nn::Batch x{{}, {{qc.hadamards}}};
    const nn::Tensor y({1, 1});

    QaoaResult r;
    r.initial_energy = m.forward(x)(0, 0);
    nn::Adam opt(o.lr);
    r.history = nn::fit(m, x, y, nn::Loss::MeanAbsoluteError, opt,
                        {.epochs = o.epochs, .batch_size = 1, .seed = o.seed, .shuffle = false});
    r.final_energy = m.forward(x)(0, 0);

    const nn::Tensor& theta = m.managed_parameters(node);
    Bindings b;
    const auto& names = m.quantum(node).symbols();
    for (std::size_t j = 0; j < names.size(); ++j) {
        b[names[j]] = theta(0, j);
    }
    for (std::size_t l = 0; l < prob.p; ++l) {
        r.angles.push_back(b.at("gamma" + std::to_string(l)));
        r.angles.push_back(b.at("eta" + std::to_string(l)));
    }
    const StateVector s = simulate(resolve(compose(qc.hadamards, qc.ansatz), b));
    const SampleBatch shots = sample(s, o.shots, stream_id({o.seed, 0x5a}));
    for (std::size_t i = 0; i < shots.shots(); ++i) {
        const std::uint64_t x_i = shots.bitstrings[i];
        if (const std::size_t c = cut_value(prob.graph, x_i); i == 0 || c > r.best_cut) {
            r.best_cut = c;
            r.best_bitstring = x_i;
        }
    }
    return r;
}

} // namespace qcflow::apps
