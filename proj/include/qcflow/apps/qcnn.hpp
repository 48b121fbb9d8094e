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
 * Quantum convolutional classifier for excited cluster states, with the
 * pure-quantum and two hybrid readout variants.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/fit.hpp"
#include "qcflow/nn/model.hpp"

namespace qcflow::apps {

/// H on every qubit, then CZ around the ring.
inline Circuit cluster_state_circuit(std::size_t n) {
    QCFLOW_REQUIRE(n >= 3, "cluster state: need at least 3 qubits, got " + std::to_string(n));
    Circuit c(n);
    for (Qubit q = 0; q < n; ++q) {
        c.append(gates::H(q));
    }
    for (Qubit q = 0; q < n; ++q) {
        c.append(gates::CZ(q, (q + 1) % n));
    }
    return c;
}

/// X_i Z_{i-1} Z_{i+1} on the ring.
inline PauliString cluster_stabilizer(std::size_t n, Qubit i) {
    return X(i) * Z((i + n - 1) % n) * Z((i + 1) % n);
}

struct ClusterStateTask {
    std::size_t n_qubits = 8;
    double rotation_threshold = std::numbers::pi / 2;
    std::vector<double> angles;
    std::vector<Qubit> excited;
    std::vector<Circuit> circuits; // excitation followed by cluster preparation
    nn::Tensor labels;             // [N, 1] in {-1, +1}
};

/// Rx(angle) on one random qubit before the cluster preparation; label +1
/// when |angle| exceeds the threshold.
inline ClusterStateTask generate_cluster_task(std::size_t n, std::size_t num_samples,
                                              std::uint64_t seed,
                                              double threshold = std::numbers::pi / 2) {
    ClusterStateTask t;
    t.n_qubits = n;
    t.rotation_threshold = threshold;
    t.labels = nn::Tensor({num_samples, 1});
    const Circuit prep = cluster_state_circuit(n);
    CounterRng rng(seed);
    for (std::size_t i = 0; i < num_samples; ++i) {
        const auto q = static_cast<Qubit>(rng.below(n));
        const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
        Circuit c(n);
        c.append(gates::Rx(q, angle)).append(prep);
        t.angles.push_back(angle);
        t.excited.push_back(q);
        t.circuits.push_back(std::move(c));
        t.labels(i, 0) = std::abs(angle) > threshold ? 1.0 : -1.0;
    }
    return t;
}

namespace qcnn_detail {
inline ParamExpr s(const std::string& prefix, std::size_t i, double coeff = 1.0) {
    return ParamExpr::symbol(prefix + std::to_string(i), coeff);
}

inline void one_qubit(Circuit& c, Qubit q, const std::string& p, std::size_t first) {
    c.append(gates::Rx(q, s(p, first))).append(gates::Ry(q, s(p, first + 1)));
    c.append(gates::Rz(q, s(p, first + 2)));
}

inline void one_qubit_inverse(Circuit& c, Qubit q, const std::string& p, std::size_t first) {
    c.append(gates::Rz(q, s(p, first + 2, -1.0))).append(gates::Ry(q, s(p, first + 1, -1.0)));
    c.append(gates::Rx(q, s(p, first, -1.0)));
}
} // namespace qcnn_detail

/// 15-parameter two-qubit block: local rotations, XX/YY/ZZ exponentials,
/// local rotations. Symbols are prefix0 .. prefix14.
inline void two_qubit_unitary(Circuit& c, Qubit a, Qubit b, const std::string& prefix) {
    using qcnn_detail::s;
    qcnn_detail::one_qubit(c, a, prefix, 0);
    qcnn_detail::one_qubit(c, b, prefix, 3);
    c.append(gates::exp(s(prefix, 6), PauliSum{X(a) * X(b)}));
    c.append(gates::exp(s(prefix, 7), PauliSum{Y(a) * Y(b)}));
    c.append(gates::exp(s(prefix, 8), PauliSum{Z(a) * Z(b)}));
    qcnn_detail::one_qubit(c, a, prefix, 9);
    qcnn_detail::one_qubit(c, b, prefix, 12);
}

/// Shared block on even pairs, then odd pairs closing the ring.
inline void conv_layer(Circuit& c, const std::vector<Qubit>& qubits, const std::string& prefix) {
    const std::size_t n = qubits.size();
    QCFLOW_REQUIRE(n >= 2, "conv layer: need at least 2 qubits");
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        two_qubit_unitary(c, qubits[i], qubits[i + 1], prefix);
    }
    for (std::size_t i = 1; i < n; i += 2) {
        two_qubit_unitary(c, qubits[i], qubits[(i + 1) % n], prefix);
    }
}

/// Rotations on sink and source, CNOT source -> sink, undo the sink
/// rotations. Six shared symbols.
inline void pool_layer(Circuit& c, const std::vector<Qubit>& sources, const std::vector<Qubit>& sinks,
                       const std::string& prefix) {
    QCFLOW_REQUIRE(sources.size() == sinks.size(), "pool layer: source/sink count mismatch");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        qcnn_detail::one_qubit(c, sinks[i], prefix, 0);
        qcnn_detail::one_qubit(c, sources[i], prefix, 3);
        c.append(gates::CNOT(sources[i], sinks[i]));
        qcnn_detail::one_qubit_inverse(c, sinks[i], prefix, 0);
    }
}

/// Conv then pool the first half into the second half. Returns the
/// surviving qubits.
inline std::vector<Qubit> qcnn_stage(Circuit& c, const std::vector<Qubit>& active,
                                     const std::string& prefix) {
    QCFLOW_REQUIRE(active.size() % 2 == 0,
                   "qcnn: pooling needs an even register, got " + std::to_string(active.size()));
    conv_layer(c, active, prefix + "c");
    const std::size_t h = active.size() / 2;
    const std::vector<Qubit> src(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(h));
    const std::vector<Qubit> sink(active.begin() + static_cast<std::ptrdiff_t>(h), active.end());
    pool_layer(c, src, sink, prefix + "p");
    return sink;
}

/// Stages until `stages` pools have run (all the way to one qubit when
/// stages is 0). Returns the circuit and readout qubits.
inline std::pair<Circuit, std::vector<Qubit>> qcnn_circuit(std::size_t n, std::size_t stages,
                                                           const std::string& prefix) {
    Circuit c(n);
    std::vector<Qubit> active(n);
    for (Qubit q = 0; q < n; ++q) {
        active[q] = q;
    }
    for (std::size_t s = 0; active.size() > 1 && (stages == 0 || s < stages); ++s) {
        active = qcnn_stage(c, active, prefix + "l" + std::to_string(s));
    }
    return {c, active};
}

enum class QcnnVariant { Pure, Hybrid, MultiFilter };

inline const char* qcnn_variant_name(QcnnVariant v) {
    switch (v) {
        case QcnnVariant::Pure:
            return "pure";
        case QcnnVariant::Hybrid:
            return "hybrid";
        case QcnnVariant::MultiFilter:
            return "multi_filter";
    }
    return "?";
}

/// Model with one circuit input. Hybrid variants truncate after the first
/// pool and read Z on the surviving qubits.
inline nn::Model build_qcnn_model(QcnnVariant v, std::size_t n, std::uint64_t seed) {
    nn::Model m;
    const nn::NodeId in = m.circuit_input();
    if (v == QcnnVariant::Pure) {
        auto [c, out] = qcnn_circuit(n, 0, "q");
        m.set_output(m.pqc(in, c, {PauliSum{Z(out[0])}}, {}, seed));
        return m;
    }
    const std::size_t filters = v == QcnnVariant::Hybrid ? 1 : 3;
    std::vector<nn::NodeId> heads;
    for (std::size_t f = 0; f < filters; ++f) {
        auto [c, out] = qcnn_circuit(n, 1, "f" + std::to_string(f));
        std::vector<PauliSum> obs;
        for (auto q : out) {
            obs.push_back(PauliSum{Z(q)});
        }
        heads.push_back(m.pqc(in, c, obs, {}, stream_id({seed, f})));
    }
    const nn::NodeId joined = heads.size() == 1 ? heads[0] : m.concat(heads);
    const nn::NodeId h = m.dense(joined, 8, nn::Activation::ReLU, stream_id({seed, 0xd1}));
    m.set_output(m.dense(h, 1, nn::Activation::Linear, stream_id({seed, 0xd2})));
    return m;
}

struct QcnnOptions {
    std::size_t n_qubits = 8;
    std::size_t num_samples = 64;
    double train_fraction = 0.7;
    std::size_t epochs = 25;
    std::size_t batch_size = 16;
    double lr = 0.02;
    std::uint64_t seed = 42;
};

struct QcnnVariantResult {
    QcnnVariant variant = QcnnVariant::Pure;
    double baseline_val_mse = 0.0; // before any update
    nn::History history;
};

inline std::vector<QcnnVariantResult> run_qcnn_variants(const QcnnOptions& o = {}) {
    const ClusterStateTask task = generate_cluster_task(o.n_qubits, o.num_samples, o.seed);
    const auto n_train = static_cast<std::size_t>(std::round(o.train_fraction * static_cast<double>(o.num_samples)));
    QCFLOW_REQUIRE(n_train >= 1 && n_train < o.num_samples, "qcnn: empty train or validation split");
    std::vector<std::size_t> tr(n_train), va(o.num_samples - n_train);
    for (std::size_t i = 0; i < o.num_samples; ++i) {
        (i < n_train ? tr[i] : va[i - n_train]) = i;
    }
    const nn::Batch all{{}, {task.circuits}};
    const nn::Batch x_train = all.select(tr);
    const nn::Batch x_val = all.select(va);
    const nn::Tensor y_train = task.labels.select_rows(tr);
    const nn::Tensor y_val = task.labels.select_rows(va);

    std::vector<QcnnVariantResult> out;
    for (QcnnVariant v : {QcnnVariant::Pure, QcnnVariant::Hybrid, QcnnVariant::MultiFilter}) {
        nn::Model m = build_qcnn_model(v, o.n_qubits, stream_id({o.seed, static_cast<std::uint64_t>(v)}));
        QcnnVariantResult r;
        r.variant = v;
        r.baseline_val_mse = nn::evaluate(m, x_val, y_val, nn::Loss::MSE).first;
        nn::Adam opt(o.lr);
        r.history = nn::fit(m, x_train, y_train, nn::Loss::MSE, opt,
                            {.epochs = o.epochs,
                             .batch_size = o.batch_size,
                             .seed = o.seed,
                             .metric = nn::Metric::HingeAccuracy,
                             .val_x = &x_val,
                             .val_y = &y_val});
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace qcflow::apps
