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
 * Single-qubit binary classifier on two blobs of Bloch-sphere states.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/fit.hpp"
#include "qcflow/nn/model.hpp"

namespace qcflow::apps {

struct BlochDatasetSpec {
    double theta_a = 1.0;
    double theta_b = 4.0;
    std::size_t num_samples = 200;
    std::uint64_t seed = 0;

    [[nodiscard]] double blob_size() const { return std::abs(theta_a - theta_b) / 5.0; }
};

struct BlochDataset {
    std::vector<Circuit> circuits;
    nn::Tensor labels; // [N, 2] one-hot, column 0 is class a
};

/// Each sample picks a class by fair coin, then prepares
/// Rx(-spread_x) Ry(-(theta + spread_y)) |0> with spreads uniform in
/// +-blob_size.
inline BlochDataset generate_bloch_dataset(const BlochDatasetSpec& spec) {
    QCFLOW_REQUIRE(spec.num_samples >= 2, "bloch dataset: need at least 2 samples");
    CounterRng rng(spec.seed);
    const double blob = spec.blob_size();
    BlochDataset out{{}, nn::Tensor({spec.num_samples, 2})};
    for (std::size_t i = 0; i < spec.num_samples; ++i) {
        const bool is_a = rng.uniform() < 0.5;
        const double spread_x = rng.uniform(-blob, blob);
        const double spread_y = rng.uniform(-blob, blob);
        const double angle = (is_a ? spec.theta_a : spec.theta_b) + spread_y;
        Circuit c(1);
        c.append(gates::Ry(0, -angle)).append(gates::Rx(0, -spread_x));
        out.circuits.push_back(std::move(c));
        out.labels(i, is_a ? 0 : 1) = 1.0;
    }
    return out;
}

struct ClassifierOptions {
    std::size_t epochs = 50;
    double lr = 0.1;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1234;
};

struct ClassifierResult {
    nn::History history;
    double test_accuracy = 0.0;
    double theta = 0.0; // trained rotation angle
};

/// Ry(theta) then <Z>, fed to Dense(2, softmax) under cross entropy. The test
/// set is a fresh draw from the same spec with a different seed.
inline ClassifierResult run_binary_classifier(const BlochDatasetSpec& spec,
                                              const ClassifierOptions& o = {}) {
    const BlochDataset train = generate_bloch_dataset(spec);
    BlochDatasetSpec test_spec = spec;
    test_spec.seed = stream_id({spec.seed, 0x7e57});
    const BlochDataset test = generate_bloch_dataset(test_spec);

    nn::Model model;
    const nn::NodeId in = model.circuit_input();
    Circuit pqc(1);
    pqc.append(gates::Ry(0, sym("theta")));
    const nn::NodeId q = model.pqc(in, pqc, {PauliSum{Z(0)}}, {}, stream_id({o.seed, 1}));
    model.set_output(model.dense(q, 2, nn::Activation::Softmax, stream_id({o.seed, 2})));

    nn::Adam opt(o.lr);
    ClassifierResult r;
    r.history = nn::fit(model, nn::Batch{{}, {train.circuits}}, train.labels,
                        nn::Loss::CategoricalCrossEntropy, opt,
                        {.epochs = o.epochs,
                         .batch_size = o.batch_size,
                         .seed = o.seed,
                         .metric = nn::Metric::Accuracy});
    r.test_accuracy = nn::evaluate(model, nn::Batch{{}, {test.circuits}}, test.labels,
                                   nn::Loss::CategoricalCrossEntropy, nn::Metric::Accuracy)
                          .second;
    r.theta = model.managed_parameters(q)(0, 0);
    return r;
}

} // namespace qcflow::apps
