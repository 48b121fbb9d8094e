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
 * Quantum expectation node: maps a batch of (input circuit, parameter row)
 * pairs to the expectation values of N observables after the model circuit.
 *
 * The backward pass never forms the [N, M] Jacobian. For upstream gradient g
 * of row b it differentiates the single observable H_g = sum_k g_k h_k, whose
 * gradient is exactly the vector-Jacobian product.
 */

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/grad/differentiators.hpp"
#include "qcflow/nn/tensor.hpp"
#include "qcflow/sim/simulator.hpp"

namespace qcflow::nn {

enum class DiffMethod { ParameterShift, FiniteDifference, StochasticShift };

struct QuantumOptions {
    DiffMethod method = DiffMethod::ParameterShift;
    double fd_epsilon = 1e-5;
    StochasticConfig stochastic{};
    Estimator estimator = ExactEstimator{};
};

class QuantumNode {
  public:
    QuantumNode(Circuit model, std::vector<PauliSum> observables, QuantumOptions opts = {})
        : model_(std::move(model)), observables_(std::move(observables)), opts_(opts),
          symbols_(model_.symbols()) {
        QCFLOW_REQUIRE(!observables_.empty(), "quantum node: at least one observable required");
        for (const auto& o : observables_) {
            QCFLOW_REQUIRE(!o.max_qubit() || *o.max_qubit() < model_.num_qubits(),
                           "quantum node: observable acts beyond the register");
        }
    }

    [[nodiscard]] const Circuit& model() const { return model_; }
    [[nodiscard]] const std::vector<PauliSum>& observables() const { return observables_; }
    [[nodiscard]] const std::vector<std::string>& symbols() const { return symbols_; }
    [[nodiscard]] std::size_t num_params() const { return symbols_.size(); }
    [[nodiscard]] std::size_t num_outputs() const { return observables_.size(); }
    [[nodiscard]] const QuantumOptions& options() const { return opts_; }

    /// Batch size implied by the inputs; either side may broadcast from 1.
    [[nodiscard]] std::size_t batch_size(const std::vector<Circuit>& data, const Tensor& params) const {
        QCFLOW_REQUIRE(params.rank() == 2 && params.cols() == num_params(),
                       "quantum node: parameter tensor " + Tensor::shape_str(params.shape()) +
                           " does not match " + std::to_string(num_params()) + " symbols");
        const std::size_t b = std::max(data.size(), params.rows());
        QCFLOW_REQUIRE((data.size() == b || data.size() <= 1) &&
                           (params.rows() == b || params.rows() == 1),
                       "quantum node: batch size mismatch between circuits and parameters");
        return b;
    }

    /// [B, N] expectation values.
    Tensor forward(const std::vector<Circuit>& data, const Tensor& params) {
        const std::size_t batch = batch_size(data, params);
        const std::uint64_t call = calls_++;
        Tensor out({batch, num_outputs()});
        for (std::size_t b = 0; b < batch; ++b) {
            StateVector s = input_state(data, b);
            s = simulate(resolve(model_, bindings(params, b)), std::move(s));
            for (std::size_t k = 0; k < num_outputs(); ++k) {
                if (const auto* est = std::get_if<SampledEstimator>(&opts_.estimator)) {
                    out(b, k) = sampled_expectation(
                        s, observables_[k], est->shots,
                        CounterRng(est->seed).split(stream_id({0xa1, call, b, k})));
                } else {
                    out(b, k) = expectation(s, observables_[k]);
                }
            }
        }
        return out;
    }

    /// [B, M]: row b is the gradient of <sum_k upstream(b,k) h_k> w.r.t. the
    /// parameters of row b.
    Tensor backward(const std::vector<Circuit>& data, const Tensor& params, const Tensor& upstream) {
        const std::size_t batch = batch_size(data, params);
        QCFLOW_REQUIRE(upstream.rank() == 2 && upstream.rows() == batch &&
                           upstream.cols() == num_outputs(),
                       "quantum node: upstream gradient shape " +
                           Tensor::shape_str(upstream.shape()) + " does not match the output");
        const std::uint64_t call = calls_++;
        Tensor out({batch, num_params()});
        for (std::size_t b = 0; b < batch; ++b) {
            PauliSum effective;
            bool any = false;
            for (std::size_t k = 0; k < num_outputs(); ++k) {
                if (upstream(b, k) != 0.0) {
                    effective += upstream(b, k) * observables_[k];
                    any = true;
                }
            }
            if (!any || num_params() == 0) {
                continue;
            }
            GradRequest req(model_, effective, bindings(params, b), opts_.estimator);
            if (auto* est = std::get_if<SampledEstimator>(&req.estimator)) {
                est->seed = stream_id({est->seed, 0xb1, call, b});
            }
            req.initial_state = input_state(data, b);
            GradResult g;
            switch (opts_.method) {
                case DiffMethod::ParameterShift:
                    g = parameter_shift_grad(req);
                    break;
                case DiffMethod::FiniteDifference:
                    g = finite_difference_grad(req, FdScheme::Central, opts_.fd_epsilon);
                    break;
                case DiffMethod::StochasticShift: {
                    StochasticConfig cfg = opts_.stochastic;
                    cfg.seed = stream_id({cfg.seed, 0xb2, call, b});
                    g = stochastic_ps_grad(req, cfg);
                    break;
                }
            }
            for (std::size_t j = 0; j < num_params(); ++j) {
                out(b, j) = g.gradient[j];
            }
        }
        return out;
    }

  private:
    Bindings bindings(const Tensor& params, std::size_t b) const {
        const std::size_t row = params.rows() == 1 ? 0 : b;
        Bindings out;
        for (std::size_t j = 0; j < num_params(); ++j) {
            out[symbols_[j]] = params(row, j);
        }
        return out;
    }

    StateVector input_state(const std::vector<Circuit>& data, std::size_t b) const {
        if (data.empty()) {
            return StateVector(model_.num_qubits());
        }
        const Circuit& c = data[data.size() == 1 ? 0 : b];
        QCFLOW_REQUIRE(c.num_qubits() == model_.num_qubits(),
                       "quantum node: input circuit has " + std::to_string(c.num_qubits()) +
                           " qubits, model has " + std::to_string(model_.num_qubits()));
        return simulate(ConcreteCircuit(c));
    }

    Circuit model_;
    std::vector<PauliSum> observables_;
    QuantumOptions opts_;
    std::vector<std::string> symbols_;
    std::uint64_t calls_ = 0;
};

} // namespace qcflow::nn
