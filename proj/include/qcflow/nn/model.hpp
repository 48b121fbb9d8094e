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
 * Static computation graph over classical and quantum nodes.
 *
 * Nodes are added in topological order (every input must already exist) and
 * executed in insertion order; backward walks the same list in reverse.
 */

#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/dense.hpp"
#include "qcflow/nn/quantum.hpp"
#include "qcflow/nn/tensor.hpp"

namespace qcflow::nn {

using NodeId = std::size_t;

/// One minibatch: a tensor per tensor input, a circuit list per circuit input.
struct Batch {
    std::vector<Tensor> tensors;
    std::vector<std::vector<Circuit>> circuits;

    [[nodiscard]] std::size_t size() const {
        if (!tensors.empty()) {
            return tensors[0].rows();
        }
        return circuits.empty() ? 0 : circuits[0].size();
    }

    [[nodiscard]] Batch select(const std::vector<std::size_t>& idx) const {
        Batch out;
        for (const auto& t : tensors) {
            out.tensors.push_back(t.select_rows(idx));
        }
        for (const auto& cs : circuits) {
            std::vector<Circuit> picked;
            picked.reserve(idx.size());
            for (auto i : idx) {
                picked.push_back(cs.at(i));
            }
            out.circuits.push_back(std::move(picked));
        }
        return out;
    }
};

/// Trainable tensor with its accumulated gradient.
struct ParamRef {
    std::string name;
    Tensor* value;
    Tensor* grad;
};

class Model {
  public:
    NodeId tensor_input(std::size_t width) {
        Node n;
        n.kind = Kind::TensorInput;
        n.slot = tensor_inputs_++;
        n.width = width;
        return add(std::move(n));
    }

    NodeId circuit_input() {
        Node n;
        n.kind = Kind::CircuitInput;
        n.slot = circuit_inputs_++;
        return add(std::move(n));
    }

    NodeId dense(NodeId in, std::size_t units, Activation act, std::uint64_t seed) {
        Node n;
        n.kind = Kind::Dense;
        n.inputs = {tensor_node(in)};
        n.width = units;
        n.dense = DenseLayer::glorot(nodes_[in].width, units, act, seed);
        n.dense_grad = {Tensor(n.dense.weights.shape()), Tensor(n.dense.bias.shape())};
        return add(std::move(n));
    }

    /// Quantum node owning its parameters, initialized U(0, 2 pi).
    NodeId pqc(NodeId circuits, Circuit model, std::vector<PauliSum> observables,
               QuantumOptions opts, std::uint64_t seed) {
        QCFLOW_REQUIRE(nodes_.at(circuits).kind == Kind::CircuitInput,
                       "pqc: first input must be a circuit input");
        Node n;
        n.kind = Kind::Pqc;
        n.inputs = {circuits};
        n.quantum = std::make_shared<QuantumNode>(std::move(model), std::move(observables), opts);
        n.width = n.quantum->num_outputs();
        n.managed = Tensor({1, n.quantum->num_params()});
        CounterRng rng(seed);
        for (auto& x : n.managed.data()) {
            x = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        n.managed_grad = Tensor(n.managed.shape());
        return add(std::move(n));
    }

    /// Quantum node whose parameters arrive on an input edge, one row per sample.
    NodeId controlled_pqc(NodeId circuits, NodeId params, Circuit model,
                          std::vector<PauliSum> observables, QuantumOptions opts = {}) {
        QCFLOW_REQUIRE(nodes_.at(circuits).kind == Kind::CircuitInput,
                       "controlled pqc: first input must be a circuit input");
        Node n;
        n.kind = Kind::ControlledPqc;
        n.inputs = {circuits, tensor_node(params)};
        n.quantum = std::make_shared<QuantumNode>(std::move(model), std::move(observables), opts);
        QCFLOW_REQUIRE(nodes_[params].width == n.quantum->num_params(),
                       "controlled pqc: parameter edge width " +
                           std::to_string(nodes_[params].width) + " but model has " +
                           std::to_string(n.quantum->num_params()) + " symbols");
        n.width = n.quantum->num_outputs();
        return add(std::move(n));
    }

    NodeId concat(const std::vector<NodeId>& parts) {
        Node n;
        n.kind = Kind::Concat;
        for (auto p : parts) {
            n.inputs.push_back(tensor_node(p));
            n.width += nodes_[p].width;
        }
        return add(std::move(n));
    }

    void set_output(NodeId id) { output_ = tensor_node(id); }

    [[nodiscard]] std::size_t num_nodes() const { return nodes_.size(); }

    Tensor forward(const Batch& batch) {
        QCFLOW_REQUIRE(output_.has_value(), "model: no output node set");
        QCFLOW_REQUIRE(batch.tensors.size() == tensor_inputs_ &&
                           batch.circuits.size() == circuit_inputs_,
                       "model: batch does not match the declared inputs");
        batch_ = &batch;
        for (auto& n : nodes_) {
            switch (n.kind) {
                case Kind::TensorInput:
                    n.out = batch.tensors[n.slot];
                    QCFLOW_REQUIRE(n.out.rank() == 2 && n.out.cols() == n.width,
                                   "model: tensor input has the wrong width");
                    break;
                case Kind::CircuitInput:
                    break;
                case Kind::Dense:
                    n.out = dense_forward(n.dense, nodes_[n.inputs[0]].out, &n.cache);
                    break;
                case Kind::Pqc:
                    n.out = n.quantum->forward(circuits_of(n.inputs[0]), n.managed);
                    break;
                case Kind::ControlledPqc:
                    n.out = n.quantum->forward(circuits_of(n.inputs[0]), nodes_[n.inputs[1]].out);
                    break;
                case Kind::Concat: {
                    std::vector<const Tensor*> parts;
                    for (auto i : n.inputs) {
                        parts.push_back(&nodes_[i].out);
                    }
                    n.out = concat_cols(parts);
                    break;
                }
            }
        }
        return nodes_[*output_].out;
    }

    /// Accumulates parameter gradients of a scalar whose derivative with
    /// respect to the last forward output is `dout`.
    void backward(const Tensor& dout) {
        QCFLOW_REQUIRE(batch_ != nullptr, "model: backward called before forward");
        std::vector<std::optional<Tensor>> grads(nodes_.size());
        nodes_[*output_].out.check_same(dout, "backward");
        grads[*output_] = dout;
        auto push = [&](NodeId id, const Tensor& g) {
            if (grads[id]) {
                *grads[id] += g;
            } else {
                grads[id] = g;
            }
        };
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            Node& n = nodes_[i];
            if (!grads[i]) {
                continue;
            }
            const Tensor& g = *grads[i];
            switch (n.kind) {
                case Kind::TensorInput:
                case Kind::CircuitInput:
                    break;
                case Kind::Dense: {
                    const DenseGrads dg = dense_backward(n.dense, nodes_[n.inputs[0]].out, n.cache, g);
                    n.dense_grad.weights += dg.dweights;
                    n.dense_grad.bias += dg.dbias;
                    push(n.inputs[0], dg.dx);
                    break;
                }
                case Kind::Pqc: {
                    const Tensor rows = n.quantum->backward(circuits_of(n.inputs[0]), n.managed, g);
                    for (std::size_t r = 0; r < rows.rows(); ++r) {
                        for (std::size_t j = 0; j < rows.cols(); ++j) {
                            n.managed_grad(0, j) += rows(r, j);
                        }
                    }
                    break;
                }
                case Kind::ControlledPqc:
                    push(n.inputs[1], n.quantum->backward(circuits_of(n.inputs[0]),
                                                          nodes_[n.inputs[1]].out, g));
                    break;
                case Kind::Concat: {
                    std::size_t off = 0;
                    for (auto in : n.inputs) {
                        const std::size_t w = nodes_[in].width;
                        Tensor part({g.rows(), w});
                        for (std::size_t r = 0; r < g.rows(); ++r) {
                            for (std::size_t c = 0; c < w; ++c) {
                                part(r, c) = g(r, off + c);
                            }
                        }
                        push(in, part);
                        off += w;
                    }
                    break;
                }
            }
        }
    }

    void zero_grad() {
        for (auto& p : parameters()) {
            std::fill(p.grad->data().begin(), p.grad->data().end(), 0.0);
        }
    }

    std::vector<ParamRef> parameters() {
        std::vector<ParamRef> out;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            Node& n = nodes_[i];
            const std::string base = "node" + std::to_string(i);
            if (n.kind == Kind::Dense) {
                out.push_back({base + ".weights", &n.dense.weights, &n.dense_grad.weights});
                out.push_back({base + ".bias", &n.dense.bias, &n.dense_grad.bias});
            } else if (n.kind == Kind::Pqc && n.managed.size() > 0) {
                out.push_back({base + ".symbols", &n.managed, &n.managed_grad});
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t num_parameters() {
        std::size_t k = 0;
        for (const auto& p : parameters()) {
            k += p.value->size();
        }
        return k;
    }

    std::vector<double> flat_parameters() {
        std::vector<double> out;
        for (const auto& p : parameters()) {
            out.insert(out.end(), p.value->data().begin(), p.value->data().end());
        }
        return out;
    }

    void set_flat_parameters(const std::vector<double>& flat) {
        QCFLOW_REQUIRE(flat.size() == num_parameters(), "model: flat parameter size mismatch");
        std::size_t k = 0;
        for (const auto& p : parameters()) {
            for (auto& x : p.value->data()) {
                x = flat[k++];
            }
        }
    }

    std::vector<double> flat_gradients() {
        std::vector<double> out;
        for (const auto& p : parameters()) {
            out.insert(out.end(), p.grad->data().begin(), p.grad->data().end());
        }
        return out;
    }

    /// The quantum node behind a Pqc/ControlledPqc node id.
    QuantumNode& quantum(NodeId id) {
        QCFLOW_REQUIRE(nodes_.at(id).quantum != nullptr, "model: node is not quantum");
        return *nodes_[id].quantum;
    }

    DenseLayer& dense_layer(NodeId id) {
        QCFLOW_REQUIRE(nodes_.at(id).kind == Kind::Dense, "model: node is not dense");
        return nodes_[id].dense;
    }

    Tensor& managed_parameters(NodeId id) {
        QCFLOW_REQUIRE(nodes_.at(id).kind == Kind::Pqc, "model: node is not a pqc");
        return nodes_[id].managed;
    }

  private:
    enum class Kind { TensorInput, CircuitInput, Dense, Pqc, ControlledPqc, Concat };

    struct DenseParamGrads {
        Tensor weights;
        Tensor bias;
    };

    struct Node {
        Kind kind = Kind::TensorInput;
        std::vector<NodeId> inputs;
        std::size_t slot = 0;
        std::size_t width = 0;
        DenseLayer dense;
        DenseParamGrads dense_grad;
        DenseCache cache;
        std::shared_ptr<QuantumNode> quantum;
        Tensor managed;
        Tensor managed_grad;
        Tensor out;
    };

    NodeId add(Node n) {
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
    }

    NodeId tensor_node(NodeId id) const {
        QCFLOW_REQUIRE(id < nodes_.size(), "model: unknown node " + std::to_string(id));
        QCFLOW_REQUIRE(nodes_[id].kind != Kind::CircuitInput,
                       "model: circuit input used where a tensor is expected");
        return id;
    }

    const std::vector<Circuit>& circuits_of(NodeId id) const {
        return batch_->circuits.at(nodes_[id].slot);
    }

    std::vector<Node> nodes_;
    std::size_t tensor_inputs_ = 0;
    std::size_t circuit_inputs_ = 0;
    std::optional<NodeId> output_;
    const Batch* batch_ = nullptr;
};

} // namespace qcflow::nn
