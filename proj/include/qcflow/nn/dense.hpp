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
#include <cmath>
#include <string>

#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/tensor.hpp"

namespace qcflow::nn {

enum class Activation { Linear, ReLU, Softmax, Sigmoid };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Linear:
            return "linear";
        case Activation::ReLU:
            return "relu";
        case Activation::Softmax:
            return "softmax";
        case Activation::Sigmoid:
            return "sigmoid";
    }
    return "?";
}

/// Row-wise softmax of a [B, N] tensor, shifted by the row max.
inline Tensor softmax(const Tensor& z) {
    Tensor out = z;
    for (std::size_t r = 0; r < z.rows(); ++r) {
        double mx = z(r, 0);
        for (std::size_t c = 1; c < z.cols(); ++c) {
            mx = std::max(mx, z(r, c));
        }
        double s = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) {
            out(r, c) = std::exp(z(r, c) - mx);
            s += out(r, c);
        }
        for (std::size_t c = 0; c < z.cols(); ++c) {
            out(r, c) /= s;
        }
    }
    return out;
}

inline Tensor activate(const Tensor& z, Activation a) {
    if (a == Activation::Softmax) {
        return softmax(z);
    }
    Tensor out = z;
    for (auto& x : out.data()) {
        if (a == Activation::ReLU) {
            x = std::max(0.0, x);
        } else if (a == Activation::Sigmoid) {
            x = 1.0 / (1.0 + std::exp(-x));
        }
    }
    return out;
}

/// dL/dz given dL/dy and the activation output y (and pre-activation z).
inline Tensor activation_backward(const Tensor& z, const Tensor& y, const Tensor& dy, Activation a) {
    Tensor dz = dy;
    switch (a) {
        case Activation::Linear:
            break;
        case Activation::ReLU:
            for (std::size_t i = 0; i < dz.size(); ++i) {
                dz[i] = z[i] > 0.0 ? dy[i] : 0.0;
            }
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < dz.size(); ++i) {
                dz[i] = dy[i] * y[i] * (1.0 - y[i]);
            }
            break;
        case Activation::Softmax:
            for (std::size_t r = 0; r < y.rows(); ++r) {
                double dot = 0.0;
                for (std::size_t c = 0; c < y.cols(); ++c) {
                    dot += dy(r, c) * y(r, c);
                }
                for (std::size_t c = 0; c < y.cols(); ++c) {
                    dz(r, c) = y(r, c) * (dy(r, c) - dot);
                }
            }
            break;
    }
    return dz;
}

/// y = act(x W + b) with W of shape [in, out].
struct DenseLayer {
    Tensor weights; // [in, out]
    Tensor bias;    // [out]
    Activation activation = Activation::Linear;

    /// Glorot-uniform weights, zero bias.
    static DenseLayer glorot(std::size_t in, std::size_t out, Activation act, std::uint64_t seed) {
        DenseLayer d{Tensor({in, out}), Tensor({out}), act};
        CounterRng rng(seed);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        for (auto& w : d.weights.data()) {
            w = rng.uniform(-limit, limit);
        }
        return d;
    }

    [[nodiscard]] std::size_t in() const { return weights.rows(); }
    [[nodiscard]] std::size_t out() const { return weights.cols(); }
};

struct DenseCache {
    Tensor z; // pre-activation
    Tensor y; // output
};

inline Tensor dense_forward(const DenseLayer& d, const Tensor& x, DenseCache* cache = nullptr) {
    QCFLOW_REQUIRE(x.rank() == 2 && x.cols() == d.in(),
                   "dense: input shape " + Tensor::shape_str(x.shape()) + " does not match " +
                       std::to_string(d.in()) + " inputs");
    Tensor z({x.rows(), d.out()});
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t o = 0; o < d.out(); ++o) {
            double acc = d.bias[o];
            for (std::size_t i = 0; i < d.in(); ++i) {
                acc += x(r, i) * d.weights(i, o);
            }
            z(r, o) = acc;
        }
    }
    Tensor y = activate(z, d.activation);
    if (cache) {
        cache->z = z;
        cache->y = y;
    }
    return y;
}

struct DenseGrads {
    Tensor dx;
    Tensor dweights;
    Tensor dbias;
};

inline DenseGrads dense_backward(const DenseLayer& d, const Tensor& x, const DenseCache& cache,
                                 const Tensor& dy) {
    cache.y.check_same(dy, "dense backward");
    const Tensor dz = activation_backward(cache.z, cache.y, dy, d.activation);
    DenseGrads g{Tensor({x.rows(), d.in()}), Tensor({d.in(), d.out()}), Tensor({d.out()})};
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t o = 0; o < d.out(); ++o) {
            const double v = dz(r, o);
            g.dbias[o] += v;
            for (std::size_t i = 0; i < d.in(); ++i) {
                g.dweights(i, o) += x(r, i) * v;
                g.dx(r, i) += v * d.weights(i, o);
            }
        }
    }
    return g;
}

} // namespace qcflow::nn
