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

#include "qcflow/nn/tensor.hpp"

namespace qcflow::nn {

enum class Loss { MSE, MeanAbsoluteError, CategoricalCrossEntropy, SquaredHinge };

inline constexpr double kCrossEntropyEpsilon = 1e-7;

inline const char* loss_name(Loss l) {
    switch (l) {
        case Loss::MSE:
            return "mse";
        case Loss::MeanAbsoluteError:
            return "mae";
        case Loss::CategoricalCrossEntropy:
            return "categorical_crossentropy";
        case Loss::SquaredHinge:
            return "squared_hinge";
    }
    return "?";
}

/**
 * Mean loss over the batch. Element-wise losses average over every entry;
 * cross entropy sums over classes then averages over rows, on probabilities
 * clipped to [eps, 1 - eps].
 */
inline double loss_forward(Loss kind, const Tensor& pred, const Tensor& target) {
    pred.check_same(target, "loss");
    const auto n = static_cast<double>(pred.size());
    double total = 0.0;
    switch (kind) {
        case Loss::MSE:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                total += (pred[i] - target[i]) * (pred[i] - target[i]);
            }
            return total / n;
        case Loss::MeanAbsoluteError:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                total += std::abs(pred[i] - target[i]);
            }
            return total / n;
        case Loss::CategoricalCrossEntropy:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double p =
                    std::clamp(pred[i], kCrossEntropyEpsilon, 1.0 - kCrossEntropyEpsilon);
                total -= target[i] * std::log(p);
            }
            return total / static_cast<double>(pred.rows());
        case Loss::SquaredHinge:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double h = std::max(0.0, 1.0 - target[i] * pred[i]);
                total += h * h;
            }
            return total / n;
    }
    return 0.0;
}

/// dLoss/dpred.
inline Tensor loss_backward(Loss kind, const Tensor& pred, const Tensor& target) {
    pred.check_same(target, "loss");
    const auto n = static_cast<double>(pred.size());
    Tensor g(pred.shape());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        switch (kind) {
            case Loss::MSE:
                g[i] = 2.0 * d / n;
                break;
            case Loss::MeanAbsoluteError:
                g[i] = (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) / n;
                break;
            case Loss::CategoricalCrossEntropy: {
                const bool clipped =
                    pred[i] < kCrossEntropyEpsilon || pred[i] > 1.0 - kCrossEntropyEpsilon;
                g[i] = clipped ? 0.0 : -target[i] / pred[i] / static_cast<double>(pred.rows());
                break;
            }
            case Loss::SquaredHinge: {
                const double h = std::max(0.0, 1.0 - target[i] * pred[i]);
                g[i] = -2.0 * h * target[i] / n;
                break;
            }
        }
    }
    return g;
}

} // namespace qcflow::nn
