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
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <tuple>
#include <vector>

#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/loss.hpp"
#include "qcflow/nn/model.hpp"
#include "qcflow/nn/tensor.hpp"

namespace qcflow::nn {

enum class Metric {
    None,
    Accuracy,      // argmax of prediction equals argmax of one-hot target
    HingeAccuracy, // sign of prediction equals sign of +-1 target
    MeanAbsoluteError,
};

inline double metric_value(Metric m, const Tensor& pred, const Tensor& target) {
    pred.check_same(target, "metric");
    switch (m) {
        case Metric::None:
            return std::numeric_limits<double>::quiet_NaN();
        case Metric::Accuracy: {
            std::size_t hits = 0;
            for (std::size_t r = 0; r < pred.rows(); ++r) {
                const auto p = pred.row(r);
                const auto t = target.row(r);
                hits += std::max_element(p.begin(), p.end()) - p.begin() ==
                        std::max_element(t.begin(), t.end()) - t.begin();
            }
            return static_cast<double>(hits) / static_cast<double>(pred.rows());
        }
        case Metric::HingeAccuracy: {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                hits += (pred[i] >= 0.0) == (target[i] >= 0.0);
            }
            return static_cast<double>(hits) / static_cast<double>(pred.size());
        }
        case Metric::MeanAbsoluteError:
            return loss_forward(Loss::MeanAbsoluteError, pred, target);
    }
    return 0.0;
}

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    double metric = std::numeric_limits<double>::quiet_NaN();
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double val_metric = std::numeric_limits<double>::quiet_NaN();
};

using History = std::vector<EpochRecord>;

struct FitOptions {
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    bool shuffle = true;
    Metric metric = Metric::None;
    const Batch* val_x = nullptr;
    const Tensor* val_y = nullptr;
    std::function<void(const EpochRecord&)> on_epoch{};
};

/// Loss and metric of the model on a whole dataset, in one forward pass.
inline std::pair<double, double> evaluate(Model& model, const Batch& x, const Tensor& y, Loss loss,
                                          Metric metric = Metric::None) {
    const Tensor pred = model.forward(x);
    return {loss_forward(loss, pred, y), metric_value(metric, pred, y)};
}

/**
 * Minibatch training. Each epoch shuffles with a stream derived from
 * (seed, epoch); the recorded loss and metric are sample-weighted means of
 * the per-batch values seen before each update.
 */
inline History fit(Model& model, const Batch& x, const Tensor& y, Loss loss, Adam& opt,
                   const FitOptions& o) {
    const std::size_t n = x.size();
    QCFLOW_REQUIRE(y.rank() == 2 && y.rows() == n,
                   "fit: " + std::to_string(n) + " samples but targets have shape " +
                       Tensor::shape_str(y.shape()));
    QCFLOW_REQUIRE(o.batch_size >= 1, "fit: batch_size must be >= 1");
    QCFLOW_REQUIRE((o.val_x == nullptr) == (o.val_y == nullptr),
                   "fit: validation inputs and targets must be given together");
    History history;
    const CounterRng master(o.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t epoch = 0; epoch < o.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        if (o.shuffle) {
            CounterRng rng = master.split(stream_id({0xe0, epoch}));
            std::shuffle(order.begin(), order.end(), rng);
        }
        double loss_sum = 0.0;
        double metric_sum = 0.0;
        for (std::size_t start = 0; start < n; start += o.batch_size) {
            const std::size_t end = std::min(n, start + o.batch_size);
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            const Batch bx = x.select(idx);
            const Tensor by = y.select_rows(idx);
            model.zero_grad();
            const Tensor pred = model.forward(bx);
            const double weight = static_cast<double>(end - start);
            loss_sum += weight * loss_forward(loss, pred, by);
            if (o.metric != Metric::None) {
                metric_sum += weight * metric_value(o.metric, pred, by);
            }
            model.backward(loss_backward(loss, pred, by));
            std::vector<Tensor*> params;
            std::vector<const Tensor*> grads;
            for (const auto& p : model.parameters()) {
                params.push_back(p.value);
                grads.push_back(p.grad);
            }
            opt.step(params, grads);
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.loss = loss_sum / static_cast<double>(n);
        if (o.metric != Metric::None) {
            rec.metric = metric_sum / static_cast<double>(n);
        }
        if (o.val_x != nullptr) {
            std::tie(rec.val_loss, rec.val_metric) = evaluate(model, *o.val_x, *o.val_y, loss, o.metric);
        }
        history.push_back(rec);
        if (o.on_epoch) {
            o.on_epoch(rec);
        }
    }
    return history;
}

/// epoch,loss,metric,val_loss,val_metric; absent values are left empty.
inline void write_history_csv(std::ostream& os, const History& h) {
    auto cell = [&](double v) {
        if (!std::isnan(v)) {
            os << v;
        }
    };
    os << "epoch,loss,metric,val_loss,val_metric\n";
    for (const auto& r : h) {
        os << r.epoch << ',';
        cell(r.loss);
        os << ',';
        cell(r.metric);
        os << ',';
        cell(r.val_loss);
        os << ',';
        cell(r.val_metric);
        os << '\n';
    }
}

} // namespace qcflow::nn
