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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qcflow/core/error.hpp"
#include "qcflow/nn/tensor.hpp"

namespace qcflow::nn {

struct AdamOptions {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias-corrected moments. Moment buffers are created lazily on
/// the first step and keyed by position in the parameter list.
class Adam {
  public:
    Adam() = default;
    explicit Adam(double lr) { opts_.lr = lr; }
    explicit Adam(AdamOptions opts) : opts_(opts) {}

    [[nodiscard]] const AdamOptions& options() const { return opts_; }
    [[nodiscard]] std::uint64_t steps() const { return t_; }

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
        QCFLOW_REQUIRE(params.size() == grads.size(), "adam: parameter/gradient count mismatch");
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i]->check_same(*grads[i], "adam");
            QCFLOW_REQUIRE(grads[i]->all_finite(),
                           "adam: non-finite gradient for parameter block " + std::to_string(i));
        }
        if (m_.empty()) {
            for (const auto* p : params) {
                m_.emplace_back(p->shape());
                v_.emplace_back(p->shape());
            }
        }
        QCFLOW_REQUIRE(m_.size() == params.size(), "adam: parameter list changed between steps");
        ++t_;
        const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i];
            const Tensor& g = *grads[i];
            for (std::size_t k = 0; k < p.size(); ++k) {
                m_[i][k] = opts_.beta1 * m_[i][k] + (1.0 - opts_.beta1) * g[k];
                v_[i][k] = opts_.beta2 * v_[i][k] + (1.0 - opts_.beta2) * g[k] * g[k];
                const double mhat = m_[i][k] / c1;
                const double vhat = v_[i][k] / c2;
                p[k] -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.epsilon);
            }
        }
    }

    void reset() {
        m_.clear();
        v_.clear();
        t_ = 0;
    }

  private:
    AdamOptions opts_{};
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::uint64_t t_ = 0;
};

} // namespace qcflow::nn
