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
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcflow/core/error.hpp"

namespace qcflow::nn {

/// Dense real array, row-major.
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        QCFLOW_REQUIRE(data_.size() == count(shape_),
                       "tensor: " + std::to_string(data_.size()) + " values for shape " +
                           shape_str(shape_));
    }

    /// Rank-2 tensor from nested rows.
    static Tensor matrix(const std::vector<std::vector<double>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows[0].size();
        std::vector<double> data;
        data.reserve(r * c);
        for (const auto& row : rows) {
            QCFLOW_REQUIRE(row.size() == c, "tensor: ragged rows");
            data.insert(data.end(), row.begin(), row.end());
        }
        return Tensor({r, c}, std::move(data));
    }

    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
    [[nodiscard]] std::size_t rank() const { return shape_.size(); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    [[nodiscard]] std::size_t rows() const { return shape_.at(0); }
    [[nodiscard]] std::size_t cols() const { return shape_.at(1); }

    [[nodiscard]] const std::vector<double>& data() const { return data_; }
    [[nodiscard]] std::vector<double>& data() { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    [[nodiscard]] std::vector<double> row(std::size_t r) const {
        const std::size_t c = shape_.at(1);
        return {data_.begin() + static_cast<std::ptrdiff_t>(r * c),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * c)};
    }

    /// Rows picked by index, in the given order.
    [[nodiscard]] Tensor select_rows(const std::vector<std::size_t>& idx) const {
        const std::size_t c = size() / std::max<std::size_t>(1, shape_.at(0));
        std::vector<std::size_t> shape = shape_;
        shape[0] = idx.size();
        Tensor out(shape);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            QCFLOW_REQUIRE(idx[i] < shape_[0], "tensor: row index out of range");
            std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(idx[i] * c), c,
                        out.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
        }
        return out;
    }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
    }

    Tensor& operator+=(const Tensor& other) {
        check_same(other, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += other.data_[i];
        }
        return *this;
    }

    friend Tensor operator*(double s, Tensor t) {
        for (auto& x : t.data_) {
            x *= s;
        }
        return t;
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

    static std::string shape_str(const std::vector<std::size_t>& shape) {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < shape.size(); ++i) {
            os << (i ? ", " : "") << shape[i];
        }
        os << ']';
        return os.str();
    }

    void check_same(const Tensor& other, const char* op) const {
        QCFLOW_REQUIRE(shape_ == other.shape_, std::string("tensor ") + op + ": shape mismatch " +
                                                   shape_str(shape_) + " vs " +
                                                   shape_str(other.shape_));
    }

  private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<>());
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Concatenates rank-2 tensors along columns.
inline Tensor concat_cols(const std::vector<const Tensor*>& parts) {
    QCFLOW_REQUIRE(!parts.empty(), "concat: no inputs");
    const std::size_t rows = parts[0]->rows();
    std::size_t cols = 0;
    for (const auto* p : parts) {
        QCFLOW_REQUIRE(p->rank() == 2 && p->rows() == rows, "concat: row count mismatch");
        cols += p->cols();
    }
    Tensor out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t off = 0;
        for (const auto* p : parts) {
            for (std::size_t c = 0; c < p->cols(); ++c) {
                out(r, off + c) = (*p)(r, c);
            }
            off += p->cols();
        }
    }
    return out;
}

} // namespace qcflow::nn
