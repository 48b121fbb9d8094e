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
 * Gradients of f(theta) = <psi0| U(theta)^dagger H U(theta) |psi0>.
 *
 * Every symbol occurrence sits in a gate exp(-i (c*theta + d) sum_k b_k P_k)
 * with commuting P_k. Writing eta_k = (c*theta + d) b_k, the gate factors into
 * independent Pauli rotations and
 *
 *   df/dtheta = sum_occurrences c * sum_k b_k [f(eta_k + pi/4) - f(eta_k - pi/4)].
 *
 * Shifting eta_k by s is the same as applying exp(-i s P_k) right after the
 * gate, so shifted circuits are never rebuilt: the engine keeps a running
 * prefix state and replays the suffix from each shifted copy.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/sim/simulator.hpp"
#include "qcflow/sim/state_vector.hpp"

namespace qcflow {

struct ExactEstimator {};

/// Each expectation is estimated from `shots` samples per observable term.
struct SampledEstimator {
    std::size_t shots = 1000;
    std::uint64_t seed = 0;
};

using Estimator = std::variant<ExactEstimator, SampledEstimator>;

struct GradRequest {
    GradRequest() = default;
    GradRequest(Circuit c, PauliSum obs, Bindings b, Estimator e = ExactEstimator{})
        : circuit(std::move(c)), observable(std::move(obs)), bindings(std::move(b)), estimator(e) {}

    Circuit circuit{1};
    PauliSum observable;
    Bindings bindings;
    Estimator estimator = ExactEstimator{};
    /// Input state; |0...0> when empty.
    std::optional<StateVector> initial_state;
};

struct GradResult {
    std::vector<std::string> symbols;
    std::vector<double> gradient;
    std::size_t evaluations = 0;
    /// Set when a sampling distribution had zero total weight; the affected
    /// components are returned as 0.
    bool degenerate = false;
    /// Per-component sample variance of the stochastic estimator (empty for
    /// deterministic methods).
    std::vector<double> sample_variance;

    [[nodiscard]] double operator[](const std::string& name) const {
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (symbols[i] == name) {
                return gradient[i];
            }
        }
        throw Error("gradient has no component '" + name + "'");
    }
};

enum class FdScheme { Forward, Central };

/// One shiftable Pauli term of one symbol occurrence.
struct ShiftTerm {
    std::size_t symbol = 0; // index into the circuit's symbol list
    std::size_t gate = 0;   // index into the circuit's gate list
    PauliString pauli;      // unit coefficient
    double weight = 0.0;    // d eta_k / d theta = c * b_k
};

/**
 * Shift terms in gate order. Identity terms (global phase) and zero-weight
 * terms are dropped since their shifted evaluations cancel exactly.
 */
inline std::vector<ShiftTerm> shift_terms(const Circuit& c) {
    const auto symbols = c.symbols();
    std::vector<ShiftTerm> out;
    for (std::size_t gi = 0; gi < c.size(); ++gi) {
        const Gate& g = c.gates()[gi];
        const auto name = g.symbol();
        if (!name) {
            continue;
        }
        const GeneratorExp* ge = g.generator_exp();
        QCFLOW_REQUIRE(ge != nullptr, "parameter shift: symbol '" + *name +
                                          "' is not in a generator exponential");
        QCFLOW_REQUIRE(ge->generator.terms_commute(),
                       "parameter shift: gate " + std::to_string(gi) + " ('" + g.name() +
                           "') has a non-commuting generator; use finite differences");
        const std::size_t si = static_cast<std::size_t>(
            std::find(symbols.begin(), symbols.end(), *name) - symbols.begin());
        for (const auto& term : ge->generator.terms()) {
            const double w = ge->exponent.coefficient() * term.coefficient();
            if (term.is_identity() || w == 0.0) {
                continue;
            }
            out.push_back(ShiftTerm{si, gi, term.with_coefficient(1.0), w});
        }
    }
    return out;
}

namespace grad_detail {

/// Gate matrices of a resolved circuit, computed once.
class ResolvedCircuit {
  public:
    ResolvedCircuit(const Circuit& c, const Bindings& b) : num_qubits_(c.num_qubits()) {
        check_budget(c.num_qubits(), default_max_qubits());
        targets_.reserve(c.size());
        matrices_.reserve(c.size());
        for (const auto& g : c.gates()) {
            targets_.push_back(g.targets());
            matrices_.push_back(g.matrix(b));
        }
    }

    [[nodiscard]] std::size_t size() const { return matrices_.size(); }
    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }

    /// Applies gates [begin, end).
    void apply(StateVector& s, std::size_t begin, std::size_t end) const {
        for (std::size_t i = begin; i < end; ++i) {
            s.apply_matrix(targets_[i], matrices_[i]);
        }
    }

  private:
    std::size_t num_qubits_;
    std::vector<std::vector<Qubit>> targets_;
    std::vector<Matrix> matrices_;
};

inline StateVector initial_state(const GradRequest& req) {
    if (req.initial_state) {
        QCFLOW_REQUIRE(req.initial_state->num_qubits() == req.circuit.num_qubits(),
                       "gradient: initial state size does not match the circuit");
        return *req.initial_state;
    }
    return StateVector(req.circuit.num_qubits());
}

/// <obs> under the request's estimator; `stream` keys the sampling substream.
inline double measure(const StateVector& s, const PauliSum& obs, const Estimator& est,
                      std::uint64_t stream) {
    if (const auto* sampled = std::get_if<SampledEstimator>(&est)) {
        return sampled_expectation(s, obs, sampled->shots, CounterRng(sampled->seed).split(stream));
    }
    return expectation(s, obs);
}

inline double measure_term(const StateVector& s, const PauliString& unit, const Estimator& est,
                           std::uint64_t stream) {
    if (const auto* sampled = std::get_if<SampledEstimator>(&est)) {
        return sampled_pauli_mean(s, unit, sampled->shots,
                                  CounterRng(sampled->seed).split(stream));
    }
    return expectation(s, unit);
}

constexpr std::uint64_t kPlus = 0;
constexpr std::uint64_t kMinus = 1;

} // namespace grad_detail

/// Expectation value f(theta) of the request at its bindings.
inline double evaluate_expectation(const GradRequest& req) {
    grad_detail::ResolvedCircuit rc(req.circuit, req.bindings);
    StateVector s = grad_detail::initial_state(req);
    rc.apply(s, 0, rc.size());
    return grad_detail::measure(s, req.observable, req.estimator, stream_id({0xf0}));
}

inline GradResult finite_difference_grad(const GradRequest& req, FdScheme scheme = FdScheme::Central,
                                         double eps = 1e-5) {
    QCFLOW_REQUIRE(eps > 0.0 && std::isfinite(eps), "finite differences: eps must be > 0");
    GradResult out;
    out.symbols = req.circuit.symbols();
    out.gradient.assign(out.symbols.size(), 0.0);
    if (out.symbols.empty()) {
        return out;
    }
    auto f = [&](const Bindings& b, std::uint64_t stream) {
        grad_detail::ResolvedCircuit rc(req.circuit, b);
        StateVector s = grad_detail::initial_state(req);
        rc.apply(s, 0, rc.size());
        ++out.evaluations;
        return grad_detail::measure(s, req.observable, req.estimator, stream);
    };
    double f0 = 0.0;
    if (scheme == FdScheme::Forward) {
        f0 = f(req.bindings, stream_id({0xfd, 0}));
    }
    for (std::size_t i = 0; i < out.symbols.size(); ++i) {
        Bindings b = req.bindings;
        const double x0 = b.at(out.symbols[i]);
        b[out.symbols[i]] = x0 + eps;
        const double fp = f(b, stream_id({0xfd, i + 1, grad_detail::kPlus}));
        if (scheme == FdScheme::Forward) {
            out.gradient[i] = (fp - f0) / eps;
            continue;
        }
        b[out.symbols[i]] = x0 - eps;
        const double fm = f(b, stream_id({0xfd, i + 1, grad_detail::kMinus}));
        out.gradient[i] = (fp - fm) / (2.0 * eps);
    }
    return out;
}

/**
 * Exact parameter-shift gradient (up to estimator noise). Uses two
 * expectation evaluations per shift term.
 */
inline GradResult parameter_shift_grad(const GradRequest& req) {
    using namespace grad_detail;
    constexpr double kShift = std::numbers::pi / 4;
    GradResult out;
    out.symbols = req.circuit.symbols();
    out.gradient.assign(out.symbols.size(), 0.0);
    const auto terms = shift_terms(req.circuit);
    if (terms.empty()) {
        return out;
    }
    for (const auto& name : out.symbols) {
        QCFLOW_REQUIRE(req.bindings.count(name), "missing binding for symbol '" + name + "'");
    }
    ResolvedCircuit rc(req.circuit, req.bindings);
    StateVector prefix = initial_state(req);
    std::size_t done = 0; // gates already applied to prefix
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const ShiftTerm& st = terms[t];
        rc.apply(prefix, done, st.gate + 1);
        done = st.gate + 1;
        double diff = 0.0;
        for (std::uint64_t sign : {kPlus, kMinus}) {
            StateVector s = prefix;
            s.apply_pauli_rotation(st.pauli, sign == kPlus ? kShift : -kShift);
            rc.apply(s, done, rc.size());
            const double v = measure(s, req.observable, req.estimator, stream_id({0x95, t, sign}));
            diff += sign == kPlus ? v : -v;
            ++out.evaluations;
        }
        out.gradient[st.symbol] += st.weight * diff;
    }
    return out;
}

struct StochasticConfig {
    bool sample_generator_terms = false; // Pr(k | occurrence) ~ |b_k|
    bool sample_cost_terms = false;      // Pr(q) ~ |alpha_q|
    bool sample_coordinates = false;     // Pr(j) ~ sum_k |b_k| over j's occurrences
    std::size_t num_samples = 1;
    std::uint64_t seed = 0;
};

namespace grad_detail {

/// Draws index i with probability |w_i| / sum |w|. Requires a positive total.
inline std::size_t draw_weighted(const std::vector<double>& w, double total, CounterRng& rng) {
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        u -= std::abs(w[i]);
        if (u < 0.0) {
            return i;
        }
    }
    // Round-off landed past the end: return the last positive entry.
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] != 0.0) {
            return i;
        }
    }
    return w.size() - 1;
}

/// Shifted final states, cached while they fit a fixed budget.
class ShiftedStates {
  public:
    ShiftedStates(const GradRequest& req, const std::vector<ShiftTerm>& terms)
        : rc_(req.circuit, req.bindings), initial_(initial_state(req)), terms_(terms) {
        const std::size_t bytes_per_state = (std::size_t{1} << rc_.num_qubits()) * sizeof(Complex);
        cache_enabled_ = bytes_per_state * 2 * terms.size() <= (std::size_t{256} << 20);
    }

    const StateVector& get(std::size_t t, std::uint64_t sign) {
        const auto key = std::make_pair(t, sign);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
        const ShiftTerm& st = terms_[t];
        StateVector s = initial_;
        rc_.apply(s, 0, st.gate + 1);
        s.apply_pauli_rotation(st.pauli, sign == kPlus ? std::numbers::pi / 4 : -std::numbers::pi / 4);
        rc_.apply(s, st.gate + 1, rc_.size());
        if (!cache_enabled_) {
            cache_.clear();
        }
        return cache_.emplace(key, std::move(s)).first->second;
    }

  private:
    ResolvedCircuit rc_;
    StateVector initial_;
    const std::vector<ShiftTerm>& terms_;
    bool cache_enabled_ = true;
    std::map<std::pair<std::size_t, std::uint64_t>, StateVector> cache_;
};

} // namespace grad_detail

/**
 * Monte-Carlo parameter shift. Each enabled axis is sampled with importance
 * weights so every sample is an unbiased estimate of the exact gradient;
 * disabled axes are summed exactly. Returns the mean over samples and the
 * per-component sample variance.
 */
inline GradResult stochastic_ps_grad(const GradRequest& req, const StochasticConfig& cfg) {
    using namespace grad_detail;
    QCFLOW_REQUIRE(cfg.num_samples >= 1, "stochastic parameter shift: num_samples must be >= 1");
    GradResult out;
    out.symbols = req.circuit.symbols();
    const std::size_t m = out.symbols.size();
    out.gradient.assign(m, 0.0);
    out.sample_variance.assign(m, 0.0);
    const auto terms = shift_terms(req.circuit);
    if (m == 0) {
        return out;
    }
    for (const auto& name : out.symbols) {
        QCFLOW_REQUIRE(req.bindings.count(name), "missing binding for symbol '" + name + "'");
    }

    // Per-coordinate term lists and weights.
    std::vector<std::vector<std::size_t>> by_symbol(m);
    std::vector<std::vector<double>> term_weights(m);
    std::vector<double> coord_weight(m, 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        by_symbol[terms[t].symbol].push_back(t);
        term_weights[terms[t].symbol].push_back(terms[t].weight);
        coord_weight[terms[t].symbol] += std::abs(terms[t].weight);
    }
    double coord_total = 0.0;
    for (double w : coord_weight) {
        coord_total += w;
    }

    // Observable: identity terms cancel in every difference.
    std::vector<PauliString> cost_units;
    std::vector<double> cost_weights;
    for (const auto& q : req.observable.terms()) {
        if (!q.is_identity() && q.coefficient() != 0.0) {
            cost_units.push_back(q.with_coefficient(1.0));
            cost_weights.push_back(q.coefficient());
        }
    }
    double cost_total = 0.0;
    for (double w : cost_weights) {
        cost_total += std::abs(w);
    }
    PauliSum cost_obs;
    for (std::size_t q = 0; q < cost_units.size(); ++q) {
        cost_obs.add(cost_units[q].with_coefficient(cost_weights[q]));
    }

    if (coord_total == 0.0 || cost_total == 0.0) {
        out.degenerate = true;
        return out;
    }

    ShiftedStates states(req, terms);
    const CounterRng master(cfg.seed);
    std::vector<double> sum(m, 0.0);
    std::vector<double> sum_sq(m, 0.0);
    std::vector<double> estimate(m);

    for (std::size_t sample = 0; sample < cfg.num_samples; ++sample) {
        CounterRng rng = master.split(stream_id({0x5a, sample}));
        std::fill(estimate.begin(), estimate.end(), 0.0);

        // f(+) - f(-) for term t, optionally with a sampled cost term.
        auto difference = [&](std::size_t t) {
            if (!cfg.sample_cost_terms) {
                double d = 0.0;
                for (std::uint64_t sign : {kPlus, kMinus}) {
                    const double v = measure(states.get(t, sign), cost_obs, req.estimator,
                                             stream_id({0x5b, sample, sign, t}));
                    d += sign == kPlus ? v : -v;
                    ++out.evaluations;
                }
                return d;
            }
            const std::size_t q = draw_weighted(cost_weights, cost_total, rng);
            double d = 0.0;
            for (std::uint64_t sign : {kPlus, kMinus}) {
                const double v = measure_term(states.get(t, sign), cost_units[q], req.estimator,
                                              stream_id({0x5c, sample, sign, t, q}));
                d += sign == kPlus ? v : -v;
                ++out.evaluations;
            }
            return std::copysign(cost_total, cost_weights[q]) * d;
        };

        auto coordinate = [&](std::size_t j) {
            if (by_symbol[j].empty()) {
                return 0.0;
            }
            if (!cfg.sample_generator_terms) {
                double g = 0.0;
                for (std::size_t t : by_symbol[j]) {
                    g += terms[t].weight * difference(t);
                }
                return g;
            }
            const std::size_t k = draw_weighted(term_weights[j], coord_weight[j], rng);
            const std::size_t t = by_symbol[j][k];
            return std::copysign(coord_weight[j], terms[t].weight) * difference(t);
        };

        if (cfg.sample_coordinates) {
            const std::size_t j = draw_weighted(coord_weight, coord_total, rng);
            estimate[j] = coordinate(j) * coord_total / coord_weight[j];
        } else {
            for (std::size_t j = 0; j < m; ++j) {
                estimate[j] = coordinate(j);
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            sum[j] += estimate[j];
            sum_sq[j] += estimate[j] * estimate[j];
        }
    }

    const double n = static_cast<double>(cfg.num_samples);
    for (std::size_t j = 0; j < m; ++j) {
        out.gradient[j] = sum[j] / n;
        if (cfg.num_samples > 1) {
            out.sample_variance[j] =
                std::max(0.0, (sum_sq[j] - n * out.gradient[j] * out.gradient[j]) / (n - 1.0));
        }
    }
    return out;
}

} // namespace qcflow
