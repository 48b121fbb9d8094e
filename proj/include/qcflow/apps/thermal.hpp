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
 * Mixed-state models rho = U(phi) diag(p_theta) U(phi)^dagger built from a
 * factorized Bernoulli energy model and a parameterized circuit. VQT fits
 * rho to a thermal state by minimizing free energy; QMHL fits rho to a given
 * density matrix by minimizing cross entropy.
 *
 * Bits use x_j in {0, 1} with spin s_j = 2 x_j - 1 and energy
 * E(x) = -sum_j theta_j s_j, so bit j is 1 with probability
 * sigmoid(2 theta_j). Since s_j = -Z_j on basis states, the energy operator
 * is sum_j theta_j Z_j.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/circuit/pauli.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/grad/differentiators.hpp"
#include "qcflow/nn/adam.hpp"
#include "qcflow/nn/tensor.hpp"
#include "qcflow/sim/simulator.hpp"

namespace qcflow::apps {

inline constexpr std::size_t kMaxExactQubits = 10;

/// Jh (XX + YY + ZZ) on horizontal bonds plus Jv (XX + YY + ZZ) on vertical
/// bonds of an open rows x cols grid; site (r, c) is qubit r * cols + c.
inline PauliSum heisenberg_2d(std::size_t rows, std::size_t cols, double jh, double jv) {
    QCFLOW_REQUIRE(rows * cols >= 2, "heisenberg: lattice needs at least 2 sites");
    PauliSum h;
    auto bond = [&](Qubit a, Qubit b, double j) {
        h += j * (X(a) * X(b));
        h += j * (Y(a) * Y(b));
        h += j * (Z(a) * Z(b));
    };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto q = static_cast<Qubit>(r * cols + c);
            if (c + 1 < cols) {
                bond(q, q + 1, jh);
            }
            if (r + 1 < rows) {
                bond(q, static_cast<Qubit>(q + cols), jv);
            }
        }
    }
    return h;
}

class BernoulliEBM {
  public:
    explicit BernoulliEBM(std::vector<double> theta) : theta_(std::move(theta)) {
        QCFLOW_REQUIRE(!theta_.empty(), "ebm: need at least one bit");
    }
    explicit BernoulliEBM(std::size_t n) : theta_(n, 0.0) {}

    [[nodiscard]] std::size_t size() const { return theta_.size(); }
    [[nodiscard]] const std::vector<double>& theta() const { return theta_; }
    std::vector<double>& theta() { return theta_; }

    /// Probability that bit j is 1.
    [[nodiscard]] double p_one(std::size_t j) const {
        return 1.0 / (1.0 + std::exp(-2.0 * theta_[j]));
    }

    [[nodiscard]] static double spin(std::uint64_t x, std::size_t j) {
        return ((x >> j) & 1U) ? 1.0 : -1.0;
    }

    [[nodiscard]] double energy(std::uint64_t x) const {
        double e = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            e -= theta_[j] * spin(x, j);
        }
        return e;
    }

    [[nodiscard]] double log_partition() const {
        double z = 0.0;
        for (double t : theta_) {
            z += std::abs(t) + std::log1p(std::exp(-2.0 * std::abs(t))); // log(2 cosh t)
        }
        return z;
    }

    [[nodiscard]] double log_prob(std::uint64_t x) const { return -energy(x) - log_partition(); }
    [[nodiscard]] double prob(std::uint64_t x) const { return std::exp(log_prob(x)); }

    /// Shannon entropy in nats, summed over the independent bits.
    [[nodiscard]] double entropy() const {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            const double p = p_one(j);
            if (p > 0.0 && p < 1.0) {
                s -= p * std::log(p) + (1.0 - p) * std::log1p(-p);
            }
        }
        return s;
    }

    /// dS/dtheta_j = -theta_j sech^2(theta_j).
    [[nodiscard]] std::vector<double> entropy_gradient() const {
        std::vector<double> g(size());
        for (std::size_t j = 0; j < size(); ++j) {
            const double c = std::cosh(theta_[j]);
            g[j] = -theta_[j] / (c * c);
        }
        return g;
    }

    /// E[s_j] = tanh(theta_j).
    [[nodiscard]] std::vector<double> mean_spin() const {
        std::vector<double> m(size());
        for (std::size_t j = 0; j < size(); ++j) {
            m[j] = std::tanh(theta_[j]);
        }
        return m;
    }

    [[nodiscard]] std::vector<std::uint64_t> sample(std::size_t count, CounterRng& rng) const {
        QCFLOW_REQUIRE(size() <= 62, "ebm: too many bits to pack");
        std::vector<std::uint64_t> out(count, 0);
        for (auto& x : out) {
            for (std::size_t j = 0; j < size(); ++j) {
                if (rng.uniform() < p_one(j)) {
                    x |= std::uint64_t{1} << j;
                }
            }
        }
        return out;
    }

    /// sum_j theta_j Z_j, diagonal with entries E(x).
    [[nodiscard]] PauliSum energy_operator() const {
        PauliSum d;
        for (std::size_t j = 0; j < size(); ++j) {
            if (theta_[j] != 0.0) {
                d += theta_[j] * Z(static_cast<Qubit>(j));
            }
        }
        return d;
    }

  private:
    std::vector<double> theta_;
};

struct ThermalTarget {
    PauliSum hamiltonian;
    double beta = 1.0;
};

struct GibbsState {
    Matrix rho;
    double log_partition = 0.0; // log tr exp(-beta H)
};

inline GibbsState gibbs_state(const ThermalTarget& t, std::size_t n) {
    QCFLOW_REQUIRE(t.beta > 0.0, "gibbs state: beta must be positive");
    QCFLOW_REQUIRE(n <= kMaxExactQubits, "gibbs state: register too large for dense evaluation");
    Eigen::SelfAdjointEigenSolver<Matrix> es(t.hamiltonian.matrix(n));
    QCFLOW_REQUIRE(es.info() == Eigen::Success, "gibbs state: eigendecomposition failed");
    std::vector<double> logw(static_cast<std::size_t>(es.eigenvalues().size()));
    for (std::size_t i = 0; i < logw.size(); ++i) {
        logw[i] = -t.beta * es.eigenvalues()[static_cast<Eigen::Index>(i)];
    }
    const double lz = log_sum_exp(logw);
    Vector w(es.eigenvalues().size());
    for (std::size_t i = 0; i < logw.size(); ++i) {
        w[static_cast<Eigen::Index>(i)] = std::exp(logw[i] - lz);
    }
    return {es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint(), lz};
}

inline Bindings bind_symbols(const Circuit& c, const std::vector<double>& values) {
    const auto names = c.symbols();
    QCFLOW_REQUIRE(names.size() == values.size(),
                   "circuit has " + std::to_string(names.size()) + " symbols but " +
                       std::to_string(values.size()) + " values were given");
    Bindings b;
    for (std::size_t i = 0; i < names.size(); ++i) {
        b[names[i]] = values[i];
    }
    return b;
}

/// U(phi)|x>.
inline StateVector pushed_basis_state(const Circuit& qnn, const Bindings& phi, std::uint64_t x) {
    return simulate(resolve(qnn, phi), StateVector::basis(qnn.num_qubits(), x));
}

/// Sum over all bitstrings of p(x) U|x><x|U^dagger.
inline Matrix model_density_matrix(const BernoulliEBM& ebm, const Circuit& qnn, const Bindings& phi) {
    const std::size_t n = qnn.num_qubits();
    QCFLOW_REQUIRE(ebm.size() == n, "model state: ebm size does not match the circuit");
    QCFLOW_REQUIRE(n <= kMaxExactQubits, "model state: register too large for dense evaluation");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Matrix rho = Matrix::Zero(dim, dim);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
        const Vector v = pushed_basis_state(qnn, phi, x).to_eigen();
        rho += ebm.prob(x) * (v * v.adjoint());
    }
    return rho;
}

/// beta sum_x p(x) <x|U^dagger H U|x> - S(p) by enumeration.
inline double vqt_free_energy_exact(const BernoulliEBM& ebm, const Circuit& qnn, const Bindings& phi,
                                    const ThermalTarget& t) {
    const std::size_t n = qnn.num_qubits();
    QCFLOW_REQUIRE(ebm.size() == n, "vqt: ebm size does not match the circuit");
    QCFLOW_REQUIRE(n <= kMaxExactQubits, "vqt: register too large for exact free energy");
    double energy = 0.0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        energy += ebm.prob(x) * expectation(pushed_basis_state(qnn, phi, x), t.hamiltonian);
    }
    return t.beta * energy - ebm.entropy();
}

struct FreeEnergyEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo energy term over `samples` draws; the entropy is exact.
inline FreeEnergyEstimate vqt_free_energy_sampled(const BernoulliEBM& ebm, const Circuit& qnn,
                                                  const Bindings& phi, const ThermalTarget& t,
                                                  std::size_t samples, CounterRng& rng) {
    QCFLOW_REQUIRE(samples >= 2, "vqt: need at least 2 samples");
    std::map<std::uint64_t, double> cache;
    double sum = 0.0, sum_sq = 0.0;
    for (auto x : ebm.sample(samples, rng)) {
        auto it = cache.find(x);
        if (it == cache.end()) {
            it = cache.emplace(x, expectation(pushed_basis_state(qnn, phi, x), t.hamiltonian)).first;
        }
        sum += it->second;
        sum_sq += it->second * it->second;
    }
    const auto k = static_cast<double>(samples);
    const double mean = sum / k;
    const double var = std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0));
    return {t.beta * mean - ebm.entropy(), t.beta * std::sqrt(var / k)};
}

struct VqtGradient {
    std::vector<double> theta;
    std::vector<double> phi;
    double loss = 0.0; // sampled free energy
};

/**
 * Gradient estimate from one batch of bitstrings. The theta part is
 * beta Cov(H_phi(x), s_j) over the batch plus the exact entropy term; the
 * phi part is beta times the batch mean of parameter-shift gradients of
 * <x|U^dagger H U|x>.
 */
inline VqtGradient vqt_gradient(const BernoulliEBM& ebm, const Circuit& qnn, const Bindings& phi,
                                const ThermalTarget& t, std::size_t samples, CounterRng& rng) {
    QCFLOW_REQUIRE(samples >= 2, "vqt: need at least 2 samples per step");
    const std::size_t n = ebm.size();
    const auto xs = ebm.sample(samples, rng);
    std::map<std::uint64_t, std::size_t> counts;
    for (auto x : xs) {
        ++counts[x];
    }
    std::map<std::uint64_t, double> energy;
    VqtGradient g{std::vector<double>(n, 0.0), std::vector<double>(qnn.symbols().size(), 0.0), 0.0};
    const auto k = static_cast<double>(samples);
    for (auto [x, count] : counts) {
        GradRequest req(qnn, t.hamiltonian, phi);
        req.initial_state = StateVector::basis(qnn.num_qubits(), x);
        energy[x] = evaluate_expectation(req);
        if (!g.phi.empty()) {
            const auto grad = parameter_shift_grad(req).gradient;
            for (std::size_t i = 0; i < grad.size(); ++i) {
                g.phi[i] += t.beta * static_cast<double>(count) / k * grad[i];
            }
        }
    }
    double mean_e = 0.0;
    std::vector<double> mean_s(n, 0.0);
    for (auto x : xs) {
        mean_e += energy[x] / k;
        for (std::size_t j = 0; j < n; ++j) {
            mean_s[j] += BernoulliEBM::spin(x, j) / k;
        }
    }
    const auto ds = ebm.entropy_gradient();
    for (std::size_t j = 0; j < n; ++j) {
        double cov = 0.0;
        for (auto x : xs) {
            cov += (energy[x] - mean_e) * (BernoulliEBM::spin(x, j) - mean_s[j]);
        }
        g.theta[j] = t.beta * cov / (k - 1.0) - ds[j];
    }
    g.loss = t.beta * mean_e - ebm.entropy();
    QCFLOW_REQUIRE(std::isfinite(g.loss), "vqt: non-finite loss");
    return g;
}

/// Per layer: Rx, Ry, Rz on every qubit, then separate XX, YY, ZZ
/// exponentials on every bond of the grid.
inline Circuit grid_ansatz(std::size_t rows, std::size_t cols, std::size_t layers,
                           const std::string& prefix = "phi") {
    const std::size_t n = rows * cols;
    Circuit c(n);
    std::size_t k = 0;
    auto next = [&] { return sym(prefix + std::to_string(k++)); };
    for (std::size_t l = 0; l < layers; ++l) {
        for (Qubit q = 0; q < n; ++q) {
            c.append(gates::Rx(q, next())).append(gates::Ry(q, next())).append(gates::Rz(q, next()));
        }
        std::vector<std::pair<Qubit, Qubit>> bonds;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t cc = 0; cc < cols; ++cc) {
                const auto q = static_cast<Qubit>(r * cols + cc);
                if (cc + 1 < cols) {
                    bonds.emplace_back(q, q + 1);
                }
                if (r + 1 < rows) {
                    bonds.emplace_back(q, static_cast<Qubit>(q + cols));
                }
            }
        }
        for (auto [a, b] : bonds) {
            c.append(gates::exp(next(), PauliSum{X(a) * X(b)}));
            c.append(gates::exp(next(), PauliSum{Y(a) * Y(b)}));
            c.append(gates::exp(next(), PauliSum{Z(a) * Z(b)}));
        }
    }
    return c;
}

struct VqtOptions {
    std::size_t steps = 200;
    double lr = 0.05;
    std::size_t samples_per_step = 200;
    double init_scale = 0.1; // phi drawn uniformly from +-init_scale
    bool track_exact = true;
    std::uint64_t seed = 11;
};

struct VqtRecord {
    std::size_t step = 0;
    double loss = 0.0;       // sampled free energy
    double exact_loss = NAN; // when tracked
};

struct VqtResult {
    BernoulliEBM ebm{1};
    std::vector<double> phi;
    std::vector<VqtRecord> history;
    double final_free_energy = 0.0; // exact when tracked, else sampled
};

inline VqtResult vqt_train(const ThermalTarget& t, const Circuit& qnn, BernoulliEBM ebm,
                           const VqtOptions& o = {}) {
    const std::size_t n = qnn.num_qubits();
    QCFLOW_REQUIRE(ebm.size() == n, "vqt: ebm has " + std::to_string(ebm.size()) +
                                        " bits but the circuit has " + std::to_string(n) + " qubits");
    const CounterRng master(o.seed);
    CounterRng init = master.split(0);
    nn::Tensor theta({n}, ebm.theta());
    nn::Tensor phi({qnn.symbols().size()});
    for (auto& v : phi.data()) {
        v = init.uniform(-o.init_scale, o.init_scale);
    }
    nn::Tensor g_theta(theta.shape()), g_phi(phi.shape());
    nn::Adam opt(o.lr);
    VqtResult r;
    const bool exact = o.track_exact && n <= kMaxExactQubits;
    for (std::size_t step = 0; step < o.steps; ++step) {
        ebm.theta() = theta.data();
        const Bindings b = bind_symbols(qnn, phi.data());
        CounterRng rng = master.split(step + 1);
        const VqtGradient g = vqt_gradient(ebm, qnn, b, t, o.samples_per_step, rng);
        VqtRecord rec{step, g.loss, NAN};
        if (exact) {
            rec.exact_loss = vqt_free_energy_exact(ebm, qnn, b, t);
        }
        r.history.push_back(rec);
        g_theta.data() = g.theta;
        g_phi.data() = g.phi;
        opt.step({&theta, &phi}, {&g_theta, &g_phi});
    }
    ebm.theta() = theta.data();
    r.ebm = ebm;
    r.phi = phi.data();
    const Bindings b = bind_symbols(qnn, r.phi);
    if (exact) {
        r.final_free_energy = vqt_free_energy_exact(ebm, qnn, b, t);
    } else {
        CounterRng rng = master.split(0xf1);
        r.final_free_energy =
            vqt_free_energy_sampled(ebm, qnn, b, t, o.samples_per_step, rng).value;
    }
    return r;
}

/// sigma_phi(x) = <x|U^dagger sigma U|x>.
inline std::vector<double> pulled_back_distribution(const Matrix& sigma, const Circuit& qnn,
                                                    const Bindings& phi) {
    const std::size_t n = qnn.num_qubits();
    QCFLOW_REQUIRE(n <= kMaxExactQubits, "qmhl: register too large");
    QCFLOW_REQUIRE(sigma.rows() == static_cast<Eigen::Index>(std::size_t{1} << n) &&
                       is_density_matrix(sigma),
                   "qmhl: data state is not a density matrix on the circuit's register");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    const ConcreteCircuit inv = resolve(qnn.inverse(), phi);
    std::vector<double> out(std::size_t{1} << n, 0.0);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double lambda = es.eigenvalues()[k];
        if (lambda <= 1e-15) {
            continue;
        }
        std::vector<Complex> amps(es.eigenvectors().col(k).data(),
                                  es.eigenvectors().col(k).data() + es.eigenvectors().rows());
        const StateVector s = simulate(inv, StateVector::from_amplitudes(std::move(amps)));
        const auto p = s.probabilities();
        for (std::size_t x = 0; x < out.size(); ++x) {
            out[x] += lambda * p[x];
        }
    }
    return out;
}

/// Cross entropy -tr(sigma log rho) = sum_x sigma_phi(x) E(x) + log Z.
inline double qmhl_loss(const Matrix& sigma, const BernoulliEBM& ebm, const Circuit& qnn,
                        const Bindings& phi) {
    const auto q = pulled_back_distribution(sigma, qnn, phi);
    double l = ebm.log_partition();
    for (std::size_t x = 0; x < q.size(); ++x) {
        l += q[x] * ebm.energy(x);
    }
    return l;
}

struct QmhlGradient {
    std::vector<double> theta;
    std::vector<double> phi;
    double loss = 0.0;
};

/**
 * Exact gradients. theta: E_sigma_phi[dE/dtheta] - E_p[dE/dtheta], which is
 * tanh(theta_j) - E_sigma_phi[s_j]. phi: parameter shift of
 * tr(sigma U D U^dagger) with D the energy operator, evaluated as the
 * eigenvalue-weighted sum over eigenvectors of sigma run through U^dagger.
 */
inline QmhlGradient qmhl_step(const Matrix& sigma, const BernoulliEBM& ebm, const Circuit& qnn,
                              const Bindings& phi) {
    const std::size_t n = qnn.num_qubits();
    QCFLOW_REQUIRE(ebm.size() == n, "qmhl: ebm size does not match the circuit");
    const auto q = pulled_back_distribution(sigma, qnn, phi);
    QmhlGradient g{ebm.mean_spin(), std::vector<double>(qnn.symbols().size(), 0.0),
                   ebm.log_partition()};
    for (std::size_t x = 0; x < q.size(); ++x) {
        g.loss += q[x] * ebm.energy(x);
        for (std::size_t j = 0; j < n; ++j) {
            g.theta[j] -= q[x] * BernoulliEBM::spin(x, j);
        }
    }
    const PauliSum d = ebm.energy_operator();
    if (g.phi.empty() || d.terms().empty()) {
        return g;
    }
    const Circuit inv = qnn.inverse();
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double lambda = es.eigenvalues()[k];
        if (lambda <= 1e-15) {
            continue;
        }
        GradRequest req(inv, d, phi);
        std::vector<Complex> amps(es.eigenvectors().col(k).data(),
                                  es.eigenvectors().col(k).data() + es.eigenvectors().rows());
        req.initial_state = StateVector::from_amplitudes(std::move(amps));
        const GradResult r = parameter_shift_grad(req);
        // inverse() keeps the symbol names but may list them in another order.
        for (std::size_t i = 0; i < g.phi.size(); ++i) {
            g.phi[i] += lambda * r[qnn.symbols()[i]];
        }
    }
    return g;
}

struct QmhlOptions {
    std::size_t steps = 200;
    double lr = 0.05;
    double init_scale = 0.1;
    std::uint64_t seed = 13;
};

struct QmhlResult {
    BernoulliEBM ebm{1};
    std::vector<double> phi;
    std::vector<double> loss_history;
    double fidelity = 0.0; // against the data state
};

inline QmhlResult qmhl_train(const Matrix& sigma, const Circuit& qnn, const QmhlOptions& o = {}) {
    const std::size_t n = qnn.num_qubits();
    CounterRng init(o.seed);
    nn::Tensor theta({n});
    nn::Tensor phi({qnn.symbols().size()});
    for (auto& v : phi.data()) {
        v = init.uniform(-o.init_scale, o.init_scale);
    }
    nn::Tensor g_theta(theta.shape()), g_phi(phi.shape());
    nn::Adam opt(o.lr);
    QmhlResult r;
    BernoulliEBM ebm(n);
    for (std::size_t step = 0; step < o.steps; ++step) {
        ebm.theta() = theta.data();
        const QmhlGradient g = qmhl_step(sigma, ebm, qnn, bind_symbols(qnn, phi.data()));
        r.loss_history.push_back(g.loss);
        g_theta.data() = g.theta;
        g_phi.data() = g.phi;
        opt.step({&theta, &phi}, {&g_theta, &g_phi});
    }
    ebm.theta() = theta.data();
    r.ebm = ebm;
    r.phi = phi.data();
    r.fidelity = state_fidelity(model_density_matrix(ebm, qnn, bind_symbols(qnn, r.phi)), sigma);
    return r;
}

} // namespace qcflow::apps
