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
 * Fused vs unfused simulation benchmark over two brick-pattern circuit
 * families: RandomDense couples neighbours across the whole register,
 * Structured confines every CZ to disjoint blocks.
 *
 * The speedups reported here compare the two execution paths of this
 * library only; they are not comparable with cross-simulator numbers.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "qcflow/circuit/circuit.hpp"
#include "qcflow/core/error.hpp"
#include "qcflow/core/rng.hpp"
#include "qcflow/sim/fusion.hpp"
#include "qcflow/sim/simulator.hpp"

namespace qcflow::bench {

enum class Family { RandomDense, Structured };

inline const char* family_name(Family f) {
    return f == Family::RandomDense ? "random_dense" : "structured";
}

inline Family parse_family(const std::string& s) {
    if (s == "random_dense") {
        return Family::RandomDense;
    }
    if (s == "structured") {
        return Family::Structured;
    }
    throw Error("unknown circuit family '" + s + "' (expected random_dense or structured)");
}

namespace detail {
inline void rotation_layer(Circuit& c, CounterRng& rng) {
    for (Qubit q = 0; q < c.num_qubits(); ++q) {
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        switch (rng.below(3)) {
            case 0:
                c.append(gates::Rx(q, angle));
                break;
            case 1:
                c.append(gates::Ry(q, angle));
                break;
            default:
                c.append(gates::Rz(q, angle));
                break;
        }
    }
}

/// CZ on (offset, offset+1), (offset+2, offset+3), ... inside [lo, hi).
inline void brick(Circuit& c, Qubit lo, Qubit hi, std::size_t layer) {
    for (Qubit q = lo + static_cast<Qubit>(layer % 2); q + 1 < hi; q += 2) {
        c.append(gates::CZ(q, q + 1));
    }
}
} // namespace detail

/// Per layer: a random-axis rotation with angle U(0, 2pi) on every qubit,
/// then CZs on a brick pattern that alternates offset between layers.
inline ConcreteCircuit gen_random_dense(std::size_t n, std::size_t depth, std::uint64_t seed) {
    QCFLOW_REQUIRE(n >= 2, "random dense circuit: need at least 2 qubits");
    CounterRng rng(seed);
    Circuit c(n);
    for (std::size_t l = 0; l < depth; ++l) {
        detail::rotation_layer(c, rng);
        detail::brick(c, 0, static_cast<Qubit>(n), l);
    }
    return ConcreteCircuit(std::move(c));
}

/// Same layers, but the brick pattern runs separately inside each block of
/// `block_size` consecutive qubits.
inline ConcreteCircuit gen_structured(std::size_t n, std::size_t depth, std::size_t block_size,
                                      std::uint64_t seed) {
    QCFLOW_REQUIRE(block_size >= 2 && n % block_size == 0,
                   "structured circuit: " + std::to_string(n) + " qubits not divisible into blocks of " +
                       std::to_string(block_size));
    CounterRng rng(seed);
    Circuit c(n);
    for (std::size_t l = 0; l < depth; ++l) {
        detail::rotation_layer(c, rng);
        for (std::size_t b = 0; b < n; b += block_size) {
            detail::brick(c, static_cast<Qubit>(b), static_cast<Qubit>(b + block_size), l);
        }
    }
    return ConcreteCircuit(std::move(c));
}

inline ConcreteCircuit generate(Family f, std::size_t n, std::size_t depth, std::uint64_t seed,
                                std::size_t block_size = 4) {
    return f == Family::RandomDense ? gen_random_dense(n, depth, seed)
                                    : gen_structured(n, depth, block_size, seed);
}

/**
 * sum_i (w_i Re a_i + v_i Im a_i) with fixed pseudo-random weights in
 * [-1, 1). Being linear in the amplitudes, two simulations that agree to
 * round-off give checksums that agree to round-off; the reported string is
 * rounded to 1e-9.
 */
inline double amplitude_checksum(const StateVector& s) {
    const auto amps = s.amplitudes();
    double acc = 0.0;
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const std::uint64_t h = mix64(i + 0x5bd1e995ULL);
        const double w = static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
        const double v = static_cast<double>(mix64(h) >> 11) * 0x1.0p-52 - 1.0;
        acc += w * amps[i].real() + v * amps[i].imag();
    }
    return acc;
}

inline std::string format_checksum(double c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", std::round(c * 1e9) / 1e9 + 0.0);
    return buf;
}

enum class FuseMode { Off, On, Both };

struct BenchConfig {
    std::vector<std::size_t> n_qubits{16};
    std::size_t depth = 40;
    std::size_t num_circuits = 500;
    std::size_t batch_size = 50;
    std::vector<Family> families{Family::RandomDense, Family::Structured};
    std::size_t block_size = 4;
    FuseMode fuse = FuseMode::Both;
    std::size_t repetitions = 3;
    std::size_t workers = 1;
    std::uint64_t seed = 2020;
    std::size_t max_qubits = default_max_qubits();

    void validate() const {
        QCFLOW_REQUIRE(!n_qubits.empty() && !families.empty(), "bench: empty qubit or family list");
        QCFLOW_REQUIRE(batch_size >= 1 && num_circuits % batch_size == 0,
                       "bench: num_circuits must be a multiple of batch_size");
        QCFLOW_REQUIRE(num_circuits / batch_size >= 2,
                       "bench: need at least two batches (the first is a warm-up)");
        QCFLOW_REQUIRE(repetitions >= 1 && workers >= 1, "bench: repetitions and workers must be >= 1");
        const bool structured =
            std::find(families.begin(), families.end(), Family::Structured) != families.end();
        for (auto n : n_qubits) {
            check_budget(n, max_qubits);
            QCFLOW_REQUIRE(n >= 2, "bench: need at least 2 qubits");
            QCFLOW_REQUIRE(!structured || (block_size >= 2 && n % block_size == 0),
                           "bench: " + std::to_string(n) + " qubits not divisible into blocks of " +
                               std::to_string(block_size));
        }
    }
};

struct BenchRecord {
    std::size_t n_qubits = 0;
    Family family = Family::RandomDense;
    bool fused = false;
    std::size_t raw_gates = 0;   // summed over all circuits
    std::size_t fused_gates = 0; // gates actually executed, summed
    double wall_time_s = 0.0;    // median over repetitions of the timed batches
    std::string checksum;
};

inline constexpr const char* kCsvHeader =
    "n_qubits,family,fused,raw_gates,fused_gates,wall_time_s,checksum";

inline void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& os, const BenchRecord& r) {
    char t[32];
    std::snprintf(t, sizeof t, "%.6f", r.wall_time_s);
    os << r.n_qubits << ',' << family_name(r.family) << ',' << (r.fused ? 1 : 0) << ','
       << r.raw_gates << ',' << r.fused_gates << ',' << t << ',' << r.checksum << '\n';
}

namespace detail {
/// Simulates circuits[begin, end) over `workers` threads and returns the
/// per-circuit checksums.
inline std::vector<double> run_range(const std::vector<ConcreteCircuit>& circuits, std::size_t begin,
                                     std::size_t end, bool fused, std::size_t workers) {
    std::vector<double> sums(end - begin);
    auto job = [&](std::size_t w) {
        for (std::size_t i = begin + w; i < end; i += workers) {
            sums[i - begin] = amplitude_checksum(simulate(circuits[i], {.fuse = fused}));
        }
    };
    if (workers == 1) {
        job(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(job, w);
        }
    }
    return sums;
}
} // namespace detail

/**
 * One record per (n, family, fuse) cell. Circuits depend only on
 * (seed, n, family, index), so fused and unfused cells simulate identical
 * circuits. Each repetition simulates the first batch untimed as a warm-up
 * and times the rest with a monotonic clock.
 */
inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<BenchRecord> out;
    for (std::size_t n : cfg.n_qubits) {
        for (Family fam : cfg.families) {
            std::vector<ConcreteCircuit> circuits;
            std::size_t raw = 0, fused_count = 0;
            for (std::size_t i = 0; i < cfg.num_circuits; ++i) {
                circuits.push_back(generate(fam, n, cfg.depth,
                                            stream_id({cfg.seed, n, static_cast<std::uint64_t>(fam), i}),
                                            cfg.block_size));
                raw += circuits.back().size();
                fused_count += fuse(circuits.back()).gates.size();
            }
            std::vector<bool> modes;
            if (cfg.fuse != FuseMode::On) {
                modes.push_back(false);
            }
            if (cfg.fuse != FuseMode::Off) {
                modes.push_back(true);
            }
            for (bool fused : modes) {
                std::vector<double> times;
                double checksum = 0.0;
                for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
                    std::vector<double> sums =
                        detail::run_range(circuits, 0, cfg.batch_size, fused, cfg.workers);
                    double elapsed = 0.0;
                    for (std::size_t b = cfg.batch_size; b < cfg.num_circuits; b += cfg.batch_size) {
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto part = detail::run_range(circuits, b, b + cfg.batch_size, fused, cfg.workers);
                        elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                        sums.insert(sums.end(), part.begin(), part.end());
                    }
                    times.push_back(elapsed);
                    checksum = 0.0;
                    for (double s : sums) {
                        checksum += s;
                    }
                }
                std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2),
                                 times.end());
                out.push_back({n, fam, fused, raw, fused ? fused_count : raw,
                               times[times.size() / 2], format_checksum(checksum)});
            }
        }
    }
    return out;
}

} // namespace qcflow::bench
