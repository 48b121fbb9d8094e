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
 * Gate application kernels over a contiguous amplitude array.
 *
 * A k-qubit matrix is broadcast over the 2^(n-k) index groups obtained by
 * inserting zero bits at the target positions; each group is gathered,
 * multiplied, and scattered back.
 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "qcflow/core/error.hpp"
#include "qcflow/core/linalg.hpp"

namespace qcflow::kernels {

/// Inserts a zero bit at position `bit` of `i`.
constexpr std::uint64_t insert_zero(std::uint64_t i, unsigned bit) noexcept {
    const std::uint64_t low = i & ((std::uint64_t{1} << bit) - 1);
    return ((i ^ low) << 1) | low;
}

// The 1- and 2-qubit kernels work on the underlying doubles: std::complex
// multiplication carries NaN recovery branches that keep GCC from
// vectorizing. With SSE2 each amplitude is one [re, im] register and a
// complex product is two multiplies against pre-split matrix entries.

namespace detail {
#if defined(__SSE2__)
struct CoeffPair {
    __m128d re; // (Re u, Re u)
    __m128d im; // (-Im u, Im u)
};

inline CoeffPair split(Complex u) {
    return {_mm_set1_pd(u.real()), _mm_set_pd(u.imag(), -u.imag())};
}

/// acc + u * x for x = [re, im] and its swap xs = [im, re].
inline __m128d cmac(__m128d acc, const CoeffPair& u, __m128d x, __m128d xs) {
    return _mm_add_pd(acc, _mm_add_pd(_mm_mul_pd(u.re, x), _mm_mul_pd(u.im, xs)));
}

inline __m128d swap(__m128d x) { return _mm_shuffle_pd(x, x, 1); }
#endif
} // namespace detail

inline void apply_1q(std::span<Complex> amps, unsigned q, const Matrix& m) {
    auto* p = reinterpret_cast<double*>(amps.data());
    const std::uint64_t stride = std::uint64_t{1} << q;
    const std::uint64_t n = amps.size();
#if defined(__SSE2__)
    detail::CoeffPair u[4];
    for (int k = 0; k < 4; ++k) {
        u[k] = detail::split(m(k / 2, k % 2));
    }
    for (std::uint64_t hi = 0; hi < n; hi += 2 * stride) {
        for (std::uint64_t i0 = hi; i0 < hi + stride; ++i0) {
            double* pa = p + 2 * i0;
            double* pb = p + 2 * (i0 + stride);
            const __m128d a = _mm_loadu_pd(pa), b = _mm_loadu_pd(pb);
            const __m128d as = detail::swap(a), bs = detail::swap(b);
            const __m128d zero = _mm_setzero_pd();
            _mm_storeu_pd(pa, detail::cmac(detail::cmac(zero, u[0], a, as), u[1], b, bs));
            _mm_storeu_pd(pb, detail::cmac(detail::cmac(zero, u[2], a, as), u[3], b, bs));
        }
    }
#else
    double ur[4], ui[4];
    for (int k = 0; k < 4; ++k) {
        ur[k] = m(k / 2, k % 2).real();
        ui[k] = m(k / 2, k % 2).imag();
    }
    for (std::uint64_t hi = 0; hi < n; hi += 2 * stride) {
        for (std::uint64_t i0 = hi; i0 < hi + stride; ++i0) {
            double* a = p + 2 * i0;
            double* b = p + 2 * (i0 + stride);
            const double ar = a[0], ai = a[1], br = b[0], bi = b[1];
            a[0] = ur[0] * ar - ui[0] * ai + ur[1] * br - ui[1] * bi;
            a[1] = ur[0] * ai + ui[0] * ar + ur[1] * bi + ui[1] * br;
            b[0] = ur[2] * ar - ui[2] * ai + ur[3] * br - ui[3] * bi;
            b[1] = ur[2] * ai + ui[2] * ar + ur[3] * bi + ui[3] * br;
        }
    }
#endif
}

/// q0 is local bit 0 of the matrix index, q1 local bit 1.
inline void apply_2q(std::span<Complex> amps, unsigned q0, unsigned q1, const Matrix& m) {
    auto* p = reinterpret_cast<double*>(amps.data());
    const std::uint64_t s0 = std::uint64_t{1} << q0;
    const std::uint64_t s1 = std::uint64_t{1} << q1;
    const std::uint64_t sl = std::min(s0, s1);
    const std::uint64_t sh = std::max(s0, s1);
    const std::uint64_t n = amps.size();
#if defined(__SSE2__)
    detail::CoeffPair u[16];
    for (int k = 0; k < 16; ++k) {
        u[k] = detail::split(m(k / 4, k % 4));
    }
#else
    double ur[16], ui[16];
    for (int k = 0; k < 16; ++k) {
        ur[k] = m(k / 4, k % 4).real();
        ui[k] = m(k / 4, k % 4).imag();
    }
#endif
    for (std::uint64_t a = 0; a < n; a += 2 * sh) {
        for (std::uint64_t b = a; b < a + sh; b += 2 * sl) {
            for (std::uint64_t i = b; i < b + sl; ++i) {
                double* ptr[4] = {p + 2 * i, p + 2 * (i | s0), p + 2 * (i | s1), p + 2 * (i | s0 | s1)};
#if defined(__SSE2__)
                __m128d x[4], xs[4];
                for (int c = 0; c < 4; ++c) {
                    x[c] = _mm_loadu_pd(ptr[c]);
                    xs[c] = detail::swap(x[c]);
                }
                for (int r = 0; r < 4; ++r) {
                    __m128d acc = _mm_setzero_pd();
                    for (int c = 0; c < 4; ++c) {
                        acc = detail::cmac(acc, u[4 * r + c], x[c], xs[c]);
                    }
                    _mm_storeu_pd(ptr[r], acc);
                }
#else
                double xr[4], xi[4];
                for (int c = 0; c < 4; ++c) {
                    xr[c] = ptr[c][0];
                    xi[c] = ptr[c][1];
                }
                for (int r = 0; r < 4; ++r) {
                    double yr = 0.0, yi = 0.0;
                    for (int c = 0; c < 4; ++c) {
                        yr += ur[4 * r + c] * xr[c] - ui[4 * r + c] * xi[c];
                        yi += ur[4 * r + c] * xi[c] + ui[4 * r + c] * xr[c];
                    }
                    ptr[r][0] = yr;
                    ptr[r][1] = yi;
                }
#endif
            }
        }
    }
}

/// Generic k-qubit kernel; targets[0] is local bit 0.
inline void apply_kq(std::span<Complex> amps, std::span<const std::size_t> targets,
                     const Matrix& m) {
    const std::size_t k = targets.size();
    const std::size_t dim = std::size_t{1} << k;
    QCFLOW_REQUIRE(static_cast<std::size_t>(m.rows()) == dim,
                   "kernel: matrix size does not match target count");
    std::vector<unsigned> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint64_t> offsets(dim, 0);
    for (std::size_t l = 0; l < dim; ++l) {
        for (std::size_t b = 0; b < k; ++b) {
            if ((l >> b) & 1U) {
                offsets[l] |= std::uint64_t{1} << targets[b];
            }
        }
    }
    std::vector<Complex> in(dim);
    const std::uint64_t groups = amps.size() >> k;
    for (std::uint64_t g = 0; g < groups; ++g) {
        std::uint64_t base = g;
        for (unsigned bit : sorted) {
            base = insert_zero(base, bit);
        }
        for (std::size_t l = 0; l < dim; ++l) {
            in[l] = amps[base | offsets[l]];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            Complex acc(0.0, 0.0);
            for (std::size_t c = 0; c < dim; ++c) {
                acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
            }
            amps[base | offsets[r]] = acc;
        }
    }
}

inline void apply_matrix(std::span<Complex> amps, std::span<const std::size_t> targets,
                         const Matrix& m) {
    if (targets.size() == 1) {
        apply_1q(amps, static_cast<unsigned>(targets[0]), m);
    } else if (targets.size() == 2) {
        apply_2q(amps, static_cast<unsigned>(targets[0]), static_cast<unsigned>(targets[1]), m);
    } else {
        apply_kq(amps, targets, m);
    }
}

/// psi <- exp(-i angle P) psi for the unit-coefficient Pauli string given by
/// its masks: P|i> = i^{y_count} (-1)^{popcount(i & z_mask)} |i ^ x_mask>.
inline void apply_pauli_rotation(std::span<Complex> amps, std::uint64_t x_mask,
                                 std::uint64_t z_mask, std::size_t y_count, double angle) {
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex yphase = kIPow[y_count % 4];
    const double c = std::cos(angle);
    const Complex ms(0.0, -std::sin(angle));
    const std::uint64_t n = amps.size();
    if (x_mask == 0) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const double sign = (std::popcount(i & z_mask) & 1) ? -1.0 : 1.0;
            amps[i] *= c + ms * yphase * sign;
        }
        return;
    }
    // Pair i with j = i ^ x_mask, visiting each pair once via the top flip bit.
    const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x_mask));
    for (std::uint64_t i = 0; i < n; ++i) {
        if (i & top) {
            continue;
        }
        const std::uint64_t j = i ^ x_mask;
        const double si = (std::popcount(i & z_mask) & 1) ? -1.0 : 1.0;
        const double sj = (std::popcount(j & z_mask) & 1) ? -1.0 : 1.0;
        const Complex ai = amps[i];
        const Complex aj = amps[j];
        // (P psi)[j] = phase(i) psi[i], (P psi)[i] = phase(j) psi[j].
        amps[i] = c * ai + ms * yphase * sj * aj;
        amps[j] = c * aj + ms * yphase * si * ai;
    }
}

} // namespace qcflow::kernels
