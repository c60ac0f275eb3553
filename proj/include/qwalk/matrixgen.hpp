// Copyright 2026 The qwalk Authors
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
 * Random symmetric band matrices and their packed QRAM image.
 *
 * The image holds two segments of N*s words each. The element segment
 * stores the s (zero padded) nonzeros of every row as fixed-point words;
 * the sparsity segment stores their column indices. Padding positions
 * get the indices N, N+1, ... so every row window stays strictly
 * increasing, which the binary search relies on.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/qram.hpp"

namespace qwalk {

inline constexpr unsigned kMaxWordLength = 32;
inline constexpr double kSingularThreshold = 1e-14;

struct BandMatrixSpec {
    std::uint64_t rows = 16;
    std::uint64_t bandwidth = 1;
    unsigned wordLength = 8;
    std::uint64_t seed = 1;
};

inline void validateWordLength(unsigned kw) {
    if (kw < 1 || kw > kMaxWordLength) throw Error(Errc::WidthOutOfRange, "word length must lie in [1, 32]");
}

/// floor(x * 2^kw) for x in [0, 1]. The value 1 maps to 2^kw, which is
/// why element words carry one bit above the fraction.
inline std::uint64_t quantize(double x, unsigned kw) {
    validateWordLength(kw);
    if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::InvalidArgument, "quantize expects a value in [0, 1]");
    return static_cast<std::uint64_t>(std::floor(std::ldexp(x, static_cast<int>(kw))));
}

inline double dequantize(std::uint64_t word, unsigned kw) { return std::ldexp(static_cast<double>(word), -static_cast<int>(kw)); }

/// Index width n = log2 N + 1; the extra bit holds padding indices.
inline unsigned indexWidth(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n)); }

/// Symmetric band matrix with entries drawn uniformly from the nonzero
/// kw-bit fixed-point values in (0, 1). Deterministic for a given seed.
inline DenseMatrix genBandMatrix(const BandMatrixSpec &spec) {
    validateWordLength(spec.wordLength);
    if (spec.rows < 1 || !std::has_single_bit(spec.rows)) {
        throw Error(Errc::InvalidArgument, "row count must be a power of two");
    }
    if (spec.bandwidth * 2 >= spec.rows) {
        throw Error(Errc::InvalidArgument, "bandwidth must be below N/2");
    }
    const std::size_t n = spec.rows;
    std::mt19937_64 rng(spec.seed);
    const unsigned shift = 64 - spec.wordLength;
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n && j <= i + spec.bandwidth; ++j) {
            std::uint64_t w = 0;
            while (w == 0) w = rng() >> shift;
            const double v = dequantize(w, spec.wordLength);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

/// Per-row packed sparse form of a quantized matrix.
struct CscMatrixImage {
    std::uint64_t N = 0;
    std::uint64_t s = 0;
    unsigned kw = 0;
    unsigned n = 0;
    std::uint64_t elementOffset = 0;
    std::uint64_t sparsityOffset = 0;
    std::vector<std::uint64_t> elements;    ///< N*s fixed-point words
    std::vector<std::uint64_t> colIndices;  ///< N*s indices, padded with N, N+1, ...

    /// Builds and validates an image from explicit rows of (column, value).
    static CscMatrixImage fromRows(std::uint64_t N, std::uint64_t s, unsigned kw,
                                   const std::vector<std::vector<std::pair<std::uint64_t, double>>> &rows) {
        validateWordLength(kw);
        if (N < 1 || !std::has_single_bit(N)) throw Error(Errc::InvalidArgument, "N must be a power of two");
        if (s < 1 || !std::has_single_bit(s)) throw Error(Errc::InvalidArgument, "s must be a power of two");
        if (s > N) throw Error(Errc::InvalidArgument, "s cannot exceed N");
        if (rows.size() != N) throw Error(Errc::InvalidArgument, "expected one entry list per row");
        CscMatrixImage c;
        c.N = N;
        c.s = s;
        c.kw = kw;
        c.n = indexWidth(N);
        c.elementOffset = 0;
        c.sparsityOffset = N * s;
        c.elements.assign(N * s, 0);
        c.colIndices.assign(N * s, 0);
        for (std::uint64_t j = 0; j < N; ++j) {
            auto entries = rows[j];
            std::sort(entries.begin(), entries.end());
            if (entries.size() > s) throw Error(Errc::InvalidArgument, "row has more than s entries");
            for (std::uint64_t l = 0; l < s; ++l) {
                if (l < entries.size()) {
                    if (entries[l].first >= N) throw Error(Errc::InvalidArgument, "column index out of range");
                    if (l > 0 && entries[l].first == entries[l - 1].first) {
                        throw Error(Errc::InvalidArgument, "duplicate column in row");
                    }
                    c.elements[j * s + l] = quantize(entries[l].second, kw);
                    c.colIndices[j * s + l] = entries[l].first;
                } else {
                    c.colIndices[j * s + l] = N + (l - entries.size());
                }
            }
        }
        return c;
    }

    std::uint64_t nnz() const {
        return static_cast<std::uint64_t>(std::count_if(colIndices.begin(), colIndices.end(),
                                                        [&](std::uint64_t k) { return k < N; }));
    }

    /// Dense A with dequantized entries.
    DenseMatrix dense() const {
        DenseMatrix m(N);
        for (std::uint64_t j = 0; j < N; ++j) {
            for (std::uint64_t l = 0; l < s; ++l) {
                const std::uint64_t k = colIndices[j * s + l];
                if (k < N) m(j, k) = dequantize(elements[j * s + l], kw);
            }
        }
        return m;
    }

    /// A / s, the matrix the walk block-encodes.
    DenseMatrix normalizedDense() const { return dense().scaled(1.0 / static_cast<double>(s)); }

    /// Element words need kw + 1 bits so that 1.0 fits.
    unsigned elementWidth() const { return kw + 1; }
    unsigned wordWidth() const { return std::max(elementWidth(), n); }

    /// Wide enough for every address the walk can form from n-bit registers.
    unsigned addressWidth() const {
        const std::uint64_t top = lowMask(n);
        const std::uint64_t maxAddr = std::max(elementOffset, sparsityOffset) + top * s + top;
        return std::max(1u, static_cast<unsigned>(std::bit_width(maxAddr)));
    }

    friend bool operator==(const CscMatrixImage &, const CscMatrixImage &) = default;
};

struct PreprocessResult {
    CscMatrixImage csc;
    double kappa = 1.0;
    /// Divisor applied in the rescaling step (1 when no rescale happened).
    double rescale = 1.0;
};

/// Rescales (only when max entry exceeds 1), quantizes, packs rows to a
/// power-of-two width and computes kappa = 1 / min |eig(A/s)|.
inline PreprocessResult preprocess(const DenseMatrix &a, unsigned kw) {
    validateWordLength(kw);
    const std::size_t N = a.size();
    if (N < 1 || !std::has_single_bit(N)) throw Error(Errc::InvalidArgument, "matrix dimension must be a power of two");
    if (!a.isSymmetric()) throw Error(Errc::InvalidArgument, "matrix must be symmetric");
    double maxAbs = 0.0;
    for (double v : a.data()) {
        if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "matrix entries must be finite");
        if (v < 0.0) throw Error(Errc::InvalidArgument, "matrix entries must be nonnegative");
        maxAbs = std::max(maxAbs, v);
    }
    PreprocessResult r;
    r.rescale = maxAbs > 1.0 ? maxAbs : 1.0;

    std::vector<std::vector<std::pair<std::uint64_t, double>>> rows(N);
    std::uint64_t widest = 1;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = 0; k < N; ++k) {
            const double v = std::min(1.0, a(j, k) / r.rescale);
            if (quantize(v, kw) != 0) rows[j].emplace_back(k, v);
        }
        widest = std::max<std::uint64_t>(widest, rows[j].size());
    }
    r.csc = CscMatrixImage::fromRows(N, std::bit_ceil(widest), kw, rows);
    const double lambda = minAbsEigenvalue(r.csc.normalizedDense());
    if (lambda < kSingularThreshold) throw Error(Errc::Singular, "A/s is singular");
    r.kappa = 1.0 / lambda;
    return r;
}

inline QramImage packQram(const CscMatrixImage &c) {
    std::vector<std::uint64_t> words(2 * c.N * c.s, 0);
    for (std::uint64_t i = 0; i < c.N * c.s; ++i) {
        words[c.elementOffset + i] = c.elements[i];
        words[c.sparsityOffset + i] = c.colIndices[i];
    }
    return QramImage(std::move(words), c.addressWidth(), c.wordWidth());
}

/// Inverse of packQram given the layout parameters.
inline CscMatrixImage unpackQram(const QramImage &image, std::uint64_t N, std::uint64_t s, unsigned kw) {
    CscMatrixImage c;
    c.N = N;
    c.s = s;
    c.kw = kw;
    c.n = indexWidth(N);
    c.elementOffset = 0;
    c.sparsityOffset = N * s;
    if (image.size() != 2 * N * s) throw Error(Errc::LayoutMismatch, "image size does not match N and s");
    c.elements.resize(N * s);
    c.colIndices.resize(N * s);
    for (std::uint64_t i = 0; i < N * s; ++i) {
        c.elements[i] = image.read(c.elementOffset + i) & lowMask(c.elementWidth());
        c.colIndices[i] = image.read(c.sparsityOffset + i) & lowMask(c.n);
    }
    return c;
}

/// True when every row window of the sparsity segment is strictly increasing.
inline bool windowsSorted(const QramImage &image, std::uint64_t N, std::uint64_t s, std::uint64_t sparsityOffset) {
    for (std::uint64_t j = 0; j < N; ++j) {
        for (std::uint64_t l = 1; l < s; ++l) {
            if (image.read(sparsityOffset + j * s + l - 1) >= image.read(sparsityOffset + j * s + l)) return false;
        }
    }
    return true;
}

}  // namespace qwalk
