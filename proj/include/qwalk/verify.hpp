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
 * Property checks that pit the simulator against the classical oracles.
 * Shared by the command-line `verify` command and the test suites.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qwalk/matrixgen.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/qbs.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// Uniform unit vector, the default right-hand side.
inline Vector uniformVector(std::size_t n) { return Vector(n, 1.0 / std::sqrt(static_cast<double>(n))); }

struct QbsCheck {
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    bool involution = true;
    bool ancillaeClean = true;
    std::uint64_t queriesPerCall = 0;

    bool ok() const { return mismatches == 0 && involution && ancillaeClean; }
};

/// Runs one QBS call over `windows` random sorted windows of size s with
/// every target in [0, 2^n), n = log2 s + 2, all held in one superposition.
inline QbsCheck qbsExhaustive(std::uint64_t s, std::size_t windows, std::uint64_t seed) {
    const unsigned n = static_cast<unsigned>(std::countr_zero(s)) + 2;
    const std::uint64_t values = std::uint64_t{1} << n;
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> words;
    std::vector<std::uint64_t> pool(values);
    for (std::size_t w = 0; w < windows; ++w) {
        std::iota(pool.begin(), pool.end(), std::uint64_t{0});
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<std::uint64_t> win(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s));
        std::sort(win.begin(), win.end());
        words.insert(words.end(), win.begin(), win.end());
    }
    const auto aw = static_cast<unsigned>(std::bit_width(words.size() + s));
    const QramImage image(words, aw, n);

    SparseState state;
    const Register offset = state.alloc(aw, RegisterType::unsignedInt(), "offset");
    const Register target = state.alloc(n, RegisterType::unsignedInt(), "target");
    const Register output = state.alloc(n, RegisterType::unsignedInt(), "output");
    state.clearBranches();
    const double amp = 1.0 / std::sqrt(static_cast<double>(windows * values));
    for (std::size_t w = 0; w < windows; ++w) {
        for (std::uint64_t t = 0; t < values; ++t) {
            const std::uint64_t v[3] = {w * s, t, 0};
            state.appendBranch(v, amp);
        }
    }
    state.finalize();
    const SparseState initial = state;
    const std::size_t regs = state.registerCount();

    QbsCheck check;
    const std::size_t before = state.resources().qramQueries;
    try {
        qbs(state, image, QbsContext{offset, target, output, s, false, true});
    } catch (const Error &e) {
        if (e.code() == Errc::NonZeroAncilla) {
            check.ancillaeClean = false;
            return check;
        }
        throw;
    }
    check.queriesPerCall = state.resources().qramQueries - before;
    check.ancillaeClean = state.registerCount() == regs && state.stackDepth() == 0;

    const auto &offs = state.column(offset);
    const auto &tgts = state.column(target);
    const auto &outs = state.column(output);
    for (std::size_t i = 0; i < state.branchCount(); ++i) {
        const std::span<const std::uint64_t> win(words.data() + offs[i], s);
        const SearchResult r = classicalBinarySearch(win, tgts[i]);
        ++check.cases;
        if (outs[i] != (r.found ? r.position : 0)) ++check.mismatches;
    }
    qbs(state, image, QbsContext{offset, target, output, s, false, true});
    state.canonicalize();
    SparseState ref = initial;
    ref.canonicalize();
    check.involution = state.dump() == ref.dump();
    return check;
}

struct BijectionCheck {
    bool permutation = true;
    bool rowPreserved = true;
    bool reducesToSparsityOracle = true;

    bool ok() const { return permutation && rowPreserved && reducesToSparsityOracle; }
};

/// Applies O_s' to every (j, l, z) with j < N and l, z in [0, 2^n).
inline BijectionCheck osPrimeBijection(const CscMatrixImage &csc) {
    SparseState state;
    const WalkContext ctx = WalkContext::create(state, csc);
    const std::uint64_t side = std::uint64_t{1} << ctx.n;
    state.clearBranches();
    const std::size_t rj = state.indexOf(ctx.j);
    const std::size_t rk = state.indexOf(ctx.k);
    const std::size_t rkc = state.indexOf(ctx.kc);
    std::vector<std::uint64_t> v(state.registerCount(), 0);
    for (std::uint64_t j = 0; j < csc.N; ++j) {
        for (std::uint64_t l = 0; l < side; ++l) {
            for (std::uint64_t z = 0; z < side; ++z) {
                v[rj] = j;
                v[rk] = l;
                v[rkc] = z;
                state.appendBranch(v, 1.0);
            }
        }
    }
    state.finalize();
    // Semi-quantum steps keep branch positions, so inputs match outputs by index.
    std::vector<std::uint64_t> inJ = state.column(ctx.j), inL = state.column(ctx.k), inZ = state.column(ctx.kc);
    osPrime(state, ctx);

    BijectionCheck check;
    const auto &outJ = state.column(ctx.j);
    const auto &outK = state.column(ctx.k);
    const auto &outKc = state.column(ctx.kc);
    std::vector<std::uint8_t> seen(csc.N * side * side, 0);
    for (std::size_t i = 0; i < state.branchCount(); ++i) {
        if (outJ[i] != inJ[i]) check.rowPreserved = false;
        if (outJ[i] >= csc.N) continue;
        std::uint8_t &slot = seen[(outJ[i] * side + outK[i]) * side + outKc[i]];
        if (slot != 0) check.permutation = false;
        slot = 1;
        if (inZ[i] == 0 && inL[i] < csc.s) {
            const std::uint64_t col = csc.colIndices[inJ[i] * csc.s + inL[i]];
            if (outK[i] != col || outKc[i] != 0) check.reducesToSparsityOracle = false;
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) check.permutation = false;
    return check;
}

/// Max entry error between the flag-zero block of T~^dag S T~ and A/s.
inline double blockEncodingError(const CscMatrixImage &csc) {
    const DenseMatrix h = csc.normalizedDense();
    double err = 0.0;
    for (std::uint64_t col = 0; col < csc.N; ++col) {
        SparseState state;
        const WalkContext ctx = WalkContext::create(state, csc);
        std::vector<Amplitude> e(csc.N);
        e[col] = 1.0;
        prepareRowState(state, ctx, std::span<const Amplitude>(e));
        tTilde(state, ctx);
        swapHalves(state, ctx);
        tTildeAdjoint(state, ctx);
        const std::vector<Amplitude> out = flagZeroProjection(state, ctx);
        for (std::uint64_t row = 0; row < csc.N; ++row) err = std::max(err, std::abs(out[row] - h(row, col)));
    }
    return err;
}

struct WalkCheck {
    double maxError = 0.0;
    double maxNormDrift = 0.0;
    std::size_t branchesAfterFirstT = 0;
    std::size_t maxBranches = 0;
    std::vector<double> errorPerStep;  ///< index n - 1
    bool ancillaBalanced = true;
};

/// Compares the flag-zero part of T~^dag W^n T~ |b~> with T_n(A/s) b for
/// n = 1..nMax. With `oracle` false only the resource figures are filled.
inline WalkCheck chebyshevWalk(const CscMatrixImage &csc, const Vector &b, std::size_t nMax, bool oracle = true,
                               double pruneTol = kDefaultPruneTolerance) {
    SparseState state;
    state.setPruneTolerance(pruneTol);
    const WalkContext ctx = WalkContext::create(state, csc);
    prepareRowState(state, ctx, std::span<const double>(b));
    tTilde(state, ctx);
    WalkCheck check;
    check.branchesAfterFirstT = state.branchCount();
    std::vector<Vector> t;
    if (oracle) t = chebApply(csc.normalizedDense(), b, nMax);
    const std::size_t regs = state.registerCount();
    for (std::size_t n = 1; n <= nMax; ++n) {
        walkW(state, ctx);
        if (state.registerCount() != regs) check.ancillaBalanced = false;
        check.maxNormDrift = std::max(check.maxNormDrift, std::abs(state.norm() - 1.0));
        if (!oracle) continue;
        SparseState probe = state;
        tTildeAdjoint(probe, ctx);
        const std::vector<Amplitude> p = flagZeroProjection(probe, ctx);
        double err = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) err = std::max(err, std::abs(p[i] - t[n][i]));
        check.errorPerStep.push_back(err);
        check.maxError = std::max(check.maxError, err);
    }
    check.maxBranches = state.resources().maxBranches;
    return check;
}

}  // namespace qwalk
