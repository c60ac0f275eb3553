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
 * Quantum walk on a sparse symmetric matrix stored in QRAM.
 *
 * The walk acts on six registers (jc, j, b1, kc, k, b2). A valid input
 * |j~> has every register except j at zero. The isometry T~ prepares
 *
 *     |psi~_j> = s^{-1/2} sum_k |j>|k> (sqrt(A_jk)|0> + sqrt(1 - A_jk)|1>)_b2
 *
 * and W = S T~ P T~^dag, where P reflects about the valid subspace and S
 * swaps the row and column halves. The extended registers jc and kc keep
 * the column lookup bijective, so T~ leaves no garbage behind.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/interference.hpp"
#include "qwalk/matrixgen.hpp"
#include "qwalk/qbs.hpp"
#include "qwalk/qram.hpp"
#include "qwalk/semiquantum.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

/// Matrix layout and register handles shared by every walk operation.
struct WalkContext {
    std::uint64_t N = 0;
    std::uint64_t s = 0;
    unsigned n = 0;
    unsigned kw = 0;
    std::uint64_t elementOffset = 0;
    std::uint64_t sparsityOffset = 0;
    QramImage image;
    Register jc, j, b1, kc, k, b2;

    unsigned logS() const { return static_cast<unsigned>(std::countr_zero(s)); }

    /// Allocates the walk registers on `state` in the order jc, j, b1, kc, k, b2.
    static WalkContext create(SparseState &state, const CscMatrixImage &csc) {
        return create(state, csc, packQram(csc));
    }

    /// Same, with an image that was loaded rather than packed here.
    static WalkContext create(SparseState &state, const CscMatrixImage &csc, QramImage image) {
        WalkContext ctx;
        ctx.N = csc.N;
        ctx.s = csc.s;
        ctx.n = csc.n;
        ctx.kw = csc.kw;
        ctx.elementOffset = csc.elementOffset;
        ctx.sparsityOffset = csc.sparsityOffset;
        ctx.image = std::move(image);
        const RegisterType uint = RegisterType::unsignedInt();
        ctx.jc = state.alloc(ctx.n, uint, "jc");
        ctx.j = state.alloc(ctx.n, uint, "j");
        ctx.b1 = state.alloc(1, RegisterType::boolean(), "b1");
        ctx.kc = state.alloc(ctx.n, uint, "kc");
        ctx.k = state.alloc(ctx.n, uint, "k");
        ctx.b2 = state.alloc(1, RegisterType::boolean(), "b2");
        return ctx;
    }

    /// Registers that read zero on the valid subspace.
    std::vector<Register> flagRegisters() const { return {b1, k, b2, jc, kc}; }

    /// Type of the temporary that holds a matrix element.
    RegisterType elementType() const { return RegisterType::fixedPoint(kw); }
    unsigned elementWidth() const { return kw + 1; }
};

namespace detail {

/// Allocates a temporary holding base + row * s (+ col).
inline Register computeAddress(SparseState &state, const WalkContext &ctx, std::uint64_t base, Register row,
                               const Register *col) {
    const Register addr = state.alloc(ctx.image.addressWidth(), RegisterType::unsignedInt(), "addr");
    const std::uint64_t s = ctx.s;
    if (col != nullptr) {
        xorOutOfPlace(
            state, [base, s](std::span<const std::uint64_t> v) { return base + v[0] * s + v[1]; }, {row, *col},
            addr);
    } else {
        xorOutOfPlace(state, [base, s](std::span<const std::uint64_t> v) { return base + v[0] * s; }, {row}, addr);
    }
    return addr;
}

/// Inverse of computeAddress; the temporary must be recomputed exactly.
inline void releaseAddress(SparseState &state, const WalkContext &ctx, std::uint64_t base, Register row,
                           const Register *col, Register addr) {
    const std::uint64_t s = ctx.s;
    if (col != nullptr) {
        xorOutOfPlace(
            state, [base, s](std::span<const std::uint64_t> v) { return base + v[0] * s + v[1]; }, {row, *col},
            addr);
    } else {
        xorOutOfPlace(state, [base, s](std::span<const std::uint64_t> v) { return base + v[0] * s; }, {row}, addr);
    }
    state.free(addr);
}

}  // namespace detail

/// elem ^= a_{j,l}, the l-th stored element of row j, read from the element
/// segment with l taken from register k. With `controlled` the query only
/// fires when jc = kc = 0, which embeds A as the block diag(A, 0).
inline void oaPrime(SparseState &state, const WalkContext &ctx, Register elem, bool controlled = true) {
    const Register addr = detail::computeAddress(state, ctx, ctx.elementOffset, ctx.j, &ctx.k);
    Controls controls;
    if (controlled) controls = {{ctx.jc, 0}, {ctx.kc, 0}};
    qramQuery(state, ctx.image, addr, elem, controls);
    detail::releaseAddress(state, ctx, ctx.elementOffset, ctx.j, &ctx.k, addr);
}

/// |j, l, z>_{j,k,kc} -> |j, z ^ k_{j,l}, l ^ i(z ^ k_{j,l})>: a sparsity
/// QRAM read into kc, a binary search that clears l, and a swap of k, kc.
inline void osPrime(SparseState &state, const WalkContext &ctx) {
    const Register addr = detail::computeAddress(state, ctx, ctx.sparsityOffset, ctx.j, &ctx.k);
    qramQuery(state, ctx.image, addr, ctx.kc);
    detail::releaseAddress(state, ctx, ctx.sparsityOffset, ctx.j, &ctx.k, addr);

    const Register base = detail::computeAddress(state, ctx, ctx.sparsityOffset, ctx.j, nullptr);
    qbs(state, ctx.image, QbsContext{base, ctx.kc, ctx.k, ctx.s});
    detail::releaseAddress(state, ctx, ctx.sparsityOffset, ctx.j, nullptr, base);

    swapRegisters(state, ctx.k, ctx.kc);
}

inline void osPrimeAdjoint(SparseState &state, const WalkContext &ctx) {
    swapRegisters(state, ctx.k, ctx.kc);

    const Register base = detail::computeAddress(state, ctx, ctx.sparsityOffset, ctx.j, nullptr);
    qbs(state, ctx.image, QbsContext{base, ctx.kc, ctx.k, ctx.s});
    detail::releaseAddress(state, ctx, ctx.sparsityOffset, ctx.j, nullptr, base);

    const Register addr = detail::computeAddress(state, ctx, ctx.sparsityOffset, ctx.j, &ctx.k);
    qramQuery(state, ctx.image, addr, ctx.kc);
    detail::releaseAddress(state, ctx, ctx.sparsityOffset, ctx.j, &ctx.k, addr);
}

/// |j~> -> |psi~_j>.
inline void tTilde(SparseState &state, const WalkContext &ctx) {
    const Register elem = state.alloc(ctx.elementWidth(), ctx.elementType(), "elem");
    hadamardTransform(state, ctx.k, ctx.logS(), HadamardDomain::LowQubits);
    oaPrime(state, ctx, elem);
    osPrime(state, ctx);
    conditionalRotation(state, ctx.b2, elem);
    osPrimeAdjoint(state, ctx);
    oaPrime(state, ctx, elem);
    osPrime(state, ctx);
    state.free(elem);
}

inline void tTildeAdjoint(SparseState &state, const WalkContext &ctx) {
    const Register elem = state.alloc(ctx.elementWidth(), ctx.elementType(), "elem");
    osPrimeAdjoint(state, ctx);
    oaPrime(state, ctx, elem);
    osPrime(state, ctx);
    conditionalRotation(state, ctx.b2, elem, true);
    osPrimeAdjoint(state, ctx);
    oaPrime(state, ctx, elem);
    hadamardTransform(state, ctx.k, ctx.logS(), HadamardDomain::LowQubits);
    state.free(elem);
}

/// Phase -1 on every branch outside the valid subspace.
inline void reflectionP(SparseState &state, const WalkContext &ctx) {
    phaseFlipIfAnyNonzero(state, ctx.flagRegisters());
}

/// S: exchanges (jc, j, b1) with (kc, k, b2).
inline void swapHalves(SparseState &state, const WalkContext &ctx) {
    swapRegisters(state, ctx.j, ctx.k);
    swapRegisters(state, ctx.jc, ctx.kc);
    swapRegisters(state, ctx.b1, ctx.b2);
}

/// W = S T~ P T~^dag.
inline void walkW(SparseState &state, const WalkContext &ctx) {
    tTildeAdjoint(state, ctx);
    reflectionP(state, ctx);
    tTilde(state, ctx);
    swapHalves(state, ctx);
}

/// Logical qubits of the walk program: (n + kw + 2) log s + 5n + kw + 4
/// with n = log2 N + 1.
inline std::uint64_t qubitEstimate(std::uint64_t N, std::uint64_t s, std::uint64_t kw) {
    if (N < 1 || !std::has_single_bit(N) || s < 1 || !std::has_single_bit(s)) {
        throw Error(Errc::InvalidArgument, "N and s must be powers of two");
    }
    const std::uint64_t n = static_cast<std::uint64_t>(std::countr_zero(N)) + 1;
    const std::uint64_t logS = static_cast<std::uint64_t>(std::countr_zero(s));
    return (n + kw + 2) * logS + 5 * n + kw + 4;
}

/// Replaces the branches of a walk-only state with sum_j b_j |j~>.
inline void prepareRowState(SparseState &state, const WalkContext &ctx, std::span<const Amplitude> b) {
    if (b.size() != ctx.N) throw Error(Errc::InvalidArgument, "vector length must equal N");
    const std::size_t row = state.indexOf(ctx.j);
    state.clearBranches();
    std::vector<std::uint64_t> values(state.registerCount(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == Amplitude{}) continue;
        values[row] = i;
        state.appendBranch(values, b[i]);
    }
    if (state.branchCount() == 0) throw Error(Errc::ZeroNorm, "input vector is zero");
    state.finalize();
}

inline void prepareRowState(SparseState &state, const WalkContext &ctx, std::span<const double> b) {
    std::vector<Amplitude> c(b.begin(), b.end());
    prepareRowState(state, ctx, std::span<const Amplitude>(c));
}

/// Amplitudes of the branches with every flag register at zero, by row j.
inline std::vector<Amplitude> flagZeroProjection(const SparseState &state, const WalkContext &ctx) {
    std::vector<Amplitude> out(ctx.N);
    std::vector<const std::uint64_t *> flags;
    for (const Register &r : ctx.flagRegisters()) flags.push_back(state.column(r).data());
    const auto &rows = state.column(ctx.j);
    const auto &amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        bool zero = true;
        for (const std::uint64_t *f : flags) zero = zero && f[i] == 0;
        if (!zero) continue;
        if (rows[i] >= ctx.N) throw Error(Errc::ValueOverflow, "flag-zero branch with a padding row index");
        out[rows[i]] += amps[i];
    }
    return out;
}

/// Squared norm of the flag-zero part.
inline double flagZeroMass(const SparseState &state, const WalkContext &ctx) {
    double m = 0.0;
    for (const Amplitude &a : flagZeroProjection(state, ctx)) m += std::norm(a);
    return m;
}

}  // namespace qwalk
