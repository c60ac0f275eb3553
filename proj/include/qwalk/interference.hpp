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
 * Operations that create, merge or delete branches.
 *
 * Two branches can interfere only if every idle register (a register the
 * operation does not act on) holds the same value in both. Each operation
 * therefore sorts branches by their idle registers, transforms every group
 * of equal idle keys independently, and finally drops branches whose
 * amplitude cancelled out.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <complex>
#include <cstdint>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

inline constexpr unsigned kMaxGroupTransformQubits = 20;

struct BranchGroup {
    std::vector<std::uint64_t> idleKey;
    std::vector<std::size_t> members;
};

namespace detail {

/// Row indices of every register except those in `active`, in register order.
inline std::vector<std::size_t> idleRows(const SparseState &state, const std::vector<std::size_t> &active) {
    std::vector<std::size_t> idle;
    for (std::size_t k = 0; k < state.registerCount(); ++k) {
        if (std::find(active.begin(), active.end(), k) == active.end()) idle.push_back(k);
    }
    return idle;
}

inline bool sameKey(const std::vector<const std::uint64_t *> &keys, std::size_t a, std::size_t b) {
    for (const std::uint64_t *k : keys) {
        if (k[a] != k[b]) return false;
    }
    return true;
}

/// Reorders the state by (idle rows, active rows) and returns the
/// [begin, end) ranges of equal idle keys.
inline std::vector<std::pair<std::size_t, std::size_t>> sortIntoGroups(SparseState &state,
                                                                       const std::vector<std::size_t> &active) {
    std::vector<std::size_t> key = idleRows(state, active);
    const std::size_t idleCount = key.size();
    key.insert(key.end(), active.begin(), active.end());
    state.permute(state.sortedOrder(key));
    // Canonical exactly when the active rows are the trailing rows.
    bool trailing = true;
    for (std::size_t i = 0; i < key.size(); ++i) trailing = trailing && key[i] == i;
    if (trailing) state.markCanonical();

    std::vector<const std::uint64_t *> idleCols;
    for (std::size_t i = 0; i < idleCount; ++i) idleCols.push_back(state.column(key[i]).data());
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t m = state.branchCount();
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= m; ++i) {
        if (i == m || !sameKey(idleCols, begin, i)) {
            ranges.emplace_back(begin, i);
            begin = i;
        }
    }
    return ranges;
}

/// In-place unnormalized Walsh-Hadamard transform of a length-2^m buffer.
inline void walshHadamard(std::vector<Amplitude> &buf) {
    const std::size_t n = buf.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const Amplitude u = buf[j];
                const Amplitude v = buf[j + len];
                buf[j] = u + v;
                buf[j + len] = u - v;
            }
        }
    }
}

}  // namespace detail

/// Partitions branches by the values of all non-active registers. The state
/// is reordered so that each group is contiguous with active values
/// ascending; `members` index into that order.
inline std::vector<BranchGroup> groupBranches(SparseState &state, const std::vector<Register> &activeRegs) {
    std::vector<std::size_t> active;
    for (const Register &r : activeRegs) active.push_back(state.indexOf(r));
    const std::vector<std::size_t> idle = detail::idleRows(state, active);
    std::vector<BranchGroup> groups;
    for (auto [begin, end] : detail::sortIntoGroups(state, active)) {
        BranchGroup g;
        for (std::size_t r : idle) g.idleKey.push_back(state.column(r)[begin]);
        for (std::size_t i = begin; i < end; ++i) g.members.push_back(i);
        groups.push_back(std::move(g));
    }
    return groups;
}

/// Removes branches with |amplitude| <= tol.
inline void pruneZero(SparseState &state, double tol) { state.pruneZero(tol); }

enum class HadamardDomain {
    /// Every value in the register must already be below 2^m.
    Strict,
    /// Acts on the low m qubits; higher bits behave as an idle key.
    LowQubits,
};

/// m-qubit Hadamard H^{(x)m} on the low qubits of `reg`:
/// |x> -> 2^{-m/2} sum_y (-1)^{popcount(x & y)} |y>.
/// Groups with fewer than 2^m members are zero-padded before the transform.
inline void hadamardTransform(SparseState &state, Register reg, unsigned m,
                              HadamardDomain domain = HadamardDomain::Strict) {
    if (m > reg.width) throw Error(Errc::WidthMismatch, "Hadamard wider than register");
    if (m > kMaxGroupTransformQubits) throw Error(Errc::WidthOutOfRange, "group transform limited to 20 qubits");
    const std::size_t row = state.indexOf(reg);
    if (m == 0) return;
    const std::uint64_t lowBits = lowMask(m);
    if (domain == HadamardDomain::Strict) {
        for (std::uint64_t v : state.column(row)) {
            if (v > lowBits) throw Error(Errc::ValueOverflow, "register value >= 2^m under strict Hadamard");
        }
    }

    // Group key: every other register, then the bits of `reg` above m.
    const std::vector<std::size_t> idle = detail::idleRows(state, {row});
    std::vector<const std::uint64_t *> idleCols;
    for (std::size_t r : idle) idleCols.push_back(state.column(r).data());
    const std::uint64_t *active = state.column(row).data();
    std::vector<std::size_t> order(state.branchCount());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (const std::uint64_t *c : idleCols) {
            if (c[a] != c[b]) return c[a] < c[b];
        }
        return active[a] < active[b];
    });

    const std::size_t k = state.registerCount();
    const std::size_t dim = std::size_t{1} << m;
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(m));
    const double tol2 = state.pruneTolerance() * state.pruneTolerance();
    const auto &in = state.amplitudes();

    std::vector<std::vector<std::uint64_t>> cols(k);
    std::vector<Amplitude> amps;
    std::vector<Amplitude> buf(dim);
    std::size_t begin = 0;
    const std::size_t mCount = order.size();
    while (begin < mCount) {
        const std::size_t lead = order[begin];
        const std::uint64_t high = active[lead] & ~lowBits;
        std::size_t end = begin + 1;
        while (end < mCount) {
            const std::size_t o = order[end];
            bool same = (active[o] & ~lowBits) == high;
            for (std::size_t c = 0; same && c < idleCols.size(); ++c) same = idleCols[c][o] == idleCols[c][lead];
            if (!same) break;
            ++end;
        }
        std::fill(buf.begin(), buf.end(), Amplitude{});
        for (std::size_t i = begin; i < end; ++i) buf[active[order[i]] & lowBits] = in[order[i]];
        detail::walshHadamard(buf);
        for (std::size_t y = 0; y < dim; ++y) {
            const Amplitude a = buf[y] * scale;
            if (std::norm(a) <= tol2) continue;
            for (std::size_t r = 0; r < k; ++r) cols[r].push_back(r == row ? (high | y) : state.column(r)[lead]);
            amps.push_back(a);
        }
        begin = end;
    }
    // Emission order is canonical when `reg` is the trailing register.
    state.replaceBranches(std::move(cols), std::move(amps), row + 1 == k);
    state.recordOp();
}

/// Complex rotation coefficient `c` (|c| <= 1) for one group. The rule must
/// not read the flag register.
template <class Coefficient>
void conditionalRotation(SparseState &state, Register flag, Coefficient &&coefficient, bool adjoint = false) {
    if (flag.width != 1 || flag.type.kind != RegisterKind::Boolean) {
        throw Error(Errc::TypeMismatch, "rotation flag must be a one-qubit boolean register");
    }
    const std::size_t row = state.indexOf(flag);
    const auto ranges = detail::sortIntoGroups(state, {row});
    const std::size_t k = state.registerCount();
    const double tol2 = state.pruneTolerance() * state.pruneTolerance();

    std::vector<std::vector<std::uint64_t>> cols(k);
    std::vector<Amplitude> amps;
    cols.assign(k, {});
    amps.reserve(state.branchCount() * 2);
    const auto &in = state.amplitudes();
    const auto &flags = state.column(row);
    for (auto [begin, end] : ranges) {
        Amplitude x0{}, x1{};
        for (std::size_t i = begin; i < end; ++i) {
            if (flags[i] == 0) {
                x0 = in[i];
            } else if (flags[i] == 1) {
                x1 = in[i];
            } else {
                throw Error(Errc::ValueOverflow, "rotation flag holds a value above 1");
            }
        }
        const Amplitude c = coefficient(BranchView(state, begin));
        const double d = std::sqrt(std::max(0.0, 1.0 - std::norm(c)));
        // U = [[c, -d], [d, conj(c)]] acting on (|0>, |1>) of the flag.
        Amplitude y0, y1;
        if (!adjoint) {
            y0 = c * x0 - d * x1;
            y1 = d * x0 + std::conj(c) * x1;
        } else {
            y0 = std::conj(c) * x0 + d * x1;
            y1 = -d * x0 + c * x1;
        }
        for (std::uint64_t f = 0; f < 2; ++f) {
            const Amplitude a = f == 0 ? y0 : y1;
            if (std::norm(a) <= tol2) continue;
            for (std::size_t r = 0; r < k; ++r) cols[r].push_back(r == row ? f : state.column(r)[begin]);
            amps.push_back(a);
        }
    }
    const bool ordered = row + 1 == k;
    state.replaceBranches(std::move(cols), std::move(amps), ordered);
    state.recordOp();
}

/// Rotation keyed by a fixed-point register holding a in [0, 1]:
/// |0> -> sigma*sqrt(a)|0> + sqrt(1-a)|1>,
/// |1> -> sigma*sqrt(a)|1> - sqrt(1-a)|0>,
/// with sigma = signRule(branch) in {+1, -1}. Values above 1 saturate.
template <class SignRule>
void conditionalRotation(SparseState &state, Register flag, Register value, SignRule &&signRule,
                         bool adjoint = false) {
    if (value.type.kind != RegisterKind::FixedPoint) {
        throw Error(Errc::TypeMismatch, "rotation value register must be fixed-point");
    }
    if (value.id == flag.id) throw Error(Errc::AliasedRegister, "rotation value and flag are the same register");
    const std::size_t valueRow = state.indexOf(value);
    const double unit = std::ldexp(1.0, -static_cast<int>(value.type.fractionalBits));
    conditionalRotation(
        state, flag,
        [&](const BranchView &b) {
            const double a = std::min(1.0, static_cast<double>(state.column(valueRow)[b.index()]) * unit);
            const double sigma = signRule(b) < 0 ? -1.0 : 1.0;
            return Amplitude{sigma * std::sqrt(a), 0.0};
        },
        adjoint);
}

inline void conditionalRotation(SparseState &state, Register flag, Register value, bool adjoint = false) {
    conditionalRotation(state, flag, value, [](const BranchView &) { return 1; }, adjoint);
}

}  // namespace qwalk
