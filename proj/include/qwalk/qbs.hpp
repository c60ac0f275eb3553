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
 * Quantum binary search over a sorted window of QRAM words.
 *
 * The search is a fixed-length quantum loop. Every iteration pushes its
 * temporaries to the garbage stack, and a reverse pass pops and
 * uncomputes them, leaving only the output register changed. Branches
 * that found their target early clear `flag` and ride along as no-ops.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <utility>

#include "qwalk/error.hpp"
#include "qwalk/qram.hpp"
#include "qwalk/semiquantum.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

#ifdef NDEBUG
inline constexpr bool kDebugChecks = false;
#else
inline constexpr bool kDebugChecks = true;
#endif

struct QbsContext {
    Register offset;  ///< address of the first window word
    Register target;  ///< value to look for
    Register output;  ///< receives output ^= position
    std::uint64_t sparsity = 1;
    /// Write the absolute address of the hit instead of its window position.
    bool absoluteIndex = false;
    /// Reject windows that are not strictly increasing.
    bool checkSorted = kDebugChecks;
};

/// Iterations needed to reach every element of an s-word window.
inline unsigned qbsLoopCount(std::uint64_t s) { return static_cast<unsigned>(std::bit_width(s)); }

struct SearchResult {
    std::uint64_t position = 0;
    bool found = false;
    unsigned probes = 0;

    friend bool operator==(const SearchResult &, const SearchResult &) = default;
};

/// Fixed-iteration binary search on a half-open window with floor midpoint.
/// Runs ceil(log2 s) + 1 probes whatever the outcome.
inline SearchResult classicalBinarySearch(std::span<const std::uint64_t> list, std::uint64_t target) {
    SearchResult r;
    if (list.empty()) return r;
    const std::uint64_t s = list.size();
    const unsigned loops = static_cast<unsigned>(std::bit_width(s - 1)) + 1;
    std::uint64_t left = 0;
    std::uint64_t right = s;
    bool searching = true;
    for (unsigned i = 0; i < loops; ++i) {
        const std::uint64_t mid = (left + right) / 2;
        ++r.probes;
        if (!searching) continue;
        if (list[mid] == target) {
            r.position = mid;
            r.found = true;
            searching = false;
        } else if (list[mid] < target) {
            left = mid;
        } else {
            right = mid;
        }
    }
    return r;
}

namespace detail {

inline void checkWindows(const SparseState &state, const QramImage &image, const QbsContext &ctx,
                         std::uint64_t mask) {
    for (std::uint64_t base : state.column(ctx.offset)) {
        if (base + ctx.sparsity > image.size()) continue;
        for (std::uint64_t l = 1; l < ctx.sparsity; ++l) {
            if ((image.read(base + l - 1) & mask) >= (image.read(base + l) & mask)) {
                throw Error(Errc::UnsortedWindow, "QRAM window at " + std::to_string(base) + " is not increasing");
            }
        }
    }
}

struct QbsAncillae {
    Register left, right, mid, midVal, flag, less, equal;
};

}  // namespace detail

/// output ^= i(target), the position of target in image[offset, offset+s),
/// or 0 when it is absent. All ancillae are returned to 0 and freed.
inline void qbs(SparseState &state, const QramImage &image, const QbsContext &ctx) {
    const std::uint64_t s = ctx.sparsity;
    if (s == 0 || !std::has_single_bit(s)) throw Error(Errc::InvalidArgument, "sparsity must be a power of two");
    detail::requireInteger(ctx.offset, "qbs");
    detail::requireInteger(ctx.target, "qbs");
    detail::requireInteger(ctx.output, "qbs");
    detail::requireDistinct({ctx.offset, ctx.target, ctx.output});
    if (ctx.offset.width > image.addressWidth()) throw Error(Errc::WidthMismatch, "offset wider than QRAM address");

    const unsigned aw = image.addressWidth();
    for (std::uint64_t base : state.column(ctx.offset)) {
        if (base + s > lowMask(aw)) throw Error(Errc::ValueOverflow, "window end exceeds the QRAM address width");
    }
    const std::uint64_t valueMask = lowMask(ctx.target.width);
    if (ctx.checkSorted) detail::checkWindows(state, image, ctx, valueMask);

    const RegisterType uint = RegisterType::unsignedInt();
    const RegisterType flagType = RegisterType::boolean();
    const detail::QbsAncillae a{
        state.alloc(aw, uint, "qbs.left"),
        state.alloc(aw, uint, "qbs.right"),
        state.alloc(aw, uint, "qbs.mid"),
        state.alloc(ctx.target.width, uint, "qbs.midVal"),
        state.alloc(1, flagType, "qbs.flag"),
        state.alloc(1, flagType, "qbs.less"),
        state.alloc(1, flagType, "qbs.equal"),
    };
    const Controls onFlag{{a.flag, 1}};
    const Controls onFlagLess{{a.flag, 1}, {a.less, 1}};
    const std::uint64_t addrMask = lowMask(aw);

    auto midpoint = [&] {
        xorOutOfPlace(
            state, [](std::span<const std::uint64_t> v) { return (v[0] + v[1]) >> 1; }, {a.left, a.right}, a.mid,
            onFlag);
    };
    // Steps shared by the forward and reverse passes; each is self-inverse.
    auto probe = [&] {
        qramQuery(state, image, a.mid, a.midVal, onFlag);
    };
    auto compare = [&] {
        compareLess(state, a.midVal, ctx.target, a.less, onFlag);
        compareEqual(state, a.midVal, ctx.target, a.equal, onFlag);
    };
    auto narrow = [&](bool reverse) {
        auto towardLeft = [&] { swapRegisters(state, a.mid, a.left, onFlagLess); };
        auto flipLess = [&] { xorConstant(state, a.less, 1, onFlag); };
        auto towardRight = [&] { swapRegisters(state, a.mid, a.right, onFlagLess); };
        if (!reverse) {
            towardLeft();
            flipLess();
            towardRight();
        } else {
            towardRight();
            flipLess();
            towardLeft();
        }
    };
    auto stopOnHit = [&] { xorConstant(state, a.flag, 1, {{a.equal, 1}}); };

    xorInto(state, ctx.offset, a.left);
    addConstant(state, a.left, s, a.right);
    xorConstant(state, a.flag, 1);

    const unsigned loops = qbsLoopCount(s);
    const bool absolute = ctx.absoluteIndex;
    const std::uint64_t outMask = lowMask(ctx.output.width);
    for (unsigned i = 0; i < loops; ++i) {
        midpoint();
        probe();
        compare();
        xorOutOfPlace(
            state,
            [absolute, outMask, addrMask](std::span<const std::uint64_t> v) -> std::uint64_t {
                const std::uint64_t pos = absolute ? v[0] : ((v[0] - v[1]) & addrMask);
                if (pos > outMask) throw Error(Errc::ValueOverflow, "search position exceeds output width");
                return pos;
            },
            {a.mid, ctx.offset}, ctx.output, {{a.equal, 1}});
        stopOnHit();
        narrow(false);
        state.push(a.mid);
        state.push(a.midVal);
        state.push(a.less);
        state.push(a.equal);
    }
    for (unsigned i = 0; i < loops; ++i) {
        state.pop(a.equal);
        state.pop(a.less);
        state.pop(a.midVal);
        state.pop(a.mid);
        narrow(true);
        stopOnHit();
        compare();
        probe();
        midpoint();
    }

    xorConstant(state, a.flag, 1);
    addConstant(state, a.left, s, a.right);
    xorInto(state, ctx.offset, a.left);
    for (Register r : {a.equal, a.less, a.flag, a.midVal, a.mid, a.right, a.left}) state.free(r);
}

}  // namespace qwalk
