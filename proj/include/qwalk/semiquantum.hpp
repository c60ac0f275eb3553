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
 * Branch-parallel reversible operations. None of these create or destroy
 * branches: each branch is rewritten independently by a bijection on the
 * touched registers.
 *
 * Out-of-place functions use the XOR protocol |x>|z> -> |x>|z ^ f(x)>,
 * which is reversible for any classical f. In-place functions need an
 * explicit inverse so the overwritten operand can be uncomputed.
 *
 * Every operation accepts value-equality controls on whole registers; a
 * branch whose control registers do not hold the required values is left
 * unchanged.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "qwalk/detail/parallel.hpp"
#include "qwalk/error.hpp"
#include "qwalk/qram.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

/// Branch is active only if `reg` holds exactly `value`.
struct Control {
    Register reg;
    std::uint64_t value = 1;
};

using Controls = std::vector<Control>;

/// A declared bijection on the joint values of `touched`, gated by controls.
struct SemiQuantumSpec {
    std::vector<Register> touched;
    Controls controls;
};

namespace detail {

inline constexpr std::size_t kMaxOperands = 8;

class ResolvedControls {
   public:
    ResolvedControls(const SparseState &state, const Controls &controls) {
        if (controls.size() > kMaxOperands) throw Error(Errc::InvalidArgument, "too many controls");
        for (const Control &c : controls) {
            if (c.value > lowMask(c.reg.width)) throw Error(Errc::ValueOverflow, "control value exceeds width");
            cols_[count_] = state.column(c.reg).data();
            values_[count_] = c.value;
            ++count_;
        }
    }

    bool active(std::size_t branch) const {
        for (std::size_t k = 0; k < count_; ++k) {
            if (cols_[k][branch] != values_[k]) return false;
        }
        return true;
    }

   private:
    std::array<const std::uint64_t *, kMaxOperands> cols_{};
    std::array<std::uint64_t, kMaxOperands> values_{};
    std::size_t count_ = 0;
};

inline bool isInteger(const Register &r) {
    return r.type.kind == RegisterKind::UnsignedInt || r.type.kind == RegisterKind::SignedInt;
}

inline void requireInteger(const Register &r, const char *op) {
    if (!isInteger(r)) {
        throw Error(Errc::TypeMismatch, std::string(op) + " expects an integer register, got " +
                                            std::string(kindName(r.type.kind)));
    }
}

inline void requireBoolean(const Register &r, const char *op) {
    if (r.type.kind != RegisterKind::Boolean) {
        throw Error(Errc::TypeMismatch, std::string(op) + " writes a boolean register");
    }
}

inline void requireDistinct(const std::vector<Register> &regs) {
    for (std::size_t a = 0; a < regs.size(); ++a) {
        for (std::size_t b = a + 1; b < regs.size(); ++b) {
            if (regs[a].id == regs[b].id) throw Error(Errc::AliasedRegister, "register listed twice");
        }
    }
}

inline void requireNotControlled(const Register &r, const Controls &controls) {
    for (const Control &c : controls) {
        if (c.reg.id == r.id) throw Error(Errc::AliasedRegister, "operation writes one of its own controls");
    }
}

/// Two's-complement reading of a register value.
inline std::int64_t asSigned(std::uint64_t v, unsigned width) {
    if (width >= 64) return static_cast<std::int64_t>(v);
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    return static_cast<std::int64_t>((v ^ sign)) - static_cast<std::int64_t>(sign);
}

/// Multiplicative inverse of an odd number modulo 2^64 (Newton iteration).
inline std::uint64_t inverseOdd(std::uint64_t a) {
    std::uint64_t x = a;
    for (int i = 0; i < 6; ++i) x *= 2 - a * x;
    return x;
}

}  // namespace detail

/// Rewrites the touched registers of every active branch with `mapping`,
/// which receives their values (in `touched` order) and modifies them in
/// place. The whole update is validated before any branch is committed.
template <class Mapping>
void applySemiQuantum(SparseState &state, const SemiQuantumSpec &spec, Mapping &&mapping) {
    detail::requireDistinct(spec.touched);
    if (spec.touched.size() > detail::kMaxOperands) throw Error(Errc::InvalidArgument, "too many touched registers");
    for (const Register &r : spec.touched) detail::requireNotControlled(r, spec.controls);
    const detail::ResolvedControls ctl(state, spec.controls);
    const std::size_t t = spec.touched.size();
    std::vector<std::uint64_t *> cols(t);
    for (std::size_t k = 0; k < t; ++k) cols[k] = state.column(spec.touched[k]).data();

    const std::size_t m = state.branchCount();
    std::vector<std::uint64_t> next(m * t);
    for (std::size_t i = 0; i < m; ++i) {
        std::array<std::uint64_t, detail::kMaxOperands> v{};
        for (std::size_t k = 0; k < t; ++k) v[k] = cols[k][i];
        if (ctl.active(i)) {
            mapping(std::span<std::uint64_t>(v.data(), t));
            for (std::size_t k = 0; k < t; ++k) {
                if (v[k] > lowMask(spec.touched[k].width)) {
                    throw Error(Errc::ValueOverflow, "mapping result exceeds declared register width");
                }
            }
        }
        std::copy_n(v.begin(), t, next.begin() + static_cast<std::ptrdiff_t>(i * t));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < t; ++k) cols[k][i] = next[i * t + k];
    }
    state.markUnordered();
    state.recordOp();
}

/// output ^= f(inputs). Self-inverse for every f. The result of f must fit
/// the output width (arithmetic helpers mask before returning).
template <class F>
void xorOutOfPlace(SparseState &state, F &&f, const std::vector<Register> &inputs, Register output,
                   const Controls &controls = {}) {
    if (inputs.size() > detail::kMaxOperands) throw Error(Errc::InvalidArgument, "too many inputs");
    for (const Register &r : inputs) {
        if (r.id == output.id) throw Error(Errc::AliasedRegister, "output register is also an input");
    }
    detail::requireNotControlled(output, controls);
    const detail::ResolvedControls ctl(state, controls);
    std::array<const std::uint64_t *, detail::kMaxOperands> in{};
    for (std::size_t k = 0; k < inputs.size(); ++k) in[k] = state.column(inputs[k]).data();
    auto &out = state.column(output);
    const std::size_t m = state.branchCount();
    const std::size_t nIn = inputs.size();
    const std::uint64_t mask = lowMask(output.width);

    std::vector<std::uint64_t> delta(m, 0);
    detail::parallelFor(m, [&](std::size_t begin, std::size_t end) {
        std::array<std::uint64_t, detail::kMaxOperands> v{};
        for (std::size_t i = begin; i < end; ++i) {
            if (!ctl.active(i)) continue;
            for (std::size_t k = 0; k < nIn; ++k) v[k] = in[k][i];
            const std::uint64_t y = f(std::span<const std::uint64_t>(v.data(), nIn));
            if (y > mask) throw Error(Errc::ValueOverflow, "function value exceeds output width");
            delta[i] = y;
        }
    });
    for (std::size_t i = 0; i < m; ++i) out[i] ^= delta[i];
    state.markUnordered();
    state.recordOp();
}

/// target <- f(target, params) in place. Realized as U_f followed by the
/// uncomputation U_{f^-1}; a branch where fInv(f(t)) != t would leave
/// garbage behind, which is reported as NonInjective and nothing changes.
template <class F, class FInv>
void inPlaceViaInversePair(SparseState &state, F &&f, FInv &&fInv, Register target,
                           const std::vector<Register> &params, const Controls &controls = {}) {
    if (params.size() > detail::kMaxOperands) throw Error(Errc::InvalidArgument, "too many parameters");
    for (const Register &r : params) {
        if (r.id == target.id) throw Error(Errc::AliasedRegister, "target register is also a parameter");
    }
    detail::requireNotControlled(target, controls);
    const detail::ResolvedControls ctl(state, controls);
    std::array<const std::uint64_t *, detail::kMaxOperands> in{};
    for (std::size_t k = 0; k < params.size(); ++k) in[k] = state.column(params[k]).data();
    auto &tgt = state.column(target);
    const std::size_t m = state.branchCount();
    const std::size_t nIn = params.size();
    const std::uint64_t mask = lowMask(target.width);

    std::vector<std::uint64_t> next(tgt);
    std::array<std::uint64_t, detail::kMaxOperands> v{};
    for (std::size_t i = 0; i < m; ++i) {
        if (!ctl.active(i)) continue;
        for (std::size_t k = 0; k < nIn; ++k) v[k] = in[k][i];
        const std::span<const std::uint64_t> p(v.data(), nIn);
        const std::uint64_t y = f(tgt[i], p);
        if (y > mask) throw Error(Errc::ValueOverflow, "in-place result exceeds target width");
        if (fInv(y, p) != tgt[i]) {
            throw Error(Errc::NonInjective, "inverse does not recover the overwritten operand");
        }
        next[i] = y;
    }
    tgt.swap(next);
    state.markUnordered();
    state.recordOp();
}

/// data ^= image[addr]. Words are masked to the data register width.
inline void qramQuery(SparseState &state, const QramImage &image, Register addr, Register data,
                      const Controls &controls = {}) {
    if (addr.width > image.addressWidth()) throw Error(Errc::WidthMismatch, "address register wider than QRAM");
    if (data.width > image.wordWidth()) throw Error(Errc::WidthMismatch, "data register wider than QRAM words");
    if (addr.id == data.id) throw Error(Errc::AliasedRegister, "address and data are the same register");
    detail::requireInteger(addr, "qramQuery");
    detail::requireNotControlled(data, controls);
    const detail::ResolvedControls ctl(state, controls);
    const auto &a = state.column(addr);
    auto &d = state.column(data);
    const std::uint64_t mask = lowMask(data.width);
    detail::parallelFor(state.branchCount(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (ctl.active(i)) d[i] ^= image.read(a[i]) & mask;
        }
    });
    state.markUnordered();
    state.recordQramQuery();
    state.recordOp();
}

inline void swapRegisters(SparseState &state, Register r1, Register r2, const Controls &controls = {}) {
    if (r1.id == r2.id) throw Error(Errc::AliasedRegister, "swap of a register with itself");
    if (r1.width != r2.width) throw Error(Errc::WidthMismatch, "swap needs equal widths");
    if (!(r1.type == r2.type)) throw Error(Errc::TypeMismatch, "swap needs equal type tags");
    detail::requireNotControlled(r1, controls);
    detail::requireNotControlled(r2, controls);
    auto &a = state.column(r1);
    auto &b = state.column(r2);
    if (controls.empty()) {
        a.swap(b);
    } else {
        const detail::ResolvedControls ctl(state, controls);
        for (std::size_t i = 0; i < state.branchCount(); ++i) {
            if (ctl.active(i)) std::swap(a[i], b[i]);
        }
    }
    state.markUnordered();
    state.recordOp();
}

/// Multiplies a branch's amplitude by -1 when any listed register is nonzero.
inline void phaseFlipIfAnyNonzero(SparseState &state, const std::vector<Register> &regs) {
    std::vector<const std::uint64_t *> cols;
    for (const Register &r : regs) cols.push_back(state.column(r).data());
    auto &amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        for (const std::uint64_t *c : cols) {
            if (c[i] != 0) {
                amps[i] = -amps[i];
                break;
            }
        }
    }
    state.recordOp();
}

// ----------------------------------------------------------------------
// Arithmetic catalog. Integer results wrap modulo 2^width.

/// reg ^= constant (a row of X gates on the set bits).
inline void xorConstant(SparseState &state, Register reg, std::uint64_t constant, const Controls &controls = {}) {
    if (constant > lowMask(reg.width)) throw Error(Errc::ValueOverflow, "constant exceeds register width");
    xorOutOfPlace(state, [constant](std::span<const std::uint64_t>) { return constant; }, {}, reg, controls);
}

/// dst ^= src (register copy onto a zero register).
inline void xorInto(SparseState &state, Register src, Register dst, const Controls &controls = {}) {
    if (src.width > dst.width) throw Error(Errc::WidthMismatch, "copy into a narrower register");
    xorOutOfPlace(state, [](std::span<const std::uint64_t> v) { return v[0]; }, {src}, dst, controls);
}

/// out ^= (a + b) mod 2^width(out).
inline void add(SparseState &state, Register a, Register b, Register out, const Controls &controls = {}) {
    detail::requireInteger(a, "add");
    detail::requireInteger(b, "add");
    detail::requireInteger(out, "add");
    const std::uint64_t mask = lowMask(out.width);
    xorOutOfPlace(state, [mask](std::span<const std::uint64_t> v) { return (v[0] + v[1]) & mask; }, {a, b}, out,
                  controls);
}

/// out ^= (a + constant) mod 2^width(out).
inline void addConstant(SparseState &state, Register a, std::uint64_t constant, Register out,
                        const Controls &controls = {}) {
    detail::requireInteger(a, "addConstant");
    detail::requireInteger(out, "addConstant");
    const std::uint64_t mask = lowMask(out.width);
    xorOutOfPlace(state, [mask, constant](std::span<const std::uint64_t> v) { return (v[0] + constant) & mask; },
                  {a}, out, controls);
}

/// target <- target + addend (mod 2^width).
inline void addInPlace(SparseState &state, Register target, Register addend, const Controls &controls = {}) {
    detail::requireInteger(target, "addInPlace");
    detail::requireInteger(addend, "addInPlace");
    const std::uint64_t mask = lowMask(target.width);
    inPlaceViaInversePair(
        state, [mask](std::uint64_t t, std::span<const std::uint64_t> p) { return (t + p[0]) & mask; },
        [mask](std::uint64_t y, std::span<const std::uint64_t> p) { return (y - p[0]) & mask; }, target, {addend},
        controls);
}

/// target <- target + constant (mod 2^width).
inline void addConstantInPlace(SparseState &state, Register target, std::uint64_t constant,
                               const Controls &controls = {}) {
    detail::requireInteger(target, "addConstantInPlace");
    const std::uint64_t mask = lowMask(target.width);
    inPlaceViaInversePair(
        state, [mask, constant](std::uint64_t t, std::span<const std::uint64_t>) { return (t + constant) & mask; },
        [mask, constant](std::uint64_t y, std::span<const std::uint64_t>) { return (y - constant) & mask; }, target,
        {}, controls);
}

/// out ^= (a * b) mod 2^width(out).
inline void mul(SparseState &state, Register a, Register b, Register out, const Controls &controls = {}) {
    detail::requireInteger(a, "mul");
    detail::requireInteger(b, "mul");
    detail::requireInteger(out, "mul");
    const std::uint64_t mask = lowMask(out.width);
    xorOutOfPlace(state, [mask](std::span<const std::uint64_t> v) { return (v[0] * v[1]) & mask; }, {a, b}, out,
                  controls);
}

/// target <- target * factor (mod 2^width); factor must be odd.
inline void mulConstantInPlace(SparseState &state, Register target, std::uint64_t factor,
                               const Controls &controls = {}) {
    detail::requireInteger(target, "mulConstantInPlace");
    if ((factor & 1) == 0) throw Error(Errc::NonInjective, "even factor is not invertible modulo 2^width");
    const std::uint64_t mask = lowMask(target.width);
    const std::uint64_t inv = detail::inverseOdd(factor);
    inPlaceViaInversePair(
        state, [mask, factor](std::uint64_t t, std::span<const std::uint64_t>) { return (t * factor) & mask; },
        [mask, inv](std::uint64_t y, std::span<const std::uint64_t>) { return (y * inv) & mask; }, target, {},
        controls);
}

/// out ^= (a < b). Signed comparison when both operands are signed.
inline void compareLess(SparseState &state, Register a, Register b, Register out, const Controls &controls = {}) {
    detail::requireInteger(a, "compareLess");
    detail::requireInteger(b, "compareLess");
    detail::requireBoolean(out, "compareLess");
    const bool isSigned = a.type.kind == RegisterKind::SignedInt && b.type.kind == RegisterKind::SignedInt;
    const unsigned wa = a.width;
    const unsigned wb = b.width;
    xorOutOfPlace(
        state,
        [=](std::span<const std::uint64_t> v) -> std::uint64_t {
            if (isSigned) return detail::asSigned(v[0], wa) < detail::asSigned(v[1], wb) ? 1 : 0;
            return v[0] < v[1] ? 1 : 0;
        },
        {a, b}, out, controls);
}

/// out ^= (a == b).
inline void compareEqual(SparseState &state, Register a, Register b, Register out, const Controls &controls = {}) {
    detail::requireInteger(a, "compareEqual");
    detail::requireInteger(b, "compareEqual");
    detail::requireBoolean(out, "compareEqual");
    xorOutOfPlace(state, [](std::span<const std::uint64_t> v) -> std::uint64_t { return v[0] == v[1] ? 1 : 0; },
                  {a, b}, out, controls);
}

}  // namespace qwalk
