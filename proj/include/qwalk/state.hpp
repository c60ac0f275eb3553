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
 * Register-level sparse representation of a multi-register quantum state.
 *
 * A state is a K x M table: K registers (rows of the state array), M
 * branches (columns), plus one complex amplitude per branch. Only branches
 * with non-negligible amplitude are stored, so the cost of every operation
 * scales with M rather than with the Hilbert-space dimension.
 *
 * Storage is register-major: each register owns one contiguous vector of
 * 64-bit words indexed by branch. Allocating a register appends a zeroed
 * row, freeing removes it, and pushing to the garbage stack is a row swap.
 */

#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

using Amplitude = std::complex<double>;

inline constexpr double kDefaultPruneTolerance = 1e-12;
inline constexpr unsigned kMaxRegisterWidth = 64;

constexpr std::uint64_t lowMask(unsigned bits) {
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

enum class RegisterKind : std::uint8_t { UnsignedInt, SignedInt, FixedPoint, Boolean };

constexpr std::string_view kindName(RegisterKind k) {
    switch (k) {
        case RegisterKind::UnsignedInt: return "uint";
        case RegisterKind::SignedInt: return "int";
        case RegisterKind::FixedPoint: return "fixed";
        case RegisterKind::Boolean: return "bool";
    }
    return "?";
}

/// Semantic tag checked when an operation is applied.
struct RegisterType {
    RegisterKind kind = RegisterKind::UnsignedInt;
    unsigned fractionalBits = 0;

    static constexpr RegisterType unsignedInt() { return {RegisterKind::UnsignedInt, 0}; }
    static constexpr RegisterType signedInt() { return {RegisterKind::SignedInt, 0}; }
    static constexpr RegisterType fixedPoint(unsigned fractional) { return {RegisterKind::FixedPoint, fractional}; }
    static constexpr RegisterType boolean() { return {RegisterKind::Boolean, 0}; }

    friend constexpr bool operator==(const RegisterType &, const RegisterType &) = default;
};

/// Handle to an allocated register. Cheap to copy; identity is the id.
struct Register {
    std::uint32_t id = 0;
    unsigned width = 0;
    RegisterType type;

    friend constexpr bool operator==(const Register &, const Register &) = default;
};

struct RegisterMeta {
    Register handle;
    std::string name;
    bool stackSlot = false;
};

/// Peak usage over a run. Maxima never shrink when registers are freed.
struct ResourceStats {
    std::size_t maxWorkingRegisters = 0;
    std::size_t maxWorkingQubits = 0;
    std::size_t maxBranches = 0;
    std::size_t opCount = 0;
    std::size_t qramQueries = 0;
};

class SparseState;

/// Read-only access to the register values of one branch.
class BranchView {
   public:
    BranchView(const SparseState &state, std::size_t branch) : state_(&state), branch_(branch) {}

    std::uint64_t operator[](Register r) const;
    std::size_t index() const { return branch_; }

   private:
    const SparseState *state_;
    std::size_t branch_;
};

class SparseState {
   public:
    /// One branch with amplitude 1 and no registers.
    SparseState() : amps_{Amplitude{1.0, 0.0}} {}

    /// Same register layout as `other`, but no branches. Used for
    /// accumulators that are later filled by `addScaled`.
    static SparseState emptyLike(const SparseState &other) {
        SparseState s;
        s.regs_ = other.regs_;
        s.stack_ = other.stack_;
        s.nextId_ = other.nextId_;
        s.cols_.assign(other.cols_.size(), {});
        s.amps_.clear();
        s.pruneTol_ = other.pruneTol_;
        return s;
    }

    // ------------------------------------------------------------------
    // Registers

    Register alloc(unsigned width, RegisterType type = RegisterType::unsignedInt(), std::string name = {}) {
        if (width < 1 || width > kMaxRegisterWidth) {
            throw Error(Errc::WidthOutOfRange, "register width " + std::to_string(width) + " not in [1, 64]");
        }
        if (type.kind == RegisterKind::Boolean && width != 1) {
            throw Error(Errc::TypeMismatch, "boolean registers are one qubit wide");
        }
        Register r{nextId_++, width, type};
        if (name.empty()) name = "r" + std::to_string(r.id);
        regs_.push_back({r, std::move(name), false});
        cols_.emplace_back(amps_.size(), std::uint64_t{0});
        updateRegisterStats();
        return r;
    }

    /// Removes a register that reads 0 in every branch.
    void free(Register r) {
        const std::size_t idx = indexOf(r);
        if (regs_[idx].stackSlot) throw Error(Errc::InvalidArgument, "stack slots are released by pop");
        const auto &col = cols_[idx];
        if (std::any_of(col.begin(), col.end(), [](std::uint64_t v) { return v != 0; })) {
            throw Error(Errc::NonZeroAncilla, "register '" + regs_[idx].name + "' is not zero in every branch");
        }
        eraseRow(idx);
    }

    /// Moves the register's value onto the garbage stack; it reads 0 after.
    void push(Register r) {
        const std::size_t idx = indexOf(r);
        Register slot = alloc(r.width, r.type, regs_[idx].name + "@" + std::to_string(stack_.size()));
        const std::size_t slotIdx = cols_.size() - 1;
        regs_[slotIdx].stackSlot = true;
        std::swap(cols_[idx], cols_[slotIdx]);
        stack_.push_back({slot.id, r.id});
        ordered_ = false;
    }

    /// Restores the most recent push, which must have come from `r`.
    void pop(Register r) {
        if (stack_.empty()) throw Error(Errc::EmptyStack, "pop on empty garbage stack");
        const std::size_t idx = indexOf(r);
        const StackEntry top = stack_.back();
        if (top.source != r.id) {
            throw Error(Errc::StackOrder, "top of garbage stack was not pushed from '" + regs_[idx].name + "'");
        }
        const std::size_t slotIdx = indexOfId(top.slot);
        if (regs_[slotIdx].handle.width != r.width) {
            throw Error(Errc::WidthMismatch, "stack slot width differs from target");
        }
        const auto &col = cols_[idx];
        if (std::any_of(col.begin(), col.end(), [](std::uint64_t v) { return v != 0; })) {
            throw Error(Errc::NonZeroTarget, "pop target '" + regs_[idx].name + "' is not zero");
        }
        std::swap(cols_[idx], cols_[slotIdx]);
        eraseRow(slotIdx);
        stack_.pop_back();
        ordered_ = false;
    }

    std::size_t stackDepth() const { return stack_.size(); }

    std::size_t registerCount() const { return regs_.size(); }
    std::size_t branchCount() const { return amps_.size(); }
    const std::vector<RegisterMeta> &registers() const { return regs_; }

    bool contains(Register r) const {
        return std::any_of(regs_.begin(), regs_.end(), [&](const RegisterMeta &m) { return m.handle.id == r.id; });
    }

    /// Row index of a live register. A handle whose width or type tag no
    /// longer matches the recorded metadata is a type error.
    std::size_t indexOf(Register r) const {
        const std::size_t idx = indexOfId(r.id);
        const Register &h = regs_[idx].handle;
        if (h.width != r.width || !(h.type == r.type)) {
            throw Error(Errc::TypeMismatch, "handle for '" + regs_[idx].name + "' does not match register metadata");
        }
        return idx;
    }

    std::vector<std::uint64_t> &column(std::size_t idx) { return cols_[idx]; }
    const std::vector<std::uint64_t> &column(std::size_t idx) const { return cols_[idx]; }
    std::vector<std::uint64_t> &column(Register r) { return cols_[indexOf(r)]; }
    const std::vector<std::uint64_t> &column(Register r) const { return cols_[indexOf(r)]; }

    std::vector<Amplitude> &amplitudes() { return amps_; }
    const std::vector<Amplitude> &amplitudes() const { return amps_; }

    std::uint64_t value(Register r, std::size_t branch) const { return cols_[indexOf(r)][branch]; }

    // ------------------------------------------------------------------
    // Queries

    double norm() const {
        double total = 0.0;
        for (const auto &a : amps_) total += std::norm(a);
        return total;
    }

    const ResourceStats &resources() const { return stats_; }

    /// Bookkeeping hook called once per applied operation.
    void recordOp() {
        ++stats_.opCount;
        stats_.maxBranches = std::max(stats_.maxBranches, amps_.size());
    }
    void recordQramQuery() { ++stats_.qramQueries; }

    double pruneTolerance() const { return pruneTol_; }
    void setPruneTolerance(double tol) { pruneTol_ = tol; }

    // ------------------------------------------------------------------
    // Building states directly

    void clearBranches() {
        for (auto &c : cols_) c.clear();
        amps_.clear();
        ordered_ = true;
    }

    /// `values` lists one word per register, in register order.
    void appendBranch(std::span<const std::uint64_t> values, Amplitude amplitude) {
        if (values.size() != regs_.size()) {
            throw Error(Errc::InvalidArgument, "branch has " + std::to_string(values.size()) + " values for " +
                                                   std::to_string(regs_.size()) + " registers");
        }
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] > lowMask(regs_[k].handle.width)) {
                throw Error(Errc::ValueOverflow, "value does not fit register '" + regs_[k].name + "'");
            }
            cols_[k].push_back(values[k]);
        }
        amps_.push_back(amplitude);
        ordered_ = false;
    }

    /// Canonicalizes and rejects duplicate branches.
    void finalize() {
        canonicalize();
        if (hasAdjacentDuplicates()) throw Error(Errc::DuplicateBranch, "two branches share all register values");
        recordOp();
    }

    // ------------------------------------------------------------------
    // Ordering

    bool canonical() const { return ordered_; }
    void markUnordered() { ordered_ = false; }
    /// For callers that produced branches in canonical order themselves.
    void markCanonical() { ordered_ = true; }

    /// Sorts branches lexicographically by register values in register order.
    void canonicalize() {
        if (ordered_) return;
        std::vector<std::size_t> all(cols_.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        permute(sortedOrder(all));
        ordered_ = true;
    }

    /// True if some two branches agree on every register. Canonicalizes.
    bool hasDuplicateBranches() {
        canonicalize();
        return hasAdjacentDuplicates();
    }

    /// Branch order sorted lexicographically by the given rows; ties keep
    /// their current relative order.
    std::vector<std::size_t> sortedOrder(std::span<const std::size_t> keyRows) const {
        std::vector<const std::uint64_t *> keys;
        keys.reserve(keyRows.size());
        for (std::size_t r : keyRows) keys.push_back(cols_[r].data());
        std::vector<std::size_t> order(amps_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            for (const std::uint64_t *k : keys) {
                if (k[a] != k[b]) return k[a] < k[b];
            }
            return a < b;
        });
        return order;
    }

    /// Reorders branches so that new branch i is old branch order[i].
    void permute(std::span<const std::size_t> order) {
        std::vector<std::uint64_t> scratch(order.size());
        for (auto &col : cols_) {
            for (std::size_t i = 0; i < order.size(); ++i) scratch[i] = col[order[i]];
            col.swap(scratch);
        }
        std::vector<Amplitude> amps(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) amps[i] = amps_[order[i]];
        amps_.swap(amps);
        ordered_ = false;
    }

    /// Installs a new branch table with the current register layout.
    void replaceBranches(std::vector<std::vector<std::uint64_t>> &&cols, std::vector<Amplitude> &&amps,
                         bool canonicalOrder) {
        if (cols.size() != cols_.size()) throw Error(Errc::LayoutMismatch, "row count differs from register count");
        for (const auto &c : cols) {
            if (c.size() != amps.size()) throw Error(Errc::LayoutMismatch, "ragged branch table");
        }
        cols_ = std::move(cols);
        amps_ = std::move(amps);
        ordered_ = canonicalOrder;
    }

    /// Drops branches with |amplitude| <= tol. Order is preserved.
    void pruneZero(double tol) {
        const double tol2 = tol * tol;
        std::size_t out = 0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (std::norm(amps_[i]) <= tol2) continue;
            if (out != i) {
                for (auto &c : cols_) c[out] = c[i];
                amps_[out] = amps_[i];
            }
            ++out;
        }
        for (auto &c : cols_) c.resize(out);
        amps_.resize(out);
        recordOp();
    }

    /// Identical register ids, widths and types in the same order.
    bool sameLayout(const SparseState &other) const {
        if (regs_.size() != other.regs_.size()) return false;
        for (std::size_t k = 0; k < regs_.size(); ++k) {
            if (!(regs_[k].handle == other.regs_[k].handle)) return false;
        }
        return true;
    }

    /// One line per branch in canonical order:
    /// "name=<hex> name=<hex> ... amp=<re>,<im>".
    std::string dump() const {
        SparseState copy = *this;
        copy.canonicalize();
        std::string out;
        char buf[64];
        for (std::size_t i = 0; i < copy.amps_.size(); ++i) {
            for (std::size_t k = 0; k < copy.regs_.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(copy.cols_[k][i]));
                out += copy.regs_[k].name;
                out += '=';
                out += buf;
                out += ' ';
            }
            const double re = copy.amps_[i].real() == 0.0 ? 0.0 : copy.amps_[i].real();
            const double im = copy.amps_[i].imag() == 0.0 ? 0.0 : copy.amps_[i].imag();
            std::snprintf(buf, sizeof buf, "amp=%.12g,%.12g\n", re, im);
            out += buf;
        }
        return out;
    }

   private:
    struct StackEntry {
        std::uint32_t slot;
        std::uint32_t source;
    };

    std::size_t indexOfId(std::uint32_t id) const {
        for (std::size_t k = 0; k < regs_.size(); ++k) {
            if (regs_[k].handle.id == id) return k;
        }
        throw Error(Errc::UnknownRegister, "register id " + std::to_string(id) + " is not allocated");
    }

    void eraseRow(std::size_t idx) {
        regs_.erase(regs_.begin() + static_cast<std::ptrdiff_t>(idx));
        cols_.erase(cols_.begin() + static_cast<std::ptrdiff_t>(idx));
    }

    void updateRegisterStats() {
        std::size_t qubits = 0;
        for (const auto &m : regs_) qubits += m.handle.width;
        stats_.maxWorkingRegisters = std::max(stats_.maxWorkingRegisters, regs_.size());
        stats_.maxWorkingQubits = std::max(stats_.maxWorkingQubits, qubits);
    }

    bool hasAdjacentDuplicates() const {
        for (std::size_t i = 1; i < amps_.size(); ++i) {
            bool same = true;
            for (const auto &c : cols_) {
                if (c[i] != c[i - 1]) {
                    same = false;
                    break;
                }
            }
            if (same) return true;
        }
        return false;
    }

    std::vector<RegisterMeta> regs_;
    std::vector<std::vector<std::uint64_t>> cols_;
    std::vector<Amplitude> amps_;
    std::vector<StackEntry> stack_;
    ResourceStats stats_;
    std::uint32_t nextId_ = 1;
    bool ordered_ = true;
    double pruneTol_ = kDefaultPruneTolerance;
};

inline std::uint64_t BranchView::operator[](Register r) const { return state_->value(r, branch_); }

}  // namespace qwalk
