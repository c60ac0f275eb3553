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
 * Chebyshev-series linear solver driven by the quantum walk.
 *
 * Starting from tau_0 = T~^dag W T~ |b~>, every step applies
 * T~^dag W^2 T~ so that the flag-zero part of tau_j is T_{2j+1}(A/s) b.
 * The weighted sum sum_k a_k tau_k is kept as one merged sparse state.
 */

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qwalk/chebyshev.hpp"
#include "qwalk/error.hpp"
#include "qwalk/matrixgen.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/state.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

inline constexpr double kConvergenceDelta = 1e-9;
inline constexpr std::size_t kConvergenceWindow = 10;

/// acc <- acc + a * tau, merging branches with identical register values
/// and dropping those that cancel. Both states must share one layout.
inline void accumulate(SparseState &acc, const SparseState &tau, double a) {
    if (!acc.sameLayout(tau)) throw Error(Errc::LayoutMismatch, "accumulator and tau have different registers");
    SparseState t = tau;
    t.canonicalize();
    acc.canonicalize();
    const std::size_t k = acc.registerCount();
    const std::size_t ma = acc.branchCount();
    const std::size_t mt = t.branchCount();
    std::vector<const std::uint64_t *> ca(k), ct(k);
    for (std::size_t r = 0; r < k; ++r) {
        ca[r] = acc.column(r).data();
        ct[r] = t.column(r).data();
    }
    auto compare = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < k; ++r) {
            if (ca[r][i] != ct[r][j]) return ca[r][i] < ct[r][j] ? -1 : 1;
        }
        return 0;
    };
    std::vector<std::vector<std::uint64_t>> cols(k);
    std::vector<Amplitude> amps;
    amps.reserve(ma + mt);
    const double tol2 = acc.pruneTolerance() * acc.pruneTolerance();
    auto emit = [&](const std::vector<const std::uint64_t *> &src, std::size_t i, Amplitude amp) {
        if (std::norm(amp) <= tol2) return;
        for (std::size_t r = 0; r < k; ++r) cols[r].push_back(src[r][i]);
        amps.push_back(amp);
    };
    const auto &aa = acc.amplitudes();
    const auto &at = t.amplitudes();
    std::size_t i = 0, j = 0;
    while (i < ma || j < mt) {
        const int c = i == ma ? 1 : j == mt ? -1 : compare(i, j);
        if (c < 0) {
            emit(ca, i, aa[i]);
            ++i;
        } else if (c > 0) {
            emit(ct, j, a * at[j]);
            ++j;
        } else {
            emit(ca, i, aa[i] + a * at[j]);
            ++i;
            ++j;
        }
    }
    acc.replaceBranches(std::move(cols), std::move(amps), true);
    acc.recordOp();
}

/// Flag-zero mass over total mass.
inline double successRate(const SparseState &acc, const WalkContext &ctx) {
    const double total = acc.norm();
    if (total <= 0.0) throw Error(Errc::ZeroNorm, "accumulated state has zero norm");
    return flagZeroMass(acc, ctx) / total;
}

/// |<x|psi>|^2 with psi the renormalized flag-zero part and x unit norm.
inline double fidelity(const SparseState &acc, const WalkContext &ctx, const Vector &x) {
    const std::vector<Amplitude> psi = flagZeroProjection(acc, ctx);
    if (x.size() != psi.size()) throw Error(Errc::InvalidArgument, "target length must equal N");
    double mass = 0.0;
    Amplitude overlap{};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        mass += std::norm(psi[i]);
        overlap += x[i] * psi[i];
    }
    if (mass <= 0.0) throw Error(Errc::ZeroNorm, "flag-zero part is empty");
    return std::norm(overlap) / mass;
}

struct StepRecord {
    std::size_t j = 0;
    double p = 0.0;
    double f = 0.0;
    double pTheory = NAN;
    double fTheory = NAN;
    std::size_t branches = 0;
    double millis = 0.0;
};

struct SolverOptions {
    /// Number of tau steps to run at most; 0 means the full horizon j0 + 1.
    std::size_t maxSteps = 0;
    double pruneTolerance = kDefaultPruneTolerance;
    /// Also evaluate the classical theory curve at every step.
    bool theory = true;
    /// Stop once p and F have been flat for kConvergenceWindow steps.
    bool stopOnConvergence = true;
    /// Called after every step.
    std::function<void(const StepRecord &)> onStep;
};

struct SolverRun {
    SparseState tau;
    SparseState acc;
    WalkContext ctx;
    std::vector<StepRecord> perStep;
    std::optional<std::size_t> convergedAt;
    std::uint64_t walkSteps = 0;
};

/// tau <- T~^dag W^2 T~ tau.
inline void tauStep(SparseState &tau, const WalkContext &ctx) {
    tTilde(tau, ctx);
    walkW(tau, ctx);
    walkW(tau, ctx);
    tTildeAdjoint(tau, ctx);
}

/// Runs the solver on `csc` for the normalized right-hand side `b`.
inline SolverRun cksSolve(const CscMatrixImage &csc, const Vector &b, const ChebyshevPlan &plan,
                          const SolverOptions &options = {}) {
    if (b.size() != csc.N) throw Error(Errc::InvalidArgument, "right-hand side length must equal N");
    if (std::abs(norm2(b) - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "right-hand side must be normalized");
    if (plan.coeffs.size() != plan.j0 + 1) throw Error(Errc::InvalidArgument, "plan coefficients do not match j0");

    SolverRun run;
    run.tau.setPruneTolerance(options.pruneTolerance);
    run.ctx = WalkContext::create(run.tau, csc);
    prepareRowState(run.tau, run.ctx, std::span<const double>(b));
    run.acc = SparseState::emptyLike(run.tau);
    run.acc.setPruneTolerance(options.pruneTolerance);

    const DenseMatrix h = csc.normalizedDense();
    const Vector x = normalized(linSolve(h, b));
    std::optional<TheoryCurve> theory;
    if (options.theory) theory.emplace(h, b, plan.coeffs);

    const std::size_t horizon = plan.j0 + 1;
    const std::size_t steps = options.maxSteps == 0 ? horizon : std::min(options.maxSteps, horizon);
    std::size_t flat = 0;
    for (std::size_t j = 0; j < steps; ++j) {
        const auto start = std::chrono::steady_clock::now();
        if (j == 0) {
            tTilde(run.tau, run.ctx);
            walkW(run.tau, run.ctx);
            tTildeAdjoint(run.tau, run.ctx);
        } else {
            tauStep(run.tau, run.ctx);
        }
        accumulate(run.acc, run.tau, plan.coeffs[j]);

        StepRecord rec;
        rec.j = j;
        rec.p = successRate(run.acc, run.ctx);
        rec.f = fidelity(run.acc, run.ctx, x);
        rec.branches = run.tau.branchCount();
        if (theory) {
            const TheoryPoint tp = theory->advance();
            rec.pTheory = tp.p;
            rec.fTheory = tp.f;
        }
        rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        run.walkSteps = 2 * j + 1;

        if (!run.perStep.empty()) {
            const StepRecord &prev = run.perStep.back();
            const bool still = std::abs(rec.p - prev.p) < kConvergenceDelta && std::abs(rec.f - prev.f) < kConvergenceDelta;
            flat = still ? flat + 1 : 0;
        }
        run.perStep.push_back(rec);
        if (options.onStep) options.onStep(rec);
        if (options.stopOnConvergence && flat >= kConvergenceWindow) {
            run.convergedAt = j - kConvergenceWindow;
            break;
        }
    }
    // A horizon shorter than the window still converges if it ends flat.
    if (options.stopOnConvergence && !run.convergedAt && run.perStep.size() == horizon && flat > 0) {
        run.convergedAt = run.perStep.back().j - flat;
    }
    return run;
}

}  // namespace qwalk
