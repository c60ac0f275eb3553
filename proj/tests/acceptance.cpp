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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qwalk/cks.hpp"
#include "qwalk/verify.hpp"

namespace {

using namespace qwalk;

struct Outcome {
    bool passed = true;
    std::string detail;
};

std::string format(const char *fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

CscMatrixImage bandMatrix(std::uint64_t rows, std::uint64_t bandwidth, std::uint64_t seed) {
    return preprocess(genBandMatrix(BandMatrixSpec{rows, bandwidth, 8, seed}), 8).csc;
}

struct WalkCase {
    std::uint64_t N, s;
    std::size_t nnz, afterFirstT, maxBranches;
    double maxError;
};

// Shared by the walk-equivalence and resource-bound criteria.
std::vector<WalkCase> walkCases() {
    std::vector<WalkCase> out;
    for (std::uint64_t N : {16, 32, 64}) {
        for (std::uint64_t bw : {1, 3}) {
            const CscMatrixImage csc = bandMatrix(N, bw, N + bw);
            const WalkCheck c = chebyshevWalk(csc, uniformVector(N), 50);
            out.push_back({N, csc.s, csc.nnz(), c.branchesAfterFirstT, c.maxBranches, c.maxError});
        }
    }
    return out;
}

Outcome chebyshevEquivalence(const std::vector<WalkCase> &cases) {
    Outcome o;
    double worst = 0.0;
    for (const WalkCase &c : cases) {
        worst = std::max(worst, c.maxError);
        if (!(c.maxError <= 1e-8)) o.passed = false;
    }
    o.detail = format("%zu matrices, n <= 50, max error %.3g", cases.size(), worst);
    return o;
}

Outcome blockEncoding() {
    Outcome o;
    double worst = 0.0;
    for (std::uint64_t N : {8, 16, 32, 64}) {
        for (std::uint64_t bw : {1, 3}) {
            const double err = blockEncodingError(bandMatrix(N, bw, 3 * N + bw));
            worst = std::max(worst, err);
            if (!(err <= 1e-10)) o.passed = false;
        }
    }
    o.detail = format("max entry error %.3g", worst);
    return o;
}

Outcome solveMatchesTheory(std::uint64_t N, std::uint64_t seed, bool requireFidelity) {
    const CscMatrixImage csc = bandMatrix(N, 3, seed);
    const PreprocessResult pre = preprocess(genBandMatrix(BandMatrixSpec{N, 3, 8, seed}), 8);
    const ChebyshevPlan plan = chebyshevPlan(pre.kappa, 1e-3);
    const auto start = std::chrono::steady_clock::now();
    const SolverRun run = cksSolve(csc, uniformVector(N), plan);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double dev = 0.0;
    for (const StepRecord &r : run.perStep) {
        dev = std::max({dev, std::abs(r.p - r.pTheory), std::abs(r.f - r.fTheory)});
        if (std::isnan(r.pTheory) || std::isnan(r.fTheory)) dev = INFINITY;
    }
    const double f = run.perStep.back().f;
    Outcome o;
    o.passed = dev <= 1e-6 && (!requireFidelity || f >= 0.99);
    o.detail = format("N=%llu kappa=%.4g j0=%llu steps=%zu converged=%s F=%.6f max deviation %.3g, %.1f s",
                      static_cast<unsigned long long>(N), pre.kappa, static_cast<unsigned long long>(plan.j0),
                      run.perStep.size(), run.convergedAt ? std::to_string(*run.convergedAt).c_str() : "no", f, dev,
                      secs);
    return o;
}

Outcome qbsEquivalence() {
    Outcome o;
    std::size_t cases = 0, mismatches = 0;
    for (std::uint64_t s = 2; s <= 64; s *= 2) {
        const QbsCheck c = qbsExhaustive(s, 200, 1000 + s);
        cases += c.cases;
        mismatches += c.mismatches;
        if (!c.ok()) o.passed = false;
    }
    o.detail = format("%zu cases, %zu mismatches", cases, mismatches);
    return o;
}

Outcome osBijection() {
    Outcome o;
    std::size_t checked = 0;
    for (std::uint64_t N : {8, 16}) {
        for (std::uint64_t bw : {0, 1, 3}) {
            const CscMatrixImage csc = bandMatrix(N, bw, 7 * N + bw);
            if (!osPrimeBijection(csc).ok()) o.passed = false;
            ++checked;
        }
    }
    o.detail = format("%zu matrices, N in {8, 16}", checked);
    return o;
}

Outcome resourceBounds(const std::vector<WalkCase> &cases) {
    Outcome o;
    for (const WalkCase &c : cases) {
        if (c.maxBranches > 4 * c.N * c.s * c.s * c.s || c.afterFirstT < c.nnz) o.passed = false;
        o.detail += format("N=%llu s=%llu: nnz=%zu first=%zu max=%zu qubits=%llu; ",
                           static_cast<unsigned long long>(c.N), static_cast<unsigned long long>(c.s), c.nnz,
                           c.afterFirstT, c.maxBranches, static_cast<unsigned long long>(qubitEstimate(c.N, c.s, 8)));
    }
    const std::uint64_t q = qubitEstimate(16, 8, 8);
    if (q != 82) o.passed = false;
    o.detail += format("formula(16, 8, 8) = %llu", static_cast<unsigned long long>(q));
    return o;
}

Outcome planArithmetic() {
    Outcome o;
    const std::vector<std::vector<double>> symbolic = {{1.0}, {5.0 / 4, -1.0 / 4}, {11.0 / 8, -7.0 / 16, 1.0 / 16}};
    double coeffErr = 0.0;
    for (std::uint64_t b = 1; b <= 3; ++b) {
        const ChebyshevPlan p = chebyshevPlanForB(b, 1e-3);
        const auto &want = symbolic[b - 1];
        if (p.coeffs.size() != want.size()) {
            o.passed = false;
            continue;
        }
        for (std::size_t j = 0; j < want.size(); ++j) coeffErr = std::max(coeffErr, std::abs(p.coeffs[j] - want[j]));
    }
    if (!(coeffErr <= 1e-12)) o.passed = false;
    double sumErr = 0.0;
    for (double kappa : {10.0, 100.0}) {
        for (double eps : {1e-2, 1e-3}) {
            const ChebyshevPlan p = chebyshevPlan(kappa, eps);
            double sum = 0.0;
            for (double a : p.coeffs) sum += a;
            if (!(std::abs(sum - 1.0) <= eps)) o.passed = false;
            sumErr = std::max(sumErr, std::abs(sum - 1.0) / eps);
        }
    }
    const std::uint64_t j0 = chebyshevPlan(100.0, 1e-3).j0;
    const double rel = std::abs(static_cast<double>(j0) - 1532.0) / 1532.0;
    if (!(rel <= 0.02)) o.passed = false;
    o.detail = format("coefficient error %.3g, worst |sum - 1| / eps %.3g, j0(100, 1e-3) = %llu (%.2f%% from 1532)",
                      coeffErr, sumErr, static_cast<unsigned long long>(j0), 100.0 * rel);
    return o;
}

// Random reversible programs followed by their adjoints.
Outcome unitarityFuzz() {
    std::mt19937_64 rng(2026);
    const QramImage image({3, 1, 4, 1, 5, 7, 2, 6}, 3, 3);
    std::size_t failures = 0;
    double worstAmp = 0.0, worstNorm = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        SparseState st;
        const Register a = st.alloc(3, RegisterType::unsignedInt(), "a");
        const Register b = st.alloc(3, RegisterType::unsignedInt(), "b");
        const Register c = st.alloc(4, RegisterType::unsignedInt(), "c");
        const Register v = st.alloc(5, RegisterType::fixedPoint(4), "v");
        const Register f = st.alloc(1, RegisterType::boolean(), "f");
        st.clearBranches();
        const std::size_t count = 1 + rng() % 6;
        std::vector<std::vector<std::uint64_t>> keys;
        while (keys.size() < count) {
            std::vector<std::uint64_t> k = {rng() % 8, rng() % 8, rng() % 16, rng() % 17, rng() % 2};
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
        std::normal_distribution<double> gauss;
        for (const auto &k : keys) st.appendBranch(k, Amplitude(gauss(rng), gauss(rng)));
        st.finalize();
        const double n0 = std::sqrt(st.norm());
        for (Amplitude &amp : st.amplitudes()) amp /= n0;
        SparseState initial = st;

        std::vector<std::function<void()>> undo;
        const std::size_t length = 1 + rng() % 12;
        for (std::size_t step = 0; step < length; ++step) {
            const Controls ctl = rng() % 3 == 0 ? Controls{{f, rng() % 2}} : Controls{};
            switch (rng() % 11) {
                case 0: {
                    const std::uint64_t k = rng() % 8;
                    xorConstant(st, a, k, ctl);
                    undo.push_back([&, k, ctl] { xorConstant(st, a, k, ctl); });
                    break;
                }
                case 1:
                    add(st, a, b, c, ctl);
                    undo.push_back([&, ctl] { add(st, a, b, c, ctl); });
                    break;
                case 2: {
                    const std::uint64_t k = rng() % 16;
                    addConstantInPlace(st, c, k, ctl);
                    undo.push_back([&, k, ctl] { addConstantInPlace(st, c, 16 - k, ctl); });
                    break;
                }
                case 3:
                    addInPlace(st, b, a, ctl);
                    undo.push_back([&, ctl] {
                        inPlaceViaInversePair(
                            st, [](std::uint64_t t, std::span<const std::uint64_t> p) { return (t - p[0]) & 7; },
                            [](std::uint64_t y, std::span<const std::uint64_t> p) { return (y + p[0]) & 7; }, b, {a},
                            ctl);
                    });
                    break;
                case 4: {
                    const std::uint64_t k = 2 * (rng() % 8) + 1;
                    mulConstantInPlace(st, c, k, ctl);
                    undo.push_back([&, k, ctl] { mulConstantInPlace(st, c, detail::inverseOdd(k) & 15, ctl); });
                    break;
                }
                case 5:
                    swapRegisters(st, a, b, ctl);
                    undo.push_back([&, ctl] { swapRegisters(st, a, b, ctl); });
                    break;
                case 6:
                    phaseFlipIfAnyNonzero(st, {a, f});
                    undo.push_back([&] { phaseFlipIfAnyNonzero(st, {a, f}); });
                    break;
                case 7: {
                    const Register r = rng() % 2 ? a : b;
                    hadamardTransform(st, r, 3);
                    undo.push_back([&, r] { hadamardTransform(st, r, 3); });
                    break;
                }
                case 8:
                    conditionalRotation(st, f, v);
                    undo.push_back([&] { conditionalRotation(st, f, v, true); });
                    break;
                case 9:
                    qramQuery(st, image, a, b, ctl);
                    undo.push_back([&, ctl] { qramQuery(st, image, a, b, ctl); });
                    break;
                default:
                    compareLess(st, a, b, f);
                    undo.push_back([&] { compareLess(st, a, b, f); });
                    break;
            }
            worstNorm = std::max(worstNorm, std::abs(st.norm() - 1.0));
        }
        for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
            (*it)();
            worstNorm = std::max(worstNorm, std::abs(st.norm() - 1.0));
        }

        st.canonicalize();
        initial.canonicalize();
        bool same = st.branchCount() == initial.branchCount();
        for (std::size_t r = 0; same && r < st.registerCount(); ++r) same = st.column(r) == initial.column(r);
        if (same) {
            for (std::size_t i = 0; i < st.branchCount(); ++i) {
                worstAmp = std::max(worstAmp, std::abs(st.amplitudes()[i] - initial.amplitudes()[i]));
            }
        }
        if (!same || worstAmp > 1e-12) ++failures;
    }
    Outcome o;
    o.passed = failures == 0 && worstNorm <= 1e-9;
    o.detail = format("1000 programs, %zu failures, max amplitude error %.3g, max norm drift %.3g", failures, worstAmp,
                      worstNorm);
    return o;
}

Outcome scaling() {
    std::vector<double> xs, ys;
    std::string points;
    for (std::uint64_t N = 16; N <= 256; N *= 2) {
        const CscMatrixImage csc = bandMatrix(N, 1, 500 + N);
        const WalkCheck c = chebyshevWalk(csc, uniformVector(N), 10, false);
        xs.push_back(std::log(static_cast<double>(N)));
        ys.push_back(std::log(static_cast<double>(c.maxBranches)));
        points += format("%llu:%zu ", static_cast<unsigned long long>(N), c.maxBranches);
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Outcome o;
    o.passed = std::abs(slope - 1.0) <= 0.2;
    o.detail = format("slope %.4f over N:maxBranches ", slope) + points;
    return o;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](const char *name, const std::function<Outcome()> &check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.passed) ++failed;
    };

    std::vector<WalkCase> cases;
    try {
        cases = walkCases();
    } catch (const std::exception &e) {
        std::printf("walk runs failed: %s\n", e.what());
    }
    report("chebyshev-walk-equivalence", [&] {
        return cases.empty() ? Outcome{false, "no walk runs"} : chebyshevEquivalence(cases);
    });
    report("block-encoding", blockEncoding);
    report("cks-solve-n16", [] { return solveMatchesTheory(16, 9, true); });
    report("cks-solve-n128", [] { return solveMatchesTheory(128, 41, false); });
    report("qbs-exhaustive", qbsEquivalence);
    report("os-prime-bijection", osBijection);
    report("resource-bounds", [&] {
        return cases.empty() ? Outcome{false, "no walk runs"} : resourceBounds(cases);
    });
    report("plan-arithmetic", planArithmetic);
    report("unitarity-fuzz", unitarityFuzz);
    report("branch-scaling", scaling);
    return failed == 0 ? 0 : 1;
}
