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
 * Commands behind the `qwalk` executable: gen, walk, solve and verify.
 *
 * Deterministic results go to CSV files whose bytes depend only on the
 * configuration; wall-clock figures live in timings.csv and report.json.
 */

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/chebyshev.hpp"
#include "qwalk/cks.hpp"
#include "qwalk/error.hpp"
#include "qwalk/matrixgen.hpp"
#include "qwalk/verify.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kIoError = 3 };

/// Walk steps run when --steps is not given.
inline constexpr std::size_t kDefaultWalkSteps = 50;
inline constexpr double kWalkTolerance = 1e-8;
inline constexpr std::uint64_t kOracleMaxRows = 2048;

struct RunConfig {
    std::string command;
    std::optional<std::string> matrix;  ///< path to a .qram image with a .json sidecar
    std::uint64_t rows = 16;
    std::uint64_t bandwidth = 3;
    unsigned wordLength = 8;
    double epsilon = 1e-3;
    std::optional<std::size_t> steps;
    std::uint64_t seed = 1;
    std::string out = ".";
    bool oracle = true;
    double pruneTol = kDefaultPruneTolerance;
};

inline void validate(const RunConfig &cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw Error(Errc::InvalidArgument, "--epsilon must lie in (0, 1)");
    if (cfg.steps && *cfg.steps < 1) throw Error(Errc::InvalidArgument, "--steps must be at least 1");
    if (!(cfg.pruneTol >= 0.0)) throw Error(Errc::InvalidArgument, "--prune-tol must be nonnegative");
}

/// A packed matrix together with the metadata of its sidecar.
struct MatrixBundle {
    CscMatrixImage csc;
    QramImage image;
    double kappa = 1.0;
    std::uint64_t seed = 0;
};

inline MatrixBundle buildMatrix(const RunConfig &cfg) {
    const PreprocessResult pre = preprocess(genBandMatrix({cfg.rows, cfg.bandwidth, cfg.wordLength, cfg.seed}),
                                            cfg.wordLength);
    return {pre.csc, packQram(pre.csc), pre.kappa, cfg.seed};
}

inline std::filesystem::path sidecarPath(const std::filesystem::path &image) {
    std::filesystem::path p = image;
    return p.replace_extension(".json");
}

inline void writeText(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error(Errc::Io, "write failed for '" + path.string() + "'");
}

inline void ensureDirectory(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error(Errc::Io, "cannot create directory '" + dir.string() + "'");
}

inline nlohmann::json sidecarJson(const MatrixBundle &m) {
    return {{"N", m.csc.N},
            {"s", m.csc.s},
            {"k_w", m.csc.kw},
            {"n", m.csc.n},
            {"elementOffset", m.csc.elementOffset},
            {"sparsityOffset", m.csc.sparsityOffset},
            {"kappa", m.kappa},
            {"seed", m.seed}};
}

/// Writes <dir>/matrix.qram and <dir>/matrix.json; returns the image path.
inline std::filesystem::path saveMatrix(const MatrixBundle &m, const std::filesystem::path &dir) {
    ensureDirectory(dir);
    const std::filesystem::path image = dir / "matrix.qram";
    m.image.save(image.string());
    writeText(sidecarPath(image), sidecarJson(m).dump(2) + "\n");
    return image;
}

inline MatrixBundle loadMatrix(const std::filesystem::path &image) {
    std::ifstream in(sidecarPath(image));
    if (!in) throw Error(Errc::Io, "missing sidecar '" + sidecarPath(image).string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::Io, std::string("malformed sidecar: ") + e.what());
    }
    MatrixBundle m;
    m.image = QramImage::load(image.string());
    try {
        const auto N = j.at("N").get<std::uint64_t>();
        const auto s = j.at("s").get<std::uint64_t>();
        const auto kw = j.at("k_w").get<unsigned>();
        m.kappa = j.at("kappa").get<double>();
        m.seed = j.value("seed", std::uint64_t{0});
        m.csc = unpackQram(m.image, N, s, kw);
        if (j.at("elementOffset").get<std::uint64_t>() != m.csc.elementOffset ||
            j.at("sparsityOffset").get<std::uint64_t>() != m.csc.sparsityOffset ||
            j.at("n").get<unsigned>() != m.csc.n) {
            throw Error(Errc::LayoutMismatch, "sidecar layout does not match the packed image");
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::Io, std::string("malformed sidecar: ") + e.what());
    }
    if (m.image.addressWidth() < m.csc.addressWidth() || m.image.wordWidth() < m.csc.wordWidth()) {
        throw Error(Errc::LayoutMismatch, "image widths are too small for the sidecar layout");
    }
    return m;
}

inline MatrixBundle resolveMatrix(const RunConfig &cfg) {
    return cfg.matrix ? loadMatrix(*cfg.matrix) : buildMatrix(cfg);
}

/// Peak resident set size in kB, or 0 where /proc is unavailable.
inline std::uint64_t peakMemoryKb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) return std::strtoull(line.c_str() + 6, nullptr, 10);
    }
    return 0;
}

inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json baseReport(const std::string &command, const MatrixBundle &m) {
    return {{"command", command},
            {"rowSize", m.csc.N},
            {"wordLength", m.csc.kw},
            {"kappa", m.kappa},
            {"s", m.csc.s},
            {"nnz", m.csc.nnz()},
            {"seed", m.seed},
            {"qubitCountFormula", qubitEstimate(m.csc.N, m.csc.s, m.csc.kw)},
            {"branchBound", 4 * m.csc.N * m.csc.s * m.csc.s * m.csc.s}};
}

inline int cmdGen(const RunConfig &cfg) {
    const MatrixBundle m = buildMatrix(cfg);
    const auto path = saveMatrix(m, cfg.out);
    std::cout << path.string() << "\n";
    return kOk;
}

/// Runs walk steps and, with the oracle, compares every step with T_n(A/s) b.
inline int cmdWalk(const RunConfig &cfg) {
    const MatrixBundle m = resolveMatrix(cfg);
    const std::size_t steps = cfg.steps.value_or(kDefaultWalkSteps);
    const bool oracle = cfg.oracle && m.csc.N <= kOracleMaxRows;
    const Vector b = uniformVector(m.csc.N);

    SparseState state;
    state.setPruneTolerance(cfg.pruneTol);
    const WalkContext ctx = WalkContext::create(state, m.csc, m.image);
    prepareRowState(state, ctx, std::span<const double>(b));
    tTilde(state, ctx);
    const std::size_t afterFirstT = state.branchCount();
    std::vector<Vector> t;
    if (oracle) t = chebApply(m.csc.normalizedDense(), b, steps);

    std::string csv = "n,error,branches\n";
    std::string timings = "n,millis\n";
    double maxError = 0.0;
    double totalMillis = 0.0;
    for (std::size_t n = 1; n <= steps; ++n) {
        const auto start = std::chrono::steady_clock::now();
        walkW(state, ctx);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        totalMillis += ms;
        double err = NAN;
        if (oracle) {
            SparseState probe = state;
            tTildeAdjoint(probe, ctx);
            const auto p = flagZeroProjection(probe, ctx);
            err = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) err = std::max(err, std::abs(p[i] - t[n][i]));
            maxError = std::max(maxError, err);
        }
        csv += std::to_string(n) + "," + fmt(err) + "," + std::to_string(state.branchCount()) + "\n";
        timings += std::to_string(n) + "," + fmt(ms) + "\n";
    }

    const std::filesystem::path dir = cfg.out;
    ensureDirectory(dir);
    writeText(dir / "walk.csv", csv);
    writeText(dir / "timings.csv", timings);
    nlohmann::json report = baseReport("walk", m);
    const bool mismatch = oracle && maxError > kWalkTolerance;
    report["steps"] = steps;
    report["oracle"] = oracle;
    report["maxError"] = oracle ? nlohmann::json(maxError) : nlohmann::json(nullptr);
    report["oracleMismatch"] = mismatch;
    report["branchesAfterFirstT"] = afterFirstT;
    report["maxBranches"] = state.resources().maxBranches;
    report["qubitCountAuto"] = state.resources().maxWorkingQubits;
    report["avgStepTime"] = totalMillis / static_cast<double>(steps);
    report["peakMemory"] = peakMemoryKb();
    writeText(dir / "report.json", report.dump(2) + "\n");
    if (mismatch) std::cerr << "walk deviates from the Chebyshev oracle: " << maxError << "\n";
    return mismatch ? kVerifyFailed : kOk;
}

inline int cmdSolve(const RunConfig &cfg) {
    const MatrixBundle m = resolveMatrix(cfg);
    const ChebyshevPlan plan = chebyshevPlan(m.kappa, cfg.epsilon);
    const Vector b = uniformVector(m.csc.N);
    SolverOptions opts;
    opts.maxSteps = cfg.steps.value_or(0);
    opts.pruneTolerance = cfg.pruneTol;
    opts.theory = cfg.oracle && m.csc.N <= kOracleMaxRows;
    const SolverRun run = cksSolve(m.csc, b, plan, opts);

    std::string csv = "j,p,f,p_theory,f_theory,branches\n";
    std::string timings = "j,millis\n";
    double total = 0.0;
    double maxDev = 0.0;
    for (const StepRecord &r : run.perStep) {
        csv += std::to_string(r.j) + "," + fmt(r.p) + "," + fmt(r.f) + "," + fmt(r.pTheory) + "," + fmt(r.fTheory) +
               "," + std::to_string(r.branches) + "\n";
        timings += std::to_string(r.j) + "," + fmt(r.millis) + "\n";
        total += r.millis;
        if (opts.theory) maxDev = std::max({maxDev, std::abs(r.p - r.pTheory), std::abs(r.f - r.fTheory)});
    }
    const std::filesystem::path dir = cfg.out;
    ensureDirectory(dir);
    writeText(dir / "solve.csv", csv);
    writeText(dir / "timings.csv", timings);
    nlohmann::json report = baseReport("solve", m);
    report["epsilon"] = cfg.epsilon;
    report["b"] = plan.b;
    report["j0"] = plan.j0;
    report["stepsRun"] = run.perStep.size();
    report["walkSteps"] = run.walkSteps;
    report["convergedAt"] = run.convergedAt ? nlohmann::json(*run.convergedAt) : nlohmann::json(nullptr);
    report["finalP"] = run.perStep.back().p;
    report["finalF"] = run.perStep.back().f;
    report["oracle"] = opts.theory;
    report["maxTheoryDeviation"] = opts.theory ? nlohmann::json(maxDev) : nlohmann::json(nullptr);
    report["maxBranches"] = run.tau.resources().maxBranches;
    report["qubitCountAuto"] = run.tau.resources().maxWorkingQubits;
    report["avgStepTime"] = total / static_cast<double>(run.perStep.size());
    report["peakMemory"] = peakMemoryKb();
    writeText(dir / "report.json", report.dump(2) + "\n");
    return kOk;
}

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the property suites on the configured matrix.
inline std::vector<SuiteResult> runSuites(const RunConfig &cfg) {
    std::vector<SuiteResult> results;
    auto suite = [&](const std::string &name, const std::function<std::pair<bool, std::string>()> &body) {
        SuiteResult r{name, false, ""};
        try {
            auto [ok, detail] = body();
            r.passed = ok;
            r.detail = detail;
        } catch (const std::exception &e) {
            r.detail = e.what();
        }
        results.push_back(r);
    };
    char buf[160];

    std::optional<MatrixBundle> m;
    suite("matrix", [&] {
        m = resolveMatrix(cfg);
        return std::pair{true, "N=" + std::to_string(m->csc.N) + " s=" + std::to_string(m->csc.s)};
    });
    if (!m) return results;
    const CscMatrixImage &csc = m->csc;

    suite("window-precondition", [&] {
        const bool ok = windowsSorted(m->image, csc.N, csc.s, csc.sparsityOffset);
        return std::pair{ok, std::string(ok ? "all row windows increasing" : "unsorted row window in image")};
    });
    suite("qbs-exhaustive", [&] {
        std::size_t cases = 0;
        bool ok = true;
        for (std::uint64_t s = 2; s <= 16; s *= 2) {
            const QbsCheck c = qbsExhaustive(s, 20, cfg.seed + s);
            cases += c.cases;
            ok = ok && c.ok();
        }
        return std::pair{ok, std::to_string(cases) + " cases"};
    });
    suite("os-bijection", [&] {
        if (csc.n > 7) return std::pair{true, std::string("skipped for n > 7")};
        const BijectionCheck c = osPrimeBijection(csc);
        return std::pair{c.ok(), std::string(c.ok() ? "permutation on every row" : "not a permutation")};
    });
    suite("block-encoding", [&] {
        if (csc.N > 64) return std::pair{true, std::string("skipped for N > 64")};
        const double err = blockEncodingError(csc);
        std::snprintf(buf, sizeof buf, "max error %.3g", err);
        return std::pair{err <= 1e-10, std::string(buf)};
    });
    suite("chebyshev-walk", [&] {
        const bool oracle = cfg.oracle && csc.N <= kOracleMaxRows;
        const WalkCheck c = chebyshevWalk(csc, uniformVector(csc.N), cfg.steps.value_or(20), oracle, cfg.pruneTol);
        const bool bounds = c.maxBranches <= 4 * csc.N * csc.s * csc.s * csc.s && c.branchesAfterFirstT >= csc.nnz();
        std::snprintf(buf, sizeof buf, "max error %.3g, max branches %zu", c.maxError, c.maxBranches);
        return std::pair{c.maxError <= kWalkTolerance && bounds && c.maxNormDrift <= 1e-9 && c.ancillaBalanced,
                         std::string(buf)};
    });
    suite("plan-arithmetic", [&] {
        const auto p1 = chebyshevPlanForB(1, cfg.epsilon).coeffs;
        const auto p2 = chebyshevPlanForB(2, cfg.epsilon).coeffs;
        const bool ok = p1.size() == 1 && std::abs(p1[0] - 1.0) <= 1e-12 && p2.size() == 2 &&
                        std::abs(p2[0] - 1.25) <= 1e-12 && std::abs(p2[1] + 0.25) <= 1e-12;
        return std::pair{ok, std::string("forced b = 1, 2")};
    });
    return results;
}

inline int cmdVerify(const RunConfig &cfg) {
    const std::vector<SuiteResult> results = runSuites(cfg);
    nlohmann::json summary = {{"passed", true}, {"suites", nlohmann::json::array()}};
    for (const SuiteResult &r : results) {
        summary["suites"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        if (!r.passed) {
            summary["passed"] = false;
            std::cerr << "FAILED " << r.name << ": " << r.detail << "\n";
        }
    }
    const std::filesystem::path dir = cfg.out;
    ensureDirectory(dir);
    writeText(dir / "verify.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return summary["passed"].get<bool>() ? kOk : kVerifyFailed;
}

inline int exitCodeFor(Errc code) {
    switch (code) {
        case Errc::Io: return kIoError;
        case Errc::InvalidArgument:
        case Errc::WidthOutOfRange:
        case Errc::LayoutMismatch:
        case Errc::Singular: return kConfigError;
        default: return kVerifyFailed;
    }
}

/// Validates the configuration, runs one command and maps errors to exit codes.
inline int run(const RunConfig &cfg) {
    try {
        validate(cfg);
        if (cfg.command == "gen") return cmdGen(cfg);
        if (cfg.command == "walk") return cmdWalk(cfg);
        if (cfg.command == "solve") return cmdSolve(cfg);
        if (cfg.command == "verify") return cmdVerify(cfg);
        throw Error(Errc::InvalidArgument, "unknown command '" + cfg.command + "'");
    } catch (const Error &e) {
        std::cerr << "qwalk: " << e.what() << "\n";
        return exitCodeFor(e.code());
    }
}

}  // namespace qwalk::cli
