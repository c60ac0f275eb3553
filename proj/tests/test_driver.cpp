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


#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qwalk/driver.hpp"
#include "scratch.hpp"
#include "testing.hpp"

namespace qwalk::cli {
namespace {

RunConfig config(const std::string &command, const ScratchDir &dir) {
    RunConfig cfg;
    cfg.command = command;
    cfg.out = dir.path().string();
    return cfg;
}

std::vector<std::vector<std::string>> readCsv(const std::filesystem::path &p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json readJson(const std::filesystem::path &p) { return nlohmann::json::parse(slurp(p)); }

TEST(Config, Validation) {
    RunConfig cfg;
    cfg.epsilon = 0.0;
    EXPECT_ERRC(validate(cfg), Errc::InvalidArgument);
    cfg.epsilon = 1.0;
    EXPECT_ERRC(validate(cfg), Errc::InvalidArgument);
    cfg.epsilon = 1e-3;
    cfg.steps = 0;
    EXPECT_ERRC(validate(cfg), Errc::InvalidArgument);
    cfg.steps = 1;
    cfg.pruneTol = -1.0;
    EXPECT_ERRC(validate(cfg), Errc::InvalidArgument);
    cfg.pruneTol = 0.0;
    EXPECT_NO_THROW(validate(cfg));
}

TEST(Config, ExitCodes) {
    EXPECT_EQ(exitCodeFor(Errc::Io), kIoError);
    EXPECT_EQ(exitCodeFor(Errc::InvalidArgument), kConfigError);
    EXPECT_EQ(exitCodeFor(Errc::Singular), kConfigError);
    EXPECT_EQ(exitCodeFor(Errc::NonZeroAncilla), kVerifyFailed);
}

TEST(Gen, SidecarAndImage) {
    ScratchDir dir;
    RunConfig cfg = config("gen", dir);
    EXPECT_EQ(run(cfg), kOk);
    const nlohmann::json side = readJson(dir / "matrix.json");
    EXPECT_EQ(side["N"], 16);
    EXPECT_EQ(side["s"], 8);
    EXPECT_EQ(side["k_w"], 8);
    EXPECT_EQ(side["n"], 5);
    EXPECT_EQ(side["elementOffset"], 0);
    EXPECT_EQ(side["sparsityOffset"], 128);
    EXPECT_EQ(side["seed"], 1);
    EXPECT_GT(side["kappa"].get<double>(), 1.0);
    const MatrixBundle back = loadMatrix(dir / "matrix.qram");
    EXPECT_TRUE(back.csc == buildMatrix(cfg).csc);
}

TEST(Gen, Deterministic) {
    ScratchDir a, b;
    (void)b;
    RunConfig cfg = config("gen", a);
    cfg.out = (a / "one").string();
    ASSERT_EQ(run(cfg), kOk);
    cfg.out = (a / "two").string();
    ASSERT_EQ(run(cfg), kOk);
    EXPECT_EQ(slurp(a / "one/matrix.qram"), slurp(a / "two/matrix.qram"));
    EXPECT_EQ(slurp(a / "one/matrix.json"), slurp(a / "two/matrix.json"));
}

TEST(Gen, ZeroBandwidth) {
    ScratchDir dir;
    RunConfig cfg = config("gen", dir);
    cfg.bandwidth = 0;
    ASSERT_EQ(run(cfg), kOk);
    EXPECT_EQ(readJson(dir / "matrix.json")["s"], 1);
}

TEST(Gen, BadSpecIsConfigError) {
    ScratchDir dir;
    RunConfig cfg = config("gen", dir);
    cfg.rows = 12;
    EXPECT_EQ(run(cfg), kConfigError);
    cfg.rows = 16;
    cfg.bandwidth = 8;
    EXPECT_EQ(run(cfg), kConfigError);
}

TEST(Walk, OracleColumnsAndReport) {
    ScratchDir dir;
    RunConfig cfg = config("walk", dir);
    cfg.steps = 5;
    ASSERT_EQ(run(cfg), kOk);
    const auto csv = readCsv(dir / "walk.csv");
    ASSERT_EQ(csv.size(), 6u);
    EXPECT_EQ(csv[0], (std::vector<std::string>{"n", "error", "branches"}));
    for (std::size_t i = 1; i < csv.size(); ++i) {
        EXPECT_EQ(csv[i][0], std::to_string(i));
        EXPECT_LE(std::stod(csv[i][1]), 1e-8);
    }
    const auto timings = readCsv(dir / "timings.csv");
    EXPECT_EQ(timings[0], (std::vector<std::string>{"n", "millis"}));
    const nlohmann::json report = readJson(dir / "report.json");
    EXPECT_EQ(report["qubitCountFormula"], 82);
    EXPECT_EQ(report["rowSize"], 16);
    EXPECT_EQ(report["s"], 8);
    EXPECT_LE(report["maxBranches"].get<std::size_t>(), report["branchBound"].get<std::size_t>());
    EXPECT_GE(report["branchesAfterFirstT"].get<std::size_t>(), report["nnz"].get<std::size_t>());
    EXPECT_FALSE(report["oracleMismatch"].get<bool>());
    EXPECT_GT(report["qubitCountAuto"].get<std::size_t>(), 0u);
}

TEST(Walk, OneStepOnDiagonal) {
    ScratchDir dir;
    RunConfig cfg = config("walk", dir);
    cfg.bandwidth = 0;
    cfg.steps = 1;
    ASSERT_EQ(run(cfg), kOk);
    const auto csv = readCsv(dir / "walk.csv");
    ASSERT_EQ(csv.size(), 2u);
    EXPECT_LE(std::stod(csv[1][1]), 1e-12);
}

TEST(Walk, OracleOffLeavesErrorEmpty) {
    ScratchDir dir;
    RunConfig cfg = config("walk", dir);
    cfg.steps = 2;
    cfg.oracle = false;
    ASSERT_EQ(run(cfg), kOk);
    const auto csv = readCsv(dir / "walk.csv");
    EXPECT_EQ(csv[1][1], "");
    EXPECT_TRUE(readJson(dir / "report.json")["maxError"].is_null());
}

TEST(Walk, DeterministicCsv) {
    ScratchDir dir;
    RunConfig cfg = config("walk", dir);
    cfg.steps = 3;
    cfg.out = (dir / "a").string();
    ASSERT_EQ(run(cfg), kOk);
    cfg.out = (dir / "b").string();
    ASSERT_EQ(run(cfg), kOk);
    EXPECT_EQ(slurp(dir / "a/walk.csv"), slurp(dir / "b/walk.csv"));
}

TEST(Solve, TraceMatchesTheory) {
    ScratchDir dir;
    RunConfig cfg = config("solve", dir);
    cfg.bandwidth = 1;
    cfg.seed = 6;
    cfg.steps = 25;
    ASSERT_EQ(run(cfg), kOk);
    const auto csv = readCsv(dir / "solve.csv");
    ASSERT_GE(csv.size(), 2u);
    EXPECT_EQ(csv[0], (std::vector<std::string>{"j", "p", "f", "p_theory", "f_theory", "branches"}));
    for (std::size_t i = 1; i < csv.size(); ++i) {
        EXPECT_EQ(csv[i][0], std::to_string(i - 1));
        EXPECT_LE(std::abs(std::stod(csv[i][1]) - std::stod(csv[i][3])), 1e-6);
        EXPECT_LE(std::abs(std::stod(csv[i][2]) - std::stod(csv[i][4])), 1e-6);
    }
    const nlohmann::json report = readJson(dir / "report.json");
    EXPECT_EQ(report["stepsRun"], csv.size() - 1);
    EXPECT_EQ(report["walkSteps"], 2 * (csv.size() - 2) + 1);
    EXPECT_LE(report["maxTheoryDeviation"].get<double>(), 1e-6);
    EXPECT_GT(report["j0"].get<std::size_t>(), 0u);
}

TEST(Solve, IdentityImageConvergesAtFirstStep) {
    ScratchDir dir;
    const PreprocessResult pre = preprocess(DenseMatrix::identity(8), 8);
    const MatrixBundle m{pre.csc, packQram(pre.csc), pre.kappa, 0};
    const auto image = saveMatrix(m, dir / "m");
    RunConfig cfg = config("solve", dir);
    cfg.matrix = image.string();
    ASSERT_EQ(run(cfg), kOk);
    const nlohmann::json report = readJson(dir / "report.json");
    EXPECT_EQ(report["convergedAt"], 0);
    EXPECT_NEAR(report["finalF"].get<double>(), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(report["kappa"].get<double>(), 1.0);
}

TEST(Verify, PassesOnGeneratedMatrix) {
    ScratchDir dir;
    RunConfig cfg = config("verify", dir);
    cfg.steps = 5;
    EXPECT_EQ(run(cfg), kOk);
    const nlohmann::json summary = readJson(dir / "verify.json");
    EXPECT_TRUE(summary["passed"].get<bool>());
    EXPECT_EQ(summary["suites"].size(), 7u);
}

TEST(Verify, ThirtyTwoRowBijection) {
    ScratchDir dir;
    RunConfig cfg = config("verify", dir);
    cfg.rows = 32;
    cfg.steps = 3;
    EXPECT_EQ(run(cfg), kOk);
    const nlohmann::json summary = readJson(dir / "verify.json");
    for (const auto &s : summary["suites"]) {
        if (s["name"] == "os-bijection") {
            EXPECT_TRUE(s["passed"].get<bool>());
        }
    }
}

TEST(Verify, CorruptedImageFails) {
    ScratchDir dir;
    RunConfig gen = config("gen", dir);
    gen.out = (dir / "m").string();
    ASSERT_EQ(run(gen), kOk);
    const MatrixBundle m = loadMatrix(dir / "m/matrix.qram");
    std::vector<std::uint64_t> words = m.image.words();
    std::swap(words[m.csc.sparsityOffset], words[m.csc.sparsityOffset + 1]);
    QramImage(words, m.image.addressWidth(), m.image.wordWidth()).save((dir / "m/matrix.qram").string());

    RunConfig cfg = config("verify", dir);
    cfg.matrix = (dir / "m/matrix.qram").string();
    cfg.steps = 2;
    EXPECT_EQ(run(cfg), kVerifyFailed);
    const nlohmann::json summary = readJson(dir / "verify.json");
    EXPECT_FALSE(summary["passed"].get<bool>());
    for (const auto &s : summary["suites"]) {
        if (s["name"] == "window-precondition") {
            EXPECT_FALSE(s["passed"].get<bool>());
        }
    }
}

TEST(Io, MissingMatrixIsIoError) {
    ScratchDir dir;
    RunConfig cfg = config("walk", dir);
    cfg.matrix = (dir / "absent.qram").string();
    EXPECT_EQ(run(cfg), kIoError);
}

TEST(Io, MalformedSidecar) {
    ScratchDir dir;
    RunConfig gen = config("gen", dir);
    ASSERT_EQ(run(gen), kOk);
    writeText(dir / "matrix.json", "{ not json");
    EXPECT_ERRC(loadMatrix(dir / "matrix.qram"), Errc::Io);
    writeText(dir / "matrix.json", R"({"N": 32, "s": 8, "k_w": 8, "n": 6, "elementOffset": 0,
        "sparsityOffset": 256, "kappa": 2.0})");
    EXPECT_ERRC(loadMatrix(dir / "matrix.qram"), Errc::LayoutMismatch);
}

TEST(Io, UnwritableOutput) {
    ScratchDir dir;
    writeText(dir / "file", "x");
    RunConfig cfg = config("gen", dir);
    cfg.out = (dir / "file" / "sub").string();
    EXPECT_EQ(run(cfg), kIoError);
}

TEST(Run, UnknownCommand) {
    ScratchDir dir;
    EXPECT_EQ(run(config("plot", dir)), kConfigError);
}

}  // namespace
}  // namespace qwalk::cli
