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

// qwalk: generate band matrices, run quantum walks and CKS solves on the
// sparse register-level simulator, and check them against dense oracles.

#include <map>
#include <string>

#include <CLI11.hpp>

#include "qwalk/driver.hpp"

namespace {

void addCommonFlags(CLI::App &cmd, qwalk::cli::RunConfig &cfg, std::string &oracle) {
    cmd.add_option("--matrix", cfg.matrix, "Packed matrix image (.qram) with a .json sidecar");
    cmd.add_option("--rows", cfg.rows, "Matrix dimension N (power of two)");
    cmd.add_option("--bandwidth", cfg.bandwidth, "Band half-width; s = bit_ceil(2*bandwidth+1)");
    cmd.add_option("--word-length", cfg.wordLength, "Fixed-point bits per matrix element")->check(CLI::Range(1, 32));
    cmd.add_option("--epsilon", cfg.epsilon, "Target error of the Chebyshev expansion");
    cmd.add_option("--steps", cfg.steps, "Walk steps, or solver steps (default: full horizon)");
    cmd.add_option("--seed", cfg.seed, "Matrix generator seed");
    cmd.add_option("--out", cfg.out, "Output directory");
    cmd.add_option("--oracle", oracle, "Dense oracle comparison")->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--prune-tol", cfg.pruneTol, "Drop branches with |amplitude| at or below this");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Register-level sparse simulation of a QRAM-based quantum walk and linear solver"};
    app.require_subcommand(1);
    qwalk::cli::RunConfig cfg;
    std::string oracle = "on";
    const std::map<std::string, std::string> commands = {
        {"gen", "Generate a seeded band matrix and write its QRAM image"},
        {"walk", "Run walk steps and compare with the Chebyshev recurrence"},
        {"solve", "Run the CKS solver and trace success rate and fidelity"},
        {"verify", "Run the property suites; nonzero exit on failure"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        addCommonFlags(*sub, cfg, oracle);
        sub->callback([&cfg, name = name] { cfg.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qwalk::cli::kConfigError;
    }
    cfg.oracle = oracle == "on";
    return qwalk::cli::run(cfg);
}
