// Copyright 2026 The Kraussim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kraussim/run.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::string method;
    double epsilon = 0.0;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void attach_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Run configuration JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", flags.out_dir, "Directory for output files");
    cmd->add_option("--method", flags.method,
                    "Override the configured method (kraus_matrix, kraus_circuit, expm, rk4)");
    cmd->add_option("--epsilon", flags.epsilon, "Override the configured series tolerance");
    cmd->add_option("--jobs", flags.jobs, "Override the configured worker count");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&flags](std::uint64_t value) {
            flags.seed = value;
            flags.seed_set = true;
        },
        "Override the configured sampling seed");
}

kraussim::RunConfig load_with_overrides(const CommonFlags& flags) {
    kraussim::RunConfig cfg = kraussim::load_config_file(flags.config_path);
    if (!flags.method.empty()) cfg.method = kraussim::method_from_string(flags.method);
    if (flags.epsilon > 0.0) cfg.epsilon = flags.epsilon;
    if (flags.jobs > 0) cfg.jobs = flags.jobs;
    if (flags.seed_set) cfg.seed = flags.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form Kraus series simulation of Markovian open quantum systems"};
    app.require_subcommand(1);

    CommonFlags classify_flags, simulate_flags, circuits_flags, bound_flags, validate_flags;
    CLI::App* cmd_classify =
        app.add_subcommand("classify", "Report the superoperator commutator structure");
    attach_flags(cmd_classify, classify_flags);
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Run the configured method and write trajectory.csv");
    attach_flags(cmd_simulate, simulate_flags);
    CLI::App* cmd_circuits =
        app.add_subcommand("circuits", "Write the Kraus circuit suites to circuits.json");
    attach_flags(cmd_circuits, circuits_flags);
    CLI::App* cmd_bound =
        app.add_subcommand("bound", "Report truncation orders and tail bounds per time");
    attach_flags(cmd_bound, bound_flags);
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Cross-check all four methods on one configuration");
    attach_flags(cmd_validate, validate_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_classify->parsed()) {
            const auto cfg = load_with_overrides(classify_flags);
            std::cout << kraussim::classification_report(kraussim::classify(cfg.sys()));
            return 0;
        }
        if (cmd_simulate->parsed()) {
            const auto cfg = load_with_overrides(simulate_flags);
            kraussim::run_config(cfg, simulate_flags.out_dir);
            std::cout << "wrote " << simulate_flags.out_dir << "/trajectory.csv";
            if (cfg.method == kraussim::Method::kraus_circuit) {
                std::cout << " and " << simulate_flags.out_dir << "/circuits.json";
            }
            std::cout << "\n";
            return 0;
        }
        if (cmd_circuits->parsed()) {
            const auto cfg = load_with_overrides(circuits_flags);
            kraussim::dump_circuits(cfg, circuits_flags.out_dir);
            std::cout << "wrote " << circuits_flags.out_dir << "/circuits.json\n";
            return 0;
        }
        if (cmd_bound->parsed()) {
            const auto cfg = load_with_overrides(bound_flags);
            const auto rows = kraussim::bound_report(cfg, bound_flags.out_dir);
            std::cout << "t,order,order_analytic,bound\n";
            for (const auto& row : rows) {
                std::cout << row.t << "," << row.order << ","
                          << (row.order_analytic ? std::to_string(*row.order_analytic)
                                                 : std::string("-1"))
                          << "," << row.bound << "\n";
            }
            return 0;
        }
        if (cmd_validate->parsed()) {
            const auto cfg = load_with_overrides(validate_flags);
            const auto report = kraussim::validate_cross(cfg, validate_flags.out_dir);
            std::cout << report.text;
            if (!report.pass) return 4;
            return 0;
        }
    } catch (const kraussim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kraussim::UnsupportedSystemError& e) {
        std::cerr << "unsupported system: " << e.what() << "\n";
        return 3;
    } catch (const kraussim::ToleranceError& e) {
        std::cerr << "tolerance failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
