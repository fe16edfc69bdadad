// SPDX-License-Identifier: Apache-2.0
//
// dsa run <config> | evaluate <config> --theta <file> | geometry <config> | version

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "dsa/dsa.hpp"
#include "dsa/experiment.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic scattering array synthesis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string theta_path;
    std::optional<int> iterations;
    std::optional<int> starts;
    std::optional<std::string> output;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "synthesize loads for a scenario and write all artifacts");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--iterations", iterations, "override optimizer.max_iterations");
    run->add_option("--starts", starts, "override optimizer.starts");
    run->add_option("-o,--output", output, "override output_dir");
    run->add_flag("-q,--quiet", quiet, "do not print the report table");

    auto* evaluate = app.add_subcommand("evaluate", "recompute report and patterns for a stored theta");
    evaluate->add_option("config", config_path, "experiment config (JSON)")->required();
    evaluate->add_option("--theta", theta_path, "theta JSON written by `run`")->required();
    evaluate->add_option("-o,--output", output, "override output_dir");
    evaluate->add_flag("-q,--quiet", quiet, "do not print the report table");

    auto* geometry = app.add_subcommand("geometry", "emit the array geometry as JSON");
    geometry->add_option("config", config_path, "experiment config (JSON)")->required();
    geometry->add_option("-o,--output", output, "write to this file instead of stdout");

    app.add_subcommand("version", "print the version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("version")) {
            std::cout << "dsa " << DSA_VERSION_STRING << '\n';
            return exit_ok;
        }

        dsa::ExperimentConfig cfg = dsa::load_experiment_config(config_path);
        dsa::apply_overrides(cfg, {iterations, starts, std::nullopt});

        if (app.got_subcommand("geometry")) {
            const auto json = dsa::io::geometry_to_json(dsa::build_geometry(cfg));
            if (output)
                dsa::io::write_json(*output, json);
            else
                std::cout << json.dump(2) << '\n';
            return exit_ok;
        }

        if (output) cfg.output_dir = *output;

        if (app.got_subcommand("run")) {
            const auto out = dsa::run_experiment(cfg);
            if (!quiet) std::cout << dsa::format_report_table(out.report);
            std::cout << "objective " << out.synthesis.trace.final_objective << " after "
                      << out.synthesis.trace.entries.size() - 1 << " iterations; artifacts in "
                      << out.directory.string() << '\n';
            if (!out.synthesis.converged)
                std::cerr << "warning: synthesis stopped on a line-search failure; best theta kept\n";
            return exit_ok;
        }

        const auto tf = dsa::io::theta_from_json(nlohmann::json::parse(dsa::io::read_text(theta_path)));
        if (!tf.fingerprint.empty() && tf.fingerprint != cfg.fingerprint)
            std::cerr << "warning: theta was produced from a different configuration\n";
        const auto out = dsa::evaluate_only(cfg, tf);
        if (!quiet) std::cout << dsa::format_report_table(out.report);
        return exit_ok;
    } catch (const dsa::ConfigError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_validation;
    } catch (const dsa::DimensionError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_validation;
    } catch (const nlohmann::json::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_validation;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return exit_runtime;
    }
}
