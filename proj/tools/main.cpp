#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driver/commands.hpp"
#include "driver/config.hpp"

namespace cli = kerrcav::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Damped Kerr cavity simulator: closed-form channel plus RK4 and Liouvillian reference solvers"};
    app.set_version_flag("--version", "kerrcav 0.1.0");

    std::string command;
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    std::optional<double> threshold;

    app.add_option("command", command, "evolve | compare | validate | kraus-check")
        ->required()
        ->check(CLI::IsMember({"evolve", "compare", "validate", "kraus-check"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "output file (default: config output.path, else stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threshold", threshold, "max pairwise deviation accepted by compare")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    }

    cli::RunConfig cfg;
    try {
        cfg = cli::load_config(config_path);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    if (out_path) {
        cfg.output_path = *out_path;
    }
    if (format) {
        cfg.format = *cli::parse_format(*format);
    }
    if (threshold) {
        cfg.threshold = *threshold;
    }

    std::ofstream file;
    if (cfg.output_path) {
        file.open(*cfg.output_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            std::cerr << "error: cannot open output file " << *cfg.output_path << '\n';
            return cli::kExitUsage;
        }
    }
    std::ostream& out = cfg.output_path ? static_cast<std::ostream&>(file) : std::cout;

    try {
        if (command == "evolve") {
            return cli::run_evolve(cfg, out, std::cerr);
        }
        if (command == "compare") {
            return cli::run_compare(cfg, out, std::cerr);
        }
        if (command == "validate") {
            return cli::run_validate(cfg, out, std::cerr);
        }
        return cli::run_kraus_check(cfg, out, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitFailure;
    }
}
