#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kerrcav/fock.hpp"
#include "kerrcav/observables.hpp"
#include "kerrcav/reference.hpp"

namespace kerrcav::cli {

enum class OutputFormat { Csv, Json };

// Document-level problems (syntax, unknown keys, bad values). `field` names
// the offending key path, empty for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    std::size_t dimension = 0;
    double chi = 0.0;
    double gamma = 0.0;
    std::vector<double> times;
    StateSpec initial_state = FockState{0};
    // Defaults to initial_state when absent.
    std::optional<StateSpec> fidelity_reference;
    std::vector<Solver> solvers{Solver::Kraus};
    std::size_t rk4_steps_per_unit_time = 10000;
    std::size_t liouville_max_dim = kDefaultLiouvillianMaxDim;
    std::optional<std::string> output_path;
    OutputFormat format = OutputFormat::Csv;
    std::optional<QGridBounds> qgrid;
    bool dump_density_matrices = false;
    double threshold = 1e-6;

    Truncation truncation() const { return Truncation(dimension); }
    StateSpec reference_state() const { return fidelity_reference.value_or(initial_state); }
    ChannelParams params_at(double t) const { return {chi, gamma, t}; }
    // max(1, ceil(rk4_steps_per_unit_time * t))
    IntegratorConfig integrator_for(double t) const;
};

// Strict JSON document -> validated RunConfig with defaults filled in.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const StateSpec& spec);

std::string_view format_name(OutputFormat format);
std::optional<OutputFormat> parse_format(std::string_view name);

} // namespace kerrcav::cli
