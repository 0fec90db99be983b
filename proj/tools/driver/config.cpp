#include "driver/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kerrcav::cli {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, const std::string& where, std::initializer_list<std::string_view> allowed)
{
    for (const auto& item : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            const std::string path = where.empty() ? item.key() : where + "." + item.key();
            throw ConfigError(path, "unknown key \"" + path + "\"");
        }
    }
}

const json& require(const json& object, const std::string& key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end()) {
        throw ConfigError(path, "missing required key \"" + path + "\"");
    }
    return *it;
}

double as_real(const json& value, const std::string& path)
{
    if (!value.is_number()) {
        throw ConfigError(path, "\"" + path + "\" must be a number");
    }
    const double x = value.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "\"" + path + "\" must be finite");
    }
    return x;
}

std::size_t as_count(const json& value, const std::string& path)
{
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw ConfigError(path, "\"" + path + "\" must be a non-negative integer");
    }
    return value.get<std::size_t>();
}

Complex as_complex(const json& value, const std::string& path)
{
    if (value.is_number()) {
        return {as_real(value, path), 0.0};
    }
    if (value.is_array() && value.size() == 2) {
        return {as_real(value[0], path + "[0]"), as_real(value[1], path + "[1]")};
    }
    throw ConfigError(path, "\"" + path + "\" must be a number or a [re, im] pair");
}

StateSpec parse_state(const json& node, const std::string& path)
{
    if (!node.is_object()) {
        throw ConfigError(path, "\"" + path + "\" must be an object with a \"type\" key");
    }
    const json& type_node = require(node, "type", path + ".type");
    if (!type_node.is_string()) {
        throw ConfigError(path + ".type", "\"" + path + ".type\" must be a string");
    }
    const std::string type = type_node.get<std::string>();
    if (type == "fock") {
        reject_unknown_keys(node, path, {"type", "n"});
        return FockState{as_count(require(node, "n", path + ".n"), path + ".n")};
    }
    if (type == "coherent") {
        reject_unknown_keys(node, path, {"type", "alpha"});
        return CoherentState{as_complex(require(node, "alpha", path + ".alpha"), path + ".alpha")};
    }
    if (type == "thermal") {
        reject_unknown_keys(node, path, {"type", "nbar"});
        const double nbar = as_real(require(node, "nbar", path + ".nbar"), path + ".nbar");
        if (nbar < 0.0) {
            throw ConfigError(path + ".nbar", "\"" + path + ".nbar\" must be >= 0");
        }
        return ThermalState{nbar};
    }
    if (type == "cat") {
        reject_unknown_keys(node, path, {"type", "alpha", "phase"});
        CatState cat{as_complex(require(node, "alpha", path + ".alpha"), path + ".alpha"), 0.0};
        if (auto it = node.find("phase"); it != node.end()) {
            cat.phase = as_real(*it, path + ".phase");
        }
        return cat;
    }
    throw ConfigError(path + ".type", "unknown state type \"" + type + "\" (expected fock, coherent, thermal or cat)");
}

std::vector<double> parse_times(const json& doc)
{
    const bool explicit_list = doc.contains("times");
    const bool grid = doc.contains("t_max") || doc.contains("num_points");
    if (explicit_list && grid) {
        throw ConfigError("times", "give either \"times\" or \"t_max\"/\"num_points\", not both");
    }
    std::vector<double> times;
    if (explicit_list) {
        const json& node = doc.at("times");
        if (!node.is_array()) {
            throw ConfigError("times", "\"times\" must be an array of numbers");
        }
        for (std::size_t i = 0; i < node.size(); ++i) {
            times.push_back(as_real(node[i], "times[" + std::to_string(i) + "]"));
        }
    } else if (grid) {
        const double t_max = as_real(require(doc, "t_max", "t_max"), "t_max");
        const std::size_t points = as_count(require(doc, "num_points", "num_points"), "num_points");
        if (t_max < 0.0) {
            throw ConfigError("t_max", "\"t_max\" must be >= 0");
        }
        if (points == 0) {
            throw ConfigError("num_points", "\"num_points\" must be >= 1");
        }
        if (points == 1) {
            times.push_back(t_max);
        } else {
            for (std::size_t i = 0; i < points; ++i) {
                times.push_back(t_max * static_cast<double>(i) / static_cast<double>(points - 1));
            }
        }
    } else {
        throw ConfigError("times", "missing time specification: \"times\" or \"t_max\"/\"num_points\"");
    }

    if (times.empty()) {
        throw ConfigError("times", "times must be non-empty");
    }
    for (double t : times) {
        if (t < 0.0) {
            throw ConfigError("times", "times must be non-negative");
        }
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw ConfigError("times", "times not ascending");
    }
    return times;
}

QGridBounds parse_qgrid(const json& node)
{
    if (!node.is_object()) {
        throw ConfigError("qgrid", "\"qgrid\" must be an object");
    }
    reject_unknown_keys(node, "qgrid", {"re_min", "re_max", "im_min", "im_max", "resolution"});
    QGridBounds b;
    // Missing keys keep the QGridBounds defaults.
    const auto real_or = [&node](const char* key, double& slot) {
        if (auto it = node.find(key); it != node.end()) {
            slot = as_real(*it, std::string("qgrid.") + key);
        }
    };
    real_or("re_min", b.re_min);
    real_or("re_max", b.re_max);
    real_or("im_min", b.im_min);
    real_or("im_max", b.im_max);
    if (auto it = node.find("resolution"); it != node.end()) {
        b.resolution = as_count(*it, "qgrid.resolution");
    }
    if (b.resolution < 2) {
        throw ConfigError("qgrid.resolution", "\"qgrid.resolution\" must be >= 2");
    }
    if (!(b.re_max > b.re_min) || !(b.im_max > b.im_min)) {
        throw ConfigError("qgrid", "qgrid bounds must satisfy min < max on both axes");
    }
    return b;
}

std::string located_parse_error(std::string_view text, const json::parse_error& e)
{
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    std::ostringstream msg;
    msg << "config parse error at line " << line << ", column " << column << ": " << e.what();
    return msg.str();
}

} // namespace

IntegratorConfig RunConfig::integrator_for(double t) const
{
    const double steps = std::ceil(static_cast<double>(rk4_steps_per_unit_time) * t);
    return {std::max<std::size_t>(1, static_cast<std::size_t>(steps))};
}

RunConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", located_parse_error(text, e));
    }
    if (!doc.is_object()) {
        throw ConfigError("", "config document must be a JSON object");
    }
    reject_unknown_keys(doc, "",
                        {"dimension", "chi", "gamma", "times", "t_max", "num_points", "initial_state",
                         "fidelity_reference", "solvers", "rk4_steps_per_unit_time", "liouville_max_dim", "output",
                         "qgrid", "dump_density_matrices", "threshold"});

    RunConfig cfg;
    cfg.dimension = as_count(require(doc, "dimension", "dimension"), "dimension");
    if (cfg.dimension < 2) {
        throw ConfigError("dimension", "\"dimension\" must be >= 2");
    }
    cfg.chi = as_real(require(doc, "chi", "chi"), "chi");
    cfg.gamma = as_real(require(doc, "gamma", "gamma"), "gamma");
    if (cfg.gamma < 0.0) {
        throw ConfigError("gamma", "\"gamma\" must be >= 0");
    }
    cfg.times = parse_times(doc);

    cfg.initial_state = parse_state(require(doc, "initial_state", "initial_state"), "initial_state");
    if (const auto* fock = std::get_if<FockState>(&cfg.initial_state); fock && fock->n >= cfg.dimension) {
        throw ConfigError("initial_state.n", "\"initial_state.n\" must be < dimension");
    }
    if (auto it = doc.find("fidelity_reference"); it != doc.end()) {
        cfg.fidelity_reference = parse_state(*it, "fidelity_reference");
        if (const auto* fock = std::get_if<FockState>(&*cfg.fidelity_reference); fock && fock->n >= cfg.dimension) {
            throw ConfigError("fidelity_reference.n", "\"fidelity_reference.n\" must be < dimension");
        }
    }
    if (!is_pure(cfg.reference_state())) {
        throw ConfigError("fidelity_reference",
                          "a pure \"fidelity_reference\" is required when the initial state is mixed");
    }

    if (auto it = doc.find("solvers"); it != doc.end()) {
        if (!it->is_array() || it->empty()) {
            throw ConfigError("solvers", "\"solvers\" must be a non-empty array");
        }
        cfg.solvers.clear();
        std::set<Solver> seen;
        for (const auto& entry : *it) {
            const auto solver = entry.is_string() ? parse_solver(entry.get<std::string>()) : std::nullopt;
            if (!solver) {
                throw ConfigError("solvers", "unknown solver " + entry.dump() + " (expected kraus, rk4 or liouville)");
            }
            if (!seen.insert(*solver).second) {
                throw ConfigError("solvers", "duplicate solver " + entry.dump());
            }
            cfg.solvers.push_back(*solver);
        }
    }
    if (auto it = doc.find("rk4_steps_per_unit_time"); it != doc.end()) {
        cfg.rk4_steps_per_unit_time = as_count(*it, "rk4_steps_per_unit_time");
        if (cfg.rk4_steps_per_unit_time == 0) {
            throw ConfigError("rk4_steps_per_unit_time", "\"rk4_steps_per_unit_time\" must be >= 1");
        }
    }
    if (auto it = doc.find("liouville_max_dim"); it != doc.end()) {
        cfg.liouville_max_dim = as_count(*it, "liouville_max_dim");
    }
    if (auto it = doc.find("output"); it != doc.end()) {
        if (!it->is_object()) {
            throw ConfigError("output", "\"output\" must be an object");
        }
        reject_unknown_keys(*it, "output", {"path", "format"});
        if (auto p = it->find("path"); p != it->end()) {
            if (!p->is_string()) {
                throw ConfigError("output.path", "\"output.path\" must be a string");
            }
            cfg.output_path = p->get<std::string>();
        }
        if (auto f = it->find("format"); f != it->end()) {
            const auto format = f->is_string() ? parse_format(f->get<std::string>()) : std::nullopt;
            if (!format) {
                throw ConfigError("output.format", "\"output.format\" must be \"csv\" or \"json\"");
            }
            cfg.format = *format;
        }
    }
    if (auto it = doc.find("qgrid"); it != doc.end()) {
        cfg.qgrid = parse_qgrid(*it);
    }
    if (auto it = doc.find("dump_density_matrices"); it != doc.end()) {
        if (!it->is_boolean()) {
            throw ConfigError("dump_density_matrices", "\"dump_density_matrices\" must be true or false");
        }
        cfg.dump_density_matrices = it->get<bool>();
    }
    if (auto it = doc.find("threshold"); it != doc.end()) {
        cfg.threshold = as_real(*it, "threshold");
        if (!(cfg.threshold > 0.0)) {
            throw ConfigError("threshold", "\"threshold\" must be > 0");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot open config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

json to_json(const StateSpec& spec)
{
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FockState>) {
                return {{"type", "fock"}, {"n", s.n}};
            } else if constexpr (std::is_same_v<T, CoherentState>) {
                return {{"type", "coherent"}, {"alpha", {s.alpha.real(), s.alpha.imag()}}};
            } else if constexpr (std::is_same_v<T, ThermalState>) {
                return {{"type", "thermal"}, {"nbar", s.mean_occupation}};
            } else {
                return {{"type", "cat"}, {"alpha", {s.alpha.real(), s.alpha.imag()}}, {"phase", s.phase}};
            }
        },
        spec);
}

json to_json(const RunConfig& cfg)
{
    json solvers = json::array();
    for (Solver s : cfg.solvers) {
        solvers.push_back(std::string(solver_name(s)));
    }
    json out = {
        {"dimension", cfg.dimension},
        {"chi", cfg.chi},
        {"gamma", cfg.gamma},
        {"times", cfg.times},
        {"initial_state", to_json(cfg.initial_state)},
        {"fidelity_reference", to_json(cfg.reference_state())},
        {"solvers", solvers},
        {"rk4_steps_per_unit_time", cfg.rk4_steps_per_unit_time},
        {"liouville_max_dim", cfg.liouville_max_dim},
        {"threshold", cfg.threshold},
        {"dump_density_matrices", cfg.dump_density_matrices},
    };
    if (cfg.qgrid) {
        out["qgrid"] = {{"re_min", cfg.qgrid->re_min},
                        {"re_max", cfg.qgrid->re_max},
                        {"im_min", cfg.qgrid->im_min},
                        {"im_max", cfg.qgrid->im_max},
                        {"resolution", cfg.qgrid->resolution}};
    }
    return out;
}

std::string_view format_name(OutputFormat format)
{
    return format == OutputFormat::Csv ? "csv" : "json";
}

std::optional<OutputFormat> parse_format(std::string_view name)
{
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    return std::nullopt;
}

} // namespace kerrcav::cli
