#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/errors.hpp"

namespace tfq {

/// Diagnostic for a bad command line or config file; the message names the offending key.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> v{"wigner", "bj", "cohen", "covariance", "diamond", "quantize-check"};
    return v;
}
inline const std::vector<std::string>& known_kernels() {
    static const std::vector<std::string> v{"wigner", "bj", "born-jordan", "choi-williams", "cw"};
    return v;
}
inline const std::vector<std::string>& known_states() {
    static const std::vector<std::string> v{"coherent", "squeezed", "cat", "diamond", "file"};
    return v;
}
inline const std::vector<std::string>& known_maps() {
    static const std::vector<std::string> v{"rotation", "shear", "scale", "fourier"};
    return v;
}
inline const std::vector<std::string>& known_formats() {
    static const std::vector<std::string> v{"csv", "pgm", "bin"};
    return v;
}

struct RunConfig {
    std::string command = "wigner";
    int n_points = 512;
    double x_max = 8.0;
    double hbar = kDefaultHbar;
    std::string kernel = "bj";
    double kernel_sigma = 1.0;
    std::string state = "coherent";
    std::string input;  ///< sample file when state == "file"
    double x0 = 0.0;
    double p0 = 0.0;
    double m_re = 1.0;
    double m_im = 0.0;
    double radius = 2.0;
    double angle = 0.0;
    int steps = 9;
    double final_angle = kPi / 4.0;
    double rho = 0.6;
    int oversample = 4;
    std::string map = "rotation";
    double map_param = kPi / 4.0;
    std::string output_dir = "out";
    std::vector<std::string> formats{"csv", "pgm"};
    bool check = false;  ///< --assert

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    void validate() const {
        auto member = [](const std::vector<std::string>& set, const std::string& v) {
            return std::find(set.begin(), set.end(), v) != set.end();
        };
        if (!member(known_commands(), command)) throw ConfigError("command: unknown command '" + command + "'");
        if (n_points % 2 != 0) throw ConfigError("n_points must be even");
        if (n_points < 8) throw ConfigError("n_points must be at least 8");
        if (!(x_max > 0.0)) throw ConfigError("x_max must be positive");
        if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
        if (!member(known_kernels(), kernel)) throw ConfigError("kernel: unknown kernel '" + kernel + "'");
        if (!(kernel_sigma > 0.0)) throw ConfigError("kernel_sigma must be positive");
        if (!member(known_states(), state)) throw ConfigError("state: unknown state '" + state + "'");
        if (state == "file" && input.empty()) throw ConfigError("input: required when state is 'file'");
        if (!(m_re > 0.0)) throw ConfigError("m_re must be positive");
        if (steps < 1) throw ConfigError("steps must be at least 1");
        if (!(rho > 0.0)) throw ConfigError("rho must be positive");
        if (oversample < 1) throw ConfigError("oversample must be at least 1");
        if (!member(known_maps(), map)) throw ConfigError("map: unknown map '" + map + "'");
        for (const auto& f : formats)
            if (!member(known_formats(), f)) throw ConfigError("formats: unknown format '" + f + "'");
    }
};

// ---------------------------------------------------------------------------------------------
// JSON form

#define TFQ_CONFIG_FIELDS(X)                                                                        \
    X(command) X(n_points) X(x_max) X(hbar) X(kernel) X(kernel_sigma) X(state) X(input) X(x0) X(p0) \
        X(m_re) X(m_im) X(radius) X(angle) X(steps) X(final_angle) X(rho) X(oversample) X(map)     \
            X(map_param) X(output_dir) X(formats)

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
#define TFQ_PUT(name) j[#name] = c.name;
    TFQ_CONFIG_FIELDS(TFQ_PUT)
#undef TFQ_PUT
    j["assert"] = c.check;
    return j;
}

namespace detail {
template <class T>
void read_key(const nlohmann::json& j, const std::string& key, T& target) {
    try {
        target = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(key + ": type mismatch");
    }
    if constexpr (std::is_same_v<T, int>) {
        if (!j.at(key).is_number_integer()) throw ConfigError(key + ": type mismatch (expected integer)");
    } else if constexpr (std::is_same_v<T, double>) {
        if (!j.at(key).is_number()) throw ConfigError(key + ": type mismatch (expected number)");
    }
}
}  // namespace detail

/// Overlays keys from `j` on `base`; unknown keys and type mismatches are errors naming the key.
inline RunConfig from_json(const nlohmann::json& j, RunConfig base = {}) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = key == "assert";
#define TFQ_CHECK(name) known = known || key == #name;
        TFQ_CONFIG_FIELDS(TFQ_CHECK)
#undef TFQ_CHECK
        if (!known) throw ConfigError(key + ": unknown key");
    }
#define TFQ_GET(name) \
    if (j.contains(#name)) detail::read_key(j, #name, base.name);
    TFQ_CONFIG_FIELDS(TFQ_GET)
#undef TFQ_GET
    if (j.contains("assert")) detail::read_key(j, "assert", base.check);
    return base;
}

#undef TFQ_CONFIG_FIELDS

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j, base);
}

// ---------------------------------------------------------------------------------------------
// Command line

/// Result of parsing: either a config or an exit request (--help).
struct ParseOutcome {
    RunConfig config;
    bool exit_requested = false;
    int exit_code = 0;
    std::string message;
};

/// Precedence: command-line flags > --config file > defaults.
inline ParseOutcome parse_config(int argc, const char* const* argv) {
    CLI::App app{"Quadratic time-frequency distributions: Wigner, Born-Jordan and Cohen kernels", "tfq"};
    app.set_help_flag("-h,--help", "Print help");
    RunConfig flags;
    std::string config_path;

    app.add_option("command", flags.command, "wigner | bj | cohen | covariance | diamond | quantize-check")->required();
    app.add_option("--config", config_path, "JSON config file");
    auto* grid = app.add_option("--grid,--n-points", flags.n_points, "number of grid points N (even)");
    auto* xmax = app.add_option("--x-max", flags.x_max, "half width of the position window");
    auto* hbar = app.add_option("--hbar", flags.hbar, "reduced Planck constant (default 1/(2 pi))");
    auto* kernel = app.add_option("--kernel", flags.kernel, "wigner | bj | choi-williams");
    auto* sigma = app.add_option("--sigma", flags.kernel_sigma, "Choi-Williams width");
    auto* state = app.add_option("--state", flags.state, "coherent | squeezed | cat | diamond | file");
    auto* input = app.add_option("--input", flags.input, "sample file with 're im' lines");
    auto* x0 = app.add_option("--x0", flags.x0, "state centre, position");
    auto* p0 = app.add_option("--p0", flags.p0, "state centre, momentum");
    auto* mre = app.add_option("--m-re", flags.m_re, "Re M of a squeezed state");
    auto* mim = app.add_option("--m-im", flags.m_im, "Im M of a squeezed state");
    auto* radius = app.add_option("--radius", flags.radius, "distance of cat/diamond centres from the origin");
    auto* angle = app.add_option("--angle", flags.angle, "cat/diamond base angle (radians)");
    auto* steps = app.add_option("--steps", flags.steps, "number of diamond angles");
    auto* final_angle = app.add_option("--final-angle", flags.final_angle, "last diamond angle (radians)");
    auto* rho = app.add_option("--rho", flags.rho, "interference disk radius");
    auto* oversample = app.add_option("--oversample", flags.oversample, "field upsampling for disk masses");
    auto* map = app.add_option("--map", flags.map, "rotation | shear | scale | fourier");
    auto* map_param = app.add_option("--map-param", flags.map_param, "angle, shear or scale parameter");
    auto* out = app.add_option("--out", flags.output_dir, "output directory");
    auto* formats = app.add_option("--format", flags.formats, "csv, pgm, bin (repeatable)")->delimiter(',');
    auto* check = app.add_flag("--assert", flags.check, "exit non-zero if a checked property fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return {{}, true, 0, app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    cfg.command = flags.command;
    auto take = [](CLI::Option* opt, auto& dst, const auto& src) {
        if (opt->count() > 0) dst = src;
    };
    take(grid, cfg.n_points, flags.n_points);
    take(xmax, cfg.x_max, flags.x_max);
    take(hbar, cfg.hbar, flags.hbar);
    take(kernel, cfg.kernel, flags.kernel);
    take(sigma, cfg.kernel_sigma, flags.kernel_sigma);
    take(state, cfg.state, flags.state);
    take(input, cfg.input, flags.input);
    take(x0, cfg.x0, flags.x0);
    take(p0, cfg.p0, flags.p0);
    take(mre, cfg.m_re, flags.m_re);
    take(mim, cfg.m_im, flags.m_im);
    take(radius, cfg.radius, flags.radius);
    take(angle, cfg.angle, flags.angle);
    take(steps, cfg.steps, flags.steps);
    take(final_angle, cfg.final_angle, flags.final_angle);
    take(rho, cfg.rho, flags.rho);
    take(oversample, cfg.oversample, flags.oversample);
    take(map, cfg.map, flags.map);
    take(map_param, cfg.map_param, flags.map_param);
    take(out, cfg.output_dir, flags.output_dir);
    take(formats, cfg.formats, flags.formats);
    take(check, cfg.check, flags.check);
    if (input->count() > 0 && state->count() == 0) cfg.state = "file";
    cfg.validate();
    return {cfg, false, 0, {}};
}

inline ParseOutcome parse_config(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"tfq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tfq
