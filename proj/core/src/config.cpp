#include "taxisfv/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "taxisfv/presets.hpp"

namespace taxisfv {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(v) + "'");
    }
    return x;
}

long long to_integer(std::string_view key, std::string_view v) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(v) + "'");
    }
    return x;
}

std::size_t to_count(std::string_view key, std::string_view v) {
    const long long x = to_integer(key, v);
    if (x <= 0) throw ConfigError("'" + std::string(key) + "' must be positive");
    return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(v) + "'");
}

std::vector<std::size_t> to_count_list(std::string_view key, std::string_view v) {
    std::vector<std::size_t> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(to_count(key, trim(v.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("'" + std::string(key) + "' must list at least one value");
    return out;
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

std::string_view preset_name(PresetId p) noexcept {
    switch (p) {
        case PresetId::I: return "I";
        case PresetId::II: return "II";
        case PresetId::TwoD: return "2D";
        case PresetId::Reduced: return "REDUCED";
    }
    return "I";
}

std::optional<PresetId> parse_preset(std::string_view name) noexcept {
    for (const PresetId p : {PresetId::I, PresetId::II, PresetId::TwoD, PresetId::Reduced}) {
        if (preset_name(p) == name) return p;
    }
    return std::nullopt;
}

StepControllerConfig RunConfig::controller() const {
    StepControllerConfig s;
    s.cfl = cfl;
    s.tol_floor = tol;
    s.tol_relative = tol;
    return s;
}

DiscretizationOptions RunConfig::discretization_options() const {
    DiscretizationOptions o;
    o.first_order_fluxes = uses_first_order_fluxes(method);
    o.tau_max = tau_max;
    return o;
}

void RunConfig::validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    if (!(domain_a < domain_b)) throw ConfigError("domain_a must be smaller than domain_b");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    if (!(tau_max > 0.0)) throw ConfigError("tau_max must be positive");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(output_interval >= 0.0)) throw ConfigError("output_interval must be nonnegative");
    if (!(error_interval > 0.0)) throw ConfigError("error_interval must be positive");
    if (saturation && !(*saturation > 0.0)) throw ConfigError("S must be positive");
    if (saturation && preset != PresetId::Reduced) {
        throw ConfigError("flux saturation S applies to the REDUCED preset only");
    }
    if (cells < kMinCells) throw ConfigError("cells must be at least 5");
    if (parameter_set != "P") throw ConfigError("unknown parameter set '" + parameter_set + "'");
    for (const auto& f : UpaParameters::fields()) {
        const double v = upa.*(f.member);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("parameter " + std::string(f.name) + " must be finite and nonnegative");
        }
    }
    for (const auto& f : ReducedParameters::fields()) {
        const double v = reduced.*(f.member);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("parameter " + std::string(f.name) + " must be finite and nonnegative");
        }
    }
    if (preset == PresetId::TwoD && needs_coupled_jacobian(method)) {
        throw ConfigError("method " + std::string(method_name(method)) + " is not available in 2D");
    }
    try {
        amr_config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (amr && preset == PresetId::TwoD) throw ConfigError("adaptive grids are 1D only");
}

std::vector<std::pair<std::string, ConfigValue>> config_entries(const RunConfig& c) {
    std::vector<std::pair<std::string, ConfigValue>> e;
    e.emplace_back("preset", std::string(preset_name(c.preset)));
    e.emplace_back("paper_scale", c.paper_scale);
    e.emplace_back("parameter_set", c.parameter_set);
    if (c.preset == PresetId::Reduced) {
        for (const auto& f : ReducedParameters::fields()) {
            e.emplace_back(std::string(f.name), c.reduced.*(f.member));
        }
        if (c.saturation) e.emplace_back("S", *c.saturation);
    } else {
        for (const auto& f : UpaParameters::fields()) {
            e.emplace_back(std::string(f.name), c.upa.*(f.member));
        }
    }
    e.emplace_back("epsilon", c.epsilon);
    e.emplace_back("method", std::string(method_name(c.method)));
    e.emplace_back("domain_a", c.domain_a);
    e.emplace_back("domain_b", c.domain_b);
    e.emplace_back("cells", static_cast<long long>(c.cells));
    e.emplace_back("t_end", c.t_end);
    e.emplace_back("cfl", c.cfl);
    e.emplace_back("tau_max", c.tau_max);
    e.emplace_back("tol", c.tol);
    e.emplace_back("output_interval", c.output_interval);
    e.emplace_back("reference_cells", static_cast<long long>(c.reference_cells));
    e.emplace_back("test_cells", join(c.test_cells));
    e.emplace_back("amr", c.amr);
    e.emplace_back("monitor", std::string(monitor_name(c.amr_config.monitor.kind)));
    e.emplace_back("c_ref", c.amr_config.monitor.c_ref);
    e.emplace_back("c_coa", c.amr_config.monitor.c_coa);
    e.emplace_back("n_ref", static_cast<long long>(c.amr_config.n_ref));
    e.emplace_back("n_coa", static_cast<long long>(c.amr_config.n_coa));
    e.emplace_back("l_max", static_cast<long long>(c.amr_config.l_max));
    e.emplace_back("smooth", c.amr_config.smooth);
    e.emplace_back("cadence", static_cast<long long>(c.amr_config.cadence));
    e.emplace_back("error_interval", c.error_interval);
    e.emplace_back("amr_uniform_cells", join(c.amr_uniform_cells));
    e.emplace_back("window_a", c.window_a);
    e.emplace_back("window_b", c.window_b);
    return e;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read config file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "preset") {
        const auto p = parse_preset(value);
        if (!p) throw ConfigError("unknown preset '" + std::string(value) + "'");
        c = preset_config(*p, c.paper_scale);
        return;
    }
    if (key == "paper_scale") {
        c = preset_config(c.preset, to_bool(key, value));
        return;
    }
    if (c.preset == PresetId::Reduced) {
        if (double* v = c.reduced.find(key)) {
            *v = to_double(key, value);
            return;
        }
    } else if (double* v = c.upa.find(key)) {
        *v = to_double(key, value);
        return;
    }
    auto& amr = c.amr_config;
    if (key == "parameter_set") {
        c.parameter_set = std::string(value);
        if (c.parameter_set != "P") throw ConfigError("unknown parameter set '" + c.parameter_set + "'");
    } else if (key == "S") {
        c.saturation = to_double(key, value);
    } else if (key == "epsilon") {
        c.epsilon = to_double(key, value);
    } else if (key == "method") {
        const auto m = parse_method(value);
        if (!m) throw ConfigError("unknown method '" + std::string(value) + "'");
        c.method = *m;
    } else if (key == "domain_a") {
        c.domain_a = to_double(key, value);
    } else if (key == "domain_b") {
        c.domain_b = to_double(key, value);
    } else if (key == "cells") {
        c.cells = to_count(key, value);
    } else if (key == "t_end") {
        c.t_end = to_double(key, value);
    } else if (key == "cfl") {
        c.cfl = to_double(key, value);
    } else if (key == "tau_max") {
        c.tau_max = to_double(key, value);
    } else if (key == "tol") {
        c.tol = to_double(key, value);
    } else if (key == "output_interval") {
        c.output_interval = to_double(key, value);
    } else if (key == "reference_cells") {
        c.reference_cells = to_count(key, value);
    } else if (key == "test_cells") {
        c.test_cells = to_count_list(key, value);
    } else if (key == "amr") {
        c.amr = to_bool(key, value);
    } else if (key == "monitor") {
        const auto m = parse_monitor(value);
        if (!m) throw ConfigError("unknown monitor '" + std::string(value) + "'");
        amr.monitor.kind = *m;
        if (*m == MonitorKind::VelocityError) {
            amr.monitor.c_ref = 7e-4;
            amr.monitor.c_coa = 4e-4;
        } else {
            amr.monitor.c_ref = 55.0;
            amr.monitor.c_coa = 35.0;
        }
    } else if (key == "c_ref") {
        amr.monitor.c_ref = to_double(key, value);
    } else if (key == "c_coa") {
        amr.monitor.c_coa = to_double(key, value);
    } else if (key == "n_ref") {
        amr.n_ref = static_cast<int>(to_count(key, value));
    } else if (key == "n_coa") {
        amr.n_coa = static_cast<int>(to_count(key, value));
    } else if (key == "l_max") {
        amr.l_max = static_cast<int>(to_count(key, value));
    } else if (key == "smooth") {
        amr.smooth = to_bool(key, value);
    } else if (key == "cadence") {
        amr.cadence = static_cast<int>(to_count(key, value));
    } else if (key == "error_interval") {
        c.error_interval = to_double(key, value);
    } else if (key == "amr_uniform_cells") {
        c.amr_uniform_cells = to_count_list(key, value);
    } else if (key == "window_a") {
        c.window_a = to_double(key, value);
    } else if (key == "window_b") {
        c.window_b = to_double(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

void apply_settings(RunConfig& c, const std::map<std::string, std::string>& kv) {
    bool paper = c.paper_scale;
    if (const auto it = kv.find("paper_scale"); it != kv.end()) paper = to_bool("paper_scale", it->second);
    PresetId preset = c.preset;
    if (const auto it = kv.find("preset"); it != kv.end()) {
        const auto p = parse_preset(it->second);
        if (!p) throw ConfigError("unknown preset '" + it->second + "'");
        preset = *p;
    }
    if (kv.count("preset") || kv.count("paper_scale")) c = preset_config(preset, paper);
    // The monitor kind resets its thresholds, so it must precede c_ref / c_coa.
    if (const auto it = kv.find("monitor"); it != kv.end()) apply_setting(c, it->first, it->second);
    for (const auto& [key, value] : kv) {
        if (key == "preset" || key == "paper_scale" || key == "monitor") continue;
        apply_setting(c, key, value);
    }
}

}  // namespace taxisfv
