#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "taxisfv/amr.hpp"
#include "taxisfv/model.hpp"
#include "taxisfv/time_integration.hpp"

namespace taxisfv {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PresetId { I, II, TwoD, Reduced };

[[nodiscard]] std::string_view preset_name(PresetId p) noexcept;
[[nodiscard]] std::optional<PresetId> parse_preset(std::string_view name) noexcept;

/// Everything needed to reproduce a run. Defaults are those of preset I at desk scale.
struct RunConfig {
    PresetId preset = PresetId::I;
    bool paper_scale = false;

    std::string parameter_set = "P";
    UpaParameters upa;
    ReducedParameters reduced;
    /// Flux saturation S (reduced model only).
    std::optional<double> saturation;
    /// Width of the Gaussian initial bump.
    double epsilon = 5e-3;

    Method method = Method::Imex3;
    double domain_a = 0.0;
    double domain_b = 5.0;
    std::size_t cells = 2000;
    double t_end = 60.0;
    double cfl = 0.49;
    double tau_max = 0.1;
    double tol = 1e-6;
    /// Snapshot spacing in time; 0 writes the final state only.
    double output_interval = 0.0;

    std::size_t reference_cells = 20000;
    std::vector<std::size_t> test_cells;

    bool amr = false;
    AmrConfig amr_config;
    /// Sampling interval of E(t) in the AMR benchmark.
    double error_interval = 0.5;
    /// Uniform grids compared against in the AMR benchmark.
    std::vector<std::size_t> amr_uniform_cells;

    /// Display window of the 2D run.
    double window_a = 0.0;
    double window_b = 5.0;

    [[nodiscard]] StepControllerConfig controller() const;
    [[nodiscard]] DiscretizationOptions discretization_options() const;
    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

using ConfigValue = std::variant<bool, long long, double, std::string>;

/// Ordered key/value echo of every setting, using the config-file key names.
[[nodiscard]] std::vector<std::pair<std::string, ConfigValue>> config_entries(const RunConfig& c);

/// Parses `key = value` lines; `#` starts a comment. Duplicate keys are an error.
[[nodiscard]] std::map<std::string, std::string> parse_key_values(std::string_view text);
[[nodiscard]] std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& p);

/// Applies one setting. Model parameters resolve against the active preset's model.
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);

/// Applies a parsed file: `preset` and `paper_scale` first (resetting to preset
/// defaults), then every other key.
void apply_settings(RunConfig& c, const std::map<std::string, std::string>& kv);

}  // namespace taxisfv
