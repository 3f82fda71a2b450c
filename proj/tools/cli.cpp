#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "taxisfv/amr.hpp"
#include "taxisfv/config.hpp"
#include "taxisfv/linear_solver.hpp"
#include "taxisfv/metrics.hpp"
#include "taxisfv/presets.hpp"
#include "taxisfv/snapshot_io.hpp"
#include "taxisfv/stability.hpp"
#include "taxisfv/study.hpp"
#include "taxisfv/time_integration.hpp"

namespace taxisfv::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::string preset;
    std::string method;
    std::optional<std::size_t> cells;
    std::optional<double> cfl;
    std::optional<double> t_end;
    std::string config_file;
    std::string out_dir = "out";
    std::string cache_dir;
    bool paper_scale = false;
    std::vector<std::string> settings;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--preset", o.preset, "Experiment preset: I, II, 2D, REDUCED");
    sub->add_option("--method", o.method, "Time integrator, e.g. IMEX3, STRANG-CND");
    sub->add_option("--cells", o.cells, "Number of cells (per direction in 2D)");
    sub->add_option("--cfl", o.cfl, "CFL number in (0, 1] (default 0.49)");
    sub->add_option("--t-end", o.t_end, "Final time");
    sub->add_option("--config", o.config_file, "key = value configuration file");
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--paper-scale", o.paper_scale, "Full-size grids and final times");
    sub->add_option("--set", o.settings, "Extra key=value setting (repeatable)");
    sub->add_option("--cache", o.cache_dir, "Reference cache directory (default <out>/.cache)");
}

/// Preset from the flag, else the config file, else the subcommand default.
RunConfig resolve_config(const CommonOptions& o, PresetId fallback,
                         void (*subcommand_defaults)(RunConfig&) = nullptr) {
    std::map<std::string, std::string> kv;
    if (!o.config_file.empty()) kv = read_key_value_file(o.config_file);
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        for (const auto& [k, v] : parse_key_values(s)) kv[k] = v;
    }
    PresetId preset = fallback;
    if (const auto it = kv.find("preset"); it != kv.end()) {
        const auto p = parse_preset(it->second);
        if (!p) throw ConfigError("unknown preset '" + it->second + "'");
        preset = *p;
    }
    if (!o.preset.empty()) {
        const auto p = parse_preset(o.preset);
        if (!p) throw ConfigError("unknown preset '" + o.preset + "'");
        preset = *p;
    }
    bool paper = o.paper_scale;
    if (const auto it = kv.find("paper_scale"); it != kv.end() && !paper) {
        RunConfig probe;
        apply_setting(probe, "paper_scale", it->second);
        paper = probe.paper_scale;
    }
    kv.erase("preset");
    kv.erase("paper_scale");

    RunConfig c = preset_config(preset, paper);
    if (subcommand_defaults) subcommand_defaults(c);
    apply_settings(c, kv);
    if (!o.method.empty()) apply_setting(c, "method", o.method);
    if (o.cells) c.cells = *o.cells;
    if (o.cfl) c.cfl = *o.cfl;
    if (o.t_end) c.t_end = *o.t_end;
    c.validate();
    return c;
}

std::string time_tag(double t) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << t;
    return s.str();
}

std::vector<double> masses(const Grid1D& grid, std::span<const double> w, std::size_t n) {
    std::vector<double> m(n, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t s = 0; s < n; ++s) m[s] += grid.width(i) * w[i * n + s];
    }
    return m;
}

fs::path cache_dir(const CommonOptions& o) {
    return o.cache_dir.empty() ? fs::path(o.out_dir) / ".cache" : fs::path(o.cache_dir);
}

double physical_memory_bytes() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page <= 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(pages) * static_cast<double>(page);
}

// ---------------------------------------------------------------------------

int cmd_run(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = resolve_config(o, PresetId::I);
    if (c.preset == PresetId::TwoD) throw ConfigError("use run2d for the 2D preset");
    const fs::path dir = o.out_dir;
    ensure_directory(dir);
    const auto names = build_system(c).names();
    const std::size_t n = names.size();

    std::vector<double> samples{0.0};
    if (c.output_interval > 0.0) {
        for (double t = c.output_interval; t < c.t_end; t += c.output_interval) samples.push_back(t);
    }
    samples.push_back(c.t_end);

    MetricsWriter metrics(dir / "metrics.csv", names);
    {
        const Grid1D g0 = Grid1D::uniform(c.domain_a, c.domain_b, c.cells);
        const auto w0 = initial_state_1d(c, g0);
        metrics.row(0.0, 0.0, masses(g0, w0, n), g0.size(), std::numeric_limits<double>::quiet_NaN());
    }
    RunMetadata meta{"run", c, {}, {}, {}, {}};
    int code = kSuccess;
    try {
        const RunResult1D r = run_1d(
            c, samples,
            [&](double t, const Grid1D& g, std::span<const double> w) {
                write_snapshot_1d(dir / ("snapshot_t" + time_tag(t) + ".csv"), g, w, names);
            },
            [&](double t, double dt, const Grid1D& g, std::span<const double> w) {
                metrics.row(t, dt, masses(g, w, n), g.size(), std::numeric_limits<double>::quiet_NaN());
            });
        meta.timings["run"] = r.wall_seconds;
        meta.counts["steps"] = static_cast<long long>(r.steps);
        meta.counts["rejected_steps"] = static_cast<long long>(r.rejected);
        meta.counts["final_cells"] = static_cast<long long>(r.grid.size());
        meta.results.emplace_back("t_final", r.t);
        if (c.amr) {
            meta.results.emplace_back("average_cells", average_cells(r, c.t_end));
            meta.results.emplace_back("max_cells", static_cast<long long>(max_cells(r, c.t_end)));
            meta.results.emplace_back("worst_adapt_mass_error", r.adapt.worst_mass_error);
        }
        write_snapshot_1d(dir / "snapshot_final.csv", r.grid, r.state, names);
        out << "run: " << r.steps << " steps to t = " << r.t << " in " << r.wall_seconds << " s\n";
    } catch (const NumericalFailure& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    } catch (const ConvergenceFailure& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    } catch (const LinearSolverError& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    }
    write_metadata_json(dir / "run.json", meta);
    return code;
}

int cmd_convergence(const CommonOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o, PresetId::I);
    if (c.preset == PresetId::TwoD) throw ConfigError("convergence studies are 1D");
    if (c.test_cells.empty()) throw ConfigError("test_cells is empty");
    const auto max_test = *std::max_element(c.test_cells.begin(), c.test_cells.end());
    if (static_cast<double>(c.reference_cells) < kReferenceRatio * static_cast<double>(max_test)) {
        throw ConfigError("reference_cells must be at least 10x the largest test count");
    }
    const fs::path dir = o.out_dir;
    ensure_directory(dir);
    const ReferenceCache cache(cache_dir(o));
    const ConvergenceResult res = run_convergence_study(c, &cache);

    std::vector<double> N, E, EOC, wall, steps, failed;
    for (const auto& r : res.reports) {
        N.push_back(static_cast<double>(r.cells));
        E.push_back(r.error);
        EOC.push_back(r.eoc.value_or(std::numeric_limits<double>::quiet_NaN()));
        wall.push_back(r.wall_seconds);
        steps.push_back(static_cast<double>(r.steps));
        failed.push_back(r.failed ? 1.0 : 0.0);
        out << "N = " << r.cells << "  E = " << r.error;
        if (r.eoc) out << "  EOC = " << *r.eoc;
        if (r.failed) out << "  FAILED: " << r.failure;
        out << '\n';
    }
    write_columns_csv(dir / "convergence.csv", {"N", "E", "EOC", "wall_seconds", "steps", "failed"},
                      {N, E, EOC, wall, steps, failed});

    RunMetadata meta{"convergence", c, {}, {}, {}, {}};
    meta.timings["reference"] = res.reference_seconds;
    for (const auto& r : res.reports) meta.timings["N" + std::to_string(r.cells)] = r.wall_seconds;
    meta.counts["reference_cells"] = static_cast<long long>(res.reference_cells);
    meta.results.emplace_back("reference_cached", res.reference_cached);
    meta.results.emplace_back("nonconvergent", res.verdict.nonconvergent);
    meta.results.emplace_back("verdict", res.verdict.reason);
    meta.series["N"] = N;
    meta.series["E"] = E;
    meta.series["EOC"] = EOC;
    write_metadata_json(dir / "convergence.json", meta);

    if (res.verdict.nonconvergent) {
        out << "non-convergent: " << res.verdict.reason << '\n';
        return kNonConvergence;
    }
    return kSuccess;
}

int cmd_amr_bench(const CommonOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o, PresetId::I, &apply_amr_bench_defaults);
    if (c.preset == PresetId::TwoD) throw ConfigError("amr-bench is 1D");
    const fs::path dir = o.out_dir;
    ensure_directory(dir);
    const ReferenceCache cache(cache_dir(o));
    const AmrBenchmarkResult res = run_amr_benchmark(c, &cache);

    std::vector<std::string> header{"t", "E_amr", "cells_amr"};
    std::vector<std::vector<double>> cols(3);
    cols[0] = res.adaptive.t;
    cols[1] = res.adaptive.error;
    for (auto n : res.adaptive.cells) cols[2].push_back(static_cast<double>(n));
    for (const auto& [N, s] : res.uniform) {
        header.push_back("E_uniform_" + std::to_string(N));
        cols.push_back(s.error);
    }
    write_columns_csv(dir / "amr_error.csv", header, cols);

    std::vector<double> ht, hc;
    for (const auto& [t, n] : res.adaptive_run.cell_history) {
        ht.push_back(t);
        hc.push_back(static_cast<double>(n));
    }
    write_columns_csv(dir / "amr_cells.csv", {"t", "cells"}, {ht, hc});
    const auto names = build_system(c).names();
    write_snapshot_1d(dir / "snapshot_final.csv", res.adaptive_run.grid, res.adaptive_run.state, names);

    RunMetadata meta{"amr-bench", c, {}, {}, {}, {}};
    meta.timings["adaptive_run"] = res.adaptive_run.wall_seconds;
    meta.counts["steps"] = static_cast<long long>(res.adaptive_run.steps);
    meta.counts["adapts"] = static_cast<long long>(res.adaptive_run.adapt.adapts);
    meta.counts["grid_changes"] = static_cast<long long>(res.adaptive_run.adapt.grid_changes);
    meta.counts["reference_cells"] = static_cast<long long>(res.reference_cells);
    const double avg = average_cells(res.adaptive_run, c.t_end);
    const auto mx = max_cells(res.adaptive_run, c.t_end);
    meta.results.emplace_back("average_cells", avg);
    meta.results.emplace_back("max_cells", static_cast<long long>(mx));
    meta.results.emplace_back("worst_adapt_mass_error", res.adaptive_run.adapt.worst_mass_error);
    meta.results.emplace_back("smooth_respected", res.adaptive_run.adapt.smooth_respected);
    meta.results.emplace_back("reference_cached", res.reference_cached);
    write_metadata_json(dir / "amr_bench.json", meta);
    out << "amr-bench: average cells " << avg << ", max cells " << mx << '\n';
    return kSuccess;
}

int cmd_dispersion(const CommonOptions& o, double k_max, std::size_t samples,
                   const std::vector<double>& growth_k, std::ostream& out) {
    RunConfig c = resolve_config(o, PresetId::Reduced);
    const fs::path dir = o.out_dir;
    ensure_directory(dir);
    SpeciesSystem system = c.preset == PresetId::Reduced ? make_reduced_system(c.reduced)
                                                         : build_system(c);
    std::vector<double> guess;
    if (c.preset == PresetId::Reduced) {
        guess = {1.0, c.reduced.alpha / c.reduced.beta};
    } else {
        guess.assign(system.n_species(), 1.0);
    }
    const auto steady = find_reaction_steady_state(system, guess);
    const DispersionScan scan = scan_dispersion(system, steady, k_max, samples);
    write_columns_csv(dir / "dispersion.csv", {"k", "lambda"}, {scan.k, scan.lambda});
    std::vector<double> lo, hi;
    for (const auto& [a, b] : scan.unstable) {
        lo.push_back(a);
        hi.push_back(b);
        out << "unstable band: (" << std::setprecision(10) << a << ", " << b << ")\n";
    }
    if (scan.unstable.empty()) out << "no unstable band in [0, " << k_max << "]\n";
    write_columns_csv(dir / "dispersion_band.csv", {"k_lo", "k_hi"}, {lo, hi});

    RunMetadata meta{"dispersion", c, {}, {}, {}, {}};
    meta.series["steady_state"] = steady;
    meta.series["band_lo"] = lo;
    meta.series["band_hi"] = hi;
    if (!growth_k.empty()) {
        if (c.preset != PresetId::Reduced) throw ConfigError("--growth-k needs the REDUCED preset");
        std::vector<double> ks, lambdas, ratios;
        for (double k : growth_k) {
            const GrowthCheck g = reduced_growth_check(c.reduced, k);
            ks.push_back(g.k);
            lambdas.push_back(g.lambda);
            ratios.push_back(g.amplitude_ratio);
            out << "k = " << k << ": lambda = " << g.lambda << ", amplitude ratio " << g.amplitude_ratio
                << " (exp(lambda T) = " << std::exp(g.lambda * g.t_end) << ")\n";
        }
        write_columns_csv(dir / "growth.csv", {"k", "lambda", "amplitude_ratio"}, {ks, lambdas, ratios});
    }
    write_metadata_json(dir / "dispersion.json", meta);
    return kSuccess;
}

int cmd_run2d(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = resolve_config(o, PresetId::TwoD);
    if (c.preset != PresetId::TwoD) throw ConfigError("run2d needs the 2D preset");
    const double need = estimate_2d_memory(c);
    if (need > 0.8 * physical_memory_bytes()) {
        throw ConfigError("2D run needs about " + std::to_string(need / 1e9) + " GB");
    }
    const fs::path dir = o.out_dir;
    ensure_directory(dir);
    const auto names = build_system(c).names();
    RunMetadata meta{"run2d", c, {}, {}, {}, {}};
    int code = kSuccess;
    try {
        const Run2DResult r = run_2d(c, [&](double t, const Grid2D& g, std::span<const double> w) {
            write_snapshot_2d(dir / ("snapshot2d_t" + time_tag(t) + ".csv"), g, w, names, c.window_a,
                              c.window_b);
        });
        meta.timings["run"] = r.wall_seconds;
        meta.counts["steps"] = static_cast<long long>(r.steps);
        meta.counts["max_cg_iterations"] = r.max_cg_iterations;
        std::vector<double> t, minc, maxc, minv, minv_intact, change;
        std::vector<std::vector<double>> mass(names.size());
        for (const auto& s : r.snapshots) {
            t.push_back(s.t);
            minc.push_back(s.min_c);
            maxc.push_back(s.max_c);
            minv.push_back(s.min_v_window);
            minv_intact.push_back(s.min_v_window_intact);
            change.push_back(s.relative_change);
            for (std::size_t q = 0; q < names.size(); ++q) mass[q].push_back(s.mass[q]);
        }
        meta.series["t"] = t;
        meta.series["min_c"] = minc;
        meta.series["max_c"] = maxc;
        meta.series["min_v_window"] = minv;
        meta.series["min_v_window_intact"] = minv_intact;
        meta.series["relative_change"] = change;
        std::vector<std::string> header{"t", "min_c", "max_c", "min_v_window", "min_v_window_intact",
                                        "relative_change"};
        std::vector<std::vector<double>> cols{t, minc, maxc, minv, minv_intact, change};
        for (std::size_t q = 0; q < names.size(); ++q) {
            header.push_back("mass_" + names[q]);
            cols.push_back(mass[q]);
        }
        write_columns_csv(dir / "diagnostics2d.csv", header, cols);
        out << "run2d: " << r.steps << " steps to t = " << r.t << " in " << r.wall_seconds << " s\n";
    } catch (const NumericalFailure& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    } catch (const ConvergenceFailure& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    } catch (const LinearSolverError& e) {
        meta.results.emplace_back("failure", std::string(e.what()));
        err << "numerical failure: " << e.what() << '\n';
        code = kNumericalFailure;
    }
    write_metadata_json(dir / "run2d.json", meta);
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-volume solver for taxis-driven advection-reaction-diffusion systems"};
    app.require_subcommand(1);

    CommonOptions run_o, conv_o, amr_o, disp_o, twod_o;
    double k_max = 300.0;
    std::size_t k_samples = 601;
    std::vector<double> growth_k;

    auto* run_cmd = app.add_subcommand("run", "Single 1D simulation");
    add_common(run_cmd, run_o);
    auto* conv_cmd = app.add_subcommand("convergence", "Grid convergence study against a reference");
    add_common(conv_cmd, conv_o);
    auto* amr_cmd = app.add_subcommand("amr-bench", "Adaptive versus uniform grids");
    add_common(amr_cmd, amr_o);
    auto* disp_cmd = app.add_subcommand("dispersion", "Dispersion relation of the uniform steady state");
    add_common(disp_cmd, disp_o);
    disp_cmd->add_option("--k-max", k_max, "Largest wavenumber")->capture_default_str();
    disp_cmd->add_option("--samples", k_samples, "Scan points")->capture_default_str();
    disp_cmd->add_option("--growth-k", growth_k, "Wavenumbers for the simulated growth check");
    auto* twod_cmd = app.add_subcommand("run2d", "2D simulation");
    add_common(twod_cmd, twod_o);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run_o, out, err);
        if (*conv_cmd) return cmd_convergence(conv_o, out);
        if (*amr_cmd) return cmd_amr_bench(amr_o, out);
        if (*disp_cmd) return cmd_dispersion(disp_o, k_max, k_samples, growth_k, out);
        if (*twod_cmd) return cmd_run2d(twod_o, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const ConvergenceFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const SteadyStateError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kOtherError;
    }
    return kOtherError;
}

}  // namespace taxisfv::cli
