#include "taxisfv/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "taxisfv/amr.hpp"
#include "taxisfv/discretization.hpp"
#include "taxisfv/linear_solver.hpp"
#include "taxisfv/model.hpp"
#include "taxisfv/presets.hpp"
#include "taxisfv/snapshot_io.hpp"
#include "taxisfv/split_problem.hpp"
#include "taxisfv/time_integration.hpp"

namespace taxisfv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> masses_1d(const Grid1D& grid, std::span<const double> w, std::size_t n) {
    std::vector<double> m(n, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t s = 0; s < n; ++s) m[s] += grid.width(i) * w[i * n + s];
    }
    return m;
}

std::vector<double> sorted_samples(const std::vector<double>& samples, double t_end) {
    std::vector<double> out;
    for (double t : samples) {
        if (t >= 0.0 && t <= t_end * (1.0 + 1e-12)) out.push_back(std::min(t, t_end));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string failure_text(const std::exception& e) { return e.what(); }

constexpr char kCacheMagic[8] = {'T', 'X', 'F', 'V', 'R', 'E', 'F', '1'};

}  // namespace

RunResult1D run_1d(const RunConfig& c, const std::vector<double>& sample_times,
                   const SampleCallback1D& on_sample, const StepCallback1D& on_step) {
    c.validate();
    if (c.preset == PresetId::TwoD) throw ConfigError("run_1d: the 2D preset needs run_2d");
    Grid1D grid = Grid1D::uniform(c.domain_a, c.domain_b, c.cells);
    std::vector<double> w = initial_state_1d(c, grid);
    return run_1d_from(c, std::move(grid), std::move(w), sample_times, on_sample, on_step);
}

RunResult1D run_1d_from(const RunConfig& c, Grid1D grid, std::vector<double> state,
                        const std::vector<double>& sample_times, const SampleCallback1D& on_sample,
                        const StepCallback1D& on_step) {
    c.validate();
    const auto start = Clock::now();
    const SpeciesSystem system = build_system(c);
    const std::size_t n = system.n_species();
    if (state.size() != grid.size() * n) throw std::invalid_argument("run_1d_from: state size");
    const DiscretizationOptions options = c.discretization_options();
    auto problem = std::make_unique<Problem1D>(Discretization1D(grid, system, options));
    TimeIntegrator integrator(c.method, c.controller());

    const std::vector<double> samples = sorted_samples(sample_times, c.t_end);
    std::size_t next_sample = 0;
    const double snap = 1e-12 * std::max(1.0, std::abs(c.t_end));

    RunResult1D r;
    double t = 0.0;
    auto emit_samples = [&] {
        while (next_sample < samples.size() && samples[next_sample] <= t + snap) {
            if (on_sample) on_sample(samples[next_sample], grid, state);
            ++next_sample;
        }
    };

    auto do_adapt = [&] {
        const std::vector<double> before = masses_1d(grid, state, n);
        AdaptResult a = adapt(grid, state, system, c.amr_config, options);
        ++r.adapt.adapts;
        if (!a.changed()) return;
        ++r.adapt.grid_changes;
        const std::vector<double> after = masses_1d(a.grid, a.state, n);
        for (std::size_t s = 0; s < n; ++s) {
            const double scale = std::max(std::abs(before[s]), std::numeric_limits<double>::min());
            r.adapt.worst_mass_error =
                std::max(r.adapt.worst_mass_error, std::abs(after[s] - before[s]) / scale);
        }
        grid = std::move(a.grid);
        state = std::move(a.state);
        if (c.amr_config.smooth && !is_smooth(grid)) r.adapt.smooth_respected = false;
        problem = std::make_unique<Problem1D>(Discretization1D(grid, system, options));
        integrator.reset();
    };

    emit_samples();
    r.cell_history.emplace_back(0.0, grid.size());
    const std::size_t cadence = std::max<std::size_t>(1, c.amr_config.cadence);
    while (t < c.t_end) {
        if (c.amr && r.steps % cadence == 0) do_adapt();
        double stop = c.t_end;
        if (next_sample < samples.size()) stop = std::min(stop, samples[next_sample]);
        const StepInfo info = integrator.advance(*problem, state, t, stop);
        t += info.tau;
        if (std::abs(stop - t) <= snap) t = stop;
        ++r.steps;
        r.cell_history.emplace_back(t, grid.size());
        if (on_step) on_step(t, info.tau, grid, state);
        emit_samples();
    }
    r.rejected = integrator.rejected_steps();
    r.t = t;
    r.grid = std::move(grid);
    r.state = std::move(state);
    r.wall_seconds = seconds_since(start);
    return r;
}

double average_cells(const RunResult1D& r, double t_max) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [t, cells] : r.cell_history) {
        if (t > t_max * (1.0 + 1e-12)) break;
        sum += static_cast<double>(cells);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

std::size_t max_cells(const RunResult1D& r, double t_max) {
    std::size_t m = 0;
    for (const auto& [t, cells] : r.cell_history) {
        if (t > t_max * (1.0 + 1e-12)) break;
        m = std::max(m, cells);
    }
    return m;
}

// ---------------------------------------------------------------------------

ReferenceCache::ReferenceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ReferenceCache::digest(const std::string& key) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::filesystem::path ReferenceCache::path_for(const std::string& key) const {
    return dir_ / ("ref-" + digest(key) + ".bin");
}

std::optional<std::vector<double>> ReferenceCache::load(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    char magic[sizeof kCacheMagic];
    std::uint64_t key_len = 0;
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
        return std::nullopt;
    }
    if (!in.read(reinterpret_cast<char*>(&key_len), sizeof key_len) || key_len > (1u << 20)) {
        return std::nullopt;
    }
    std::string stored(key_len, '\0');
    if (!in.read(stored.data(), static_cast<std::streamsize>(key_len)) || stored != key) {
        return std::nullopt;
    }
    std::uint64_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) return std::nullopt;
    std::vector<double> data(count);
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(count * sizeof(double)))) {
        return std::nullopt;
    }
    return data;
}

void ReferenceCache::store(const std::string& key, std::span<const double> data) const {
    ensure_directory(dir_);
    const auto final_path = path_for(key);
    auto tmp = final_path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        const std::uint64_t key_len = key.size();
        const std::uint64_t count = data.size();
        out.write(kCacheMagic, sizeof kCacheMagic);
        out.write(reinterpret_cast<const char*>(&key_len), sizeof key_len);
        out.write(key.data(), static_cast<std::streamsize>(key.size()));
        out.write(reinterpret_cast<const char*>(&count), sizeof count);
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string reference_key(const RunConfig& c, const std::vector<double>& sample_times) {
    // Entries that do not influence a uniform reference run are left out.
    static const char* const kIgnored[] = {
        "paper_scale",       "cells",    "test_cells", "amr",          "monitor",
        "c_ref",             "c_coa",    "n_ref",      "n_coa",        "l_max",
        "smooth",            "cadence",  "error_interval", "amr_uniform_cells",
        "output_interval",   "window_a", "window_b"};
    std::ostringstream key;
    key << "reference;v1;";
    for (const auto& [k, v] : config_entries(c)) {
        if (std::find(std::begin(kIgnored), std::end(kIgnored), k) != std::end(kIgnored)) continue;
        key << k << '=';
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, double>) {
                    key << format_double(x);
                } else {
                    key << x;
                }
            },
            v);
        key << ';';
    }
    key << "samples=";
    for (double t : sample_times) key << format_double(t) << ',';
    return key.str();
}

ReferenceSolution compute_reference(const RunConfig& c, const std::vector<double>& sample_times,
                                    const ReferenceCache* cache) {
    RunConfig ref = c;
    ref.method = Method::Imex3;
    ref.cells = c.reference_cells;
    ref.amr = false;
    const std::vector<double> samples = sorted_samples(sample_times, ref.t_end);
    const std::string key = reference_key(ref, samples);
    const std::size_t expected_rows = samples.empty() ? 1 : samples.size();

    ReferenceSolution out{Grid1D::uniform(ref.domain_a, ref.domain_b, ref.cells), {}, false, 0.0};
    if (cache) {
        if (auto data = cache->load(key); data && data->size() == expected_rows * ref.cells) {
            for (std::size_t k = 0; k < expected_rows; ++k) {
                out.c.emplace_back(data->begin() + static_cast<std::ptrdiff_t>(k * ref.cells),
                                   data->begin() + static_cast<std::ptrdiff_t>((k + 1) * ref.cells));
            }
            out.from_cache = true;
            return out;
        }
    }
    const auto start = Clock::now();
    const std::size_t n = build_system(ref).n_species();
    RunResult1D run = run_1d(ref, samples, [&](double, const Grid1D&, std::span<const double> w) {
        out.c.push_back(species_values(w, n, 0));
    });
    if (samples.empty()) out.c.push_back(species_values(run.state, n, 0));
    out.wall_seconds = seconds_since(start);
    if (cache) {
        std::vector<double> flat;
        flat.reserve(expected_rows * ref.cells);
        for (const auto& v : out.c) flat.insert(flat.end(), v.begin(), v.end());
        cache->store(key, flat);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<double> ConvergenceResult::eoc_between(std::size_t n1, std::size_t n2) const {
    const auto e1 = error_at(n1);
    const auto e2 = error_at(n2);
    if (!e1 || !e2 || !(*e1 > 0.0) || !(*e2 > 0.0) || n2 <= n1) return std::nullopt;
    return eoc(*e1, *e2, static_cast<double>(n1), static_cast<double>(n2));
}

std::optional<double> ConvergenceResult::error_at(std::size_t n) const {
    for (const auto& r : reports) {
        if (r.cells == n && !r.failed && std::isfinite(r.error)) return r.error;
    }
    return std::nullopt;
}

ConvergenceResult run_convergence_study(const RunConfig& c, const ReferenceCache* cache) {
    c.validate();
    ConvergenceResult result;
    result.method = c.method;
    result.reference_cells = c.reference_cells;
    const ReferenceSolution ref = compute_reference(c, {}, cache);
    result.reference_cached = ref.from_cache;
    result.reference_seconds = ref.wall_seconds;

    std::vector<std::size_t> cells = c.test_cells;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (std::size_t N : cells) {
        RunConfig run = c;
        run.cells = N;
        run.amr = false;
        ErrorReport rep;
        rep.cells = N;
        const auto start = Clock::now();
        try {
            const RunResult1D r = run_1d(run);
            rep.steps = r.steps;
            const auto cN = species_values(r.state, r.state.size() / r.grid.size(), 0);
            rep.error = discrete_l1_error(r.grid, cN, ref.grid, ref.c.back());
        } catch (const NumericalFailure& e) {
            rep.failed = true;
            rep.failure = failure_text(e);
        } catch (const ConvergenceFailure& e) {
            rep.failed = true;
            rep.failure = failure_text(e);
        } catch (const LinearSolverError& e) {
            rep.failed = true;
            rep.failure = failure_text(e);
        }
        if (rep.failed) rep.error = std::numeric_limits<double>::quiet_NaN();
        rep.wall_seconds = seconds_since(start);
        result.reports.push_back(std::move(rep));
    }
    attach_eocs(result.reports);
    result.verdict = assess_convergence(result.reports);
    return result;
}

// ---------------------------------------------------------------------------

AmrBenchmarkResult run_amr_benchmark(const RunConfig& c, const ReferenceCache* cache) {
    c.validate();
    if (!(c.error_interval > 0.0)) throw ConfigError("error_interval must be positive");
    std::vector<double> samples;
    const auto count = static_cast<std::size_t>(std::floor(c.t_end / c.error_interval + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) samples.push_back(static_cast<double>(k) * c.error_interval);
    if (c.t_end - samples.back() > 1e-12 * std::max(1.0, c.t_end)) samples.push_back(c.t_end);

    AmrBenchmarkResult result;
    result.reference_cells = c.reference_cells;
    const ReferenceSolution ref = compute_reference(c, samples, cache);
    result.reference_cached = ref.from_cache;
    const std::size_t n = build_system(c).n_species();

    auto sampler = [&](ErrorSeries& series) {
        return [&, k = std::size_t{0}](double t, const Grid1D& grid, std::span<const double> w) mutable {
            const auto cv = species_values(w, n, 0);
            series.t.push_back(t);
            series.error.push_back(discrete_l1_error(grid, cv, ref.grid, ref.c.at(k++), false));
            series.cells.push_back(grid.size());
        };
    };

    RunConfig adaptive = c;
    adaptive.amr = true;
    result.adaptive_run = run_1d(adaptive, samples, sampler(result.adaptive));

    for (std::size_t N : c.amr_uniform_cells) {
        RunConfig uni = c;
        uni.amr = false;
        uni.cells = N;
        ErrorSeries& series = result.uniform[N];
        (void)run_1d(uni, samples, sampler(series));
    }
    return result;
}

// ---------------------------------------------------------------------------

double estimate_2d_memory(const RunConfig& c) {
    const double cells = static_cast<double>(c.cells) * static_cast<double>(c.cells);
    const double unknowns = cells * 5.0;
    // Stage and work buffers of the integrator plus face data and CG vectors.
    const double vectors = 80.0;
    const double operators = 6.0 * 5.0 * 16.0;
    return unknowns * 8.0 * vectors + cells * operators;
}

Run2DResult run_2d(const RunConfig& c, const SnapshotCallback2D& on_snapshot) {
    c.validate();
    if (c.preset != PresetId::TwoD) throw ConfigError("run_2d needs the 2D preset");
    const auto start = Clock::now();
    const int cells = static_cast<int>(c.cells);
    Grid2D grid = Grid2D::square(c.domain_a, c.domain_b, cells, cells);
    const SpeciesSystem system = build_system(c);
    const std::size_t n = system.n_species();
    std::vector<double> w = initial_state_2d(c, grid);
    Problem2D problem(Discretization2D(grid, system, c.discretization_options()));
    TimeIntegrator integrator(c.method, c.controller());

    std::vector<char> intact(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k) intact[k] = w[k * n + kEcm] >= 1.0 - 1e-12;

    Run2DResult r;
    std::vector<double> previous;
    auto snapshot = [&](double t) {
        Snapshot2DStats s;
        s.t = t;
        s.min_c = std::numeric_limits<double>::infinity();
        s.max_c = -std::numeric_limits<double>::infinity();
        s.min_v_window = std::numeric_limits<double>::infinity();
        s.min_v_window_intact = std::numeric_limits<double>::infinity();
        s.mass.assign(n, 0.0);
        double max_abs = 0.0;
        double max_diff = 0.0;
        for (int j = 1; j <= grid.ny(); ++j) {
            for (int i = 1; i <= grid.nx(); ++i) {
                const std::size_t k = grid.index(i, j);
                const double cval = w[k * n + kCancer];
                s.min_c = std::min(s.min_c, cval);
                s.max_c = std::max(s.max_c, cval);
                for (std::size_t q = 0; q < n; ++q) {
                    const double x = w[k * n + q];
                    if (!std::isfinite(x)) s.finite = false;
                    s.mass[q] += grid.cell_volume() * x;
                    max_abs = std::max(max_abs, std::abs(x));
                    if (!previous.empty()) max_diff = std::max(max_diff, std::abs(x - previous[k * n + q]));
                }
                const double x = grid.x(i);
                const double y = grid.y(j);
                if (x >= c.window_a && x <= c.window_b && y >= c.window_a && y <= c.window_b) {
                    const double v = w[k * n + kEcm];
                    s.min_v_window = std::min(s.min_v_window, v);
                    if (intact[k]) s.min_v_window_intact = std::min(s.min_v_window_intact, v);
                }
            }
        }
        s.relative_change = (previous.empty() || max_abs == 0.0) ? 0.0 : max_diff / max_abs;
        previous = w;
        r.snapshots.push_back(std::move(s));
        if (on_snapshot) on_snapshot(t, grid, w);
    };

    std::vector<double> times;
    if (c.output_interval > 0.0) {
        for (double t = c.output_interval; t < c.t_end * (1.0 - 1e-12);
             t = static_cast<double>(times.size() + 2) * c.output_interval) {
            times.push_back(t);
        }
    }
    times.push_back(c.t_end);

    const double snap = 1e-12 * std::max(1.0, std::abs(c.t_end));
    double t = 0.0;
    snapshot(0.0);
    for (double stop : times) {
        while (t < stop) {
            const StepInfo info = integrator.advance(problem, w, t, stop);
            t += info.tau;
            if (std::abs(stop - t) <= snap) t = stop;
            ++r.steps;
        }
        check_finite(w, n, t);
        snapshot(stop);
    }
    r.t = t;
    r.max_cg_iterations = problem.max_cg_iterations();
    r.grid = std::move(grid);
    r.state = std::move(w);
    r.wall_seconds = seconds_since(start);
    return r;
}

// ---------------------------------------------------------------------------

GrowthCheck reduced_growth_check(const ReducedParameters& p, double k, double t_end, double amplitude) {
    if (!(k > 0.0)) throw std::invalid_argument("reduced_growth_check: k must be positive");
    const SpeciesSystem system = make_reduced_system(p);
    const std::vector<double> steady{1.0, p.alpha / p.beta};
    const double lambda = lambda_k(system, steady, k);

    // Dominant eigenvector of J_R - k J_T with e_c = 1.
    std::vector<double> jr(4);
    system.reaction_jacobian(steady, jr);
    const auto jt = transport_jacobian(system, steady);
    for (std::size_t i = 0; i < 4; ++i) jr[i] -= k * jt[i];
    const double e_u = jr[1] != 0.0 ? (lambda - jr[0]) / jr[1] : jr[2] / (lambda - jr[3]);

    const double q = std::sqrt(k);
    const double half_periods = std::ceil(10.0 * q / std::numbers::pi);
    const double length = half_periods * std::numbers::pi / q;
    const auto cells = static_cast<std::size_t>(
        std::max(400.0, std::ceil(64.0 * length * q / (2.0 * std::numbers::pi))));

    RunConfig rc = preset_config(PresetId::Reduced);
    rc.reduced = p;
    rc.saturation.reset();
    rc.method = Method::Imex3;
    rc.domain_a = 0.0;
    rc.domain_b = length;
    rc.cells = cells;
    rc.t_end = t_end;

    Grid1D grid = Grid1D::uniform(0.0, length, cells);
    std::vector<double> w(2 * cells);
    for (std::size_t i = 0; i < cells; ++i) {
        // Cell average of cos(q x) over the cell.
        const double xl = grid.interface(i);
        const double xr = grid.interface(i + 1);
        const double avg = (std::sin(q * xr) - std::sin(q * xl)) / (q * (xr - xl));
        w[2 * i] = steady[0] + amplitude * avg;
        w[2 * i + 1] = steady[1] + amplitude * e_u * avg;
    }
    auto coefficient = [&](const Grid1D& g, std::span<const double> state) {
        double sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double xl = g.interface(i);
            const double xr = g.interface(i + 1);
            sum += (state[2 * i] - steady[0]) * (std::sin(q * xr) - std::sin(q * xl)) / q;
        }
        return 2.0 * sum / length;
    };
    const double a0 = coefficient(grid, w);
    const RunResult1D r = run_1d_from(rc, grid, w);
    return {k, lambda, coefficient(r.grid, r.state) / a0, t_end};
}

}  // namespace taxisfv
