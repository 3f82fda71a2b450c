#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taxisfv/config.hpp"
#include "taxisfv/grid.hpp"
#include "taxisfv/metrics.hpp"
#include "taxisfv/stability.hpp"

namespace taxisfv {

// ---------------------------------------------------------------------------
// Single runs

struct AdaptStats {
    std::size_t adapts = 0;
    std::size_t grid_changes = 0;
    /// Largest |mass after - mass before| / |mass before| over adapts and species.
    double worst_mass_error = 0.0;
    /// False if any adapted grid broke |L_i - L_{i+1}| <= 1 while smoothing was on.
    bool smooth_respected = true;
};

struct RunResult1D {
    Grid1D grid;
    std::vector<double> state;
    double t = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double wall_seconds = 0.0;
    AdaptStats adapt;
    /// (t, cell count) after every accepted step, starting with t = 0.
    std::vector<std::pair<double, std::size_t>> cell_history;
};

/// After every accepted step.
using StepCallback1D = std::function<void(double t, double dt, const Grid1D&, std::span<const double>)>;
/// At every requested sample time (steps are clipped to land on them).
using SampleCallback1D = std::function<void(double t, const Grid1D&, std::span<const double>)>;

/**
 * Runs the 1D problem described by `c` (uniform grid of c.cells cells, adaptive
 * when c.amr). Throws NumericalFailure / ConvergenceFailure / LinearSolverError.
 */
[[nodiscard]] RunResult1D run_1d(const RunConfig& c, const std::vector<double>& sample_times = {},
                                 const SampleCallback1D& on_sample = {},
                                 const StepCallback1D& on_step = {});

/// As run_1d, starting from the given grid and cell-major state at t = 0.
[[nodiscard]] RunResult1D run_1d_from(const RunConfig& c, Grid1D grid, std::vector<double> state,
                                      const std::vector<double>& sample_times = {},
                                      const SampleCallback1D& on_sample = {},
                                      const StepCallback1D& on_step = {});

/// Step-averaged and maximal cell counts over steps with t <= t_max.
[[nodiscard]] double average_cells(const RunResult1D& r, double t_max);
[[nodiscard]] std::size_t max_cells(const RunResult1D& r, double t_max);

// ---------------------------------------------------------------------------
// Reference solutions

/// Content-addressed store of reference data, keyed by a canonical description.
class ReferenceCache {
public:
    explicit ReferenceCache(std::filesystem::path dir);
    [[nodiscard]] std::optional<std::vector<double>> load(const std::string& key) const;
    void store(const std::string& key, std::span<const double> data) const;
    [[nodiscard]] std::filesystem::path path_for(const std::string& key) const;
    [[nodiscard]] static std::string digest(const std::string& key);

private:
    std::filesystem::path dir_;
};

/// Canonical key: every config entry plus the sample times.
[[nodiscard]] std::string reference_key(const RunConfig& c, const std::vector<double>& sample_times);

struct ReferenceSolution {
    Grid1D grid;
    /// c at each sample time (the final time when no samples were requested).
    std::vector<std::vector<double>> c;
    bool from_cache = false;
    double wall_seconds = 0.0;
};

/// Uniform IMEX3 reference on c.reference_cells cells, cached when `cache` is set.
[[nodiscard]] ReferenceSolution compute_reference(const RunConfig& c,
                                                  const std::vector<double>& sample_times,
                                                  const ReferenceCache* cache);

// ---------------------------------------------------------------------------
// Convergence studies

struct ConvergenceResult {
    Method method = Method::Imex3;
    std::size_t reference_cells = 0;
    bool reference_cached = false;
    double reference_seconds = 0.0;
    std::vector<ErrorReport> reports;
    ConvergenceVerdict verdict;

    /// EOC between two listed cell counts, if both runs succeeded.
    [[nodiscard]] std::optional<double> eoc_between(std::size_t n1, std::size_t n2) const;
    [[nodiscard]] std::optional<double> error_at(std::size_t n) const;
};

/**
 * Runs `method` on every count in c.test_cells (ascending) and compares the
 * final cancer density against the reference. Per-run failures are recorded
 * and the study continues.
 */
[[nodiscard]] ConvergenceResult run_convergence_study(const RunConfig& c, const ReferenceCache* cache);

// ---------------------------------------------------------------------------
// AMR benchmark

struct ErrorSeries {
    std::vector<double> t;
    std::vector<double> error;
    std::vector<std::size_t> cells;
};

struct AmrBenchmarkResult {
    ErrorSeries adaptive;
    std::map<std::size_t, ErrorSeries> uniform;
    RunResult1D adaptive_run;
    std::size_t reference_cells = 0;
    bool reference_cached = false;
};

/// Adaptive run (c.amr_config, initial c.cells cells) and the uniform runs in
/// c.amr_uniform_cells, sampled every c.error_interval against the reference.
[[nodiscard]] AmrBenchmarkResult run_amr_benchmark(const RunConfig& c, const ReferenceCache* cache);

// ---------------------------------------------------------------------------
// 2D

struct Snapshot2DStats {
    double t = 0.0;
    double min_c = 0.0;
    double max_c = 0.0;
    std::vector<double> mass;
    /// min v over window cells.
    double min_v_window = 0.0;
    /// min v over window cells where the initial ECM was intact (v0 = 1).
    double min_v_window_intact = 0.0;
    /// max |w(t) - w(previous snapshot)| / max |w(t)|.
    double relative_change = 0.0;
    bool finite = true;
};

struct Run2DResult {
    Grid2D grid;
    std::vector<double> state;
    double t = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    int max_cg_iterations = 0;
    std::vector<Snapshot2DStats> snapshots;
};

using SnapshotCallback2D = std::function<void(double t, const Grid2D&, std::span<const double>)>;

/// Rough memory need in bytes of a 2D run.
[[nodiscard]] double estimate_2d_memory(const RunConfig& c);

/// Snapshots at t = 0, every c.output_interval, and at c.t_end.
[[nodiscard]] Run2DResult run_2d(const RunConfig& c, const SnapshotCallback2D& on_snapshot = {});

// ---------------------------------------------------------------------------
// Dispersion

struct GrowthCheck {
    double k = 0.0;
    double lambda = 0.0;
    double amplitude_ratio = 0.0;
    double t_end = 0.0;
};

/**
 * Seeds the reduced model with w_hat + a e cos(sqrt(k) x), e the eigenvector
 * of the dominant eigenvalue of J_R - k J_T normalised to e_c = 1, on a
 * Neumann domain spanning whole half-periods, and reports the growth of the
 * cosine coefficient of c over [0, t_end].
 */
[[nodiscard]] GrowthCheck reduced_growth_check(const ReducedParameters& p, double k,
                                               double t_end = 5.0, double amplitude = 1e-3);

}  // namespace taxisfv
