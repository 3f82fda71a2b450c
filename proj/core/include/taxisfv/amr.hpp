#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "taxisfv/discretization.hpp"
#include "taxisfv/grid.hpp"
#include "taxisfv/model.hpp"

namespace taxisfv {

enum class MonitorKind { Gradient, VelocityError };

[[nodiscard]] std::string_view monitor_name(MonitorKind k) noexcept;
[[nodiscard]] std::optional<MonitorKind> parse_monitor(std::string_view name) noexcept;

struct MonitorSpec {
    MonitorKind kind = MonitorKind::Gradient;
    double c_ref = 55.0;
    double c_coa = 35.0;
};

struct AmrConfig {
    MonitorSpec monitor;
    int n_ref = 1;
    int n_coa = 3;
    /// Number of grid levels counting the initial grid as level 0; the finest level is l_max - 1.
    int l_max = 5;
    bool smooth = false;
    /// Adapt every `cadence` accepted time steps.
    int cadence = 1;

    /// Throws std::invalid_argument unless c_coa < c_ref, n_ref, n_coa, l_max, cadence >= 1.
    void validate() const;
};

/// max of the two one-sided difference quotients of c (species 0), spacing (h_i + h_j) / 2.
[[nodiscard]] std::vector<double> monitor_gradient(const Grid1D& grid, std::span<const double> c);

/// max over the two interfaces of a cell of |P - P_low|.
[[nodiscard]] std::vector<double> monitor_velocity_error(const Discretization1D& disc,
                                                         std::span<const double> w);

/// Evaluates the configured monitor on a cell-major state.
[[nodiscard]] std::vector<double> evaluate_monitor(MonitorKind kind, const Grid1D& grid,
                                                   const SpeciesSystem& system,
                                                   std::span<const double> w,
                                                   const DiscretizationOptions& options = {});

/**
 * Smooth-grid rules on refinement / coarsening marks (1 = marked):
 * a cell to be refined forces refinement of coarser neighbours, transitively;
 * a coarsening mark is dropped while a finer neighbour is not itself merged.
 * Coarsening marks that cannot merge (no marked sibling) are cleared as well.
 */
void enforce_smoothness(const Grid1D& grid, std::vector<char>& refine, std::vector<char>& coarsen);

/// True when |L_i - L_{i+1}| <= 1 everywhere.
[[nodiscard]] bool is_smooth(const Grid1D& grid) noexcept;

/**
 * Conservative transfer between two grids over the same base partition.
 * Cells contained in an old cell take the MC-limited linear reconstruction at
 * their centre; cells covering several old cells take the volume-weighted mean.
 */
[[nodiscard]] std::vector<double> transfer_state(const Grid1D& from, const Grid1D& to,
                                                 std::span<const double> w, std::size_t n_species);

struct AdaptResult {
    Grid1D grid;
    std::vector<double> state;
    std::size_t refined = 0;    // cells bisected
    std::size_t coarsened = 0;  // sibling pairs merged
    [[nodiscard]] bool changed() const noexcept { return refined + coarsened > 0; }
};

/// n_ref refinement sweeps followed by n_coa coarsening sweeps, monitors recomputed after each.
[[nodiscard]] AdaptResult adapt(const Grid1D& grid, std::span<const double> w,
                                const SpeciesSystem& system, const AmrConfig& config,
                                const DiscretizationOptions& options = {});

/// One refinement sweep with precomputed monitor values.
[[nodiscard]] AdaptResult refine_sweep(const Grid1D& grid, std::span<const double> w,
                                       std::size_t n_species, std::span<const double> monitor,
                                       const AmrConfig& config);
/// One coarsening sweep with precomputed monitor values.
[[nodiscard]] AdaptResult coarsen_sweep(const Grid1D& grid, std::span<const double> w,
                                        std::size_t n_species, std::span<const double> monitor,
                                        const AmrConfig& config);

}  // namespace taxisfv
