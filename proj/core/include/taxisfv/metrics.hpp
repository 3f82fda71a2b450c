#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxisfv/grid.hpp"

namespace taxisfv {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimum ratio between reference and test cell counts.
inline constexpr double kReferenceRatio = 10.0;

/// Index j of the uniform reference cell (x_{j-1/2}, x_{j+1/2}] containing x.
/// Points within 1e-9 cell widths of an interface count as on it.
[[nodiscard]] std::size_t reference_cell(const Grid1D& reference, double x);

/// Reference value at x: the containing cell, or the mean of the two cells
/// sharing an interior interface that x lies on.
[[nodiscard]] double reference_value(const Grid1D& reference, std::span<const double> c_ref, double x);

/**
 * sum_i h_i |c_i - c_ref(x_i)| over the cells of `grid`, c_ref as in reference_value.
 * Throws MetricError unless the reference is uniform and has at least
 * kReferenceRatio times as many cells (when `enforce_ratio`).
 */
[[nodiscard]] double discrete_l1_error(const Grid1D& grid, std::span<const double> c,
                                       const Grid1D& reference, std::span<const double> c_ref,
                                       bool enforce_ratio = true);

/// (log E1 - log E2) / (log N2 - log N1). Throws MetricError for E <= 0 or N2 <= N1.
[[nodiscard]] double eoc(double e1, double e2, double n1, double n2);

struct ErrorReport {
    std::size_t cells = 0;
    double error = 0.0;
    /// Order against the previous entry of the study.
    std::optional<double> eoc;
    double wall_seconds = 0.0;
    std::size_t steps = 0;
    bool failed = false;
    std::string failure;
};

struct ConvergenceVerdict {
    bool nonconvergent = false;
    std::string reason;
};

/// Terminal EOC below this value marks a study as non-convergent.
inline constexpr double kMinimumTerminalEoc = 0.5;

/// Fills the successive EOC fields of `reports` (sorted by cell count).
void attach_eocs(std::vector<ErrorReport>& reports);

/// Flags failed or non-finite runs, a non-decreasing final error, or a terminal EOC < 0.5.
[[nodiscard]] ConvergenceVerdict assess_convergence(const std::vector<ErrorReport>& reports);

/// Values of species s from a cell-major state.
[[nodiscard]] std::vector<double> species_values(std::span<const double> w, std::size_t n_species,
                                                 std::size_t s);

}  // namespace taxisfv
