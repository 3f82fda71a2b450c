#pragma once

#include <vector>

#include "taxisfv/config.hpp"
#include "taxisfv/grid.hpp"
#include "taxisfv/model.hpp"

namespace taxisfv {

/**
 * Built-in experiments.
 *
 *  I        uPA model, Gaussian bump of width epsilon at x = 0 on (0, 5).
 *  II       as I with D_c = 5.3e-3 (smooth regime).
 *  2D       uPA model on a square, indicator initial data above a curved interface.
 *  REDUCED  saturated two-species model, Gaussian blob in the middle of (0, 10).
 *
 * Desk scale shrinks grids and final times; paper_scale restores the full sizes.
 */
[[nodiscard]] RunConfig preset_config(PresetId id, bool paper_scale = false);

/// Adaptive benchmark defaults on top of a preset: 400 initial cells, T = 60 and
/// a reference on the finest adaptive resolution (12800 cells; 50000 at paper scale).
void apply_amr_bench_defaults(RunConfig& c);

[[nodiscard]] SpeciesSystem build_system(const RunConfig& c);

/// Point values at cell centres, cell-major.
[[nodiscard]] std::vector<double> initial_state_1d(const RunConfig& c, const Grid1D& grid);
[[nodiscard]] std::vector<double> initial_state_2d(const RunConfig& c, const Grid2D& grid);

/// Interface y(x) of the 2D initial data; cancer cells occupy x2 >= y(x1).
[[nodiscard]] double interface_curve(double x) noexcept;

}  // namespace taxisfv
