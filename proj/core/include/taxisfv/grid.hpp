#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace taxisfv {

/// Raised when a StateField is used with a grid revision it was not built for.
class StaleStateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Smallest cell count the 1D stencils can operate on.
inline constexpr std::size_t kMinCells = 5;

/// Hard cap on refinement depth. Offsets are tracked in units of
/// h_base / 2^kMaxRefinementDepth so that bisection stays exact.
inline constexpr int kMaxRefinementDepth = 24;

/**
 * Non-uniform partition of an interval [a, b] obtained by dyadic bisection
 * of an initial uniform grid.
 *
 * Widths are never stored independently: every cell carries its refinement
 * level L and its width is h_base * 2^-L. Interfaces are reconstructed from
 * integer offsets, so bisecting and merging a cell reproduces the original
 * geometry bit for bit.
 */
class Grid1D {
public:
    /// N cells of width (b - a) / N, all on level 0. Throws std::invalid_argument
    /// for a >= b or N < kMinCells.
    static Grid1D uniform(double a, double b, std::size_t n);

    /// Build the grid described by per-cell levels over `base_cells` level-0 cells.
    /// Levels must tile the base cells exactly (each base cell is covered by a
    /// dyadic partition).
    static Grid1D from_levels(double a, double b, std::size_t base_cells,
                              std::vector<int> levels, std::uint64_t revision = 0);

    /// Same base partition, new levels, revision + 1.
    [[nodiscard]] Grid1D with_levels(std::vector<int> levels) const;

    [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double length() const noexcept { return b_ - a_; }
    [[nodiscard]] std::size_t base_cells() const noexcept { return base_cells_; }
    [[nodiscard]] double base_width() const noexcept { return h_base_; }
    [[nodiscard]] std::uint64_t revision() const noexcept { return revision_; }

    [[nodiscard]] int level(std::size_t i) const { return levels_[i]; }
    [[nodiscard]] double width(std::size_t i) const { return widths_[i]; }
    [[nodiscard]] double center(std::size_t i) const { return centers_[i]; }
    /// Interface x_{i-1/2}; interface(size()) == b.
    [[nodiscard]] double interface(std::size_t i) const { return interfaces_[i]; }

    [[nodiscard]] std::span<const int> levels() const noexcept { return levels_; }
    [[nodiscard]] std::span<const double> widths() const noexcept { return widths_; }
    [[nodiscard]] std::span<const double> centers() const noexcept { return centers_; }
    [[nodiscard]] std::span<const double> interfaces() const noexcept { return interfaces_; }

    /// Left edge of cell i in units of h_base / 2^kMaxRefinementDepth.
    [[nodiscard]] std::int64_t offset_units(std::size_t i) const { return offsets_[i]; }
    /// Width of a level-L cell in offset units.
    [[nodiscard]] static std::int64_t units_per_level(int level) {
        return std::int64_t{1} << (kMaxRefinementDepth - level);
    }

    [[nodiscard]] int max_level() const noexcept;
    [[nodiscard]] bool is_uniform() const noexcept;
    /// True when cells i and i+1 are the two daughters of one mother cell.
    [[nodiscard]] bool are_siblings(std::size_t i) const;
    /// Index of the cell containing x (cells are [x_{i-1/2}, x_{i+1/2})).
    [[nodiscard]] std::size_t locate(double x) const;

    /// Empty grid (zero cells); placeholder for results filled later.
    Grid1D() = default;

private:
    void rebuild_geometry();

    double a_ = 0.0;
    double b_ = 1.0;
    std::size_t base_cells_ = 0;
    double h_base_ = 0.0;
    std::uint64_t revision_ = 0;
    std::vector<int> levels_;
    std::vector<std::int64_t> offsets_;
    std::vector<double> widths_;
    std::vector<double> interfaces_;
    std::vector<double> centers_;
};

enum class Direction { PlusE1, MinusE1, PlusE2, MinusE2 };

/// Lexicographic single index k = i + (j-1)L (all indices 1-based).
[[nodiscard]] int to_flat(int i, int j, int L, int M);
/// Inverse of to_flat using the floor map i = k - floor((k-1)/L)L, j = floor((k-1)/L) + 1.
[[nodiscard]] std::pair<int, int> to_pair(int k, int L, int M);
/// Flat index of the neighbour of cell k in direction d; nullopt at the boundary.
[[nodiscard]] std::optional<int> neighbor_2d(int k, Direction d, int L, int M);

/// Uniform partition of the square [a, b]^2 into L x M cells.
class Grid2D {
public:
    static Grid2D square(double a, double b, int L, int M);

    [[nodiscard]] int nx() const noexcept { return L_; }
    [[nodiscard]] int ny() const noexcept { return M_; }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(L_) * static_cast<std::size_t>(M_);
    }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double hx() const noexcept { return hx_; }
    [[nodiscard]] double hy() const noexcept { return hy_; }
    [[nodiscard]] double cell_volume() const noexcept { return hx_ * hy_; }
    [[nodiscard]] std::uint64_t revision() const noexcept { return 0; }

    /// Cell centre of the 1-based pair (i, j).
    [[nodiscard]] double x(int i) const noexcept { return a_ + (i - 0.5) * hx_; }
    [[nodiscard]] double y(int j) const noexcept { return a_ + (j - 0.5) * hy_; }

    /// 0-based storage index of the 1-based pair (i, j).
    [[nodiscard]] std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i - 1) + static_cast<std::size_t>(j - 1) * L_;
    }

    Grid2D() = default;

private:
    double a_ = 0.0;
    double b_ = 1.0;
    int L_ = 0;
    int M_ = 0;
    double hx_ = 0.0;
    double hy_ = 0.0;
};

/**
 * Cell-wise species densities bound to one grid revision.
 *
 * Storage is cell-major: values[cell * n_species + species].
 */
class StateField {
public:
    StateField() = default;
    StateField(std::uint64_t grid_revision, std::size_t cells, std::size_t n_species)
        : revision_(grid_revision), cells_(cells), species_(n_species),
          values_(cells * n_species, 0.0) {}

    template <typename Grid>
    static StateField on(const Grid& grid, std::size_t n_species) {
        return StateField(grid.revision(), grid.size(), n_species);
    }

    [[nodiscard]] std::uint64_t grid_revision() const noexcept { return revision_; }
    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] std::size_t n_species() const noexcept { return species_; }

    double& operator()(std::size_t cell, std::size_t s) { return values_[cell * species_ + s]; }
    double operator()(std::size_t cell, std::size_t s) const { return values_[cell * species_ + s]; }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double> species(std::size_t s) const;

    /// Throws StaleStateError unless this field was built for `grid`.
    template <typename Grid>
    void require_bound(const Grid& grid) const {
        if (grid.revision() != revision_ || grid.size() != cells_) {
            throw StaleStateError("state field is bound to a different grid revision");
        }
    }

    /// Smallest value over all cells and species.
    [[nodiscard]] double min_value() const;

private:
    std::uint64_t revision_ = 0;
    std::size_t cells_ = 0;
    std::size_t species_ = 0;
    std::vector<double> values_;
};

/// Round-off undershoot accepted on densities before a state is treated as negative.
inline constexpr double kNegativityTolerance = 1e-12;

}  // namespace taxisfv
