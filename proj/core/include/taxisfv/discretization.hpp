#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "taxisfv/grid.hpp"
#include "taxisfv/model.hpp"

namespace taxisfv {

/// Five-point second-derivative stencil for one cell; alpha[k] multiplies w_{i+k-2}.
struct StencilDiff {
    std::array<double, 5> alpha{};
    double sigma = 0.0;
};

/// Four-point first-derivative stencil at interface i+1/2; beta[k] multiplies u_{i+k-1}.
struct StencilVel {
    std::array<double, 4> beta{};
};

/// Coefficients from the widths h_{i-2}..h_{i+2}. Equal widths give (0, 1, -2, 1, 0)/h^2.
[[nodiscard]] StencilDiff diffusion_coeffs(std::span<const double, 5> h);
/// Coefficients from the widths h_{i-1}..h_{i+2}. Equal widths give (1, -27, 27, -1)/(24h).
[[nodiscard]] StencilVel velocity_coeffs(std::span<const double, 4> h);

/// max of all-negative arguments, min of all-positive ones, 0 otherwise.
[[nodiscard]] double minmod(std::span<const double> v) noexcept;
[[nodiscard]] double minmod(double a, double b, double c) noexcept;

/// Monotonized-central slope on a uniform grid.
[[nodiscard]] double mc_slope_uniform(double cm, double c0, double cp, double h) noexcept;
/// Monotonized-central slope with kappa_{i-1} = h_{i-1} + h_i, kappa_i = h_i + h_{i+1}.
[[nodiscard]] double mc_slope_nonuniform(double cm, double c0, double cp, double hm, double h0,
                                         double hp) noexcept;

struct DiscretizationOptions {
    /// Force zero slopes (first-order upwind fluxes).
    bool first_order_fluxes = false;
    /// Time-step cap used when all characteristic velocities vanish.
    double tau_max = 0.1;
};

/**
 * Finite-volume operators on a 1D grid with homogeneous Neumann boundaries.
 *
 * Field arrays are cell-major (w[i * n + s]). Every operator writes a full
 * array of the same shape; species without a contribution get zeros.
 */
class Discretization1D {
public:
    Discretization1D(Grid1D grid, SpeciesSystem system, DiscretizationOptions options = {});

    [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
    [[nodiscard]] const SpeciesSystem& system() const noexcept { return system_; }
    [[nodiscard]] const DiscretizationOptions& options() const noexcept { return options_; }
    [[nodiscard]] std::size_t cells() const noexcept { return grid_.size(); }
    [[nodiscard]] std::size_t n_species() const noexcept { return system_.n_species(); }
    [[nodiscard]] std::size_t unknowns() const noexcept { return cells() * n_species(); }

    /// Laplacian coefficients of cell i at offsets -2..+2 (zero outside the stencil).
    [[nodiscard]] const std::array<double, 5>& laplacian_row(std::size_t i) const {
        return laplacian_[i];
    }
    /// True when cell i uses the conservative three-point flux form.
    [[nodiscard]] bool three_point(std::size_t i) const { return three_point_[i] != 0; }

    void diffusion(std::span<const double> w, std::span<double> out) const;
    void advection(std::span<const double> w, std::span<double> out) const;
    void reaction(std::span<const double> w, std::span<double> out) const;

    /// Characteristic velocities at all N+1 interfaces; P[k] sits at x_{k-1/2}, P[0] = P[N] = 0.
    void velocities(std::span<const double> w, std::span<double> P) const;
    /// Same with the two-point derivative everywhere.
    void velocities_low(std::span<const double> w, std::span<double> P) const;
    /// Limited slopes of species s (zero at boundary cells and for first-order fluxes).
    void slopes(std::span<const double> w, std::size_t s, std::span<double> out) const;

    /// max |P_{i+1/2}| / h over both cells adjacent to each interface.
    [[nodiscard]] double max_velocity_rate(std::span<const double> w) const;
    /// CFL / max_velocity_rate, capped at tau_max.
    [[nodiscard]] double cfl_timestep(std::span<const double> w, double cfl) const;
    /// min h^2 / (2 max D); infinity without diffusion.
    [[nodiscard]] double explicit_diffusion_limit() const;

    /// StateField forms; throw StaleStateError on a revision mismatch.
    [[nodiscard]] StateField diffusion(const StateField& w) const;
    [[nodiscard]] StateField advection(const StateField& w) const;
    [[nodiscard]] StateField reaction(const StateField& w) const;

    /// Volume-weighted integral of species s.
    [[nodiscard]] double mass(std::span<const double> w, std::size_t s) const;

private:
    void interface_derivatives(std::span<const double> w, std::size_t s, bool low,
                               std::span<double> out) const;

    Grid1D grid_;
    SpeciesSystem system_;
    DiscretizationOptions options_;
    std::vector<std::array<double, 5>> laplacian_;
    std::vector<char> three_point_;
    // Interior interface k (between cells k-1 and k), k = 1..N-1.
    std::vector<std::array<double, 4>> vel_;
    std::vector<char> vel_four_point_;
    std::vector<double> inv_dual_;  // 1 / ((h_{k-1} + h_k) / 2)
};

/**
 * Finite-volume operators on a uniform 2D grid. Storage index is
 * (i - 1) + (j - 1) L for the 1-based pair (i, j).
 */
class Discretization2D {
public:
    Discretization2D(Grid2D grid, SpeciesSystem system, DiscretizationOptions options = {});

    [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
    [[nodiscard]] const SpeciesSystem& system() const noexcept { return system_; }
    [[nodiscard]] std::size_t cells() const noexcept { return grid_.size(); }
    [[nodiscard]] std::size_t n_species() const noexcept { return system_.n_species(); }
    [[nodiscard]] std::size_t unknowns() const noexcept { return cells() * n_species(); }

    void diffusion(std::span<const double> w, std::span<double> out) const;
    void advection(std::span<const double> w, std::span<double> out) const;
    void reaction(std::span<const double> w, std::span<double> out) const;

    /// Velocities at x-interfaces ((L+1) x M, index k + j (L+1)) and y-interfaces (L x (M+1)).
    void velocities(std::span<const double> w, std::span<double> Px, std::span<double> Py) const;
    [[nodiscard]] double max_velocity_rate(std::span<const double> w) const;
    [[nodiscard]] double cfl_timestep(std::span<const double> w, double cfl) const;
    [[nodiscard]] double explicit_diffusion_limit() const;
    [[nodiscard]] double mass(std::span<const double> w, std::size_t s) const;

private:
    Grid2D grid_;
    SpeciesSystem system_;
    DiscretizationOptions options_;
};

}  // namespace taxisfv
