#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace taxisfv {

class Discretization1D;
class Discretization2D;

/// Singular factorization, excessive conditioning, or an iterative solve that missed
/// its tolerance. Carries the residual reached.
class LinearSolverError : public std::runtime_error {
public:
    LinearSolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Pivot-ratio bound above which a factorization is reported as ill-conditioned.
inline constexpr double kConditionLimit = 1e14;

/// Square band matrix with kl sub- and ku super-diagonals.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    static BandedMatrix identity(std::size_t n, std::size_t kl = 0, std::size_t ku = 0);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t lower() const noexcept { return kl_; }
    [[nodiscard]] std::size_t upper() const noexcept { return ku_; }

    [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + kl_ >= i && j <= i + ku_;
    }
    /// Entry (i, j); throws std::out_of_range outside the band.
    double& at(std::size_t i, std::size_t j);
    [[nodiscard]] double get(std::size_t i, std::size_t j) const noexcept;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

private:
    friend class BandedLU;
    std::size_t n_, kl_, ku_, width_;
    std::vector<double> data_;  // row-major, row i holds columns i-kl .. i+ku
};

/// LU factorization with partial pivoting that keeps the band structure
/// (the upper factor widens to kl + ku).
class BandedLU {
public:
    explicit BandedLU(const BandedMatrix& a);

    /// Solves A x = b. Throws LinearSolverError if the residual check
    /// ||Ax - b||_inf <= 1e-10 (1 + ||b||_inf) fails.
    void solve(std::span<const double> b, std::span<double> x) const;
    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;

    /// max |u_ii| / min |u_ii|, a cheap conditioning indicator.
    [[nodiscard]] double pivot_ratio() const noexcept { return pivot_ratio_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

private:
    [[nodiscard]] double& lu(std::size_t i, std::size_t j) { return f_[i * w_ + (j + kl_ - i)]; }
    [[nodiscard]] double lu(std::size_t i, std::size_t j) const { return f_[i * w_ + (j + kl_ - i)]; }

    BandedMatrix original_;
    std::size_t n_, kl_, ku_, w_;
    std::vector<double> f_;
    std::vector<std::size_t> piv_;
    double pivot_ratio_ = 1.0;
    // Solve scratch; makes concurrent solves on one factorization unsafe.
    mutable std::vector<double> y_, r_;
};

/**
 * Factorized operators (Id - sigma J) for a 1D discretization.
 *
 * Diffusion-only systems decouple by species and are kept as one pentadiagonal
 * factorization per diffusing species. The coupled variant uses
 * J = d(D + R)/dw at a given state and bandwidth 2n in the cell-major layout.
 */
class ShiftedOperator1D {
public:
    enum class Kind { DiffusionOnly, DiffusionReaction };

    /// Diffusion-only operator.
    ShiftedOperator1D(const Discretization1D& disc, double sigma);
    /// Coupled operator linearized at `state`.
    ShiftedOperator1D(const Discretization1D& disc, double sigma, std::span<const double> state);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }

    /// x = (Id - sigma J)^{-1} b on the full cell-major vector.
    void solve(std::span<const double> b, std::span<double> x) const;
    /// y = (Id - sigma J) x
    void apply(std::span<const double> x, std::span<double> y) const;

    /// Assembled matrix: per species for DiffusionOnly, the coupled one otherwise.
    [[nodiscard]] const BandedMatrix& matrix(std::size_t species = 0) const;

private:
    Kind kind_;
    double sigma_;
    std::size_t cells_, n_;
    std::vector<std::unique_ptr<BandedMatrix>> matrices_;
    std::vector<std::unique_ptr<BandedLU>> factors_;
    mutable std::vector<double> bs_, xs_;
};

/// Assembles the coupled Jacobian d(D + R)/dw of a 1D discretization at `state`
/// as a band matrix with kl = ku = 2n.
[[nodiscard]] BandedMatrix assemble_jacobian_1d(const Discretization1D& disc,
                                                std::span<const double> state);
/// Assembles Id - sigma J for the requested operator.
[[nodiscard]] BandedMatrix assemble_shifted_operator(const Discretization1D& disc, double sigma,
                                                     std::span<const double> state,
                                                     bool with_reaction);

/// Iterative solver statistics for the last 2D solve.
struct IterativeStats {
    int iterations = 0;
    double residual = 0.0;
};

/**
 * (Id - sigma D_s Lap) solves on a uniform 2D grid by preconditioned conjugate
 * gradients (Jacobi preconditioner, relative tolerance 1e-10, at most
 * 10 sqrt(N) iterations).
 */
class ShiftedDiffusion2D {
public:
    ShiftedDiffusion2D(const Discretization2D& disc, double sigma);
    ~ShiftedDiffusion2D();
    ShiftedDiffusion2D(ShiftedDiffusion2D&&) noexcept;
    ShiftedDiffusion2D& operator=(ShiftedDiffusion2D&&) noexcept;

    void solve(std::span<const double> b, std::span<double> x) const;
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const IterativeStats& last_stats() const noexcept { return stats_; }

    static constexpr double kTolerance = 1e-10;

private:
    struct Impl;
    double sigma_;
    std::unique_ptr<Impl> impl_;
    mutable IterativeStats stats_;
};

}  // namespace taxisfv
