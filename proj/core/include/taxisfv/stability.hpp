#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taxisfv/model.hpp"

namespace taxisfv {

/// Row-major n x n matrix.
using DenseMatrix = std::vector<double>;

/// Jacobian of the flux density map grad w -> D grad w - (X grad w) w_s:
/// entry (s, r) = D_s delta_sr - X[s][r] w_s.
[[nodiscard]] DenseMatrix transport_jacobian(const SpeciesSystem& system,
                                             std::span<const double> state);

/// Eigenvalues (real, imaginary) of a row-major n x n matrix.
[[nodiscard]] std::vector<std::pair<double, double>> eigenvalues(std::span<const double> m,
                                                                 std::size_t n);

/// max Re spec(J_R(w) - k J_T(w)).
[[nodiscard]] double lambda_k(const SpeciesSystem& system, std::span<const double> steady, double k);

struct DispersionScan {
    std::vector<double> k;
    std::vector<double> lambda;
    /// Maximal intervals where lambda > 0, endpoints sharpened by bisection.
    std::vector<std::pair<double, double>> unstable;
};

/// Uniform sampling of [0, k_max] with `samples` points; sign changes bisected to `k_tol`.
[[nodiscard]] DispersionScan scan_dispersion(const SpeciesSystem& system,
                                             std::span<const double> steady, double k_max,
                                             std::size_t samples, double k_tol = 1e-6);

class SteadyStateError : public std::runtime_error {
public:
    enum class Kind { NotConverged, NonPositive };
    SteadyStateError(Kind kind, const std::string& what, double residual)
        : std::runtime_error(what), kind_(kind), residual_(residual) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    Kind kind_;
    double residual_;
};

/// Newton iteration on R(w) = 0 until ||R||_inf < tol. Throws SteadyStateError.
[[nodiscard]] std::vector<double> find_reaction_steady_state(const SpeciesSystem& system,
                                                             std::span<const double> guess,
                                                             double tol = 1e-12,
                                                             int max_iterations = 100);

}  // namespace taxisfv
