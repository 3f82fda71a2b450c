#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace taxisfv {

/// Square lower-triangular coefficient table stored row-major.
struct Coefficients {
    std::size_t s = 0;
    std::vector<double> data;

    Coefficients() = default;
    explicit Coefficients(std::size_t stages) : s(stages), data(stages * stages, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * s + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * s + j]; }
};

/**
 * Linearly implicit method
 *
 *   (Id - a_jj tau J) k_j = g(w + tau sum_{v<j} (a_jv + gamma_jv) k_v) - tau J sum_{v<j} gamma_jv k_v
 *   w_new = w + tau sum_j b_j k_j
 */
struct RosenbrockTableau {
    std::string name;
    Coefficients a;      // including the diagonal
    Coefficients gamma;  // strictly lower
    std::vector<double> b;
    std::optional<std::vector<double>> b_low;
    int order = 0;

    [[nodiscard]] std::size_t stages() const noexcept { return b.size(); }
};

/// Explicit part (a_bar, b_bar) paired with a diagonally implicit part (a, b).
struct ImexTableau {
    std::string name;
    Coefficients a_bar;  // strictly lower
    Coefficients a;      // lower, including the diagonal
    std::vector<double> b_bar;
    std::vector<double> b;
    std::vector<double> c;
    std::optional<std::vector<double>> b_bar_low;
    std::optional<std::vector<double>> b_low;
    int order = 0;

    [[nodiscard]] std::size_t stages() const noexcept { return b.size(); }
};

/// Butcher tableau of a Runge-Kutta method (explicit or diagonally implicit).
struct ButcherTableau {
    std::string name;
    Coefficients a;
    std::vector<double> b;
    std::vector<double> c;
    int order = 0;
};

/// Diagonal of the third-order Rosenbrock methods: 1 - sqrt(2)/2 cos(t) + sqrt(6)/2 sin(t),
/// t = arctan(sqrt(2)/4) / 3.
[[nodiscard]] double ros3_diagonal();

[[nodiscard]] RosenbrockTableau ros2_tableau();
/// Third-order, L-stable, with a second-order embedded solution (Sandu et al. ROS3).
[[nodiscard]] RosenbrockTableau ros3_tableau();
/// The three-stage coefficient set built from a, gamma_32 = 1/2 - 3a and the derived
/// gamma_31, gamma_21 with b = (1/3, 1/3, 1/3). Kept for reference; it is only first order.
[[nodiscard]] RosenbrockTableau ros3_printed_tableau();

[[nodiscard]] ImexTableau imex2_tableau();
/// ARK3(2)4L[2]SA pair with its embedded second-order weights.
[[nodiscard]] ImexTableau imex3_tableau();

[[nodiscard]] ButcherTableau rk4_tableau();
/// Simplified TR-BDF2 written as a three-stage DIRK.
[[nodiscard]] ButcherTableau trbdf2_tableau();

}  // namespace taxisfv
