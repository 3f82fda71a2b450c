#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>

#include "taxisfv/discretization.hpp"

namespace taxisfv::testkit {

struct StencilSuiteResult {
    double worst_diffusion = 0.0;  // relative defect on quadratics
    double worst_velocity = 0.0;   // relative defect on cubics
    double worst_uniform_diffusion = 0.0;
    double worst_uniform_velocity = 0.0;
    double seconds = 0.0;
};

/// Cell interfaces for widths h with the interface `origin` placed at x = 0.
template <std::size_t N>
std::array<double, N + 1> interfaces_from_widths(const std::array<double, N>& h, std::size_t origin) {
    std::array<double, N + 1> e{};
    for (std::size_t k = 0; k < N; ++k) e[k + 1] = e[k] + h[k];
    const double shift = e[origin];
    for (auto& x : e) x -= shift;
    return e;
}

inline StencilSuiteResult run_stencil_suite(int samples = 1000, unsigned seed = 20240521u) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.2, 1.0);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> scale_exp(-4.0, 0.0);
    StencilSuiteResult r;
    for (int n = 0; n < samples; ++n) {
        const double scale = std::pow(10.0, scale_exp(rng));
        std::array<double, 5> h{};
        for (auto& x : h) x = scale * width(rng);

        // Quadratic q = a x^2 + b x + c sampled at the centres; centre of cell 2 at 0.
        const auto e = interfaces_from_widths(h, 2);
        const double centre_shift = 0.5 * h[2];
        const double a = coef(rng), b = coef(rng), c = coef(rng);
        const StencilDiff sd = diffusion_coeffs(h);
        double acc = 0.0, mag = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            const double x = 0.5 * (e[k] + e[k + 1]) - centre_shift;
            const double term = sd.alpha[k] * (a * x * x + b * x + c);
            acc += term;
            mag += std::abs(term);
        }
        r.worst_diffusion = std::max(r.worst_diffusion, std::abs(acc - 2.0 * a) / std::max(mag, std::abs(2.0 * a)));

        // Cubic derivative at the interface between the middle two of four cells.
        const std::array<double, 4> hv{h[0], h[1], h[2], h[3]};
        const auto ev = interfaces_from_widths(hv, 2);
        const double d = coef(rng);
        const StencilVel sv = velocity_coeffs(hv);
        acc = 0.0;
        mag = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double x = 0.5 * (ev[k] + ev[k + 1]);
            const double term = sv.beta[k] * (((d * x + a) * x + b) * x + c);
            acc += term;
            mag += std::abs(term);
        }
        r.worst_velocity = std::max(r.worst_velocity, std::abs(acc - b) / std::max(mag, std::abs(b)));

        // Uniform reductions.
        const double hu = h[0];
        const std::array<double, 5> h5{hu, hu, hu, hu, hu};
        const std::array<double, 4> h4{hu, hu, hu, hu};
        const StencilDiff ud = diffusion_coeffs(h5);
        const StencilVel uv = velocity_coeffs(h4);
        const std::array<double, 5> expect_d{0.0, 1.0, -2.0, 1.0, 0.0};
        const std::array<double, 4> expect_v{1.0, -27.0, 27.0, -1.0};
        for (std::size_t k = 0; k < 5; ++k) {
            const double ref = expect_d[k] / (hu * hu);
            r.worst_uniform_diffusion =
                std::max(r.worst_uniform_diffusion, std::abs(ud.alpha[k] - ref) * hu * hu);
        }
        for (std::size_t k = 0; k < 4; ++k) {
            const double ref = expect_v[k] / (24.0 * hu);
            r.worst_uniform_velocity =
                std::max(r.worst_uniform_velocity, std::abs(uv.beta[k] - ref) * 24.0 * hu / 27.0);
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline constexpr double kStencilExactness = 1e-10;
inline constexpr double kUniformReduction = 1e-14;

}  // namespace taxisfv::testkit
