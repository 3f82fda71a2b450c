#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dense_problem.hpp"
#include "taxisfv/tableau.hpp"
#include "taxisfv/time_integration.hpp"

namespace taxisfv::testkit {

struct OrderMeasurement {
    std::string name;
    double nominal = 0.0;
    double eoc = 0.0;
};

struct DecayMeasurement {
    std::string name;
    double amplification = 0.0;  // |w(tau)| / |w(0)| for w' = lambda w, lambda tau = -1e8
};

/// Scalar logistic u' = r u (1 - u) with its closed-form solution.
struct Logistic {
    double r = 2.0;
    double u0 = 0.2;
    [[nodiscard]] double exact(double t) const { return 1.0 / (1.0 + (1.0 / u0 - 1.0) * std::exp(-r * t)); }
    [[nodiscard]] DenseProblem problem() const {
        const double rate = r;
        return DenseProblem(
            Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1),
            [rate](std::span<const double> w, std::span<double> out) { out[0] = rate * w[0] * (1.0 - w[0]); },
            [rate](std::span<const double> w) {
                Eigen::MatrixXd J(1, 1);
                J(0, 0) = rate * (1.0 - 2.0 * w[0]);
                return J;
            });
    }
};

/// Neumann Laplacian on n cells of (0, 1), scaled by d.
inline Eigen::MatrixXd neumann_laplacian(int n, double d) {
    const double h = 1.0 / n;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            L(i, i - 1) += d / (h * h);
            L(i, i) -= d / (h * h);
        }
        if (i + 1 < n) {
            L(i, i + 1) += d / (h * h);
            L(i, i) -= d / (h * h);
        }
    }
    return L;
}

/// exp(t D) w0 for symmetric D by eigen-decomposition.
inline Eigen::VectorXd symmetric_exponential(const Eigen::MatrixXd& D, const Eigen::VectorXd& w0, double t) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    const Eigen::VectorXd e = (es.eigenvalues().array() * t).exp();
    return es.eigenvectors() * (e.asDiagonal() * (es.eigenvectors().transpose() * w0));
}

/// Runs `step` with n equal steps over [0, T] and returns the max-norm error.
inline double run_error(const std::function<void(std::vector<double>&, double)>& step,
                        std::vector<double> w, double T, int n, const Eigen::VectorXd& exact) {
    const double tau = T / n;
    for (int k = 0; k < n; ++k) step(w, tau);
    double e = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) e = std::max(e, std::abs(w[i] - exact[static_cast<Eigen::Index>(i)]));
    return e;
}

inline double measured_order(const std::function<void(std::vector<double>&, double)>& step,
                             const std::vector<double>& w0, double T, int n, const Eigen::VectorXd& exact) {
    const double e1 = run_error(step, w0, T, n, exact);
    const double e2 = run_error(step, w0, T, 2 * n, exact);
    return std::log2(e1 / e2);
}

/// Classical RK4 on the full right-hand side, used as an independent reference.
inline Eigen::VectorXd rk4_reference(DenseProblem& p, std::vector<double> w, double T, int n) {
    const std::size_t m = w.size();
    auto f = [&](const std::vector<double>& x) {
        std::vector<double> a(m), d(m), r(m), out(m);
        p.advection(x, a);
        p.diffusion(x, d);
        p.reaction(x, r);
        for (std::size_t i = 0; i < m; ++i) out[i] = a[i] + d[i] + r[i];
        return out;
    };
    const double h = T / n;
    std::vector<double> tmp(m);
    for (int k = 0; k < n; ++k) {
        const auto k1 = f(w);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + 0.5 * h * k1[i];
        const auto k2 = f(tmp);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + 0.5 * h * k2[i];
        const auto k3 = f(tmp);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = w[i] + h * k3[i];
        const auto k4 = f(tmp);
        for (std::size_t i = 0; i < m; ++i) w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(m));
}

/// Two-component advection / diffusion / reaction system for the IMEX tests.
inline DenseProblem coupled_problem() {
    Eigen::MatrixXd A(2, 2), D(2, 2);
    A << 0.0, 0.5, -0.5, 0.0;
    D << -2.0, 1.0, 1.0, -3.0;
    return DenseProblem(
        A, D,
        [](std::span<const double> w, std::span<double> out) {
            out[0] = 0.5 * w[0] * (1.0 - w[1]);
            out[1] = -0.3 * w[1] * w[0] * w[0];
        },
        [](std::span<const double> w) {
            Eigen::MatrixXd J(2, 2);
            J << 0.5 * (1.0 - w[1]), -0.5 * w[0], -0.6 * w[1] * w[0], -0.3 * w[0] * w[0];
            return J;
        });
}

inline std::vector<OrderMeasurement> measure_orders() {
    std::vector<OrderMeasurement> out;
    Stepper stepper(Method::Imex3);
    std::vector<double> next;

    const Logistic logistic;
    const double T = 1.0;
    Eigen::VectorXd exact_log(1);
    exact_log[0] = logistic.exact(T);
    DenseProblem lp = logistic.problem();
    const std::vector<double> u0{logistic.u0};

    out.push_back({"Euler", 1.0, measured_order(
                                     [&](std::vector<double>& w, double tau) {
                                         next.resize(w.size());
                                         stepper.explicit_euler(lp, w, tau, next);
                                         w = next;
                                     },
                                     u0, T, 40, exact_log)});
    out.push_back({"RK4", 4.0, measured_order([&](std::vector<double>& w, double tau) { stepper.rk4_reaction(lp, w, tau); },
                                               u0, T, 5, exact_log)});
    const RosenbrockTableau ros2 = ros2_tableau();
    const RosenbrockTableau ros3 = ros3_tableau();
    for (const auto* t : {&ros2, &ros3}) {
        const double nominal = t == &ros2 ? 2.0 : 3.0;
        out.push_back({t->name, nominal, measured_order(
                                             [&](std::vector<double>& w, double tau) {
                                                 next.resize(w.size());
                                                 stepper.rosenbrock(lp, *t, w, tau, next, {});
                                                 w = next;
                                             },
                                             u0, T, t == &ros2 ? 10 : 80, exact_log)});
    }

    // Linear diffusion against the exact exponential.
    const int n = 16;
    const Eigen::MatrixXd L = neumann_laplacian(n, 0.05);
    DenseProblem dp(Eigen::MatrixXd::Zero(n, n), L);
    std::vector<double> d0(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        d0[static_cast<std::size_t>(i)] = 1.0 + std::cos(M_PI * x) + 0.3 * std::cos(2.0 * M_PI * x);
    }
    const Eigen::VectorXd exact_diff =
        symmetric_exponential(L, Eigen::Map<const Eigen::VectorXd>(d0.data(), n), T);
    out.push_back({"CND-diffusion", 2.0, measured_order(
                                             [&](std::vector<double>& w, double tau) {
                                                 next.resize(w.size());
                                                 stepper.cnd(dp, w, tau, next);
                                                 w = next;
                                             },
                                             d0, T, 10, exact_diff)});
    out.push_back({"TR-BDF2", 2.0, measured_order([&](std::vector<double>& w, double tau) { stepper.trbdf2_diffusion(dp, w, tau); },
                                                  d0, T, 10, exact_diff)});

    // IMEX schemes on the coupled nonlinear system.
    DenseProblem cp = coupled_problem();
    const std::vector<double> c0{1.0, 0.5};
    const Eigen::VectorXd exact_c = rk4_reference(cp, c0, T, 20000);
    const ImexTableau imex2 = imex2_tableau();
    const ImexTableau imex3 = imex3_tableau();
    for (const auto* t : {&imex2, &imex3}) {
        const double nominal = t == &imex2 ? 2.0 : 3.0;
        out.push_back({t->name, nominal, measured_order(
                                             [&](std::vector<double>& w, double tau) {
                                                 next.resize(w.size());
                                                 stepper.imex(cp, *t, false, w, tau, next, {});
                                                 w = next;
                                             },
                                             c0, T, 10, exact_c)});
    }
    return out;
}

inline std::vector<DecayMeasurement> measure_l_stability() {
    std::vector<DecayMeasurement> out;
    Stepper stepper(Method::Imex3);
    const double lambda = -1e8;
    Eigen::MatrixXd D(1, 1);
    D(0, 0) = lambda;
    DenseProblem p(Eigen::MatrixXd::Zero(1, 1), D);
    std::vector<double> next(1);
    const std::vector<double> w0{1.0};

    stepper.rosenbrock(p, ros2_tableau(), w0, 1.0, next, {});
    out.push_back({"ROS2", std::abs(next[0])});
    stepper.rosenbrock(p, ros3_tableau(), w0, 1.0, next, {});
    out.push_back({"ROS3", std::abs(next[0])});
    std::vector<double> w = w0;
    stepper.trbdf2_diffusion(p, w, 1.0);
    out.push_back({"TR-BDF2", std::abs(w[0])});
    stepper.imex(p, imex3_tableau(), false, w0, 1.0, next, {});
    out.push_back({"IMEX3-implicit", std::abs(next[0])});
    return out;
}

/// Crank-Nicolson on the same stiff mode, which is only A-stable (|R| -> 1).
inline double crank_nicolson_amplification() {
    Stepper stepper(Method::Imex3);
    Eigen::MatrixXd D(1, 1);
    D(0, 0) = -1e8;
    DenseProblem p(Eigen::MatrixXd::Zero(1, 1), D);
    std::vector<double> w{1.0};
    stepper.cn_diffusion(p, w, 1.0);
    return std::abs(w[0]);
}

inline constexpr double kOrderTolerance = 0.15;
inline constexpr double kDecayLimit = 1e-6;

}  // namespace taxisfv::testkit
