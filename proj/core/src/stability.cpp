#include "taxisfv/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace taxisfv {

namespace {

Eigen::MatrixXd to_eigen(std::span<const double> m, std::size_t n) {
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(ni, ni);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t r = 0; r < n; ++r) {
            a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) = m[s * n + r];
        }
    }
    return a;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

DenseMatrix transport_jacobian(const SpeciesSystem& system, std::span<const double> state) {
    const std::size_t n = system.n_species();
    if (state.size() != n) throw std::invalid_argument("transport_jacobian: state size mismatch");
    DenseMatrix j(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t r = 0; r < n; ++r) {
            j[s * n + r] = (s == r ? system.diffusivity(s) : 0.0) - system.taxis(s, r) * state[s];
        }
    }
    return j;
}

std::vector<std::pair<double, double>> eigenvalues(std::span<const double> m, std::size_t n) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(m, n), false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
    std::vector<std::pair<double, double>> out;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        out.emplace_back(solver.eigenvalues()(i).real(), solver.eigenvalues()(i).imag());
    }
    return out;
}

double lambda_k(const SpeciesSystem& system, std::span<const double> steady, double k) {
    if (!(k >= 0.0)) throw std::invalid_argument("lambda_k: k must be nonnegative");
    const std::size_t n = system.n_species();
    DenseMatrix jr(n * n);
    system.reaction_jacobian(steady, jr);
    const DenseMatrix jt = transport_jacobian(system, steady);
    for (std::size_t i = 0; i < n * n; ++i) jr[i] -= k * jt[i];
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [re, im] : eigenvalues(jr, n)) best = std::max(best, re);
    return best;
}

DispersionScan scan_dispersion(const SpeciesSystem& system, std::span<const double> steady,
                               double k_max, std::size_t samples, double k_tol) {
    if (samples < 2) throw std::invalid_argument("scan_dispersion: need at least two samples");
    if (!(k_max > 0.0)) throw std::invalid_argument("scan_dispersion: k_max must be positive");
    DispersionScan scan;
    scan.k.resize(samples);
    scan.lambda.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        scan.k[i] = k_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        scan.lambda[i] = lambda_k(system, steady, scan.k[i]);
    }
    auto root = [&](double lo, double hi) {
        const bool lo_pos = lambda_k(system, steady, lo) > 0.0;
        while (hi - lo > k_tol) {
            const double mid = 0.5 * (lo + hi);
            if ((lambda_k(system, steady, mid) > 0.0) == lo_pos) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    double start = 0.0;
    for (std::size_t i = 1; i < samples; ++i) {
        const bool prev = scan.lambda[i - 1] > 0.0;
        const bool cur = scan.lambda[i] > 0.0;
        if (!prev && cur) start = root(scan.k[i - 1], scan.k[i]);
        if (prev && !cur) scan.unstable.emplace_back(start, root(scan.k[i - 1], scan.k[i]));
    }
    if (scan.lambda.back() > 0.0) scan.unstable.emplace_back(start, k_max);
    return scan;
}

std::vector<double> find_reaction_steady_state(const SpeciesSystem& system,
                                               std::span<const double> guess, double tol,
                                               int max_iterations) {
    const std::size_t n = system.n_species();
    if (guess.size() != n) throw std::invalid_argument("steady state: guess size mismatch");
    for (double g : guess) {
        if (!std::isfinite(g)) throw std::invalid_argument("steady state: guess must be finite");
    }
    std::vector<double> w(guess.begin(), guess.end()), r(n), j(n * n);
    const auto ni = static_cast<Eigen::Index>(n);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= max_iterations; ++it) {
        system.reaction(w, r);
        res = max_abs(r);
        if (res < tol) {
            for (double x : w) {
                if (!(x > 0.0)) {
                    throw SteadyStateError(SteadyStateError::Kind::NonPositive,
                                           "steady state has a non-positive component", res);
                }
            }
            return w;
        }
        if (!std::isfinite(res) || it == max_iterations) break;
        system.reaction_jacobian(w, j);
        Eigen::VectorXd rhs(ni);
        for (std::size_t s = 0; s < n; ++s) rhs(static_cast<Eigen::Index>(s)) = -r[s];
        const Eigen::VectorXd d = to_eigen(j, n).fullPivLu().solve(rhs);
        for (std::size_t s = 0; s < n; ++s) w[s] += d(static_cast<Eigen::Index>(s));
    }
    throw SteadyStateError(SteadyStateError::Kind::NotConverged,
                           "Newton iteration for the steady state did not converge", res);
}

}  // namespace taxisfv
