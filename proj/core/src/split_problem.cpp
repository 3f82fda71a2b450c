#include "taxisfv/split_problem.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace taxisfv {

namespace {

constexpr std::size_t kCacheLimit = 8;

template <typename Map>
void trim(Map& cache) {
    if (cache.size() >= kCacheLimit) cache.clear();
}

void cell_jacobian_apply(const SpeciesSystem& system, std::span<const double> state,
                         std::span<const double> v, std::span<double> out) {
    const std::size_t n = system.n_species();
    const std::size_t cells = state.size() / n;
    std::vector<double> jr(n * n);
    for (std::size_t i = 0; i < cells; ++i) {
        system.reaction_jacobian(state.subspan(i * n, n), jr);
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += jr[s * n + r] * v[i * n + r];
            out[i * n + s] = acc;
        }
    }
}

void cell_shifted_solve(const SpeciesSystem& system, double sigma, std::span<const double> state,
                        std::span<const double> b, std::span<double> x) {
    const std::size_t n = system.n_species();
    const std::size_t cells = state.size() / n;
    const auto ni = static_cast<Eigen::Index>(n);
    std::vector<double> jr(n * n);
    Eigen::MatrixXd A(ni, ni);
    Eigen::VectorXd rhs(ni);
    for (std::size_t i = 0; i < cells; ++i) {
        system.reaction_jacobian(state.subspan(i * n, n), jr);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t r = 0; r < n; ++r) {
                A(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)) =
                    (s == r ? 1.0 : 0.0) - sigma * jr[s * n + r];
            }
            rhs(static_cast<Eigen::Index>(s)) = b[i * n + s];
        }
        const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
        for (std::size_t s = 0; s < n; ++s) x[i * n + s] = sol(static_cast<Eigen::Index>(s));
    }
}

}  // namespace

void SplitProblem::linearize(std::span<const double>) {
    throw std::logic_error("this problem does not provide a coupled Jacobian");
}

void SplitProblem::apply_jacobian(std::span<const double>, std::span<double>) {
    throw std::logic_error("this problem does not provide a coupled Jacobian");
}

void SplitProblem::solve_shifted(double, std::span<const double>, std::span<double>) {
    throw std::logic_error("this problem does not provide a coupled Jacobian");
}

void SplitProblem::apply_reaction_jacobian(std::span<const double>, std::span<const double>,
                                           std::span<double>) {
    throw std::logic_error("this problem does not provide a reaction Jacobian");
}

void SplitProblem::solve_reaction_shifted(double, std::span<const double>,
                                          std::span<const double>, std::span<double>) {
    throw std::logic_error("this problem does not provide a reaction Jacobian");
}

// ---------------------------------------------------------------------------

Problem1D::Problem1D(Discretization1D disc) : disc_(std::move(disc)) {}

void Problem1D::solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) {
    auto it = diffusion_cache_.find(sigma);
    if (it == diffusion_cache_.end()) {
        trim(diffusion_cache_);
        it = diffusion_cache_.emplace(sigma, std::make_unique<ShiftedOperator1D>(disc_, sigma)).first;
    }
    it->second->solve(b, x);
}

void Problem1D::linearize(std::span<const double> state) {
    linearized_state_.assign(state.begin(), state.end());
    jacobian_ = std::make_unique<BandedMatrix>(assemble_jacobian_1d(disc_, state));
    shifted_cache_.clear();
}

void Problem1D::apply_jacobian(std::span<const double> v, std::span<double> out) {
    if (!jacobian_) throw std::logic_error("Problem1D: linearize() must precede apply_jacobian()");
    jacobian_->multiply(v, out);
}

void Problem1D::solve_shifted(double sigma, std::span<const double> b, std::span<double> x) {
    if (!jacobian_) throw std::logic_error("Problem1D: linearize() must precede solve_shifted()");
    auto it = shifted_cache_.find(sigma);
    if (it == shifted_cache_.end()) {
        trim(shifted_cache_);
        it = shifted_cache_
                 .emplace(sigma, std::make_unique<ShiftedOperator1D>(disc_, sigma, linearized_state_))
                 .first;
    }
    it->second->solve(b, x);
}

void Problem1D::apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                        std::span<double> out) {
    cell_jacobian_apply(disc_.system(), state, v, out);
}

void Problem1D::solve_reaction_shifted(double sigma, std::span<const double> state,
                                       std::span<const double> b, std::span<double> x) {
    cell_shifted_solve(disc_.system(), sigma, state, b, x);
}

double Problem1D::l1_norm(std::span<const double> w) const {
    const std::size_t n = disc_.n_species();
    const auto h = disc_.grid().widths();
    double acc = 0.0;
    for (std::size_t i = 0; i < disc_.cells(); ++i) {
        double cell = 0.0;
        for (std::size_t s = 0; s < n; ++s) cell += std::abs(w[i * n + s]);
        acc += h[i] * cell;
    }
    return acc;
}

// ---------------------------------------------------------------------------

Problem2D::Problem2D(Discretization2D disc) : disc_(std::move(disc)) {}

void Problem2D::solve_diffusion(double sigma, std::span<const double> b, std::span<double> x) {
    auto it = diffusion_cache_.find(sigma);
    if (it == diffusion_cache_.end()) {
        trim(diffusion_cache_);
        it = diffusion_cache_.emplace(sigma, std::make_unique<ShiftedDiffusion2D>(disc_, sigma)).first;
    }
    it->second->solve(b, x);
    max_cg_iterations_ = std::max(max_cg_iterations_, it->second->last_stats().iterations);
}

void Problem2D::apply_reaction_jacobian(std::span<const double> state, std::span<const double> v,
                                        std::span<double> out) {
    cell_jacobian_apply(disc_.system(), state, v, out);
}

void Problem2D::solve_reaction_shifted(double sigma, std::span<const double> state,
                                       std::span<const double> b, std::span<double> x) {
    cell_shifted_solve(disc_.system(), sigma, state, b, x);
}

double Problem2D::l1_norm(std::span<const double> w) const {
    double acc = 0.0;
    for (double x : w) acc += std::abs(x);
    return acc * disc_.grid().cell_volume();
}

}  // namespace taxisfv
