#include "taxisfv/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "taxisfv/discretization.hpp"

namespace taxisfv {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), width_(kl + ku + 1), data_(n * (kl + ku + 1), 0.0) {
    if (n == 0) throw std::invalid_argument("BandedMatrix: empty matrix");
}

BandedMatrix BandedMatrix::identity(std::size_t n, std::size_t kl, std::size_t ku) {
    BandedMatrix m(n, kl, ku);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j)) {
        throw std::out_of_range("BandedMatrix: entry outside the band");
    }
    return data_[i * width_ + (j + kl_ - i)];
}

double BandedMatrix::get(std::size_t i, std::size_t j) const noexcept {
    if (i >= n_ || j >= n_ || !in_band(i, j)) return 0.0;
    return data_[i * width_ + (j + kl_ - i)];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) {
        throw std::invalid_argument("BandedMatrix::multiply: size mismatch");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        const double* row = &data_[i * width_ + kl_ - i];
        double acc = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

BandedLU::BandedLU(const BandedMatrix& a)
    : original_(a), n_(a.n_), kl_(a.kl_), ku_(a.ku_), w_(2 * a.kl_ + a.ku_ + 1),
      f_(a.n_ * (2 * a.kl_ + a.ku_ + 1), 0.0), piv_(a.n_) {
    const std::size_t uw = kl_ + ku_;  // upper width after pivoting
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        for (std::size_t j = j0; j <= j1; ++j) lu(i, j) = a.get(i, j);
    }
    double umax = 0.0, umin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t rlast = std::min(n_ - 1, k + kl_);
        std::size_t p = k;
        double best = std::abs(lu(k, k));
        for (std::size_t r = k + 1; r <= rlast; ++r) {
            if (std::abs(lu(r, k)) > best) {
                best = std::abs(lu(r, k));
                p = r;
            }
        }
        piv_[k] = p;
        if (best == 0.0 || !std::isfinite(best)) {
            throw LinearSolverError("BandedLU: matrix is singular at row " + std::to_string(k),
                                    std::numeric_limits<double>::infinity());
        }
        const std::size_t clast = std::min(n_ - 1, k + uw);
        if (p != k) {
            for (std::size_t j = k; j <= clast; ++j) std::swap(lu(k, j), lu(p, j));
        }
        const double pivot = lu(k, k);
        umax = std::max(umax, std::abs(pivot));
        umin = std::min(umin, std::abs(pivot));
        for (std::size_t r = k + 1; r <= rlast; ++r) {
            const double l = lu(r, k) / pivot;
            lu(r, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j <= clast; ++j) lu(r, j) -= l * lu(k, j);
        }
    }
    pivot_ratio_ = umax / umin;
    if (pivot_ratio_ > kConditionLimit) {
        throw LinearSolverError("BandedLU: conditioning estimate exceeds 1e14", pivot_ratio_);
    }
}

void BandedLU::solve(std::span<const double> b, std::span<double> x) const {
    if (b.size() != n_ || x.size() != n_) {
        throw std::invalid_argument("BandedLU::solve: size mismatch");
    }
    auto& y = y_;
    y.assign(b.begin(), b.end());
    for (std::size_t k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(y[k], y[piv_[k]]);
        const std::size_t rlast = std::min(n_ - 1, k + kl_);
        const double yk = y[k];
        if (yk == 0.0) continue;
        for (std::size_t r = k + 1; r <= rlast; ++r) y[r] -= lu(r, k) * yk;
    }
    const std::size_t uw = kl_ + ku_;
    for (std::size_t k = n_; k-- > 0;) {
        const std::size_t clast = std::min(n_ - 1, k + uw);
        double acc = y[k];
        for (std::size_t j = k + 1; j <= clast; ++j) acc -= lu(k, j) * x[j];
        x[k] = acc / lu(k, k);
    }
    auto& r = r_;
    r.resize(n_);
    original_.multiply(x, r);
    double res = 0.0;
    for (std::size_t i = 0; i < n_; ++i) res = std::max(res, std::abs(r[i] - b[i]));
    if (!(res <= 1e-10 * (1.0 + inf_norm(b)))) {
        throw LinearSolverError("BandedLU: residual check failed", res);
    }
}

std::vector<double> BandedLU::solve(std::span<const double> b) const {
    std::vector<double> x(b.size());
    solve(b, x);
    return x;
}

// ---------------------------------------------------------------------------

BandedMatrix assemble_jacobian_1d(const Discretization1D& disc, std::span<const double> state) {
    const std::size_t N = disc.cells(), n = disc.n_species();
    if (state.size() != N * n) {
        throw std::invalid_argument("assemble_jacobian_1d: state size mismatch");
    }
    BandedMatrix J(N * n, 2 * n, 2 * n);
    const auto D = disc.system().diffusivities();
    std::vector<double> jr(n * n);
    for (std::size_t i = 0; i < N; ++i) {
        const auto& a = disc.laplacian_row(i);
        for (int off = -2; off <= 2; ++off) {
            const auto j = static_cast<std::ptrdiff_t>(i) + off;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(N) || a[off + 2] == 0.0) continue;
            for (std::size_t s = 0; s < n; ++s) {
                if (D[s] != 0.0) J.at(i * n + s, static_cast<std::size_t>(j) * n + s) += D[s] * a[off + 2];
            }
        }
        disc.system().reaction_jacobian(state.subspan(i * n, n), jr);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t r = 0; r < n; ++r) {
                if (jr[s * n + r] != 0.0) J.at(i * n + s, i * n + r) += jr[s * n + r];
            }
        }
    }
    return J;
}

namespace {

BandedMatrix species_diffusion_matrix(const Discretization1D& disc, std::size_t s, double sigma) {
    const std::size_t N = disc.cells();
    const double d = disc.system().diffusivity(s);
    BandedMatrix m = BandedMatrix::identity(N, 2, 2);
    if (d == 0.0 || sigma == 0.0) return m;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& a = disc.laplacian_row(i);
        for (int off = -2; off <= 2; ++off) {
            const auto j = static_cast<std::ptrdiff_t>(i) + off;
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(N) || a[off + 2] == 0.0) continue;
            m.at(i, static_cast<std::size_t>(j)) -= sigma * d * a[off + 2];
        }
    }
    return m;
}

}  // namespace

BandedMatrix assemble_shifted_operator(const Discretization1D& disc, double sigma,
                                       std::span<const double> state, bool with_reaction) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("assemble_shifted_operator: sigma < 0");
    const std::size_t N = disc.cells(), n = disc.n_species();
    BandedMatrix J = [&] {
        if (with_reaction) return assemble_jacobian_1d(disc, state);
        BandedMatrix m(N * n, 2 * n, 2 * n);
        const auto D = disc.system().diffusivities();
        for (std::size_t i = 0; i < N; ++i) {
            const auto& a = disc.laplacian_row(i);
            for (int off = -2; off <= 2; ++off) {
                const auto j = static_cast<std::ptrdiff_t>(i) + off;
                if (j < 0 || j >= static_cast<std::ptrdiff_t>(N)) continue;
                for (std::size_t s = 0; s < n; ++s) {
                    m.at(i * n + s, static_cast<std::size_t>(j) * n + s) = D[s] * a[off + 2];
                }
            }
        }
        return m;
    }();
    BandedMatrix A(N * n, 2 * n, 2 * n);
    for (std::size_t i = 0; i < N * n; ++i) {
        const std::size_t j0 = i >= 2 * n ? i - 2 * n : 0;
        const std::size_t j1 = std::min(N * n - 1, i + 2 * n);
        for (std::size_t j = j0; j <= j1; ++j) {
            A.at(i, j) = (i == j ? 1.0 : 0.0) - sigma * J.get(i, j);
        }
    }
    return A;
}

ShiftedOperator1D::ShiftedOperator1D(const Discretization1D& disc, double sigma)
    : kind_(Kind::DiffusionOnly), sigma_(sigma), cells_(disc.cells()), n_(disc.n_species()) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("ShiftedOperator1D: sigma < 0");
    for (std::size_t s = 0; s < n_; ++s) {
        matrices_.push_back(std::make_unique<BandedMatrix>(species_diffusion_matrix(disc, s, sigma)));
        if (disc.system().diffusivity(s) != 0.0 && sigma != 0.0) {
            factors_.push_back(std::make_unique<BandedLU>(*matrices_.back()));
        } else {
            factors_.push_back(nullptr);
        }
    }
}

ShiftedOperator1D::ShiftedOperator1D(const Discretization1D& disc, double sigma,
                                     std::span<const double> state)
    : kind_(Kind::DiffusionReaction), sigma_(sigma), cells_(disc.cells()), n_(disc.n_species()) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("ShiftedOperator1D: sigma < 0");
    matrices_.push_back(
        std::make_unique<BandedMatrix>(assemble_shifted_operator(disc, sigma, state, true)));
    factors_.push_back(std::make_unique<BandedLU>(*matrices_.back()));
}

void ShiftedOperator1D::solve(std::span<const double> b, std::span<double> x) const {
    if (b.size() != cells_ * n_ || x.size() != cells_ * n_) {
        throw std::invalid_argument("ShiftedOperator1D::solve: size mismatch");
    }
    if (kind_ == Kind::DiffusionReaction) {
        factors_.front()->solve(b, x);
        return;
    }
    auto& bs = bs_;
    auto& xs = xs_;
    bs.resize(cells_);
    xs.resize(cells_);
    for (std::size_t s = 0; s < n_; ++s) {
        if (!factors_[s]) {
            for (std::size_t i = 0; i < cells_; ++i) x[i * n_ + s] = b[i * n_ + s];
            continue;
        }
        for (std::size_t i = 0; i < cells_; ++i) bs[i] = b[i * n_ + s];
        factors_[s]->solve(bs, xs);
        for (std::size_t i = 0; i < cells_; ++i) x[i * n_ + s] = xs[i];
    }
}

void ShiftedOperator1D::apply(std::span<const double> x, std::span<double> y) const {
    if (kind_ == Kind::DiffusionReaction) {
        matrices_.front()->multiply(x, y);
        return;
    }
    std::vector<double> xs(cells_), ys(cells_);
    for (std::size_t s = 0; s < n_; ++s) {
        for (std::size_t i = 0; i < cells_; ++i) xs[i] = x[i * n_ + s];
        matrices_[s]->multiply(xs, ys);
        for (std::size_t i = 0; i < cells_; ++i) y[i * n_ + s] = ys[i];
    }
}

const BandedMatrix& ShiftedOperator1D::matrix(std::size_t species) const {
    return *matrices_.at(kind_ == Kind::DiffusionReaction ? 0 : species);
}

// ---------------------------------------------------------------------------

struct ShiftedDiffusion2D::Impl {
    using Solver =
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>;
    std::size_t cells = 0, n = 0;
    std::vector<std::unique_ptr<Eigen::SparseMatrix<double>>> matrices;
    std::vector<std::unique_ptr<Solver>> solvers;
};

ShiftedDiffusion2D::ShiftedDiffusion2D(const Discretization2D& disc, double sigma)
    : sigma_(sigma), impl_(std::make_unique<Impl>()) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("ShiftedDiffusion2D: sigma < 0");
    const Grid2D& g = disc.grid();
    const int L = g.nx(), M = g.ny();
    impl_->cells = g.size();
    impl_->n = disc.n_species();
    const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
    const auto N = static_cast<Eigen::Index>(impl_->cells);
    const int max_iter = static_cast<int>(10.0 * std::sqrt(static_cast<double>(impl_->cells)));
    for (std::size_t s = 0; s < impl_->n; ++s) {
        const double d = disc.system().diffusivity(s);
        if (d == 0.0 || sigma == 0.0) {
            impl_->matrices.push_back(nullptr);
            impl_->solvers.push_back(nullptr);
            continue;
        }
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(impl_->cells * 5);
        const double cx = sigma * d * ix2, cy = sigma * d * iy2;
        for (int j = 0; j < M; ++j) {
            for (int i = 0; i < L; ++i) {
                const Eigen::Index c = i + static_cast<Eigen::Index>(j) * L;
                double diag = 1.0;
                auto link = [&](Eigen::Index nb, double coeff) {
                    trip.emplace_back(c, nb, -coeff);
                    diag += coeff;
                };
                if (i > 0) link(c - 1, cx);
                if (i + 1 < L) link(c + 1, cx);
                if (j > 0) link(c - L, cy);
                if (j + 1 < M) link(c + L, cy);
                trip.emplace_back(c, c, diag);
            }
        }
        auto A = std::make_unique<Eigen::SparseMatrix<double>>(N, N);
        A->setFromTriplets(trip.begin(), trip.end());
        auto solver = std::make_unique<Impl::Solver>();
        solver->setTolerance(kTolerance);
        solver->setMaxIterations(std::max(1, max_iter));
        solver->compute(*A);
        impl_->matrices.push_back(std::move(A));
        impl_->solvers.push_back(std::move(solver));
    }
}

ShiftedDiffusion2D::~ShiftedDiffusion2D() = default;
ShiftedDiffusion2D::ShiftedDiffusion2D(ShiftedDiffusion2D&&) noexcept = default;
ShiftedDiffusion2D& ShiftedDiffusion2D::operator=(ShiftedDiffusion2D&&) noexcept = default;

void ShiftedDiffusion2D::solve(std::span<const double> b, std::span<double> x) const {
    const std::size_t N = impl_->cells, n = impl_->n;
    if (b.size() != N * n || x.size() != N * n) {
        throw std::invalid_argument("ShiftedDiffusion2D::solve: size mismatch");
    }
    stats_ = {};
    Eigen::VectorXd bs(static_cast<Eigen::Index>(N)), xs(static_cast<Eigen::Index>(N));
    for (std::size_t s = 0; s < n; ++s) {
        if (!impl_->solvers[s]) {
            for (std::size_t i = 0; i < N; ++i) x[i * n + s] = b[i * n + s];
            continue;
        }
        for (std::size_t i = 0; i < N; ++i) {
            bs[static_cast<Eigen::Index>(i)] = b[i * n + s];
            xs[static_cast<Eigen::Index>(i)] = b[i * n + s];
        }
        auto& solver = *impl_->solvers[s];
        xs = solver.solveWithGuess(bs, xs);
        stats_.iterations = std::max(stats_.iterations, static_cast<int>(solver.iterations()));
        stats_.residual = std::max(stats_.residual, solver.error());
        if (solver.info() != Eigen::Success) {
            throw LinearSolverError("ShiftedDiffusion2D: CG did not reach tolerance",
                                    solver.error());
        }
        for (std::size_t i = 0; i < N; ++i) x[i * n + s] = xs[static_cast<Eigen::Index>(i)];
    }
}

}  // namespace taxisfv
