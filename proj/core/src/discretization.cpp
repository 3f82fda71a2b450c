#include "taxisfv/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace taxisfv {

namespace {

bool all_equal(std::span<const double> h) {
    return std::all_of(h.begin(), h.end(), [&](double x) { return x == h.front(); });
}

void require_positive(std::span<const double> h, const char* what) {
    for (double x : h) {
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(what);
    }
}

void require_size(std::span<const double> a, std::size_t n, const char* what) {
    if (a.size() != n) throw std::invalid_argument(what);
}

}  // namespace

StencilDiff diffusion_coeffs(std::span<const double, 5> h) {
    require_positive(h, "diffusion_coeffs: widths must be positive");
    const double hm2 = h[0], hm1 = h[1], h0 = h[2], hp1 = h[3], hp2 = h[4];
    StencilDiff st;
    st.sigma = hm2 * hm2 + hp2 * hp2 + 2.0 * (hm1 * hm1 + hp1 * hp1) +
               3.0 * (hm1 * hm2 + hp1 * hp2) + h0 * (hp1 + hm1 + hp2 + hm2) -
               hm2 * (hp1 + hp2) - hm1 * (hp1 + hp2);
    if (all_equal(h)) {
        const double inv = 1.0 / (h0 * h0);
        st.alpha = {0.0, inv, -2.0 * inv, inv, 0.0};
        return st;
    }
    const double s = st.sigma;
    const double am2 = -8.0 * (hm1 - hp1) / ((hm2 + 2.0 * hm1 + 2.0 * h0 + 2.0 * hp1 + hp2) * s);
    const double dm = (h0 + hm1) * (hm1 + 2.0 * h0 + hp1) * s;
    const double am1 =
        8.0 * (hm1 * (4.0 * hm1 + 4.0 * hm2 + 2.0 * h0 - 4.0 * hp1 - 2.0 * hp2) + 3.0 * hp1 * hp1) /
            dm +
        8.0 * (hp2 * hp2 + 4.0 * hp1 * hp2 + h0 * hp2 + hm2 * (hm2 - 2.0 * hp1 - hp2 + h0)) / dm;
    const double dp = (h0 + hp1) * (hm1 + 2.0 * h0 + hp1) * s;
    const double ap1 =
        8.0 * (hp1 * (4.0 * hp1 + 4.0 * hp2 + 2.0 * h0 - 4.0 * hm1 - 2.0 * hm2) + 3.0 * hm1 * hm1) /
            dp +
        8.0 * (hm2 * hm2 + 4.0 * hm1 * hm2 + h0 * hm2 + hp2 * (hp2 - 2.0 * hm1 - hm2 + h0)) / dp;
    st.alpha = {am2, am1, -(am1 + ap1), ap1, -am2};
    return st;
}

StencilVel velocity_coeffs(std::span<const double, 4> h) {
    require_positive(h, "velocity_coeffs: widths must be positive");
    StencilVel st;
    if (all_equal(h)) {
        const double d = 24.0 * h[0];
        st.beta = {1.0 / d, -27.0 / d, 27.0 / d, -1.0 / d};
        return st;
    }
    const double hm1 = h[0], h0 = h[1], hp1 = h[2], hp2 = h[3];
    const double wide = hm1 + 2.0 * h0 + 2.0 * hp1 + hp2;
    st.beta[0] = (hp1 * (6.0 * h0 - 4.0 * hp1 - 2.0 * hp2) + 2.0 * h0 * hp2) /
                 ((h0 + hm1) * (hm1 + 2.0 * h0 + hp1) * wide);
    st.beta[1] = -(hp1 * (12.0 * h0 + 6.0 * hm1 - 2.0 * hp2 - 4.0 * hp1) +
                   hp2 * (2.0 * hm1 + 4.0 * h0)) /
                 ((hm1 + h0) * (h0 + hp1) * (h0 + 2.0 * hp1 + hp2));
    st.beta[2] = (h0 * (12.0 * hp1 + 6.0 * hp2 - 2.0 * hm1 - 4.0 * h0) +
                  hm1 * (2.0 * hp2 + 4.0 * hp1)) /
                 ((hp1 + hp2) * (h0 + hp1) * (hm1 + 2.0 * h0 + hp1));
    st.beta[3] = -(h0 * (6.0 * hp1 - 4.0 * h0 - 2.0 * hm1) + 2.0 * hp1 * hm1) /
                 ((hp1 + hp2) * (h0 + 2.0 * hp1 + hp2) * wide);
    return st;
}

double minmod(std::span<const double> v) noexcept {
    if (v.empty()) return 0.0;
    const bool all_pos = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    if (all_pos) return *std::min_element(v.begin(), v.end());
    const bool all_neg = std::all_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
    if (all_neg) return *std::max_element(v.begin(), v.end());
    return 0.0;
}

double minmod(double a, double b, double c) noexcept {
    if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
    if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
    return 0.0;
}

double mc_slope_uniform(double cm, double c0, double cp, double h) noexcept {
    return minmod(2.0 * (c0 - cm) / h, (cp - cm) / (2.0 * h), 2.0 * (cp - c0) / h);
}

double mc_slope_nonuniform(double cm, double c0, double cp, double hm, double h0,
                           double hp) noexcept {
    const double km = hm + h0;
    const double k0 = h0 + hp;
    const double ks = km + k0;
    const double central = -2.0 * k0 * cm / (km * ks) +
                           2.0 * (k0 * k0 - km * km) * c0 / (km * k0 * ks) +
                           2.0 * km * cp / (k0 * ks);
    return minmod(4.0 * (c0 - cm) / km, central, 4.0 * (cp - c0) / k0);
}

// ---------------------------------------------------------------------------
// 1D

Discretization1D::Discretization1D(Grid1D grid, SpeciesSystem system,
                                   DiscretizationOptions options)
    : grid_(std::move(grid)), system_(std::move(system)), options_(options) {
    if (!(options_.tau_max > 0.0)) {
        throw std::invalid_argument("Discretization1D: tau_max must be positive");
    }
    const std::size_t N = grid_.size();
    const auto h = grid_.widths();
    laplacian_.assign(N, {0.0, 0.0, 0.0, 0.0, 0.0});
    three_point_.assign(N, 0);
    for (std::size_t i = 0; i < N; ++i) {
        const bool near_boundary = i < 2 || i + 2 >= N;
        const bool locally_uniform = i >= 1 && i + 1 < N && h[i - 1] == h[i] && h[i + 1] == h[i];
        if (near_boundary || locally_uniform) {
            three_point_[i] = 1;
            auto& row = laplacian_[i];
            if (locally_uniform) {
                const double inv = 1.0 / (h[i] * h[i]);
                row = {0.0, inv, -2.0 * inv, inv, 0.0};
                continue;
            }
            if (i > 0) row[1] = 2.0 / ((h[i - 1] + h[i]) * h[i]);
            if (i + 1 < N) row[3] = 2.0 / ((h[i] + h[i + 1]) * h[i]);
            row[2] = -(row[1] + row[3]);
        } else {
            laplacian_[i] = diffusion_coeffs(h.subspan(i - 2).first<5>()).alpha;
        }
    }

    vel_.assign(N + 1, {0.0, 0.0, 0.0, 0.0});
    vel_four_point_.assign(N + 1, 0);
    inv_dual_.assign(N + 1, 0.0);
    for (std::size_t k = 1; k < N; ++k) {
        inv_dual_[k] = 2.0 / (h[k - 1] + h[k]);
        if (k >= 2 && k + 1 < N) {
            vel_four_point_[k] = 1;
            vel_[k] = velocity_coeffs(h.subspan(k - 2).first<4>()).beta;
        }
    }
}

void Discretization1D::diffusion(std::span<const double> w, std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    require_size(w, N * n, "diffusion: state size mismatch");
    require_size(out, N * n, "diffusion: output size mismatch");
    const auto D = system_.diffusivities();
    for (std::size_t i = 0; i < N; ++i) {
        const auto& a = laplacian_[i];
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(N - 1, i + 2);
        for (std::size_t s = 0; s < n; ++s) {
            if (D[s] == 0.0) {
                out[i * n + s] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) acc += a[j + 2 - i] * w[j * n + s];
            out[i * n + s] = D[s] * acc;
        }
    }
}

void Discretization1D::interface_derivatives(std::span<const double> w, std::size_t s, bool low,
                                             std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    out[0] = 0.0;
    out[N] = 0.0;
    for (std::size_t k = 1; k < N; ++k) {
        if (!low && vel_four_point_[k]) {
            const auto& b = vel_[k];
            out[k] = b[0] * w[(k - 2) * n + s] + b[1] * w[(k - 1) * n + s] + b[2] * w[k * n + s] +
                     b[3] * w[(k + 1) * n + s];
        } else {
            out[k] = (w[k * n + s] - w[(k - 1) * n + s]) * inv_dual_[k];
        }
    }
}

void Discretization1D::velocities(std::span<const double> w, std::span<double> P) const {
    const std::size_t N = cells();
    require_size(w, unknowns(), "velocities: state size mismatch");
    require_size(P, N + 1, "velocities: output size mismatch");
    std::fill(P.begin(), P.end(), 0.0);
    const auto row = system_.taxis_row();
    if (row.empty()) return;
    std::vector<double> d(N + 1);
    for (std::size_t r = 0; r < row.size(); ++r) {
        if (row[r] == 0.0) continue;
        interface_derivatives(w, r, false, d);
        for (std::size_t k = 1; k < N; ++k) P[k] += row[r] * d[k];
    }
    if (const auto S = system_.saturation()) {
        for (std::size_t k = 1; k < N; ++k) P[k] = saturate(P[k], *S);
    }
}

void Discretization1D::velocities_low(std::span<const double> w, std::span<double> P) const {
    const std::size_t N = cells();
    require_size(w, unknowns(), "velocities_low: state size mismatch");
    require_size(P, N + 1, "velocities_low: output size mismatch");
    std::fill(P.begin(), P.end(), 0.0);
    const auto row = system_.taxis_row();
    if (row.empty()) return;
    std::vector<double> d(N + 1);
    for (std::size_t r = 0; r < row.size(); ++r) {
        if (row[r] == 0.0) continue;
        interface_derivatives(w, r, true, d);
        for (std::size_t k = 1; k < N; ++k) P[k] += row[r] * d[k];
    }
    if (const auto S = system_.saturation()) {
        for (std::size_t k = 1; k < N; ++k) P[k] = saturate(P[k], *S);
    }
}

void Discretization1D::slopes(std::span<const double> w, std::size_t s,
                              std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    require_size(out, N, "slopes: output size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    if (options_.first_order_fluxes) return;
    const auto h = grid_.widths();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double cm = w[(i - 1) * n + s], c0 = w[i * n + s], cp = w[(i + 1) * n + s];
        if (h[i - 1] == h[i] && h[i + 1] == h[i]) {
            out[i] = mc_slope_uniform(cm, c0, cp, h[i]);
        } else {
            out[i] = mc_slope_nonuniform(cm, c0, cp, h[i - 1], h[i], h[i + 1]);
        }
    }
}

void Discretization1D::advection(std::span<const double> w, std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    require_size(w, N * n, "advection: state size mismatch");
    require_size(out, N * n, "advection: output size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const auto sa = system_.advected_species();
    if (!sa) return;
    const auto h = grid_.widths();
    std::vector<double> P(N + 1), slope(N), H(N + 1, 0.0);
    velocities(w, P);
    slopes(w, *sa, slope);
    for (std::size_t k = 1; k < N; ++k) {
        const double p = P[k];
        if (p >= 0.0) {
            H[k] = p * (w[(k - 1) * n + *sa] + 0.5 * h[k - 1] * slope[k - 1]);
        } else {
            H[k] = p * (w[k * n + *sa] - 0.5 * h[k] * slope[k]);
        }
    }
    for (std::size_t i = 0; i < N; ++i) out[i * n + *sa] = -(H[i + 1] - H[i]) / h[i];
}

void Discretization1D::reaction(std::span<const double> w, std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    require_size(w, N * n, "reaction: state size mismatch");
    require_size(out, N * n, "reaction: output size mismatch");
    for (std::size_t i = 0; i < N; ++i) {
        system_.reaction(w.subspan(i * n, n), out.subspan(i * n, n));
    }
}

double Discretization1D::max_velocity_rate(std::span<const double> w) const {
    const std::size_t N = cells();
    std::vector<double> P(N + 1);
    velocities(w, P);
    const auto h = grid_.widths();
    double rate = 0.0;
    for (std::size_t k = 1; k < N; ++k) {
        rate = std::max(rate, std::abs(P[k]) / std::min(h[k - 1], h[k]));
    }
    return rate;
}

double Discretization1D::cfl_timestep(std::span<const double> w, double cfl) const {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw std::invalid_argument("cfl_timestep: CFL must lie in (0, 1]");
    }
    const double rate = max_velocity_rate(w);
    if (rate == 0.0) return options_.tau_max;
    return std::min(options_.tau_max, cfl / rate);
}

double Discretization1D::explicit_diffusion_limit() const {
    const double dmax = system_.max_diffusivity();
    if (dmax == 0.0) return std::numeric_limits<double>::infinity();
    const auto h = grid_.widths();
    const double hmin = *std::min_element(h.begin(), h.end());
    return hmin * hmin / (2.0 * dmax);
}

StateField Discretization1D::diffusion(const StateField& w) const {
    w.require_bound(grid_);
    StateField out(w.grid_revision(), w.cells(), w.n_species());
    diffusion(w.values(), out.values());
    return out;
}

StateField Discretization1D::advection(const StateField& w) const {
    w.require_bound(grid_);
    StateField out(w.grid_revision(), w.cells(), w.n_species());
    advection(w.values(), out.values());
    return out;
}

StateField Discretization1D::reaction(const StateField& w) const {
    w.require_bound(grid_);
    StateField out(w.grid_revision(), w.cells(), w.n_species());
    reaction(w.values(), out.values());
    return out;
}

double Discretization1D::mass(std::span<const double> w, std::size_t s) const {
    const std::size_t n = n_species();
    const auto h = grid_.widths();
    double m = 0.0;
    for (std::size_t i = 0; i < cells(); ++i) m += h[i] * w[i * n + s];
    return m;
}

// ---------------------------------------------------------------------------
// 2D

Discretization2D::Discretization2D(Grid2D grid, SpeciesSystem system,
                                   DiscretizationOptions options)
    : grid_(grid), system_(std::move(system)), options_(options) {
    if (system_.saturation()) {
        throw std::invalid_argument("Discretization2D: saturated fluxes are 1D only");
    }
    if (!(options_.tau_max > 0.0)) {
        throw std::invalid_argument("Discretization2D: tau_max must be positive");
    }
}

void Discretization2D::diffusion(std::span<const double> w, std::span<double> out) const {
    const std::size_t L = grid_.nx(), M = grid_.ny(), n = n_species();
    require_size(w, L * M * n, "diffusion: state size mismatch");
    require_size(out, L * M * n, "diffusion: output size mismatch");
    const double ix2 = 1.0 / (grid_.hx() * grid_.hx());
    const double iy2 = 1.0 / (grid_.hy() * grid_.hy());
    const auto D = system_.diffusivities();
    for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t i = 0; i < L; ++i) {
            const std::size_t c = i + j * L;
            for (std::size_t s = 0; s < n; ++s) {
                if (D[s] == 0.0) {
                    out[c * n + s] = 0.0;
                    continue;
                }
                const double w0 = w[c * n + s];
                double acc = 0.0;
                if (i > 0) acc += (w[(c - 1) * n + s] - w0) * ix2;
                if (i + 1 < L) acc += (w[(c + 1) * n + s] - w0) * ix2;
                if (j > 0) acc += (w[(c - L) * n + s] - w0) * iy2;
                if (j + 1 < M) acc += (w[(c + L) * n + s] - w0) * iy2;
                out[c * n + s] = D[s] * acc;
            }
        }
    }
}

namespace {

// Derivative at interface k of a line of `len` values (u(m) gives value m), spacing h.
template <typename U>
double line_derivative(const U& u, std::size_t k, std::size_t len, double h) {
    if (k >= 2 && k + 1 < len) {
        return (u(k - 2) - 27.0 * u(k - 1) + 27.0 * u(k) - u(k + 1)) / (24.0 * h);
    }
    return (u(k) - u(k - 1)) / h;
}

}  // namespace

void Discretization2D::velocities(std::span<const double> w, std::span<double> Px,
                                  std::span<double> Py) const {
    const std::size_t L = grid_.nx(), M = grid_.ny(), n = n_species();
    require_size(Px, (L + 1) * M, "velocities: Px size mismatch");
    require_size(Py, L * (M + 1), "velocities: Py size mismatch");
    std::fill(Px.begin(), Px.end(), 0.0);
    std::fill(Py.begin(), Py.end(), 0.0);
    const auto row = system_.taxis_row();
    if (row.empty()) return;
    const double hx = grid_.hx(), hy = grid_.hy();
    for (std::size_t r = 0; r < row.size(); ++r) {
        const double chi = row[r];
        if (chi == 0.0) continue;
        for (std::size_t j = 0; j < M; ++j) {
            auto u = [&](std::size_t m) { return w[(m + j * L) * n + r]; };
            for (std::size_t k = 1; k < L; ++k) Px[k + j * (L + 1)] += chi * line_derivative(u, k, L, hx);
        }
        for (std::size_t i = 0; i < L; ++i) {
            auto u = [&](std::size_t m) { return w[(i + m * L) * n + r]; };
            for (std::size_t k = 1; k < M; ++k) Py[i + k * L] += chi * line_derivative(u, k, M, hy);
        }
    }
}

void Discretization2D::advection(std::span<const double> w, std::span<double> out) const {
    const std::size_t L = grid_.nx(), M = grid_.ny(), n = n_species();
    require_size(w, L * M * n, "advection: state size mismatch");
    require_size(out, L * M * n, "advection: output size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const auto sa_opt = system_.advected_species();
    if (!sa_opt) return;
    const std::size_t sa = *sa_opt;
    const double hx = grid_.hx(), hy = grid_.hy();
    std::vector<double> Px((L + 1) * M), Py(L * (M + 1));
    velocities(w, Px, Py);
    auto c = [&](std::size_t i, std::size_t j) { return w[(i + j * L) * n + sa]; };
    std::vector<double> sx(L * M, 0.0), sy(L * M, 0.0);
    if (!options_.first_order_fluxes) {
        for (std::size_t j = 0; j < M; ++j) {
            for (std::size_t i = 0; i < L; ++i) {
                if (i > 0 && i + 1 < L) {
                    sx[i + j * L] = mc_slope_uniform(c(i - 1, j), c(i, j), c(i + 1, j), hx);
                }
                if (j > 0 && j + 1 < M) {
                    sy[i + j * L] = mc_slope_uniform(c(i, j - 1), c(i, j), c(i, j + 1), hy);
                }
            }
        }
    }
    for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t k = 1; k < L; ++k) {
            const double p = Px[k + j * (L + 1)];
            const std::size_t left = (k - 1) + j * L, right = k + j * L;
            const double H = p >= 0.0 ? p * (c(k - 1, j) + 0.5 * hx * sx[left])
                                      : p * (c(k, j) - 0.5 * hx * sx[right]);
            out[left * n + sa] -= H / hx;
            out[right * n + sa] += H / hx;
        }
    }
    for (std::size_t k = 1; k < M; ++k) {
        for (std::size_t i = 0; i < L; ++i) {
            const double p = Py[i + k * L];
            const std::size_t low = i + (k - 1) * L, high = i + k * L;
            const double H = p >= 0.0 ? p * (c(i, k - 1) + 0.5 * hy * sy[low])
                                      : p * (c(i, k) - 0.5 * hy * sy[high]);
            out[low * n + sa] -= H / hy;
            out[high * n + sa] += H / hy;
        }
    }
}

void Discretization2D::reaction(std::span<const double> w, std::span<double> out) const {
    const std::size_t N = cells(), n = n_species();
    require_size(w, N * n, "reaction: state size mismatch");
    require_size(out, N * n, "reaction: output size mismatch");
    for (std::size_t i = 0; i < N; ++i) {
        system_.reaction(w.subspan(i * n, n), out.subspan(i * n, n));
    }
}

double Discretization2D::max_velocity_rate(std::span<const double> w) const {
    const std::size_t L = grid_.nx(), M = grid_.ny();
    std::vector<double> Px((L + 1) * M), Py(L * (M + 1));
    velocities(w, Px, Py);
    double rate = 0.0;
    for (double p : Px) rate = std::max(rate, std::abs(p) / grid_.hx());
    for (double p : Py) rate = std::max(rate, std::abs(p) / grid_.hy());
    return rate;
}

double Discretization2D::cfl_timestep(std::span<const double> w, double cfl) const {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw std::invalid_argument("cfl_timestep: CFL must lie in (0, 1]");
    }
    const double rate = max_velocity_rate(w);
    if (rate == 0.0) return options_.tau_max;
    return std::min(options_.tau_max, cfl / rate);
}

double Discretization2D::explicit_diffusion_limit() const {
    const double dmax = system_.max_diffusivity();
    if (dmax == 0.0) return std::numeric_limits<double>::infinity();
    const double hx = grid_.hx(), hy = grid_.hy();
    return 1.0 / (2.0 * dmax * (1.0 / (hx * hx) + 1.0 / (hy * hy)));
}

double Discretization2D::mass(std::span<const double> w, std::size_t s) const {
    const std::size_t n = n_species();
    double m = 0.0;
    for (std::size_t c = 0; c < cells(); ++c) m += w[c * n + s];
    return m * grid_.cell_volume();
}

}  // namespace taxisfv
