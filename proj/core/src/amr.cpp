#include "taxisfv/amr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace taxisfv {

namespace {

std::optional<std::size_t> sibling_of(const Grid1D& g, std::size_t i) {
    if (i + 1 < g.size() && g.are_siblings(i)) return i + 1;
    if (i > 0 && g.are_siblings(i - 1)) return i - 1;
    return std::nullopt;
}

void apply_refinement_rule(const Grid1D& g, std::vector<char>& refine) {
    const std::size_t N = g.size();
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < N; ++i) {
        if (refine[i]) queue.push_back(i);
    }
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        for (const std::size_t j : {i - 1, i + 1}) {
            if (j >= N) continue;  // wraps for i == 0
            if (g.level(j) < g.level(i) && !refine[j]) {
                refine[j] = 1;
                queue.push_back(j);
            }
        }
    }
}

// Drops marks whose sibling is unmarked; returns true if anything changed.
bool pair_marks(const Grid1D& g, std::vector<char>& coarsen) {
    bool changed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!coarsen[i]) continue;
        const auto s = sibling_of(g, i);
        if (!s || !coarsen[*s]) {
            coarsen[i] = 0;
            changed = true;
        }
    }
    return changed;
}

void apply_coarsening_rule(const Grid1D& g, std::vector<char>& coarsen) {
    const std::size_t N = g.size();
    bool changed = true;
    while (changed) {
        changed = pair_marks(g, coarsen);
        for (std::size_t i = 0; i < N; ++i) {
            if (!coarsen[i]) continue;
            for (const std::size_t j : {i - 1, i + 1}) {
                if (j >= N) continue;
                if (g.level(j) > g.level(i) && !coarsen[j]) {
                    coarsen[i] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }
}

std::vector<double> limited_slopes(const Grid1D& g, std::span<const double> w, std::size_t n) {
    const std::size_t N = g.size();
    std::vector<double> s(N * n, 0.0);
    const auto h = g.widths();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            s[i * n + r] = mc_slope_nonuniform(w[(i - 1) * n + r], w[i * n + r], w[(i + 1) * n + r],
                                               h[i - 1], h[i], h[i + 1]);
        }
    }
    return s;
}

}  // namespace

std::string_view monitor_name(MonitorKind k) noexcept {
    return k == MonitorKind::Gradient ? "gradient" : "velocity_error";
}

std::optional<MonitorKind> parse_monitor(std::string_view name) noexcept {
    if (name == "gradient") return MonitorKind::Gradient;
    if (name == "velocity_error") return MonitorKind::VelocityError;
    return std::nullopt;
}

void AmrConfig::validate() const {
    if (!(monitor.c_coa < monitor.c_ref)) {
        throw std::invalid_argument("AMR: c_coa must be smaller than c_ref");
    }
    if (n_ref < 1 || n_coa < 1) throw std::invalid_argument("AMR: n_ref and n_coa must be >= 1");
    if (l_max < 1 || l_max > kMaxRefinementDepth + 1) {
        throw std::invalid_argument("AMR: l_max out of range");
    }
    if (cadence < 1) throw std::invalid_argument("AMR: cadence must be >= 1");
}

std::vector<double> monitor_gradient(const Grid1D& grid, std::span<const double> c) {
    const std::size_t N = grid.size();
    if (c.size() != N) throw std::invalid_argument("monitor_gradient: size mismatch");
    const auto h = grid.widths();
    std::vector<double> M(N, 0.0);
    for (std::size_t k = 1; k < N; ++k) {
        const double d = std::abs(c[k] - c[k - 1]) / (0.5 * (h[k - 1] + h[k]));
        M[k - 1] = std::max(M[k - 1], d);
        M[k] = std::max(M[k], d);
    }
    return M;
}

std::vector<double> monitor_velocity_error(const Discretization1D& disc, std::span<const double> w) {
    const std::size_t N = disc.cells();
    std::vector<double> P(N + 1), Pl(N + 1), M(N, 0.0);
    disc.velocities(w, P);
    disc.velocities_low(w, Pl);
    for (std::size_t k = 0; k <= N; ++k) {
        const double d = std::abs(P[k] - Pl[k]);
        if (k > 0) M[k - 1] = std::max(M[k - 1], d);
        if (k < N) M[k] = std::max(M[k], d);
    }
    return M;
}

std::vector<double> evaluate_monitor(MonitorKind kind, const Grid1D& grid,
                                     const SpeciesSystem& system, std::span<const double> w,
                                     const DiscretizationOptions& options) {
    const std::size_t n = system.n_species();
    if (kind == MonitorKind::Gradient) {
        std::vector<double> c(grid.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = w[i * n];
        return monitor_gradient(grid, c);
    }
    const Discretization1D disc(grid, system, options);
    return monitor_velocity_error(disc, w);
}

void enforce_smoothness(const Grid1D& grid, std::vector<char>& refine, std::vector<char>& coarsen) {
    const std::size_t N = grid.size();
    if (refine.size() != N || coarsen.size() != N) {
        throw std::invalid_argument("enforce_smoothness: marks do not match the grid");
    }
    apply_refinement_rule(grid, refine);
    for (std::size_t i = 0; i < N; ++i) {
        if (refine[i]) coarsen[i] = 0;
    }
    apply_coarsening_rule(grid, coarsen);
}

bool is_smooth(const Grid1D& grid) noexcept {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (std::abs(grid.level(i) - grid.level(i + 1)) > 1) return false;
    }
    return true;
}

std::vector<double> transfer_state(const Grid1D& from, const Grid1D& to, std::span<const double> w,
                                   std::size_t n) {
    if (from.base_cells() != to.base_cells() || from.a() != to.a() || from.b() != to.b()) {
        throw std::invalid_argument("transfer_state: grids do not share a base partition");
    }
    if (w.size() != from.size() * n) throw std::invalid_argument("transfer_state: size mismatch");
    const std::vector<double> slope = limited_slopes(from, w, n);
    const double unit = from.base_width() / static_cast<double>(Grid1D::units_per_level(0));
    const auto hf = from.widths();
    std::vector<double> out(to.size() * n, 0.0);

    std::size_t k = 0;  // old cell whose range contains the current position
    for (std::size_t i = 0; i < to.size(); ++i) {
        const std::int64_t o = to.offset_units(i);
        const std::int64_t wu = Grid1D::units_per_level(to.level(i));
        while (from.offset_units(k) + Grid1D::units_per_level(from.level(k)) <= o) ++k;
        const std::int64_t O = from.offset_units(k);
        const std::int64_t W = Grid1D::units_per_level(from.level(k));
        if (O <= o && o + wu <= O + W) {
            const double dx = static_cast<double>(2 * (o - O) + wu - W) * unit * 0.5;
            for (std::size_t r = 0; r < n; ++r) out[i * n + r] = w[k * n + r] + slope[k * n + r] * dx;
            continue;
        }
        double vol = 0.0;
        std::size_t j = k;
        for (; j < from.size() && from.offset_units(j) < o + wu; ++j) {
            vol += hf[j];
            for (std::size_t r = 0; r < n; ++r) out[i * n + r] += hf[j] * w[j * n + r];
        }
        for (std::size_t r = 0; r < n; ++r) out[i * n + r] /= vol;
        k = j - 1;
    }
    return out;
}

AdaptResult refine_sweep(const Grid1D& grid, std::span<const double> w, std::size_t n,
                         std::span<const double> monitor, const AmrConfig& config) {
    const std::size_t N = grid.size();
    std::vector<char> refine(N, 0), coarsen(N, 0);
    for (std::size_t i = 0; i < N; ++i) {
        refine[i] = monitor[i] > config.monitor.c_ref && grid.level(i) + 1 < config.l_max;
    }
    if (config.smooth) enforce_smoothness(grid, refine, coarsen);

    AdaptResult r{grid, {}, 0, 0};
    std::vector<int> levels;
    levels.reserve(N + N / 2);
    for (std::size_t i = 0; i < N; ++i) {
        if (refine[i]) {
            levels.push_back(grid.level(i) + 1);
            levels.push_back(grid.level(i) + 1);
            ++r.refined;
        } else {
            levels.push_back(grid.level(i));
        }
    }
    if (r.refined == 0) {
        r.state.assign(w.begin(), w.end());
        return r;
    }
    r.grid = grid.with_levels(std::move(levels));
    r.state = transfer_state(grid, r.grid, w, n);
    return r;
}

AdaptResult coarsen_sweep(const Grid1D& grid, std::span<const double> w, std::size_t n,
                          std::span<const double> monitor, const AmrConfig& config) {
    const std::size_t N = grid.size();
    std::vector<char> refine(N, 0), coarsen(N, 0);
    for (std::size_t i = 0; i < N; ++i) {
        coarsen[i] = monitor[i] < config.monitor.c_coa && grid.level(i) > 0;
    }
    if (config.smooth) {
        enforce_smoothness(grid, refine, coarsen);
    } else {
        pair_marks(grid, coarsen);
    }

    AdaptResult r{grid, {}, 0, 0};
    std::vector<int> levels;
    levels.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (i + 1 < N && grid.are_siblings(i) && coarsen[i] && coarsen[i + 1]) {
            levels.push_back(grid.level(i) - 1);
            ++r.coarsened;
            ++i;
        } else {
            levels.push_back(grid.level(i));
        }
    }
    if (r.coarsened == 0) {
        r.state.assign(w.begin(), w.end());
        return r;
    }
    r.grid = grid.with_levels(std::move(levels));
    r.state = transfer_state(grid, r.grid, w, n);
    return r;
}

AdaptResult adapt(const Grid1D& grid, std::span<const double> w, const SpeciesSystem& system,
                  const AmrConfig& config, const DiscretizationOptions& options) {
    config.validate();
    const std::size_t n = system.n_species();
    AdaptResult total{grid, std::vector<double>(w.begin(), w.end()), 0, 0};
    for (int s = 0; s < config.n_ref; ++s) {
        const auto M = evaluate_monitor(config.monitor.kind, total.grid, system, total.state, options);
        AdaptResult r = refine_sweep(total.grid, total.state, n, M, config);
        if (r.refined == 0) break;
        total.refined += r.refined;
        total.grid = std::move(r.grid);
        total.state = std::move(r.state);
    }
    for (int s = 0; s < config.n_coa; ++s) {
        const auto M = evaluate_monitor(config.monitor.kind, total.grid, system, total.state, options);
        AdaptResult r = coarsen_sweep(total.grid, total.state, n, M, config);
        if (r.coarsened == 0) break;
        total.coarsened += r.coarsened;
        total.grid = std::move(r.grid);
        total.state = std::move(r.state);
    }
    return total;
}

}  // namespace taxisfv
