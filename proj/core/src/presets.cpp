#include "taxisfv/presets.hpp"

#include <cmath>

namespace taxisfv {

RunConfig preset_config(PresetId id, bool paper_scale) {
    RunConfig c;
    c.preset = id;
    c.paper_scale = paper_scale;
    switch (id) {
        case PresetId::I:
            c.domain_a = 0.0;
            c.domain_b = 5.0;
            c.cells = 2000;
            if (paper_scale) {
                c.t_end = 60.0;
                c.reference_cells = 50000;
                c.test_cells = {100, 200, 400, 800, 1000, 2000, 3000, 4000, 5000};
            } else {
                c.t_end = 10.0;
                c.reference_cells = 10000;
                c.test_cells = {250, 500, 1000};
            }
            c.amr_config.monitor = {MonitorKind::Gradient, 55.0, 35.0};
            c.amr_config.n_ref = 1;
            c.amr_config.n_coa = 3;
            c.amr_config.l_max = 5;
            c.amr_uniform_cells = {400, 600, 800};
            break;
        case PresetId::II:
            c.upa.D_c = 5.3e-3;
            c.domain_a = 0.0;
            c.domain_b = 5.0;
            c.cells = 2000;
            if (paper_scale) {
                c.t_end = 50.0;
                c.reference_cells = 100000;
                c.test_cells = {250, 500, 1000, 2000, 4000};
            } else {
                c.t_end = 20.0;
                c.reference_cells = 20000;
                c.test_cells = {250, 500, 1000, 2000};
            }
            break;
        case PresetId::TwoD:
            c.domain_a = paper_scale ? -15.0 : -7.5;
            c.domain_b = -c.domain_a;
            c.cells = paper_scale ? 600 : 150;
            c.t_end = paper_scale ? 200.0 : 50.0;
            c.output_interval = 10.0;
            c.window_a = 0.0;
            c.window_b = 5.0;
            break;
        case PresetId::Reduced:
            c.domain_a = 0.0;
            c.domain_b = 10.0;
            c.cells = 400;
            c.t_end = 10.0;
            c.epsilon = 0.5;
            c.saturation = 0.01;
            break;
    }
    return c;
}

void apply_amr_bench_defaults(RunConfig& c) {
    c.amr = true;
    c.cells = 400;
    c.t_end = 60.0;
    c.reference_cells = c.paper_scale ? 50000 : 12800;
}

SpeciesSystem build_system(const RunConfig& c) {
    if (c.preset == PresetId::Reduced) return make_reduced_system(c.reduced, c.saturation);
    return make_upa_system(c.upa);
}

std::vector<double> initial_state_1d(const RunConfig& c, const Grid1D& grid) {
    const std::size_t N = grid.size();
    if (c.preset == PresetId::Reduced) {
        const double mid = 0.5 * (c.domain_a + c.domain_b);
        std::vector<double> w(2 * N);
        for (std::size_t i = 0; i < N; ++i) {
            const double x = grid.center(i) - mid;
            const double e = std::exp(-x * x / c.epsilon);
            w[2 * i] = e;
            w[2 * i + 1] = 0.5 * e;
        }
        return w;
    }
    std::vector<double> w(5 * N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = grid.center(i);
        const double e = std::exp(-x * x / c.epsilon);
        w[5 * i + 0] = e;
        w[5 * i + 1] = 1.0 - 0.5 * e;
        w[5 * i + 2] = 0.5 * e;
        w[5 * i + 3] = e / 20.0;
        w[5 * i + 4] = 0.0;
    }
    return w;
}

double interface_curve(double x) noexcept {
    if (x < 0.0) return 4.0 + 0.7 * std::sin(0.9 * x);
    if (x <= 5.0) return 7.0 * std::sin(0.9 * x) + 0.008 * x * x * x + 4.0;
    return 5.0 + 0.7 * std::sin(4.5) + 0.7 * std::sin(0.9 * (x - 5.0));
}

std::vector<double> initial_state_2d(const RunConfig&, const Grid2D& grid) {
    std::vector<double> w(5 * grid.size(), 0.0);
    for (int j = 1; j <= grid.ny(); ++j) {
        for (int i = 1; i <= grid.nx(); ++i) {
            const double c0 = grid.y(j) >= interface_curve(grid.x(i)) ? 1.0 : 0.0;
            const std::size_t k = grid.index(i, j);
            w[5 * k + 0] = c0;
            w[5 * k + 1] = 1.0 - c0;
            w[5 * k + 2] = 0.5 * c0;
            w[5 * k + 3] = 0.05 * c0;
        }
    }
    return w;
}

}  // namespace taxisfv
