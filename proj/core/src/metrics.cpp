#include "taxisfv/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace taxisfv {

std::size_t reference_cell(const Grid1D& reference, double x) {
    const double h = reference.width(0);
    const double pos = (x - reference.a()) / h;
    const double nearest = std::round(pos);
    double j = std::ceil(pos) - 1.0;
    if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, std::abs(pos))) j = nearest - 1.0;
    const double last = static_cast<double>(reference.size() - 1);
    if (j < 0.0) j = 0.0;
    if (j > last) j = last;
    return static_cast<std::size_t>(j);
}

double reference_value(const Grid1D& reference, std::span<const double> c_ref, double x) {
    const double pos = (x - reference.a()) / reference.width(0);
    const double nearest = std::round(pos);
    const bool on_interface = std::abs(pos - nearest) <= 1e-9 * std::max(1.0, std::abs(pos));
    const auto interior = static_cast<double>(reference.size());
    if (on_interface && nearest > 0.0 && nearest < interior) {
        const auto j = static_cast<std::size_t>(nearest);
        return 0.5 * (c_ref[j - 1] + c_ref[j]);
    }
    return c_ref[reference_cell(reference, x)];
}

double discrete_l1_error(const Grid1D& grid, std::span<const double> c, const Grid1D& reference,
                         std::span<const double> c_ref, bool enforce_ratio) {
    if (c.size() != grid.size() || c_ref.size() != reference.size()) {
        throw MetricError("discrete_l1_error: data does not match the grids");
    }
    if (!reference.is_uniform()) throw MetricError("discrete_l1_error: reference must be uniform");
    if (grid.a() != reference.a() || grid.b() != reference.b()) {
        throw MetricError("discrete_l1_error: grids cover different domains");
    }
    if (enforce_ratio &&
        static_cast<double>(reference.size()) < kReferenceRatio * static_cast<double>(grid.size())) {
        throw MetricError("discrete_l1_error: reference has fewer than 10x the test cells");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        e += grid.width(i) * std::abs(c[i] - reference_value(reference, c_ref, grid.center(i)));
    }
    return e;
}

double eoc(double e1, double e2, double n1, double n2) {
    if (!(e1 > 0.0) || !(e2 > 0.0)) throw MetricError("eoc: errors must be positive");
    if (!(n2 > n1) || !(n1 > 0.0)) throw MetricError("eoc: requires 0 < N1 < N2");
    return (std::log(e1) - std::log(e2)) / (std::log(n2) - std::log(n1));
}

void attach_eocs(std::vector<ErrorReport>& reports) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
        reports[i].eoc.reset();
        if (i == 0) continue;
        const auto& a = reports[i - 1];
        const auto& b = reports[i];
        if (a.failed || b.failed || !(a.error > 0.0) || !(b.error > 0.0) ||
            !std::isfinite(a.error) || !std::isfinite(b.error) || b.cells <= a.cells) {
            continue;
        }
        reports[i].eoc = eoc(a.error, b.error, static_cast<double>(a.cells),
                             static_cast<double>(b.cells));
    }
}

ConvergenceVerdict assess_convergence(const std::vector<ErrorReport>& reports) {
    for (const auto& r : reports) {
        if (r.failed) return {true, "run on " + std::to_string(r.cells) + " cells failed: " + r.failure};
        if (!std::isfinite(r.error)) {
            return {true, "non-finite error on " + std::to_string(r.cells) + " cells"};
        }
    }
    if (reports.size() < 2) return {};
    const auto& last = reports.back();
    const auto& prev = reports[reports.size() - 2];
    if (last.error >= prev.error) {
        return {true, "error does not decrease from " + std::to_string(prev.cells) + " to " +
                          std::to_string(last.cells) + " cells"};
    }
    if (last.eoc && *last.eoc < kMinimumTerminalEoc) {
        return {true, "terminal EOC " + std::to_string(*last.eoc) + " below 0.5"};
    }
    return {};
}

std::vector<double> species_values(std::span<const double> w, std::size_t n, std::size_t s) {
    std::vector<double> out(w.size() / n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[i * n + s];
    return out;
}

}  // namespace taxisfv
