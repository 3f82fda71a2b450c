#include "taxisfv/bound_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace taxisfv {

BoundMonitor::BoundMonitor(const ReducedParameters& p, std::span<const double> widths,
                           std::span<const double> initial_state, double tolerance)
    : p_(p), widths_(widths.begin(), widths.end()), tolerance_(tolerance) {
    if (initial_state.size() != 2 * widths.size()) {
        throw std::invalid_argument("BoundMonitor: state must hold (c, u) per cell");
    }
    for (std::size_t i = 0; i < widths_.size(); ++i) {
        volume_ += widths_[i];
        l1_c0_ += widths_[i] * std::abs(initial_state[2 * i]);
        max_u0_ = std::max(max_u0_, initial_state[2 * i + 1]);
        sup_c_ = std::max(sup_c_, initial_state[2 * i]);
    }
    report_.worst_l1_margin = std::numeric_limits<double>::infinity();
    report_.worst_u_margin = std::numeric_limits<double>::infinity();
}

void BoundMonitor::observe(double t, std::span<const double> state) {
    if (state.size() != 2 * widths_.size()) {
        throw std::invalid_argument("BoundMonitor: state size does not match the grid");
    }
    double l1 = 0.0;
    double max_u = -std::numeric_limits<double>::infinity();
    std::size_t arg_u = 0;
    for (std::size_t i = 0; i < widths_.size(); ++i) {
        l1 += widths_[i] * std::abs(state[2 * i]);
        sup_c_ = std::max(sup_c_, state[2 * i]);
        if (state[2 * i + 1] > max_u) {
            max_u = state[2 * i + 1];
            arg_u = i;
        }
    }

    const double l1_limit = l1_c0_ + t * p_.mu * volume_ / 4.0;
    const double decay = std::exp(-p_.beta * t);
    const double u_limit = decay * max_u0_ + p_.alpha / p_.beta * (1.0 - decay) * sup_c_;

    const double l1_margin = l1_limit - l1;
    const double u_margin = u_limit - max_u;
    report_.worst_l1_margin = std::min(report_.worst_l1_margin, l1_margin);
    report_.worst_u_margin = std::min(report_.worst_u_margin, u_margin);
    ++report_.observations;
    if (!(l1_margin >= -tolerance_)) report_.violations.push_back({t, "l1_c", 0, l1, l1_limit});
    if (!(u_margin >= -tolerance_)) report_.violations.push_back({t, "max_u", arg_u, max_u, u_limit});
}

}  // namespace taxisfv
