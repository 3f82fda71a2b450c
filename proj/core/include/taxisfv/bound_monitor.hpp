#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "taxisfv/model.hpp"

namespace taxisfv {

/// One violated estimate at one observation time.
struct BoundViolation {
    double t = 0.0;
    std::string bound;   // "l1_c" or "max_u"
    std::size_t cell = 0;
    double value = 0.0;
    double limit = 0.0;
};

struct BoundReport {
    double worst_l1_margin = 0.0;
    double worst_u_margin = 0.0;
    std::size_t observations = 0;
    std::vector<BoundViolation> violations;

    [[nodiscard]] double worst_margin() const noexcept {
        return worst_l1_margin < worst_u_margin ? worst_l1_margin : worst_u_margin;
    }
};

/**
 * Tracks the a-priori estimates of the reduced (c, u) model along a trajectory:
 *
 *   ||c(t)||_1 <= ||c_0||_1 + t mu |Omega| / 4
 *   max u(t)   <= e^{-beta t} max u_0 + alpha/beta (1 - e^{-beta t}) sup_{s<=t} max c(s)
 *
 * States are cell-major (c, u) pairs on cells with the given widths. Margins
 * are limit - value; a violation is a margin below -tolerance.
 */
class BoundMonitor {
public:
    BoundMonitor(const ReducedParameters& p, std::span<const double> widths,
                 std::span<const double> initial_state, double tolerance = 1e-10);

    void observe(double t, std::span<const double> state);
    [[nodiscard]] const BoundReport& report() const noexcept { return report_; }

private:
    ReducedParameters p_;
    std::vector<double> widths_;
    double volume_ = 0.0;
    double l1_c0_ = 0.0;
    double max_u0_ = 0.0;
    double sup_c_ = 0.0;
    double tolerance_;
    BoundReport report_;
};

}  // namespace taxisfv
