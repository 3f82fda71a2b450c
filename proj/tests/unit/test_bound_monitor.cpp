#include <gtest/gtest.h>

#include <cmath>

#include "taxisfv/bound_monitor.hpp"

using namespace taxisfv;

TEST(BoundMonitor, LimitsFollowClosedForm) {
    const ReducedParameters p;
    const std::vector<double> h(4, 0.5);
    // (c, u) per cell.
    const std::vector<double> w0{1.0, 0.2, 0.5, 0.1, 0.0, 0.0, 0.5, 0.3};
    BoundMonitor m(p, h, w0);
    m.observe(0.0, w0);
    EXPECT_TRUE(m.report().violations.empty());
    EXPECT_NEAR(m.report().worst_l1_margin, 0.0, 1e-15);
    EXPECT_NEAR(m.report().worst_u_margin, 0.0, 1e-15);

    // ||c||_1 limit at t = 2: 1 + 2 * 0.1 * 2 / 4 = 1.1.
    std::vector<double> w = w0;
    w[0] = 1.15;  // ||c||_1 = 0.5 * 2.15 = 1.075
    m.observe(2.0, w);
    EXPECT_TRUE(m.report().violations.empty());
    EXPECT_NEAR(m.report().worst_l1_margin, 0.0, 1e-15);  // t = 0 margin stays the minimum
    w[0] = 1.3;  // 1.15 > 1.1
    m.observe(2.0, w);
    ASSERT_EQ(m.report().violations.size(), 1u);
    EXPECT_EQ(m.report().violations[0].bound, "l1_c");
    EXPECT_NEAR(m.report().violations[0].limit, 1.1, 1e-14);
    EXPECT_EQ(m.report().observations, 3u);
}

TEST(BoundMonitor, UBoundUsesRunningSupremum) {
    const ReducedParameters p;
    const std::vector<double> h(2, 1.0);
    const std::vector<double> w0{1.0, 0.0, 1.0, 0.0};
    BoundMonitor m(p, h, w0);
    const double t = 1.0;
    const double limit = p.alpha / p.beta * (1 - std::exp(-p.beta * t)) * 2.0;
    // c peaks at 2 at t = 0.5 and drops again; u may use the supremum.
    m.observe(0.5, std::vector<double>{2.0, 0.0, 0.0, 0.0});
    m.observe(t, std::vector<double>{0.5, limit * 0.999, 0.5, 0.0});
    EXPECT_TRUE(m.report().violations.empty());
    m.observe(t, std::vector<double>{0.5, limit * 1.01, 0.5, 0.0});
    ASSERT_EQ(m.report().violations.size(), 1u);
    EXPECT_EQ(m.report().violations[0].bound, "max_u");
    EXPECT_EQ(m.report().violations[0].cell, 0u);
}

TEST(BoundMonitor, RejectsMismatchedState) {
    const std::vector<double> h(3, 1.0);
    EXPECT_THROW(BoundMonitor(ReducedParameters{}, h, std::vector<double>(4)), std::invalid_argument);
    BoundMonitor m(ReducedParameters{}, h, std::vector<double>(6, 0.1));
    EXPECT_THROW(m.observe(0.0, std::vector<double>(5)), std::invalid_argument);
}
