#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dense_problem.hpp"
#include "order_suite.hpp"
#include "taxisfv/discretization.hpp"
#include "taxisfv/model.hpp"
#include "taxisfv/split_problem.hpp"
#include "taxisfv/time_integration.hpp"

using namespace taxisfv;
using taxisfv::testkit::DenseProblem;

TEST(OrderSuite, MeasuredOrdersMatchNominal) {
    const auto results = testkit::measure_orders();
    ASSERT_EQ(results.size(), 8u);
    for (const auto& r : results) {
        EXPECT_NEAR(r.eoc, r.nominal, testkit::kOrderTolerance) << r.name;
    }
}

TEST(OrderSuite, LStableSchemesDampStiffModes) {
    for (const auto& d : testkit::measure_l_stability()) {
        EXPECT_LT(d.amplification, testkit::kDecayLimit) << d.name;
    }
    // Crank-Nicolson is only A-stable: the stiff mode survives with |R| close to 1.
    EXPECT_GT(testkit::crank_nicolson_amplification(), 0.99);
}

TEST(Methods, NamesRoundTrip) {
    for (Method m : all_methods()) {
        const auto parsed = parse_method(method_name(m));
        ASSERT_TRUE(parsed.has_value()) << method_name(m);
        EXPECT_EQ(*parsed, m);
    }
    EXPECT_FALSE(parse_method("RK45").has_value());
    EXPECT_EQ(all_methods().size(), 13u);
}

TEST(Methods, Classification) {
    EXPECT_TRUE(is_adaptive(Method::Ros3Atc));
    EXPECT_TRUE(is_adaptive(Method::Imex3Atc));
    EXPECT_TRUE(is_adaptive(Method::Imex3AtcIr));
    EXPECT_FALSE(is_adaptive(Method::Imex3));
    EXPECT_TRUE(uses_first_order_fluxes(Method::Imex3AtcUpwind1));
    EXPECT_FALSE(uses_first_order_fluxes(Method::Imex3Atc));
    EXPECT_TRUE(needs_coupled_jacobian(Method::Ros2));
    EXPECT_FALSE(needs_coupled_jacobian(Method::Strang));
}

TEST(StepControl, FactorFormula) {
    const StepControllerConfig cfg;
    // 0.9 (tol / eps)^(1/3)
    EXPECT_NEAR(step_size_factor(8e-6, 1e-6, cfg), 0.9 * 0.5, 1e-15);
    EXPECT_NEAR(step_size_factor(1e-6 / 8.0, 1e-6, cfg), 1.8, 1e-12);
}

TEST(StepControl, RejectsInvalidCfl) {
    StepControllerConfig cfg;
    cfg.cfl = 0.0;
    EXPECT_THROW(TimeIntegrator(Method::Imex3, cfg), std::invalid_argument);
    cfg.cfl = 1.5;
    EXPECT_THROW(TimeIntegrator(Method::Imex3, cfg), std::invalid_argument);
    cfg.cfl = 1.0;
    EXPECT_NO_THROW(TimeIntegrator(Method::Imex3, cfg));
}

TEST(Integrate, LandsExactlyOnFinalTime) {
    testkit::Logistic logistic;
    DenseProblem p = logistic.problem();
    p.set_tau_max(0.03);
    TimeIntegrator integ(Method::Imex3);
    std::vector<double> w{logistic.u0};
    std::vector<double> times;
    const auto r = integrate(p, integ, w, 0.0, 1.0, [&](double t, double, std::span<const double>) {
        times.push_back(t);
    });
    EXPECT_EQ(r.t, 1.0);
    ASSERT_FALSE(times.empty());
    EXPECT_EQ(times.back(), 1.0);
    for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GT(times[i], times[i - 1]);
    EXPECT_NEAR(w[0], logistic.exact(1.0), 1e-5);
}

TEST(Integrate, AdaptiveControlMeetsTolerance) {
    testkit::Logistic logistic;
    DenseProblem p = logistic.problem();
    p.set_tau_max(0.5);
    for (Method m : {Method::Ros3Atc, Method::Imex3Atc, Method::Imex3AtcIr}) {
        TimeIntegrator integ(m);
        std::vector<double> w{logistic.u0};
        (void)integrate(p, integ, w, 0.0, 2.0);
        EXPECT_NEAR(w[0], logistic.exact(2.0), 1e-4) << method_name(m);
    }
}

TEST(Integrate, NonFiniteStateIsReported) {
    std::vector<double> w{1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0};
    try {
        check_finite(w, 2, 3.5);
        FAIL() << "expected NumericalFailure";
    } catch (const NumericalFailure& e) {
        EXPECT_EQ(e.cell(), 1u);
        EXPECT_EQ(e.species(), 0u);
        EXPECT_EQ(e.time(), 3.5);
    }
}

TEST(Integrate, ExplicitUsesDiffusionLimit) {
    const Grid1D g = Grid1D::uniform(0.0, 1.0, 50);
    Problem1D p(Discretization1D(g, make_reduced_system(ReducedParameters{})));
    std::vector<double> w(100, 1.0);
    TimeIntegrator ex(Method::Explicit);
    TimeIntegrator im(Method::Imex3);
    EXPECT_LE(ex.step_bound(p, w), p.explicit_diffusion_limit());
    EXPECT_GT(im.step_bound(p, w), ex.step_bound(p, w));
}

TEST(Conservation, ZeroReactionStepsConserveMass) {
    // Reduced model with alpha = beta = mu = 0: taxis and diffusion only.
    ReducedParameters q;
    q.mu = 0.0;
    q.alpha = 0.0;
    q.beta = 0.0;
    const Grid1D g = Grid1D::uniform(0.0, 10.0, 200);
    Problem1D p(Discretization1D(g, make_reduced_system(q)));
    std::vector<double> w(400);
    for (std::size_t i = 0; i < 200; ++i) {
        const double x = g.center(i);
        w[2 * i] = std::exp(-(x - 5.0) * (x - 5.0));
        w[2 * i + 1] = 0.5 * std::exp(-(x - 4.0) * (x - 4.0) / 2.0);
    }
    auto mass = [&](std::size_t s) {
        double m = 0.0;
        for (std::size_t i = 0; i < 200; ++i) m += g.width(i) * w[2 * i + s];
        return m;
    };
    const double m0 = mass(0);
    for (Method m : all_methods()) {
        std::vector<double> saved = w;
        TimeIntegrator integ(m);
        double t = 0.0;
        for (int k = 0; k < 10; ++k) t += integ.advance(p, w, t, 1.0).tau;
        EXPECT_NEAR(mass(0), m0, 1e-12 * m0) << method_name(m);
        w = saved;
    }
}
