#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "taxisfv/model.hpp"
#include "taxisfv/stability.hpp"

using namespace taxisfv;

namespace {

/// Roots of D_c D_u k^2 + (mu D_u + beta D_c - alpha chi) k + mu beta.
std::pair<double, double> closed_form_band(const ReducedParameters& p) {
    const double a = p.D_c * p.D_u;
    const double b = p.mu * p.D_u + p.beta * p.D_c - p.alpha * p.chi;
    const double c = p.mu * p.beta;
    const double disc = std::sqrt(b * b - 4 * a * c);
    return {(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
}

/// Largest real part of the 2x2 dispersion matrix, by the quadratic formula.
double closed_form_lambda(const ReducedParameters& p, double k) {
    const double m00 = -p.mu - k * p.D_c, m01 = k * p.chi;
    const double m10 = p.alpha, m11 = -p.beta - k * p.D_u;
    const double tr = m00 + m11, det = m00 * m11 - m01 * m10;
    const double disc = tr * tr / 4 - det;
    return disc >= 0 ? tr / 2 + std::sqrt(disc) : tr / 2;
}

}  // namespace

TEST(Stability, ReducedBandMatchesClosedForm) {
    const ReducedParameters p;
    const SpeciesSystem sys = make_reduced_system(p);
    const std::vector<double> steady{1.0, p.alpha / p.beta};
    const DispersionScan scan = scan_dispersion(sys, steady, 300.0, 601);
    ASSERT_EQ(scan.unstable.size(), 1u);
    const auto [lo, hi] = closed_form_band(p);
    EXPECT_NEAR(scan.unstable[0].first, lo, 1e-3);
    EXPECT_NEAR(scan.unstable[0].second, hi, 1e-3);
    EXPECT_NEAR(lo, 20.14508772, 1e-6);
    EXPECT_NEAR(hi, 151.283484, 1e-5);
    ASSERT_EQ(scan.k.size(), 601u);
    for (std::size_t i = 0; i < scan.k.size(); ++i)
        EXPECT_NEAR(scan.lambda[i], closed_form_lambda(p, scan.k[i]), 1e-12) << scan.k[i];
}

TEST(Stability, NoTaxisNoInstability) {
    ReducedParameters p;
    p.chi = 0.0;
    const SpeciesSystem sys = make_reduced_system(p);
    const std::vector<double> steady{1.0, p.alpha / p.beta};
    const DispersionScan scan = scan_dispersion(sys, steady, 300.0, 601);
    EXPECT_TRUE(scan.unstable.empty());
    for (double l : scan.lambda) EXPECT_LT(l, 0.0);
    const DispersionScan without = scan_dispersion(make_reduced_system(ReducedParameters{}).without_taxis(),
                                                   steady, 300.0, 301);
    EXPECT_TRUE(without.unstable.empty());
}

TEST(Stability, EigenvaluesMatchEigen) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    for (std::size_t n : {2u, 3u, 5u}) {
        std::vector<double> m(n * n);
        for (auto& x : m) x = d(rng);
        auto ev = eigenvalues(m, n);
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
            m.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        const Eigen::VectorXcd ref = Eigen::EigenSolver<Eigen::MatrixXd>(M).eigenvalues();
        ASSERT_EQ(ev.size(), n);
        for (Eigen::Index i = 0; i < ref.size(); ++i) {
            const bool found = std::any_of(ev.begin(), ev.end(), [&](const auto& e) {
                return std::abs(e.first - ref[i].real()) < 1e-10 && std::abs(e.second - ref[i].imag()) < 1e-10;
            });
            EXPECT_TRUE(found) << ref[i];
        }
    }
}

TEST(Stability, TransportJacobianEntries) {
    const UpaParameters p;
    const SpeciesSystem sys = make_upa_system(p);
    const std::vector<double> w{0.8, 0.5, 0.1, 0.2, 0.3};
    const DenseMatrix J = transport_jacobian(sys, w);
    EXPECT_EQ(J[0], p.D_c);
    EXPECT_NEAR(J[1], -p.chi_v * 0.8, 1e-15);
    EXPECT_NEAR(J[2], -p.chi_u * 0.8, 1e-15);
    EXPECT_EQ(J[6], 0.0);  // ECM row
    EXPECT_EQ(J[12], p.D_u);
    EXPECT_EQ(J[24], p.D_m);
}

TEST(Stability, NewtonFindsReactionSteadyState) {
    const SpeciesSystem sys = make_upa_system(UpaParameters{});
    const std::vector<double> guess{1.0, 0.5, 0.3, 0.2, 0.3};
    const auto w = find_reaction_steady_state(sys, guess);
    std::vector<double> r(5);
    sys.reaction(w, r);
    for (double x : r) EXPECT_LT(std::abs(x), 1e-12);
    EXPECT_NEAR(w[0], 1.0, 1e-12);
    for (double x : w) EXPECT_GT(x, 0.0);
    const SpeciesSystem red = make_reduced_system(ReducedParameters{});
    const auto s = find_reaction_steady_state(red, std::vector<double>{0.8, 0.2});
    EXPECT_NEAR(s[0], 1.0, 1e-12);
    EXPECT_NEAR(s[1], 0.115 / 0.4, 1e-12);
}

TEST(Stability, NewtonReportsFailure) {
    const SpeciesSystem red = make_reduced_system(ReducedParameters{});
    EXPECT_THROW((void)find_reaction_steady_state(red, std::vector<double>{0.8, 0.2}, 1e-12, 0), SteadyStateError);
}
