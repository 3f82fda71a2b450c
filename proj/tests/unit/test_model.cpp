#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "taxisfv/model.hpp"

using namespace taxisfv;

namespace {

std::array<double, 5> random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.0, 1.5);
    return {d(rng), d(rng), d(rng), d(rng), d(rng)};
}

}  // namespace

TEST(UpaModel, PresetValues) {
    const UpaParameters p = UpaParameters::preset_P();
    EXPECT_EQ(p.delta, 8.15);
    EXPECT_EQ(p.D_c, 3.5e-4);
    EXPECT_EQ(p.chi_u, 3.05e-2);
    EXPECT_EQ(p.phi_53, 0.75);
    EXPECT_EQ(UpaParameters::fields().size(), 23u);
    UpaParameters q;
    ASSERT_NE(q.find("phi_21"), nullptr);
    EXPECT_EQ(*q.find("phi_21"), 0.75);
    EXPECT_EQ(q.find("phi_99"), nullptr);
}

TEST(UpaModel, ReactionMatchesHandFormula) {
    const UpaParameters p;
    const std::array<double, 5> w{0.7, 0.4, 0.2, 0.9, 0.3};
    const double c = 0.7, v = 0.4, u = 0.2, pa = 0.9, m = 0.3;
    const auto r = upa_reaction(p, w);
    EXPECT_NEAR(r[0], 0.25 * c * (1 - c), 1e-15);
    EXPECT_NEAR(r[1], -8.15 * v * m + 0.75 * u * pa - 0.55 * v * pa + 0.15 * v * (1 - v), 1e-15);
    EXPECT_NEAR(r[2], -0.75 * pa * u - 0.3 * c * u + 0.215 * c, 1e-15);
    EXPECT_NEAR(r[3], -0.75 * pa * u - 0.55 * pa * v + 0.5 * m, 1e-15);
    EXPECT_NEAR(r[4], 0.11 * pa * v + 0.75 * u * c - 0.5 * m, 1e-15);
}

TEST(UpaModel, JacobianMatchesCentralDifferences) {
    std::mt19937_64 rng(7);
    UpaParameters p;
    p.phi_13 = 0.2;  // exercise every term
    p.phi_51 = 0.1;
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = random_state(rng);
        const auto J = upa_reaction_jacobian(p, w);
        for (std::size_t r = 0; r < 5; ++r) {
            auto wp = w, wm = w;
            const double eps = 1e-6;
            wp[r] += eps;
            wm[r] -= eps;
            const auto fp = upa_reaction(p, wp);
            const auto fm = upa_reaction(p, wm);
            for (std::size_t s = 0; s < 5; ++s) {
                EXPECT_NEAR(J[s * 5 + r], (fp[s] - fm[s]) / (2 * eps), 1e-8) << s << "," << r;
            }
        }
    }
}

TEST(ReducedModel, ReactionAndJacobian) {
    const ReducedParameters p;
    const std::array<double, 2> w{0.6, 0.3};
    const auto r = reduced_reaction(p, w);
    EXPECT_NEAR(r[0], 0.1 * 0.6 * 0.4, 1e-15);
    EXPECT_NEAR(r[1], 0.115 * 0.6 - 0.4 * 0.3, 1e-15);
    const auto J = reduced_reaction_jacobian(p, w);
    EXPECT_NEAR(J[0], 0.1 * (1 - 1.2), 1e-15);
    EXPECT_EQ(J[1], 0.0);
    EXPECT_EQ(J[2], 0.115);
    EXPECT_EQ(J[3], -0.4);
}

TEST(SpeciesSystem, UpaStructure) {
    const SpeciesSystem s = make_upa_system(UpaParameters{});
    ASSERT_EQ(s.n_species(), 5u);
    EXPECT_EQ(s.names()[0], "c");
    EXPECT_EQ(s.names()[4], "m");
    EXPECT_EQ(s.diffusivity(kEcm), 0.0);
    EXPECT_EQ(s.diffusivity(kPlasmin), 4.91e-3);
    ASSERT_TRUE(s.advected_species().has_value());
    EXPECT_EQ(*s.advected_species(), kCancer);
    EXPECT_EQ(s.taxis(kCancer, kUpa), 3.05e-2);
    EXPECT_EQ(s.taxis(kCancer, kPai), 3.75e-2);
    EXPECT_EQ(s.taxis(kCancer, kEcm), 2.85e-2);
    EXPECT_EQ(s.taxis(kUpa, kCancer), 0.0);
    EXPECT_FALSE(s.without_taxis().advected_species().has_value());
    EXPECT_EQ(s.with_diffusivity(kCancer, 1.0).diffusivity(kCancer), 1.0);
    EXPECT_EQ(s.max_diffusivity(), 4.91e-3);
}

TEST(SpeciesSystem, ReducedSaturation) {
    EXPECT_FALSE(make_reduced_system(ReducedParameters{}).saturation().has_value());
    EXPECT_EQ(*make_reduced_system(ReducedParameters{}, 0.01).saturation(), 0.01);
}

TEST(Saturation, IdentityInsideAndBoundedOutside) {
    const double S = 0.5;
    EXPECT_EQ(saturate(0.3, S), 0.3);
    EXPECT_EQ(saturate(-0.5, S), -0.5);
    EXPECT_NEAR(saturate(1.5, S), 0.5 + 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(saturate(-1.5, S), -(0.5 + 1.0 / std::sqrt(2.0)), 1e-15);
    double prev = 0.0;
    for (double y = 0.0; y < 1e4; y = 2 * y + 0.01) {
        const double q = saturate(y, S);
        EXPECT_LT(q, S + 1.0);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(Saturation, VectorFormScalesMagnitude) {
    const std::vector<double> g{3.0, 4.0};
    const auto q = saturated_flux_Q(g, 1.0, 1.0);
    ASSERT_EQ(q.size(), 2u);
    const double mag = std::hypot(q[0], q[1]);
    EXPECT_NEAR(mag, 1.0 + 4.0 / std::sqrt(17.0), 1e-14);
    EXPECT_NEAR(q[0] / q[1], 0.75, 1e-14);
    const auto inside = saturated_flux_Q(std::vector<double>{0.1, -0.2}, 2.0, 1.0);
    EXPECT_NEAR(inside[0], 0.2, 1e-15);
    EXPECT_NEAR(inside[1], -0.4, 1e-15);
}
