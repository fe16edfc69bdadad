// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "dsa/impedance.hpp"
#include "oracles.hpp"

namespace {

constexpr double f0 = 2.4e9;
const double lambda = dsa::wavelength(f0);
const dsa::cplx classical_self(73.1, 42.5);
const dsa::cplx classical_mutual(-12.5, -29.9);

double rel_err(dsa::cplx a, dsa::cplx b) { return std::abs(a - b) / std::abs(b); }

TEST(SelfImpedance, HalfWaveMatchesClassicalValue) {
    const auto z = dsa::dipole_self_impedance(lambda / 2, f0);
    EXPECT_LT(rel_err(z, classical_self), 0.01);
    EXPECT_NEAR(z.real(), 73.08, 0.01);
    EXPECT_NEAR(z.imag(), 42.51, 0.01);
}

TEST(SelfImpedance, ResistanceMatchesFarFieldPowerIntegration) {
    for (double frac : {0.3, 0.45, 0.5, 0.55, 0.7}) {
        const double L = frac * lambda;
        EXPECT_NEAR(dsa::dipole_self_impedance(L, f0).real(), oracle::radiation_resistance(L, f0), 1e-7) << frac;
    }
}

TEST(SelfImpedance, MatchesSurfaceFieldQuadrature) {
    // induced EMF with the field taken on the wire surface
    const double a = lambda / 1000;
    for (double frac : {0.47, 0.5, 0.51}) {
        const double L = frac * lambda;
        const auto z = dsa::dipole_self_impedance(L, f0, a);
        const auto q = oracle::mutual_impedance(a, 0.0, L, L, f0, 6000);
        EXPECT_LT(rel_err(z, q), 0.01) << frac;
    }
}

TEST(SelfImpedance, ReactanceCrossesZeroJustBelowHalfWave) {
    const double a = lambda / 1000;
    double prev = dsa::dipole_self_impedance(0.5 * lambda, f0, a).imag();
    EXPECT_GT(prev, 0);
    bool crossed = false;
    for (double frac = 0.499; frac > 0.45; frac -= 0.001) {
        const double x = dsa::dipole_self_impedance(frac * lambda, f0, a).imag();
        EXPECT_LT(x, prev);
        if (prev > 0 && x <= 0) {
            crossed = true;
            EXPECT_GT(frac, 0.46);
        }
        prev = x;
    }
    EXPECT_TRUE(crossed);
}

TEST(SelfImpedance, FixedLengthVariesAcrossSubcarriers) {
    const double L = lambda / 2;
    const auto z1 = dsa::dipole_self_impedance(L, f0);
    const auto z2 = dsa::dipole_self_impedance(L, f0 + 20e6);
    EXPECT_GT(std::abs(z1 - z2), 0.1);
    EXPECT_GT(z2.imag(), z1.imag());
}

TEST(SelfImpedance, RejectsInvalidInput) {
    EXPECT_THROW((void)dsa::dipole_self_impedance(0.0, f0), dsa::DomainError);
    EXPECT_THROW((void)dsa::dipole_self_impedance(0.1, -1.0), dsa::DomainError);
}

TEST(MutualImpedance, SideBySideHalfWaveSpacing) {
    const auto z = dsa::mutual_impedance_parallel(lambda / 2, 0.0, lambda / 2, lambda / 2, f0);
    EXPECT_LT(rel_err(z, classical_mutual), 0.02);
    EXPECT_LT(rel_err(z, oracle::mutual_impedance(lambda / 2, 0.0, lambda / 2, lambda / 2, f0)), 1e-10);
}

TEST(MutualImpedance, ClosedFormMatchesQuadratureEverywhere) {
    struct Case {
        double d, h, l1, l2;
    };
    const Case cases[] = {
        {0.05, 0.0, 0.5, 0.5},  {0.25, 0.0, 0.5, 0.5},   {1.3, 0.0, 0.5, 0.5},   {0.3, 0.4, 0.45, 0.52},
        {0.3, -0.4, 0.52, 0.45}, {0.1, 0.75, 0.5, 0.5},  {0.5, 1.5, 0.48, 0.5},  {0.0, 0.75, 0.5, 0.5},
        {0.0, -1.2, 0.5, 0.4},  {2.0, 0.25, 0.5, 0.5},
    };
    for (const auto& c : cases) {
        const auto z = dsa::mutual_impedance_parallel(c.d * lambda, c.h * lambda, c.l1 * lambda, c.l2 * lambda, f0);
        const auto q = oracle::mutual_impedance(c.d * lambda, c.h * lambda, c.l1 * lambda, c.l2 * lambda, f0, 2000);
        EXPECT_LT(std::abs(z - q), 1e-8 * std::max(1.0, std::abs(q))) << c.d << ' ' << c.h;
    }
}

TEST(MutualImpedance, ReciprocalUnderExchange) {
    const double l1 = 0.47 * lambda, l2 = 0.52 * lambda;
    for (double h : {0.0, 0.2 * lambda, -0.6 * lambda}) {
        const auto z12 = dsa::mutual_impedance_parallel(0.3 * lambda, h, l1, l2, f0);
        const auto z21 = dsa::mutual_impedance_parallel(0.3 * lambda, -h, l2, l1, f0);
        EXPECT_LT(std::abs(z12 - z21), 1e-10 * std::abs(z12));
    }
}

TEST(MutualImpedance, DecaysAsInverseDistance) {
    const double L = lambda / 2;
    const double m10 = std::abs(dsa::mutual_impedance_parallel(10 * lambda, 0, L, L, f0));
    const double m100 = std::abs(dsa::mutual_impedance_parallel(100 * lambda, 0, L, L, f0));
    EXPECT_NEAR(m10 / m100, 10.0, 2.0);
}

TEST(MutualImpedance, ApproachesSelfResistanceAtZeroSpacing) {
    const double L = lambda / 2;
    const auto z = dsa::mutual_impedance_parallel(1e-7 * lambda, 0, L, L, f0);
    EXPECT_NEAR(z.real(), dsa::dipole_self_impedance(L, f0).real(), 1e-6);
}

TEST(MutualImpedance, RejectsDegenerateArrangements) {
    const double L = lambda / 2;
    EXPECT_THROW((void)dsa::mutual_impedance_parallel(0, 0, L, L, f0), dsa::DomainError);
    EXPECT_THROW((void)dsa::mutual_impedance_parallel(0, 0.4 * lambda, L, L, f0), dsa::DomainError);
    EXPECT_THROW((void)dsa::mutual_impedance_parallel(0.1, 0, -L, L, f0), dsa::DomainError);
}

TEST(ImpedanceMatrix, SingleElementIsSelfImpedance) {
    dsa::ArrayGeometry g;
    g.elements.push_back({dsa::Vec3::Zero(), lambda / 2, dsa::Role::Active});
    g.num_active = 1;
    g.wire_radius = lambda / 1000;
    const auto Z = dsa::assemble_impedance_matrix(g, f0);
    ASSERT_EQ(Z.rows(), 1);
    EXPECT_EQ(Z(0, 0), dsa::dipole_self_impedance(lambda / 2, f0, lambda / 1000));
}

TEST(ImpedanceMatrix, TwoElementsComposeOracleValues) {
    dsa::ArrayGeometry g;
    g.elements.push_back({dsa::Vec3::Zero(), lambda / 2, dsa::Role::Active});
    g.elements.push_back({dsa::Vec3(lambda / 2, 0, 0), lambda / 2, dsa::Role::Scatterer});
    g.num_active = 1;
    g.wire_radius = lambda / 1000;
    const auto Z = dsa::assemble_impedance_matrix(g, f0);
    EXPECT_LT(rel_err(Z(0, 0), classical_self), 0.01);
    EXPECT_LT(rel_err(Z(1, 1), classical_self), 0.01);
    EXPECT_LT(rel_err(Z(0, 1), classical_mutual), 0.02);
    EXPECT_EQ(Z(0, 1), Z(1, 0));
}

TEST(ImpedanceMatrix, DiagonalTracksFrequencyForHalfWaveElements) {
    for (double f = 1e9; f <= 10e9; f += 0.5e9) {
        dsa::ArrayGeometry g;
        const double lam = dsa::wavelength(f);
        g.elements.push_back({dsa::Vec3::Zero(), lam / 2, dsa::Role::Active});
        g.elements.push_back({dsa::Vec3(lam / 4, 0, 0), lam / 2, dsa::Role::Scatterer});
        g.num_active = 1;
        g.wire_radius = lam / 1000;
        const auto Z = dsa::assemble_impedance_matrix(g, f);
        EXPECT_LT(rel_err(Z(0, 0), classical_self), 0.01) << f;
        EXPECT_LT(rel_err(Z(1, 1), classical_self), 0.01) << f;
    }
}

}  // namespace
