// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dsa/network.hpp"
#include "oracles.hpp"

namespace {

constexpr double f0 = 2.4e9;
const double lambda = dsa::wavelength(f0);

dsa::ArrayGeometry toy_array(int n, std::uint32_t seed, double radius = 0.1) {
    // random feed points on a disc, well separated, one active element
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius), h(-0.02, 0.02);
    dsa::ArrayGeometry g;
    g.wire_radius = lambda / 1000;
    g.num_active = 1;
    while (static_cast<int>(g.elements.size()) < n) {
        const dsa::Vec3 p(u(rng), u(rng), h(rng));
        bool ok = true;
        for (const auto& e : g.elements)
            if (std::hypot(p.x() - e.position.x(), p.y() - e.position.y()) < 0.2 * lambda) ok = false;
        if (!ok) continue;
        g.elements.push_back({p, lambda / 2, g.elements.empty() ? dsa::Role::Active : dsa::Role::Scatterer});
    }
    return g;
}

Eigen::VectorXcd random_complex(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dsa::cplx(d(rng), d(rng));
    return v;
}

TEST(SolveCurrents, ZeroExcitationGivesZeroCurrent) {
    const auto g = toy_array(5, 1);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    const Eigen::VectorXcd zl = Eigen::VectorXcd::Constant(5, dsa::cplx(50, -20));
    EXPECT_EQ(dsa::solve_currents(Z, zl, Eigen::VectorXcd::Zero(5)).norm(), 0.0);
}

TEST(SolveCurrents, DecoupledPortsSolveIndependently) {
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(3, 3);
    Z.diagonal() << dsa::cplx(73, 42), dsa::cplx(10, 1), dsa::cplx(5, -3);
    Eigen::VectorXcd zl(3), v(3);
    zl << 75.0, dsa::cplx(0.1, 8), dsa::cplx(2, 2);
    v << 1.0, dsa::cplx(0, 2), dsa::cplx(-1, 1);
    const auto i = dsa::solve_currents(Z, zl, v);
    for (Eigen::Index n = 0; n < 3; ++n) EXPECT_LT(std::abs(i(n) - v(n) / (Z(n, n) + zl(n))), 1e-15);
}

TEST(SolveCurrents, ResidualOnRandomSystems) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = toy_array(8, 100 + trial);
        const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
        const Eigen::VectorXcd zl = random_complex(8, rng) * 30.0;
        const Eigen::VectorXcd v = random_complex(8, rng);
        const auto i = dsa::solve_currents(Z, zl, v);
        EXPECT_LT((Z * i + zl.cwiseProduct(i) - v).norm(), 1e-10 * v.norm());
    }
}

TEST(SolveCurrents, SingularSystemThrows) {
    Eigen::MatrixXcd Z(2, 2);
    Z << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW((void)dsa::solve_currents(Z, Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Ones(2)),
                 dsa::SolverError);
    EXPECT_THROW((void)dsa::solve_currents(Z, Eigen::VectorXcd::Zero(3), Eigen::VectorXcd::Ones(2)),
                 dsa::DimensionError);
}

TEST(PowerAccounting, IsolatedDipoleBehindSource) {
    dsa::ArrayGeometry g;
    g.elements.push_back({dsa::Vec3::Zero(), lambda / 2, dsa::Role::Active});
    g.num_active = 1;
    g.wire_radius = lambda / 1000;
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    dsa::LoadConfig cfg;
    cfg.active_varactors = false;
    const auto loads = dsa::load_diagonal(dsa::ThetaVector::Zero(1), f0, cfg);
    const dsa::DriveMatrix drive{cfg.R, 1, 1};
    const Eigen::VectorXcd v = drive.column(0);
    const auto i = dsa::solve_currents(Z, loads.z, v);
    const auto b = dsa::power_accounting(i, v, Z, loads, cfg);
    const dsa::cplx z = Z(0, 0);
    const double expected = 300.0 * z.real() / std::norm(z + 75.0);
    EXPECT_NEAR(b.radiated, expected, 1e-12);
    EXPECT_NEAR(b.radiated, 300 * 73.1 / (148.1 * 148.1 + 42.5 * 42.5), 0.01);
    EXPECT_NEAR(b.available, 1.0, 1e-15);
    EXPECT_EQ(b.eta1, b.eta2);
    EXPECT_NEAR(b.injected, b.radiated + b.source_loss, 1e-12);
}

TEST(PowerAccounting, BalanceClosesForRandomLoads) {
    const auto g = toy_array(10, 5);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    dsa::LoadConfig cfg;
    const dsa::DriveMatrix drive{cfg.R, 10, 1};
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> th(-10, 10);
    for (int trial = 0; trial < 100; ++trial) {
        dsa::ThetaVector theta(10);
        for (auto& t : theta) t = th(rng);
        const auto loads = dsa::load_diagonal(theta, f0, cfg);
        const auto i = dsa::solve_currents(Z, loads.z, drive.column(0));
        const auto b = dsa::power_accounting(i, drive.column(0), Z, loads, cfg);
        EXPECT_GE(b.radiated, 0);
        EXPECT_GE(b.load_loss, 0);
        EXPECT_LE(b.eta2, b.eta1);
        EXPECT_LE(b.eta1, 1.0 + 1e-12);
    }
}

TEST(RadiatedPower, InvariantUnderGlobalPhase) {
    const auto g = toy_array(6, 2);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    std::mt19937 rng(4);
    const Eigen::VectorXcd i = random_complex(6, rng);
    const double p = dsa::radiated_power(i, Z);
    EXPECT_GT(p, 0);
    for (double ph : {0.3, 1.7, -2.9}) EXPECT_NEAR(dsa::radiated_power(i * std::polar(1.0, ph), Z), p, 1e-12 * p);
}

TEST(RadiatedPower, MatchesSphereIntegration) {
    const auto g = toy_array(6, 21);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    std::mt19937 rng(8);
    const Eigen::VectorXcd i = random_complex(6, rng);
    const double p_circuit = dsa::radiated_power(i, Z);
    const auto theta_integrand = [&](double th) {
        return oracle::integrate<double>(
                   [&](double ph) {
                       const dsa::Vec3 u(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
                       return dsa::far_field_intensity(g, i, f0, u);
                   },
                   0.0, 2 * M_PI, 8) *
               std::sin(th);
    };
    const double p_far = oracle::integrate<double>(theta_integrand, 0.0, M_PI, 8);
    EXPECT_NEAR(p_far / p_circuit, 1.0, 1e-2);
}

TEST(EndToEnd, LinearInExcitationAndConsistentWithCurrents) {
    const auto g = toy_array(6, 3);
    auto tests = dsa::make_test_ring(12, 50.0);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    const Eigen::MatrixXcd Hc = dsa::channel_transimpedance(g, tests, f0);
    dsa::LoadConfig cfg;
    const auto loads = dsa::load_diagonal(dsa::ThetaVector::Constant(6, 0.4), f0, cfg);
    const dsa::DriveMatrix drive{cfg.R, 6, 1};
    const Eigen::MatrixXcd A = dsa::end_to_end_channel(Hc, Z, loads.z, drive);
    const Eigen::VectorXcd y = Hc * dsa::solve_currents(Z, loads.z, drive.column(0));
    EXPECT_LT((A.col(0) - y).norm(), 1e-12 * y.norm());
    const Eigen::VectorXcd y3 = Hc * dsa::solve_currents(Z, loads.z, drive.column(0) * dsa::cplx(0, 3));
    EXPECT_LT((y3 - dsa::cplx(0, 3) * y).norm(), 1e-12 * y3.norm());
}

TEST(Reciprocity, LoadedNetworkIsSymmetric) {
    const auto g = toy_array(7, 13);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    dsa::LoadConfig cfg;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> th(-3, 3);
    dsa::ThetaVector theta(7);
    for (auto& t : theta) t = th(rng);
    const auto loads = dsa::load_diagonal(theta, f0, cfg);
    for (Eigen::Index m = 0; m < 7; ++m)
        for (Eigen::Index n = 0; n < m; ++n) {
            Eigen::VectorXcd vm = Eigen::VectorXcd::Zero(7), vn = Eigen::VectorXcd::Zero(7);
            vm(m) = 1;
            vn(n) = 1;
            const auto im = dsa::solve_currents(Z, loads.z, vm);
            const auto in = dsa::solve_currents(Z, loads.z, vn);
            EXPECT_LT(std::abs(im(n) - in(m)), 1e-12 * std::abs(im(n)) + 1e-18);
        }
}

TEST(Pattern, IsolatedHalfWaveDirectivity) {
    dsa::ArrayGeometry g;
    g.elements.push_back({dsa::Vec3::Zero(), lambda / 2, dsa::Role::Active});
    g.num_active = 1;
    g.wire_radius = lambda / 1000;
    const auto tests = dsa::make_test_ring(36, 200.0, 1.0, dsa::TestPlane::XZ);
    const Eigen::MatrixXcd Z = dsa::assemble_impedance_matrix(g, f0);
    const Eigen::MatrixXcd Hc = dsa::channel_transimpedance(g, tests, f0);
    Eigen::VectorXcd i(1);
    i << 0.1;
    const auto pat = dsa::radiation_pattern(Hc * i, tests, dsa::radiated_power(i, Z), 1.0);
    EXPECT_NEAR(pat.peak_directivity_db, 2.15, 0.01);
    EXPECT_NEAR(std::fmod(pat.peak_angle_deg, 180.0), 90.0, 1e-9);
    // both broadside lobes are equal, so the back lobe sits at 0 dB
    EXPECT_NEAR(pat.sidelobe_db, 0.0, 1e-9);
}

TEST(Pattern, SidelobeLevelOnRing) {
    const std::vector<double> ring = {1.0, 0.5, 0.1, 0.2, 0.05, 0.01, 0.3};
    EXPECT_NEAR(dsa::sidelobe_level_db(ring, 0), 10 * std::log10(0.2), 1e-12);
    const std::vector<double> flat_tail = {1.0, 0.0, 0.0};
    EXPECT_TRUE(std::isinf(dsa::sidelobe_level_db(flat_tail, 0)));
}

TEST(Pattern, RejectsZeroPower) {
    const auto tests = dsa::make_test_ring(4, 10.0);
    EXPECT_THROW((void)dsa::radiation_pattern(Eigen::VectorXcd::Zero(4), tests, 0.0, 1.0), dsa::DomainError);
    EXPECT_THROW((void)dsa::radiation_pattern(Eigen::VectorXcd::Zero(3), tests, 1.0, 1.0), dsa::DimensionError);
}

TEST(Aperture, ReferenceValues) {
    EXPECT_NEAR(dsa::aperture_gain_db(lambda * lambda, lambda), 10.99, 0.01);
    EXPECT_NEAR(dsa::aperture_gain_db(4 * lambda * lambda, lambda) - dsa::aperture_gain_db(lambda * lambda, lambda),
                6.02, 0.01);
}

TEST(Aperture, EnclosingDiscOfScatterers) {
    auto make = [](double r) {
        dsa::ArrayGeometry g;
        g.wire_radius = lambda / 1000;
        g.num_active = 1;
        g.elements.push_back({dsa::Vec3::Zero(), lambda / 2, dsa::Role::Active});
        for (int j = 0; j < 8; ++j) {
            const double a = 2 * M_PI * j / 8;
            g.elements.push_back({dsa::Vec3(r * std::cos(a), r * std::sin(a), 0), lambda / 2, dsa::Role::Scatterer});
        }
        return g;
    };
    // viewed along z the disc has radius r
    const double r = lambda;
    EXPECT_NEAR(dsa::aperture_baseline_gain(make(r), f0, dsa::Vec3::UnitZ()),
                dsa::aperture_gain_db(M_PI * r * r, lambda), 1e-9);
    EXPECT_NEAR(dsa::aperture_baseline_gain(make(2 * r), f0, dsa::Vec3::UnitZ()) -
                    dsa::aperture_baseline_gain(make(r), f0, dsa::Vec3::UnitZ()),
                6.0206, 1e-3);
}

TEST(Aperture, MinimalEnclosingCircleAgainstBruteForce) {
    std::mt19937 rng(17);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Eigen::Vector2d> pts;
        for (int i = 0; i < 25; ++i) pts.emplace_back(d(rng), d(rng));
        const auto c = dsa::detail::min_enclosing_circle(pts);
        for (const auto& p : pts) EXPECT_LE((p - c.c).norm(), c.r * (1 + 1e-9));
        // no smaller circle through pairs or triples encloses everything
        double best = 1e300;
        const auto encloses = [&](const dsa::detail::Circle& cc) {
            for (const auto& p : pts)
                if ((p - cc.c).norm() > cc.r * (1 + 1e-9)) return false;
            return true;
        };
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const auto c2 = dsa::detail::circle_from(pts[i], pts[j]);
                if (encloses(c2)) best = std::min(best, c2.r);
                for (std::size_t k = j + 1; k < pts.size(); ++k) {
                    const auto c3 = dsa::detail::circle_from(pts[i], pts[j], pts[k]);
                    if (encloses(c3)) best = std::min(best, c3.r);
                }
            }
        EXPECT_NEAR(c.r, best, 1e-9 * best);
    }
}

}  // namespace
